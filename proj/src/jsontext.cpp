#include "gaitpipe/jsontext.hpp"

#include <charconv>
#include <cmath>

namespace gaitpipe {

namespace {

void put_float(double v, std::string& out) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  // keep floats recognisable as floats, like the default printer
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  out += s;
}

void put(const nlohmann::json& j, int indent, int depth, std::string& out) {
  using value_t = nlohmann::json::value_t;
  const bool pretty = indent >= 0;
  const std::string pad = pretty ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = pretty ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  switch (j.type()) {
    case value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += pretty ? "{\n" : "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += pretty ? ",\n" : ",";
        first = false;
        out += pad;
        out += nlohmann::json(it.key()).dump();
        out += pretty ? ": " : ":";
        put(it.value(), indent, depth + 1, out);
      }
      out += pretty ? "\n" + close_pad + "}" : "}";
      return;
    }
    case value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += pretty ? "[\n" : "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += pretty ? ",\n" : ",";
        first = false;
        out += pad;
        put(v, indent, depth + 1, out);
      }
      out += pretty ? "\n" + close_pad + "]" : "]";
      return;
    }
    case value_t::number_float:
      put_float(j.get<double>(), out);
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  put(j, indent, 0, out);
  return out;
}

}  // namespace gaitpipe
