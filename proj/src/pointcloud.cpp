#include "gaitpipe/pointcloud.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/jsontext.hpp"

namespace gaitpipe {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "gaitpipe-frames";
constexpr int kFormatVersion = 1;

double finite_number(const json& value, const char* what, std::size_t line) {
  if (!value.is_number()) throw FormatError(std::string(what) + " must be a number", line);
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw FormatError(std::string(what) + " is not finite", line);
  return v;
}

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string("missing field '") + key + "'", line);
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_string()) throw FormatError(std::string("field '") + key + "' must be a string", line);
  return v.get<std::string>();
}

}  // namespace

const char* to_string(Site site) { return site == Site::clinic ? "clinic" : "home"; }

Site site_from_string(const std::string& text) {
  if (text == "clinic") return Site::clinic;
  if (text == "home") return Site::home;
  throw FormatError("unknown site '" + text + "'");
}

double quantize6(double value) { return std::round(value * 1e6) / 1e6; }

std::string format_fixed(double value, int digits) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, digits);
  if (ec != std::errc{}) throw IoError("number not representable: " + std::to_string(value));
  std::string out(buf, end);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

ReadReport parse_session(std::istream& in) {
  ReadReport report;
  Session& session = report.session;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;

  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;

    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw FormatError("expected a JSON object", line);

    if (!have_header) {
      if (require_string(obj, "format", line) != kFormatName)
        throw FormatError("not a gaitpipe-frames file", line);
      const json& version = require(obj, "version", line);
      if (!version.is_number_integer() || version.get<int>() != kFormatVersion)
        throw FormatError("unsupported format version", line);
      session.frame_rate = finite_number(require(obj, "frame_rate", line), "frame_rate", line);
      if (session.frame_rate <= 0.0) throw FormatError("frame_rate must be positive", line);
      try {
        session.site = site_from_string(require_string(obj, "site", line));
      } catch (const FormatError& e) {
        throw FormatError(e.what(), line);
      }
      session.room_label = require_string(obj, "room", line);
      session.device_id = require_string(obj, "device", line);
      have_header = true;
      continue;
    }

    Frame frame;
    frame.t = finite_number(require(obj, "t", line), "t", line);
    if (frame.t < 0.0) throw FormatError("frame time must be non-negative", line);
    if (!session.frames.empty() && !(frame.t > session.frames.back().t))
      throw NonMonotonicTimeError("frame time " + format_fixed(frame.t) +
                                      " does not exceed previous " +
                                      format_fixed(session.frames.back().t),
                                  line);

    const json& pts = require(obj, "pts", line);
    if (!pts.is_array()) throw FormatError("'pts' must be an array", line);
    frame.points.reserve(pts.size());
    for (const json& p : pts) {
      if (!p.is_array() || p.size() != 4)
        throw FormatError("each point must be [x, y, z, s]", line);
      RadarPoint rp{finite_number(p[0], "x", line), finite_number(p[1], "y", line),
                    finite_number(p[2], "z", line), finite_number(p[3], "s", line)};
      if (rp.y < 0.0) {
        ++report.dropped_points;
        continue;
      }
      frame.points.push_back(rp);
    }
    session.frames.push_back(std::move(frame));
  }
  if (!have_header) throw FormatError("missing header line", line ? line : 1);
  return report;
}

ReadReport read_session(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_session(in);
}

void write_session(const Session& session, std::ostream& out) {
  json header = {{"format", kFormatName},
                 {"version", kFormatVersion},
                 {"frame_rate", session.frame_rate},
                 {"site", to_string(session.site)},
                 {"room", session.room_label},
                 {"device", session.device_id}};
  out << dump_json(header) << '\n';

  std::string line;
  for (const Frame& frame : session.frames) {
    line.clear();
    line += "{\"t\":";
    line += format_fixed(frame.t);
    line += ",\"pts\":[";
    for (std::size_t i = 0; i < frame.points.size(); ++i) {
      const RadarPoint& p = frame.points[i];
      if (i) line += ',';
      line += '[';
      line += format_fixed(p.x);
      line += ',';
      line += format_fixed(p.y);
      line += ',';
      line += format_fixed(p.z);
      line += ',';
      line += format_fixed(p.s);
      line += ']';
    }
    line += "]}\n";
    out << line;
  }
  if (!out) throw IoError("write failed");
}

void write_session(const Session& session, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_session(session, buf);
  write_file_atomic(path, buf.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

}  // namespace gaitpipe
