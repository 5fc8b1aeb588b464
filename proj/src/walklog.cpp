#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/jsontext.hpp"
#include "gaitpipe/segmenter.hpp"

namespace gaitpipe {

namespace {

using nlohmann::json;

Eigen::Vector2d read_point(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number())
    throw FormatError(std::string("'") + key + "' must be [x, y]", line);
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

}  // namespace

const char* to_string(WalkType type) {
  switch (type) {
    case WalkType::control: return "control";
    case WalkType::fast: return "fast";
    case WalkType::narrow: return "narrow";
    case WalkType::obstacle: return "obstacle";
    case WalkType::dual_task: return "dual_task";
  }
  return "control";
}

WalkType walk_type_from_string(const std::string& text) {
  for (WalkType t : {WalkType::control, WalkType::fast, WalkType::narrow, WalkType::obstacle,
                     WalkType::dual_task}) {
    if (text == to_string(t)) return t;
  }
  throw FormatError("unknown walk type '" + text + "'");
}

WalkLog parse_walklog(std::istream& in) {
  WalkLog log;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  std::set<std::pair<std::string, double>> seen;

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
      if (obj.value("format", "") != "gaitpipe-walklog") throw FormatError("not a gaitpipe-walklog file", line);
      if (obj.value("version", 0) != 1) throw FormatError("unsupported walklog version", line);
      log.g_s = read_point(obj, "g_s", line);
      log.g_e = read_point(obj, "g_e", line);
      have_header = true;
      continue;
    }

    WalkEntry e;
    try {
      e.participant = obj.at("participant").get<std::string>();
      e.walk_index = obj.at("walk_index").get<int>();
      e.walk_type = walk_type_from_string(obj.at("walk_type").get<std::string>());
      e.t_start = obj.at("t_start").get<double>();
      auto ref = obj.find("reference_step_length");
      if (ref != obj.end() && !ref->is_null()) e.reference_step_length = ref->get<double>();
    } catch (const json::exception& ex) {
      throw FormatError(std::string("bad walk entry: ") + ex.what(), line);
    } catch (const FormatError& ex) {
      throw FormatError(ex.what(), line);
    }
    if (!std::isfinite(e.t_start)) throw FormatError("t_start is not finite", line);
    if (!seen.emplace(e.participant, e.t_start).second)
      throw FormatError("duplicate t_start for participant " + e.participant, line);
    log.entries.push_back(std::move(e));
  }
  if (!have_header) throw FormatError("missing walklog header", line ? line : 1);
  return log;
}

WalkLog read_walklog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_walklog(in);
}

void write_walklog(const WalkLog& log, std::ostream& out) {
  json header = {{"format", "gaitpipe-walklog"},
                 {"version", 1},
                 {"g_s", {log.g_s.x(), log.g_s.y()}},
                 {"g_e", {log.g_e.x(), log.g_e.y()}}};
  out << dump_json(header) << '\n';
  for (const WalkEntry& e : log.entries) {
    json row = {{"participant", e.participant},
                {"walk_index", e.walk_index},
                {"walk_type", to_string(e.walk_type)},
                {"t_start", e.t_start},
                {"reference_step_length", nullptr}};
    if (e.reference_step_length) row["reference_step_length"] = *e.reference_step_length;
    out << dump_json(row) << '\n';
  }
  if (!out) throw IoError("walklog write failed");
}

void write_walklog(const WalkLog& log, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_walklog(log, buf);
  write_file_atomic(path, buf.str());
}

}  // namespace gaitpipe
