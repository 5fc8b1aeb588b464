#include "gaitpipe/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/jsontext.hpp"
#include "gaitpipe/outputs.hpp"
#include "gaitpipe/simulator.hpp"
#include "gaitpipe/stats.hpp"

namespace gaitpipe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

bool is_session_file(const fs::path& path) {
  std::ifstream in(path);
  std::string first;
  if (!in || !std::getline(in, first)) return false;
  const json header = json::parse(first, nullptr, false);
  return header.is_object() && header.value("format", "") == "gaitpipe-frames";
}

}  // namespace

std::vector<fs::path> session_inputs(const fs::path& input) {
  if (!fs::exists(input)) throw IoError("input not found: " + input.string());
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl" && is_session_file(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no session files in " + input.string());
  return files;
}

// ---------------------------------------------------------------------------

void cmd_simulate(const SimulateOptions& opt) {
  SceneSpec scene = scenario(opt.scenario, opt.seed, {opt.base_speed, opt.step_period});
  scene.mirror_x = opt.mirror_x;
  const Simulation sim = simulate(scene);
  ensure_dir(opt.out);
  write_session(sim.session, opt.out / "session.jsonl");
  write_file_atomic(opt.out / "truth.jsonl", format_ground_truth(sim.truth));
  if (sim.walklog) write_walklog(*sim.walklog, opt.out / "walklog.jsonl");
}

PipelineConfig resolve_config(const ProcessOptions& opt) {
  PipelineConfig cfg = opt.config ? load_config(*opt.config) : PipelineConfig{};
  if (opt.epsilon) cfg.segmenter.epsilon = *opt.epsilon;
  if (opt.D) cfg.segmenter.min_length = *opt.D;
  if (opt.gamma) cfg.segmenter.max_angle_deg = *opt.gamma;
  if (opt.Z_torso) cfg.gait.z_torso = *opt.Z_torso;
  if (opt.R) cfg.gait.min_peak_gap = *opt.R;
  if (opt.nms_window) cfg.gait.nms_window = *opt.nms_window;
  if (opt.distance_mode) cfg.gait.distance_mode = distance_mode_from_string(*opt.distance_mode);
  validate(cfg);
  return cfg;
}

void cmd_process(const ProcessOptions& opt) {
  const PipelineConfig cfg = resolve_config(opt);
  std::optional<WalkLog> walklog;
  if (opt.walklog) walklog = read_walklog(*opt.walklog);
  if (opt.mode == Mode::clinic && !walklog) throw ConfigError("clinic mode requires --walklog");

  const std::vector<fs::path> inputs = session_inputs(opt.input);
  std::vector<SessionResult> results(inputs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        ReadReport rr = read_session(inputs[i]);
        SessionResult r = process_session(rr.session, cfg, opt.mode, walklog ? &*walklog : nullptr);
        r.name = inputs[i].stem().string();
        r.dropped_points = rr.dropped_points;
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(inputs.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ensure_dir(opt.out);
  write_file_atomic(opt.out / "walks.jsonl", format_walks_jsonl(results));
  write_file_atomic(opt.out / "segments.csv", format_segments_csv(results));
  write_file_atomic(opt.out / "tracks.jsonl", format_tracks_jsonl(results));
  const json report = process_report(results, cfg, opt.mode);
  write_file_atomic(opt.out / "report.json", dump_json(report, 2) + '\n');
  if (report.contains("error")) {
    std::vector<ErrorPair> pairs;
    for (const SessionResult& s : results)
      for (const WalkRecord& w : s.walks)
        if (w.walk && w.result.avg_step_length && w.walk->reference_step_length)
          pairs.push_back({*w.result.avg_step_length, *w.walk->reference_step_length, to_string(w.walk->walk_type)});
    write_file_atomic(opt.out / "error_table.csv", format_error_table_csv(error_table(pairs)));
  }
  for (const auto& [room, heatmap] : room_heatmaps(results, cfg.reporting.heatmap_cell))
    write_file_atomic(opt.out / ("heatmap_" + room + ".csv"), format_heatmap_csv(heatmap));
}

// ---------------------------------------------------------------------------

namespace {

struct TruthWalk {
  std::string walk_type;
  std::optional<double> reference;
};

using Key = std::pair<std::string, int>;

std::map<Key, TruthWalk> truth_from_walklog(const WalkLog& log) {
  std::map<Key, TruthWalk> out;
  for (const WalkEntry& e : log.entries)
    out[{e.participant, e.walk_index}] = {to_string(e.walk_type), e.reference_step_length};
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

std::map<Key, TruthWalk> truth_from_csv(const fs::path& path) {
  std::istringstream in(slurp(path));
  std::string line;
  std::map<std::string, std::size_t> col;
  std::map<Key, TruthWalk> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (col.empty()) {
      for (std::size_t i = 0; i < cells.size(); ++i) col[cells[i]] = i;
      for (const char* need : {"participant", "walk_index", "walk_type", "reference_step_length_m"})
        if (!col.count(need)) throw FormatError(std::string("reference CSV lacks column ") + need, line_no);
      continue;
    }
    auto cell = [&](const char* name) -> const std::string& {
      const std::size_t i = col.at(name);
      if (i >= cells.size()) throw FormatError("short row", line_no);
      return cells[i];
    };
    try {
      const int idx = std::stoi(cell("walk_index"));
      const std::string& ref = cell("reference_step_length_m");
      out[{cell("participant"), idx}] = {cell("walk_type"),
                                         ref.empty() ? std::nullopt : std::optional<double>(std::stod(ref))};
    } catch (const std::logic_error&) {
      throw FormatError("bad number in reference CSV", line_no);
    }
  }
  return out;
}

}  // namespace

void cmd_evaluate(const EvaluateOptions& opt) {
  if (opt.truth.has_value() == opt.reference.has_value())
    throw ConfigError("evaluate needs exactly one of --truth or --reference");
  const std::map<Key, TruthWalk> truth =
      opt.truth ? truth_from_walklog(read_walklog(*opt.truth / "walklog.jsonl")) : truth_from_csv(*opt.reference);

  std::map<Key, std::optional<double>> estimates;
  {
    std::istringstream in(slurp(opt.results / "walks.jsonl"));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const json j = json::parse(line, nullptr, false);
      if (!j.is_object()) throw FormatError("walk record is not a JSON object", line_no);
      if (!j.contains("participant") || !j.contains("walk_index") || !j["participant"].is_string() ||
          !j["walk_index"].is_number_integer())
        throw FormatError("walk record lacks participant/walk_index", line_no);
      const Key key{j["participant"].get<std::string>(), j["walk_index"].get<int>()};
      const json& avg = j.value("avg_step_len_m", json(nullptr));
      if (!avg.is_null() && !avg.is_number()) throw FormatError("avg_step_len_m must be a number or null", line_no);
      if (!estimates.emplace(key, avg.is_null() ? std::nullopt : std::optional<double>(avg.get<double>())).second)
        throw FormatError("duplicate walk " + key.first + "/" + std::to_string(key.second), line_no);
    }
  }

  for (const auto& [key, _] : estimates)
    if (!truth.count(key))
      throw FormatError("walk " + key.first + "/" + std::to_string(key.second) + " has no reference entry");
  std::vector<DetectionEntry> detections;
  std::vector<ErrorPair> pairs;
  std::vector<std::vector<double>> rows;
  for (const auto& [key, t] : truth) {
    auto it = estimates.find(key);
    if (it == estimates.end())
      throw FormatError("reference walk " + key.first + "/" + std::to_string(key.second) + " missing from results");
    detections.push_back({t.walk_type, it->second.has_value()});
    if (it->second && t.reference) {
      pairs.push_back({*it->second, *t.reference, t.walk_type});
      rows.push_back({*it->second, *t.reference});
    }
  }

  const ErrorSummary errors = error_table(pairs);
  json icc = json::object();
  icc["n_walks"] = rows.size();
  if (rows.size() >= 2) {
    const RatingsMatrix m(rows);
    icc["icc2k"] = icc_json(icc2k(m));
    icc["icc3k"] = icc_json(icc3k(m));
  } else {
    icc["icc2k"] = nullptr;
    icc["icc3k"] = nullptr;
  }

  json report;
  report["n_walks"] = truth.size();
  report["detection_rate"] = detection_json(detection_rate(detections));
  report["error"] = error_summary_json(errors);
  report["icc"] = icc;

  ensure_dir(opt.out);
  write_file_atomic(opt.out / "report.json", dump_json(report, 2) + '\n');
  write_file_atomic(opt.out / "error_table.csv", format_error_table_csv(errors));
  write_file_atomic(opt.out / "icc.json", dump_json(icc, 2) + '\n');
}

std::string cmd_icc(const IccOptions& opt) {
  const RatingsMatrix m = parse_ratings_csv(slurp(opt.input));
  json j;
  j["n_subjects"] = m.subjects();
  j["k_raters"] = m.raters();
  j["icc2k"] = icc_json(icc2k(m));
  j["icc3k"] = icc_json(icc3k(m));
  std::string text = dump_json(j, 2) + '\n';
  if (opt.out) write_file_atomic(*opt.out, text);
  return text;
}

// ---------------------------------------------------------------------------

int run_cli(int argc, char** argv) {
  CLI::App app{"Radar gait pipeline: simulate, process, evaluate, icc"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic scene");
  simulate_cmd->add_option("--scenario", sim.scenario, "Preset name")->required();
  simulate_cmd->add_option("--seed", sim.seed, "Random seed");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();
  simulate_cmd->add_option("--base-speed", sim.base_speed, "Override v0 (m/s)");
  simulate_cmd->add_option("--step-period", sim.step_period, "Override step period (s)");
  simulate_cmd->add_flag("--mirror-x", sim.mirror_x, "Negate x of every point");
  bool list_scenarios = false;
  auto* list_cmd = app.add_subcommand("scenarios", "List scenario presets");
  list_cmd->callback([&] { list_scenarios = true; });

  ProcessOptions proc;
  std::string mode = "home";
  std::optional<std::string> config, walklog;
  auto* process_cmd = app.add_subcommand("process", "Run the pipeline on sessions");
  process_cmd->add_option("--input", proc.input, "Session file or directory")->required();
  process_cmd->add_option("--config", config, "INI config file");
  process_cmd->add_option("--mode", mode, "home or clinic")->check(CLI::IsMember({"home", "clinic"}));
  process_cmd->add_option("--walklog", walklog, "Clinic walk log");
  process_cmd->add_option("--out", proc.out, "Output directory")->required();
  process_cmd->add_option("--jobs", proc.jobs, "Worker threads")->check(CLI::PositiveNumber);
  process_cmd->add_option("--epsilon", proc.epsilon, "RDP tolerance (m)");
  process_cmd->add_option("--D", proc.D, "Minimum segment length (m)");
  process_cmd->add_option("--gamma", proc.gamma, "Maximum radial misalignment (deg)");
  process_cmd->add_option("--Z_torso", proc.Z_torso, "Torso elevation half-band (m)");
  process_cmd->add_option("--R", proc.R, "Minimum peak-to-peak time (s)");
  process_cmd->add_option("--nms_window", proc.nms_window, "NMS window (s)");
  process_cmd->add_option("--distance_mode", proc.distance_mode, "track_displacement or doppler_integral");

  EvaluateOptions eval;
  std::optional<std::string> truth, reference;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Join walk results to references");
  evaluate_cmd->add_option("--results", eval.results, "Directory with walks.jsonl")->required();
  auto* truth_opt = evaluate_cmd->add_option("--truth", truth, "Directory with walklog.jsonl");
  auto* ref_opt = evaluate_cmd->add_option("--reference", reference, "Reference CSV");
  truth_opt->excludes(ref_opt);
  evaluate_cmd->add_option("--out", eval.out, "Output directory")->required();

  IccOptions iccopt;
  std::optional<std::string> icc_out;
  auto* icc_cmd = app.add_subcommand("icc", "ICC(2,k) and ICC(3,k) of a ratings CSV");
  icc_cmd->add_option("--input", iccopt.input, "Subjects x raters CSV")->required();
  icc_cmd->add_option("--out", icc_out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (list_scenarios) {
      for (const std::string& name : scenario_names()) std::cout << name << '\n';
    } else if (*simulate_cmd) {
      cmd_simulate(sim);
    } else if (*process_cmd) {
      proc.mode = mode_from_string(mode);
      if (config) proc.config = *config;
      if (walklog) proc.walklog = *walklog;
      cmd_process(proc);
    } else if (*evaluate_cmd) {
      if (truth) eval.truth = *truth;
      if (reference) eval.reference = *reference;
      cmd_evaluate(eval);
    } else if (*icc_cmd) {
      if (icc_out) iccopt.out = *icc_out;
      const std::string text = cmd_icc(iccopt);
      if (!icc_out) std::cout << text;
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace gaitpipe
