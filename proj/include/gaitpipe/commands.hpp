#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gaitpipe/pipeline.hpp"

namespace gaitpipe {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;  // format, config or missing-key errors

struct SimulateOptions {
  std::string scenario;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  std::optional<double> base_speed;
  std::optional<double> step_period;
  bool mirror_x = false;
};

struct ProcessOptions {
  std::filesystem::path input;  // session file or directory of sessions
  std::optional<std::filesystem::path> config;
  Mode mode = Mode::home;
  std::optional<std::filesystem::path> walklog;
  std::filesystem::path out;
  unsigned jobs = 1;
  // per-parameter overrides, applied after the config file
  std::optional<double> epsilon, D, gamma, Z_torso, R, nms_window;
  std::optional<std::string> distance_mode;
};

struct EvaluateOptions {
  std::filesystem::path results;  // directory holding walks.jsonl
  std::optional<std::filesystem::path> truth;      // directory holding walklog.jsonl
  std::optional<std::filesystem::path> reference;  // CSV
  std::filesystem::path out;
};

struct IccOptions {
  std::filesystem::path input;  // subjects x raters CSV
  std::optional<std::filesystem::path> out;
};

// Each throws the library's error types; run_cli maps them to exit codes.
void cmd_simulate(const SimulateOptions& opt);
void cmd_process(const ProcessOptions& opt);
void cmd_evaluate(const EvaluateOptions& opt);
std::string cmd_icc(const IccOptions& opt);

/// Config file (or defaults) with flag overrides applied and validated.
PipelineConfig resolve_config(const ProcessOptions& opt);

/// Session files of a directory (sorted by name), or the file itself.
std::vector<std::filesystem::path> session_inputs(const std::filesystem::path& input);

int run_cli(int argc, char** argv);

}  // namespace gaitpipe
