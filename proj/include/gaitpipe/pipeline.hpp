#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaitpipe/config.hpp"
#include "gaitpipe/gaitmetrics.hpp"
#include "gaitpipe/pointcloud.hpp"
#include "gaitpipe/segmenter.hpp"
#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

enum class Mode { home, clinic };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& text);

struct WalkRecord {
  WalkResult result;
  bool analysed = false;        // a valid segment went through gait analysis
  std::size_t suppressed_steps = 0;  // dropped because another person was tracked
  // clinic mode
  std::optional<WalkEntry> walk;
  bool matched = false;
};

struct SessionResult {
  std::string name;
  Session session;  // frames cleared after processing, header kept
  std::size_t dropped_points = 0;
  std::vector<Track> tracks;
  std::vector<LinearSegment> segments;  // all home-mode segments (clinic: matched ones)
  std::vector<WalkRecord> walks;
};

/// Time intervals where at least two tracks are alive at once.
std::vector<std::pair<double, double>> multi_person_intervals(const std::vector<Track>& tracks);

/// Tracking, segmentation and gait analysis of one session. Home mode
/// analyses every valid segment and drops steps that overlap a multi-person
/// interval; clinic mode analyses the segment matched to each logged walk.
/// Throws ConfigError when clinic mode has no walk log.
SessionResult process_session(const Session& session, const PipelineConfig& cfg, Mode mode,
                              const WalkLog* walklog = nullptr);

}  // namespace gaitpipe
