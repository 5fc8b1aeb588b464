#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

struct SegmenterConfig {
  double epsilon = 0.5;            // RDP tolerance, m
  double min_length = 2.0;         // D, m
  double max_angle_deg = 15.0;     // gamma, degrees
  double clinic_tol = 1.0;         // endpoint tolerance around g_s / g_e, m
  double clinic_time_window = 10.0;  // max |segment start - logged start|, s
};

struct SegmentGeometry {
  double r_start = 0.0;
  double r_end = 0.0;
  double d = 0.0;
  std::optional<double> theta_deg;  // empty for a degenerate (d == 0) segment
};

struct LinearSegment {
  std::uint32_t parent_track = 0;
  std::size_t seg_index = 0;
  std::vector<TrackState> states;  // contiguous slice of the parent track
  SegmentGeometry geometry;
  bool valid = false;

  double t_start() const { return states.front().t; }
  double t_end() const { return states.back().t; }
};

/// Ramer-Douglas-Peucker over the polyline, iterative. Returns the kept
/// vertex indices in increasing order; the first and last are always kept
/// and every dropped vertex is within `epsilon` of the segment joining its
/// enclosing kept vertices. Throws DegenerateInputError for fewer than two
/// vertices or a non-positive epsilon.
std::vector<std::size_t> rdp_decimate(std::span<const Eigen::Vector2d> polyline, double epsilon);

/// Range to each endpoint, endpoint distance and radial misalignment angle:
/// the rotation about the radially farther endpoint that points the segment
/// straight at (or away from) the radar.
SegmentGeometry segment_geometry(double x0, double y0, double xn, double yn);
SegmentGeometry segment_geometry(const LinearSegment& segment);

/// d >= min_length and theta <= max_angle. Degenerate segments are invalid.
bool classify(const SegmentGeometry& geometry, double min_length, double max_angle_deg);

/// Splits a track (>= 2 states) at its RDP vertices. Consecutive segments
/// share their boundary state. Geometry and validity are filled in.
std::vector<LinearSegment> split_track(const Track& track, const SegmenterConfig& cfg);

// ---------------------------------------------------------------------------
// Clinic walks

enum class WalkType { control, fast, narrow, obstacle, dual_task };

const char* to_string(WalkType type);
WalkType walk_type_from_string(const std::string& text);

struct WalkEntry {
  std::string participant;
  int walk_index = 0;
  WalkType walk_type = WalkType::control;
  double t_start = 0.0;
  std::optional<double> reference_step_length;  // meters
};

struct WalkLog {
  std::vector<WalkEntry> entries;
  Eigen::Vector2d g_s{0.0, 6.03};
  Eigen::Vector2d g_e{0.0, 2.03};
};

/// JSONL: header {"format":"gaitpipe-walklog","version":1,"g_s":[x,y],"g_e":[x,y]}
/// then one entry per line {"participant","walk_index","walk_type","t_start",
/// "reference_step_length"(optional)}.
WalkLog parse_walklog(std::istream& in);
WalkLog read_walklog(const std::filesystem::path& path);
void write_walklog(const WalkLog& log, std::ostream& out);
void write_walklog(const WalkLog& log, const std::filesystem::path& path);

struct ClinicMatch {
  WalkEntry walk;
  std::optional<LinearSegment> segment;  // empty: no candidate ("missed")
};

/// For each logged walk, the track slice that starts within tol of g_s, ends
/// within tol of g_e and whose start time is nearest the logged start.
/// Matched segments carry the same geometry and validity as home segments.
std::vector<ClinicMatch> match_clinic_walks(std::span<const Track> tracks, const WalkLog& log,
                                            const SegmenterConfig& cfg);

}  // namespace gaitpipe
