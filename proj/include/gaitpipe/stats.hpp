#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaitpipe/segmenter.hpp"
#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

/// n subjects x k raters, row-major, no missing values.
class RatingsMatrix {
 public:
  RatingsMatrix(std::size_t n, std::size_t k);
  explicit RatingsMatrix(const std::vector<std::vector<double>>& rows);

  std::size_t subjects() const { return n_; }
  std::size_t raters() const { return k_; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * k_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return v_[i * k_ + j]; }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> v_;
};

/// Two-way ANOVA mean squares.
struct AnovaTable {
  double msr = 0.0;  // rows (subjects)
  double msc = 0.0;  // columns (raters)
  double mse = 0.0;  // residual
  std::size_t n = 0;
  std::size_t k = 0;
};

AnovaTable two_way_anova(const RatingsMatrix& m);

struct IccResult {
  double icc = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool degenerate = false;  // no variance at all: ICC taken as 1
  bool negative() const { return icc < 0.0; }
};

/// Absolute agreement, average of k raters, 95% CI.
/// Throws DegenerateInputError when n < 2 or k < 2.
IccResult icc2k(const RatingsMatrix& m);

/// Consistency, average of k raters, 95% CI.
IccResult icc3k(const RatingsMatrix& m);

// ---------------------------------------------------------------------------

struct ErrorPair {
  double estimate = 0.0;   // m
  double reference = 0.0;  // m, > 0
  std::string walk_type;
};

struct ErrorRow {
  std::size_t count = 0;
  double mean_abs_cm = 0.0;
  double sd_abs_cm = 0.0;
  double mean_pct = 0.0;
  double sd_pct = 0.0;
};

struct ErrorSummary {
  std::map<std::string, ErrorRow> by_type;
  ErrorRow overall;
};

/// SDs are sample SDs (n - 1), 0 for a single pair.
ErrorSummary error_table(const std::vector<ErrorPair>& pairs);

struct DetectionEntry {
  std::string walk_type;
  bool detected = false;
};

struct DetectionRate {
  std::size_t total = 0;
  std::size_t detected = 0;
  double rate = 0.0;
  std::map<std::string, DetectionRate> by_type;
};

DetectionRate detection_rate(const std::vector<DetectionEntry>& walks);

/// One room's daily averages over consecutive days (nullopt = no data).
struct RoomDays {
  std::string room;
  std::vector<std::optional<double>> daily;
};

struct IntervalIcc {
  int interval_days = 0;
  std::size_t rooms_used = 0;
  std::optional<IccResult> icc;  // nullopt when fewer than two rooms remain
};

/// For each interval length L in [min_days, max_days], average days [0, L)
/// and [L, 2L) per room, drop rooms missing either window, and compute
/// ICC(2,k) over rooms x 2 windows.
std::vector<IntervalIcc> interval_reliability(const std::vector<RoomDays>& rooms, int min_days = 2,
                                              int max_days = 7);

struct ValidTrackStats {
  std::map<std::string, double> percent_by_home;
  double mean = 0.0;
  double sd = 0.0;
};

/// Percentage of segments that are valid, per home; mean and sample SD over
/// homes with at least one segment.
ValidTrackStats valid_track_stats(const std::map<std::string, std::vector<LinearSegment>>& segments);

/// Fixed-extent occupancy grid. Row 0 is the cell nearest the radar.
struct Heatmap {
  double cell = 0.25;
  double x_min = -4.0;
  double x_max = 4.0;
  double y_min = 0.0;
  double y_max = 8.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<std::size_t> counts;  // ny rows of nx

  std::size_t at(std::size_t ix, std::size_t iy) const { return counts[iy * nx + ix]; }
};

/// Counts track-state visits per cell; states outside the extent are ignored.
/// Throws ConfigError when cell <= 0.
Heatmap occupancy_heatmap(const std::vector<Track>& tracks, double cell, double x_min = -4.0,
                          double x_max = 4.0, double y_min = 0.0, double y_max = 8.0);

/// Header row of cell-centre x values, then one row per y with its centre first.
std::string format_heatmap_csv(const Heatmap& h);

/// Subjects x raters CSV (optional header row of non-numeric cells).
RatingsMatrix parse_ratings_csv(const std::string& text);

}  // namespace gaitpipe
