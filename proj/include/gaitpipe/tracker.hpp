#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gaitpipe/pointcloud.hpp"

namespace gaitpipe {

struct DbscanConfig {
  double eps = 0.4;                   // meters, Euclidean in (x, y, z)
  std::size_t min_pts = 3;            // neighbourhood size (self included) for a core point
  std::size_t min_cluster_size = 5;   // smaller clusters are treated as pets/clutter
};

struct TrackerConfig {
  DbscanConfig dbscan;
  double gate = 1.0;          // meters
  double sigma_a = 2.0;       // white-acceleration process noise, m/s^2
  double sigma_m = 0.15;      // measurement noise, m
  std::size_t confirm_hits = 3;
  std::size_t kill_misses = 5;
  double absorb_radius = 0.5;  // leftover detections this close to an updated track are limb fragments
};

struct Detection {
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double t = 0.0;
  std::vector<RadarPoint> points;
};

/// Cluster label per point: -1 for noise, otherwise 0..k-1 numbered by the
/// lowest-index core point of each cluster. Border points reachable from
/// several clusters join the cluster of their nearest core point, which
/// makes the partition independent of input order.
std::vector<int> dbscan_labels(std::span<const RadarPoint> points, double eps, std::size_t min_pts);

/// DBSCAN followed by the minimum-cluster-size filter. Detections are
/// ordered by cluster label.
std::vector<Detection> dbscan(std::span<const RadarPoint> points, double t, const DbscanConfig& cfg);

// ---------------------------------------------------------------------------
// Assignment

/// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Minimum-cost assignment (Hungarian / shortest augmenting path). Returns,
/// for every row, the assigned column or -1. Matches min(rows, cols) pairs.
std::vector<int> solve_assignment(const CostMatrix& cost);

/// Sum of cost(r, assignment[r]) over assigned rows, in row order.
double assignment_cost(const CostMatrix& cost, std::span<const int> assignment);

struct AssociationResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track slot, detection index)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
};

/// Gated association of predicted track positions to detection centroids.
/// Pairs farther apart than `gate` are forbidden. Among assignments with
/// the most allowed pairs the total distance is minimal; equal-cost optima
/// resolve to the lexicographically smallest (track slot, detection index)
/// sequence.
AssociationResult associate(std::span<const Eigen::Vector2d> predicted,
                            std::span<const Detection> detections, double gate);

// ---------------------------------------------------------------------------
// Kalman filter

/// Constant-velocity filter over (x, y, vx, vy).
class KalmanCv {
 public:
  using State = Eigen::Matrix<double, 4, 1>;
  using Cov = Eigen::Matrix<double, 4, 4>;

  KalmanCv(double x, double y, double sigma_a, double sigma_m, double initial_speed_sigma = 1.5);

  void predict(double dt);
  void update(double mx, double my);

  const State& state() const noexcept { return x_; }
  const Cov& covariance() const noexcept { return p_; }
  Eigen::Vector2d position() const { return x_.head<2>(); }

  void set_state(const State& x) { x_ = x; }

 private:
  State x_;
  Cov p_;
  double sigma_a_;
  double sigma_m_;
};

// ---------------------------------------------------------------------------
// Tracks

enum class TrackStatus { tentative, confirmed, dead };

struct TrackState {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::vector<RadarPoint> points;  // assigned cluster; empty on a missed frame
};

struct Track {
  std::uint32_t id = 0;
  std::vector<TrackState> states;
  TrackStatus status = TrackStatus::tentative;
};

/// One Kalman cycle for `track`: predict from the last state time to `t`
/// (dt = t - last time, must be positive), then update with the detection
/// when present. Appends the resulting state, stamped exactly `t`.
void kalman_step(Track& track, KalmanCv& filter, const Detection* detection, double t);

/// Runs detection, association and filtering over every frame. Returns the
/// confirmed tracks (alive or dead at session end) ordered by id. Trailing
/// coasted states after a track's last hit are trimmed.
std::vector<Track> track_frames(const Session& session, const TrackerConfig& cfg);

}  // namespace gaitpipe
