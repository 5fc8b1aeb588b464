#include <algorithm>
#include <cmath>

#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

namespace {

struct LiveTrack {
  Track track;
  KalmanCv filter;
  std::size_t hits = 0;    // consecutive
  std::size_t misses = 0;  // consecutive
  std::size_t last_hit = 0;
};

void finalize(LiveTrack& live, TrackStatus status, std::vector<Track>& out) {
  live.track.states.resize(live.last_hit + 1);
  live.track.status = status;
  out.push_back(std::move(live.track));
}

}  // namespace

std::vector<Track> track_frames(const Session& session, const TrackerConfig& cfg) {
  std::vector<Track> finished;
  std::vector<LiveTrack> live;
  std::uint32_t next_id = 1;
  std::vector<Eigen::Vector2d> predicted;

  for (const Frame& frame : session.frames) {
    const std::vector<Detection> detections = dbscan(frame.points, frame.t, cfg.dbscan);

    predicted.clear();
    for (const LiveTrack& lt : live) {
      const double dt = frame.t - lt.track.states.back().t;
      const auto& s = lt.filter.state();
      predicted.emplace_back(s(0) + s(2) * dt, s(1) + s(3) * dt);
    }

    const AssociationResult assoc = associate(predicted, detections, cfg.gate);

    for (const auto& [slot, det] : assoc.matches) {
      LiveTrack& lt = live[slot];
      kalman_step(lt.track, lt.filter, &detections[det], frame.t);
      ++lt.hits;
      lt.misses = 0;
      lt.last_hit = lt.track.states.size() - 1;
      if (lt.track.status == TrackStatus::tentative && lt.hits >= cfg.confirm_hits)
        lt.track.status = TrackStatus::confirmed;
    }
    for (std::size_t slot : assoc.unmatched_tracks) {
      LiveTrack& lt = live[slot];
      kalman_step(lt.track, lt.filter, nullptr, frame.t);
      lt.hits = 0;
      ++lt.misses;
    }

    // A miss ends a tentative track; confirmed tracks coast for up to
    // kill_misses frames.
    std::vector<LiveTrack> keep;
    keep.reserve(live.size() + assoc.unmatched_detections.size());
    for (LiveTrack& lt : live) {
      const bool confirmed = lt.track.status == TrackStatus::confirmed;
      if (lt.misses == 0 || (confirmed && lt.misses < cfg.kill_misses)) {
        keep.push_back(std::move(lt));
      } else if (confirmed) {
        finalize(lt, TrackStatus::dead, finished);
      }
    }
    for (std::size_t det : assoc.unmatched_detections) {
      const Detection& d = detections[det];
      // a body often splits into torso and limb clusters; fold the fragment
      // into the nearest track updated this frame instead of spawning
      LiveTrack* host = nullptr;
      double best = cfg.absorb_radius;
      for (LiveTrack& lt : keep) {
        if (lt.misses != 0) continue;
        const TrackState& s = lt.track.states.back();
        const double dist = std::hypot(s.x - d.centroid_x, s.y - d.centroid_y);
        if (dist <= best) {
          best = dist;
          host = &lt;
        }
      }
      if (host) {
        auto& pts = host->track.states.back().points;
        pts.insert(pts.end(), d.points.begin(), d.points.end());
        continue;
      }
      LiveTrack lt{Track{}, KalmanCv(d.centroid_x, d.centroid_y, cfg.sigma_a, cfg.sigma_m)};
      lt.track.id = next_id++;
      kalman_step(lt.track, lt.filter, &d, frame.t);
      lt.hits = 1;
      lt.last_hit = 0;
      if (cfg.confirm_hits <= 1) lt.track.status = TrackStatus::confirmed;
      keep.push_back(std::move(lt));
    }
    live = std::move(keep);
  }

  for (LiveTrack& lt : live) {
    if (lt.track.status == TrackStatus::confirmed) finalize(lt, TrackStatus::confirmed, finished);
  }
  std::sort(finished.begin(), finished.end(),
            [](const Track& a, const Track& b) { return a.id < b.id; });
  return finished;
}

}  // namespace gaitpipe
