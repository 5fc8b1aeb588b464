#include "gaitpipe/outputs.hpp"

#include <cmath>

#include "gaitpipe/jsontext.hpp"

namespace gaitpipe {

double round6(double v) { return quantize6(v); }

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(round6(*v)) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json walk_json(const WalkRecord& rec, const std::string& session) {
  using nlohmann::json;
  const WalkResult& r = rec.result;
  json j = json::object();
  j["session"] = session;
  if (rec.walk) {
    j["participant"] = rec.walk->participant;
    j["walk_index"] = rec.walk->walk_index;
    j["walk_type"] = to_string(rec.walk->walk_type);
    j["matched"] = rec.matched;
  }
  if (rec.walk && !rec.matched) {
    j["track_id"] = nullptr;
    j["seg_index"] = nullptr;
  } else {
    j["track_id"] = r.track_id;
    j["seg_index"] = r.seg_index;
  }
  j["t_start"] = round6(r.t_start);
  j["direction"] = r.direction;
  j["n_peaks"] = r.n_peaks;
  json steps = json::array();
  for (const StepMeasurement& s : r.steps)
    steps.push_back({{"len_m", round6(s.step_length)}, {"time_s", round6(s.step_time)}});
  j["steps"] = std::move(steps);
  j["avg_step_len_m"] = opt(r.avg_step_length);
  if (rec.suppressed_steps) j["suppressed_steps"] = rec.suppressed_steps;
  return j;
}

std::string format_walks_jsonl(const std::vector<SessionResult>& results) {
  std::string out;
  for (const SessionResult& s : results)
    for (const WalkRecord& w : s.walks) out += dump_json(walk_json(w, s.name)) + '\n';
  return out;
}

std::string format_segments_csv(const std::vector<SessionResult>& results) {
  std::string out = "session,track_id,seg_index,t_start,t_end,d_m,theta_deg,valid\n";
  for (const SessionResult& s : results) {
    for (const LinearSegment& seg : s.segments) {
      const auto& g = seg.geometry;
      out += s.name + ',' + std::to_string(seg.parent_track) + ',' + std::to_string(seg.seg_index) + ',' +
             format_fixed(seg.t_start()) + ',' + format_fixed(seg.t_end()) + ',' + format_fixed(g.d) + ',' +
             (g.theta_deg ? format_fixed(*g.theta_deg) : std::string()) + ',' + (seg.valid ? "1" : "0") + '\n';
    }
  }
  return out;
}

std::string format_tracks_jsonl(const std::vector<SessionResult>& results) {
  std::string out;
  for (const SessionResult& s : results) {
    for (const Track& track : s.tracks) {
      for (const TrackState& st : track.states) {
        out += "{\"session\":" + nlohmann::json(s.name).dump() + ",\"track_id\":" + std::to_string(track.id) +
               ",\"t\":" + format_fixed(st.t) + ",\"x\":" + format_fixed(st.x) + ",\"y\":" + format_fixed(st.y) +
               ",\"n_points\":" + std::to_string(st.points.size()) + "}\n";
      }
    }
  }
  return out;
}

std::map<std::string, Heatmap> room_heatmaps(const std::vector<SessionResult>& results, double cell) {
  std::map<std::string, std::vector<Track>> by_room;
  for (const SessionResult& s : results) {
    auto& pool = by_room[s.session.room_label.empty() ? "room" : s.session.room_label];
    pool.insert(pool.end(), s.tracks.begin(), s.tracks.end());
  }
  std::map<std::string, Heatmap> out;
  for (const auto& [room, tracks] : by_room) out.emplace(room, occupancy_heatmap(tracks, cell));
  return out;
}

std::string format_error_table_csv(const ErrorSummary& summary) {
  std::string out = "walk_type,n,mean_abs_error_cm,sd_abs_error_cm,mean_pct_error,sd_pct_error\n";
  auto row = [&](const std::string& name, const ErrorRow& r) {
    out += name + ',' + std::to_string(r.count) + ',' + format_fixed(r.mean_abs_cm, 4) + ',' +
           format_fixed(r.sd_abs_cm, 4) + ',' + format_fixed(r.mean_pct, 4) + ',' + format_fixed(r.sd_pct, 4) + '\n';
  };
  for (const auto& [type, r] : summary.by_type) row(type, r);
  row("overall", summary.overall);
  return out;
}

nlohmann::json error_summary_json(const ErrorSummary& summary) {
  auto row = [](const ErrorRow& r) {
    return nlohmann::json{{"n", r.count},
                          {"mean_abs_error_cm", round6(r.mean_abs_cm)},
                          {"sd_abs_error_cm", round6(r.sd_abs_cm)},
                          {"mean_pct_error", round6(r.mean_pct)},
                          {"sd_pct_error", round6(r.sd_pct)}};
  };
  nlohmann::json j;
  j["overall"] = row(summary.overall);
  j["by_type"] = nlohmann::json::object();
  for (const auto& [type, r] : summary.by_type) j["by_type"][type] = row(r);
  return j;
}

nlohmann::json detection_json(const DetectionRate& rate) {
  nlohmann::json j{{"total", rate.total}, {"detected", rate.detected}, {"rate", round6(rate.rate)}};
  j["by_type"] = nlohmann::json::object();
  for (const auto& [type, r] : rate.by_type)
    j["by_type"][type] = {{"total", r.total}, {"detected", r.detected}, {"rate", round6(r.rate)}};
  return j;
}

nlohmann::json icc_json(const IccResult& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(round6(v)) : nlohmann::json(nullptr); };
  return {{"icc", num(r.icc)},
          {"ci_low", num(r.ci_low)},
          {"ci_high", num(r.ci_high)},
          {"negative", r.negative()},
          {"degenerate", r.degenerate}};
}

nlohmann::json process_report(const std::vector<SessionResult>& results, const PipelineConfig& cfg, Mode mode) {
  using nlohmann::json;
  json report;
  report["mode"] = to_string(mode);
  report["n_sessions"] = results.size();

  std::size_t n_walks = 0, n_measured = 0, n_segments = 0, n_valid = 0;
  std::map<std::string, std::vector<LinearSegment>> segs_by_room;
  std::vector<DetectionEntry> detections;
  std::vector<ErrorPair> pairs;
  json sessions = json::array();
  for (const SessionResult& s : results) {
    std::size_t valid = 0, measured = 0;
    for (const LinearSegment& seg : s.segments) valid += seg.valid;
    for (const WalkRecord& w : s.walks) {
      measured += w.result.avg_step_length.has_value();
      if (w.walk) {
        detections.push_back({to_string(w.walk->walk_type), w.result.avg_step_length.has_value()});
        if (w.result.avg_step_length && w.walk->reference_step_length)
          pairs.push_back({*w.result.avg_step_length, *w.walk->reference_step_length, to_string(w.walk->walk_type)});
      }
    }
    auto& room = segs_by_room[s.session.room_label];
    room.insert(room.end(), s.segments.begin(), s.segments.end());
    n_walks += s.walks.size();
    n_measured += measured;
    n_segments += s.segments.size();
    n_valid += valid;
    sessions.push_back({{"session", s.name},
                        {"site", to_string(s.session.site)},
                        {"room", s.session.room_label},
                        {"dropped_points", s.dropped_points},
                        {"n_tracks", s.tracks.size()},
                        {"n_segments", s.segments.size()},
                        {"n_valid_segments", valid},
                        {"n_walks", s.walks.size()},
                        {"n_measured", measured}});
  }
  report["n_walks"] = n_walks;
  report["n_measured"] = n_measured;
  report["n_segments"] = n_segments;
  report["n_valid_segments"] = n_valid;
  report["sessions"] = std::move(sessions);

  if (mode == Mode::home) {
    const ValidTrackStats vt = valid_track_stats(segs_by_room);
    json by_room = json::object();
    for (const auto& [room, pct] : vt.percent_by_home) by_room[room] = round6(pct);
    report["valid_track_percent"] = {{"by_room", by_room}, {"mean", round6(vt.mean)}, {"sd", round6(vt.sd)}};
  } else {
    report["detection_rate"] = detection_json(detection_rate(detections));
    if (!pairs.empty()) report["error"] = error_summary_json(error_table(pairs));
  }

  json params;
  params["epsilon"] = cfg.segmenter.epsilon;
  params["D"] = cfg.segmenter.min_length;
  params["gamma"] = cfg.segmenter.max_angle_deg;
  params["Z_torso"] = cfg.gait.z_torso;
  params["R"] = cfg.gait.min_peak_gap;
  params["nms_window"] = cfg.gait.nms_window;
  params["distance_mode"] = to_string(cfg.gait.distance_mode);
  report["parameters"] = params;
  return report;
}

}  // namespace gaitpipe
