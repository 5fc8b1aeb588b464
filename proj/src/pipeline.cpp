#include "gaitpipe/pipeline.hpp"

#include <algorithm>

#include "gaitpipe/errors.hpp"

namespace gaitpipe {

const char* to_string(Mode mode) { return mode == Mode::clinic ? "clinic" : "home"; }

Mode mode_from_string(const std::string& text) {
  if (text == "home") return Mode::home;
  if (text == "clinic") return Mode::clinic;
  throw ConfigError("unknown mode '" + text + "'");
}

std::vector<std::pair<double, double>> multi_person_intervals(const std::vector<Track>& tracks) {
  // +1 at a track's first state, -1 after its last; closed intervals, so
  // starts sort before ends at equal times.
  std::vector<std::pair<double, int>> events;
  for (const Track& t : tracks) {
    if (t.states.empty()) continue;
    events.emplace_back(t.states.front().t, -1);
    events.emplace_back(t.states.back().t, +1);
  }
  std::sort(events.begin(), events.end());
  std::vector<std::pair<double, double>> out;
  int alive = 0;
  double opened = 0.0;
  for (const auto& [t, kind] : events) {
    if (kind < 0) {
      if (++alive == 2) opened = t;
    } else {
      if (alive-- == 2) {
        if (!out.empty() && out.back().second >= opened)
          out.back().second = std::max(out.back().second, t);
        else
          out.emplace_back(opened, t);
      }
    }
  }
  return out;
}

namespace {

void suppress_steps(WalkRecord& rec, const std::vector<std::pair<double, double>>& busy) {
  if (busy.empty()) return;
  auto& steps = rec.result.steps;
  const auto overlaps = [&](const StepMeasurement& s) {
    return std::any_of(busy.begin(), busy.end(),
                       [&](const auto& iv) { return s.t_peak_a <= iv.second && s.t_peak_b >= iv.first; });
  };
  const std::size_t before = steps.size();
  steps.erase(std::remove_if(steps.begin(), steps.end(), overlaps), steps.end());
  rec.suppressed_steps = before - steps.size();
  if (rec.suppressed_steps == 0) return;
  rec.result.avg_step_length.reset();
  if (steps.size() >= 2) {
    double sum = 0.0;
    for (const auto& s : steps) sum += s.step_length;
    rec.result.avg_step_length = sum / static_cast<double>(steps.size());
  }
}

}  // namespace

SessionResult process_session(const Session& session, const PipelineConfig& cfg, Mode mode,
                              const WalkLog* walklog) {
  if (mode == Mode::clinic && walklog == nullptr) throw ConfigError("clinic mode requires a walk log");

  SessionResult out;
  out.tracks = track_frames(session, cfg.tracker);

  if (mode == Mode::home) {
    const auto busy = multi_person_intervals(out.tracks);
    for (const Track& track : out.tracks) {
      if (track.states.size() < 2) continue;
      for (LinearSegment& seg : split_track(track, cfg.segmenter)) {
        if (seg.valid) {
          WalkRecord rec;
          rec.result = analyse_segment(seg, cfg.gait);
          rec.analysed = true;
          suppress_steps(rec, busy);
          out.walks.push_back(std::move(rec));
        }
        out.segments.push_back(std::move(seg));
      }
    }
  } else {
    for (ClinicMatch& m : match_clinic_walks(out.tracks, *walklog, cfg.segmenter)) {
      WalkRecord rec;
      rec.walk = m.walk;
      rec.matched = m.segment.has_value();
      if (m.segment) {
        if (m.segment->valid) {
          rec.result = analyse_segment(*m.segment, cfg.gait);
          rec.analysed = true;
        } else {
          rec.result.track_id = m.segment->parent_track;
          rec.result.seg_index = m.segment->seg_index;
          rec.result.t_start = m.segment->t_start();
        }
        out.segments.push_back(std::move(*m.segment));
      } else {
        rec.result.t_start = m.walk.t_start;
      }
      out.walks.push_back(std::move(rec));
    }
  }

  out.session = session;
  out.session.frames.clear();
  return out;
}

}  // namespace gaitpipe
