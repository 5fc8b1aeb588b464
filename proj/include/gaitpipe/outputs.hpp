#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitpipe/pipeline.hpp"
#include "gaitpipe/stats.hpp"

namespace gaitpipe {

/// {track_id, seg_index, t_start, direction, n_peaks, steps:[{len_m, time_s}],
///  avg_step_len_m|null} plus session, and participant/walk_index/walk_type/
/// matched for clinic walks.
nlohmann::json walk_json(const WalkRecord& rec, const std::string& session);

std::string format_walks_jsonl(const std::vector<SessionResult>& results);
std::string format_segments_csv(const std::vector<SessionResult>& results);
std::string format_tracks_jsonl(const std::vector<SessionResult>& results);

/// Summary of a process run: per-session counts, valid-track percentages,
/// detection rate and, when the walk log carries references, the error table.
nlohmann::json process_report(const std::vector<SessionResult>& results, const PipelineConfig& cfg, Mode mode);

/// One heatmap per room label, tracks of all sessions in that room pooled.
std::map<std::string, Heatmap> room_heatmaps(const std::vector<SessionResult>& results, double cell);

std::string format_error_table_csv(const ErrorSummary& summary);
nlohmann::json error_summary_json(const ErrorSummary& summary);
nlohmann::json detection_json(const DetectionRate& rate);
nlohmann::json icc_json(const IccResult& r);

/// Six decimals, so reports do not carry floating-point noise.
double round6(double v);

}  // namespace gaitpipe
