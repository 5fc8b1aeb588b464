#include "gaitpipe/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/fisher_f.hpp>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/pointcloud.hpp"

namespace gaitpipe {

RatingsMatrix::RatingsMatrix(std::size_t n, std::size_t k) : n_(n), k_(k), v_(n * k, 0.0) {}

RatingsMatrix::RatingsMatrix(const std::vector<std::vector<double>>& rows)
    : n_(rows.size()), k_(rows.empty() ? 0 : rows.front().size()) {
  v_.reserve(n_ * k_);
  for (const auto& row : rows) {
    if (row.size() != k_) throw DegenerateInputError("ratings rows differ in length");
    v_.insert(v_.end(), row.begin(), row.end());
  }
}

AnovaTable two_way_anova(const RatingsMatrix& m) {
  const std::size_t n = m.subjects();
  const std::size_t k = m.raters();
  if (n < 2 || k < 2) throw DegenerateInputError("ICC needs at least 2 subjects and 2 raters");

  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double x = m(i, j);
      if (!std::isfinite(x)) throw DegenerateInputError("non-finite rating");
      row_mean[i] += x;
      col_mean[j] += x;
      grand += x;
    }
  for (double& r : row_mean) r /= static_cast<double>(k);
  for (double& c : col_mean) c /= static_cast<double>(n);
  grand /= static_cast<double>(n * k);

  double sst = 0.0, ssr = 0.0, ssc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) sst += (m(i, j) - grand) * (m(i, j) - grand);
  for (double r : row_mean) ssr += (r - grand) * (r - grand);
  for (double c : col_mean) ssc += (c - grand) * (c - grand);
  ssr *= static_cast<double>(k);
  ssc *= static_cast<double>(n);
  const double sse = std::max(0.0, sst - ssr - ssc);

  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  return {ssr / (dn - 1.0), ssc / (dk - 1.0), sse / ((dn - 1.0) * (dk - 1.0)), n, k};
}

namespace {

double f_quantile(double p, double df1, double df2) {
  boost::math::fisher_f_distribution<double> dist(df1, df2);
  return boost::math::quantile(dist, p);
}

bool all_identical(const RatingsMatrix& m) {
  const double first = m(0, 0);
  for (std::size_t i = 0; i < m.subjects(); ++i)
    for (std::size_t j = 0; j < m.raters(); ++j)
      if (m(i, j) != first) return false;
  return true;
}

}  // namespace

IccResult icc2k(const RatingsMatrix& m) {
  const AnovaTable a = two_way_anova(m);
  if (all_identical(m)) return {1.0, 1.0, 1.0, true};

  const double n = static_cast<double>(a.n), k = static_cast<double>(a.k);
  IccResult r;
  r.icc = (a.msr - a.mse) / (a.msr + (a.msc - a.mse) / n);
  if (a.mse == 0.0) {
    r.ci_low = r.ci_high = r.icc;
    return r;
  }

  // Single-rater interval with Satterthwaite df, stepped up to k raters.
  const double icc1 = (a.msr - a.mse) / (a.msr + (k - 1.0) * a.mse + k * (a.msc - a.mse) / n);
  const double aa = k * icc1 / (n * (1.0 - icc1));
  const double bb = 1.0 + k * icc1 * (n - 1.0) / (n * (1.0 - icc1));
  double v = std::pow(aa * a.msc + bb * a.mse, 2.0) /
             (std::pow(aa * a.msc, 2.0) / (k - 1.0) + std::pow(bb * a.mse, 2.0) / ((n - 1.0) * (k - 1.0)));
  if (!std::isfinite(v) || v <= 0.0) v = (n - 1.0) * (k - 1.0);

  const double fl = f_quantile(0.975, n - 1.0, v);
  const double fu = f_quantile(0.975, v, n - 1.0);
  const double mix = k * a.msc + (k * n - k - n) * a.mse;
  const double lb = n * (a.msr - fl * a.mse) / (fl * mix + n * a.msr);
  const double ub = n * (fu * a.msr - a.mse) / (mix + n * fu * a.msr);
  r.ci_low = lb * k / (1.0 + lb * (k - 1.0));
  r.ci_high = ub * k / (1.0 + ub * (k - 1.0));
  return r;
}

IccResult icc3k(const RatingsMatrix& m) {
  const AnovaTable a = two_way_anova(m);
  if (all_identical(m)) return {1.0, 1.0, 1.0, true};

  const double n = static_cast<double>(a.n), k = static_cast<double>(a.k);
  IccResult r;
  if (a.msr == 0.0) {
    // Subjects indistinguishable: consistency is undefined, report the
    // limiting value as computed from the residual.
    r.icc = a.mse == 0.0 ? 1.0 : -INFINITY;
    r.ci_low = r.ci_high = r.icc;
    return r;
  }
  r.icc = (a.msr - a.mse) / a.msr;
  if (a.mse == 0.0) {
    r.ci_low = r.ci_high = r.icc;
    return r;
  }
  const double f0 = a.msr / a.mse;
  const double df_e = (n - 1.0) * (k - 1.0);
  const double fl = f0 / f_quantile(0.975, n - 1.0, df_e);
  const double fu = f0 * f_quantile(0.975, df_e, n - 1.0);
  r.ci_low = 1.0 - 1.0 / fl;
  r.ci_high = 1.0 - 1.0 / fu;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct Accum {
  std::vector<double> abs_cm;
  std::vector<double> pct;
};

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

ErrorRow summarise(const Accum& acc) {
  ErrorRow row;
  row.count = acc.abs_cm.size();
  std::tie(row.mean_abs_cm, row.sd_abs_cm) = mean_sd(acc.abs_cm);
  std::tie(row.mean_pct, row.sd_pct) = mean_sd(acc.pct);
  return row;
}

}  // namespace

ErrorSummary error_table(const std::vector<ErrorPair>& pairs) {
  std::map<std::string, Accum> groups;
  Accum all;
  for (const ErrorPair& p : pairs) {
    if (!(p.reference > 0.0)) throw DegenerateInputError("reference step length must be positive");
    const double err = std::abs(p.estimate - p.reference);
    const double cm = 100.0 * err;
    const double pct = 100.0 * err / p.reference;
    groups[p.walk_type].abs_cm.push_back(cm);
    groups[p.walk_type].pct.push_back(pct);
    all.abs_cm.push_back(cm);
    all.pct.push_back(pct);
  }
  ErrorSummary summary;
  for (const auto& [type, acc] : groups) summary.by_type[type] = summarise(acc);
  summary.overall = summarise(all);
  return summary;
}

DetectionRate detection_rate(const std::vector<DetectionEntry>& walks) {
  DetectionRate out;
  for (const DetectionEntry& w : walks) {
    DetectionRate& t = out.by_type[w.walk_type];
    ++t.total;
    ++out.total;
    if (w.detected) {
      ++t.detected;
      ++out.detected;
    }
  }
  auto finish = [](DetectionRate& r) {
    r.rate = r.total ? static_cast<double>(r.detected) / static_cast<double>(r.total) : 0.0;
  };
  finish(out);
  for (auto& [_, t] : out.by_type) finish(t);
  return out;
}

std::vector<IntervalIcc> interval_reliability(const std::vector<RoomDays>& rooms, int min_days,
                                              int max_days) {
  if (rooms.size() < 2) throw DegenerateInputError("interval reliability needs at least 2 rooms");
  if (min_days < 1 || max_days < min_days) throw ConfigError("bad aggregation interval range");

  auto window_mean = [](const RoomDays& r, int from, int to) -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (int d = from; d < to && d < static_cast<int>(r.daily.size()); ++d) {
      if (r.daily[d]) {
        sum += *r.daily[d];
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };

  std::vector<IntervalIcc> out;
  for (int len = min_days; len <= max_days; ++len) {
    std::vector<std::vector<double>> rows;
    for (const RoomDays& r : rooms) {
      const auto w1 = window_mean(r, 0, len);
      const auto w2 = window_mean(r, len, 2 * len);
      if (w1 && w2) rows.push_back({*w1, *w2});
    }
    IntervalIcc entry;
    entry.interval_days = len;
    entry.rooms_used = rows.size();
    if (rows.size() >= 2) entry.icc = icc2k(RatingsMatrix(rows));
    out.push_back(entry);
  }
  return out;
}

ValidTrackStats valid_track_stats(const std::map<std::string, std::vector<LinearSegment>>& segments) {
  ValidTrackStats out;
  std::vector<double> pcts;
  for (const auto& [home, segs] : segments) {
    if (segs.empty()) continue;
    const auto valid = std::count_if(segs.begin(), segs.end(), [](const LinearSegment& s) { return s.valid; });
    const double pct = 100.0 * static_cast<double>(valid) / static_cast<double>(segs.size());
    out.percent_by_home[home] = pct;
    pcts.push_back(pct);
  }
  std::tie(out.mean, out.sd) = mean_sd(pcts);
  return out;
}

Heatmap occupancy_heatmap(const std::vector<Track>& tracks, double cell, double x_min, double x_max,
                          double y_min, double y_max) {
  if (!(cell > 0.0)) throw ConfigError("heatmap cell must be positive");
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("heatmap extent is empty");
  Heatmap h;
  h.cell = cell;
  h.x_min = x_min;
  h.x_max = x_max;
  h.y_min = y_min;
  h.y_max = y_max;
  h.nx = static_cast<std::size_t>(std::ceil((x_max - x_min) / cell - 1e-9));
  h.ny = static_cast<std::size_t>(std::ceil((y_max - y_min) / cell - 1e-9));
  h.counts.assign(h.nx * h.ny, 0);
  for (const Track& track : tracks) {
    for (const TrackState& s : track.states) {
      const double fx = std::floor((s.x - x_min) / cell);
      const double fy = std::floor((s.y - y_min) / cell);
      if (fx < 0.0 || fy < 0.0 || fx >= static_cast<double>(h.nx) || fy >= static_cast<double>(h.ny))
        continue;
      ++h.counts[static_cast<std::size_t>(fy) * h.nx + static_cast<std::size_t>(fx)];
    }
  }
  return h;
}

std::string format_heatmap_csv(const Heatmap& h) {
  std::string out = "y\\x";
  for (std::size_t ix = 0; ix < h.nx; ++ix)
    out += "," + format_fixed(h.x_min + (static_cast<double>(ix) + 0.5) * h.cell, 3);
  out += '\n';
  for (std::size_t iy = 0; iy < h.ny; ++iy) {
    out += format_fixed(h.y_min + (static_cast<double>(iy) + 0.5) * h.cell, 3);
    for (std::size_t ix = 0; ix < h.nx; ++ix) out += "," + std::to_string(h.at(ix, iy));
    out += '\n';
  }
  return out;
}

namespace {

std::optional<double> parse_number(std::string_view cell) {
  while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
  while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

RatingsMatrix parse_ratings_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();

    std::vector<double> row;
    bool numeric = true, incomplete = false;
    for (const std::string& c : cells) {
      if (c.find_first_not_of(" \t") == std::string::npos) {
        incomplete = true;
        continue;
      }
      auto v = parse_number(c);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty() && width == 0) {  // header
        width = cells.size();
        continue;
      }
      throw FormatError("non-numeric rating", line_no);
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) throw FormatError("expected " + std::to_string(width) + " columns", line_no);
    if (incomplete) continue;  // listwise deletion
    rows.push_back(std::move(row));
  }
  return RatingsMatrix(rows);
}

}  // namespace gaitpipe
