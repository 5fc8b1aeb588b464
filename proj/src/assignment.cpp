#include <algorithm>
#include <cmath>
#include <limits>

#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

namespace {

// Shortest augmenting path Hungarian with row/column potentials, for
// rows <= cols. Returns row -> column.
std::vector<int> hungarian_wide(const CostMatrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

}  // namespace

std::vector<int> solve_assignment(const CostMatrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) return std::vector<int>(cost.rows(), -1);
  if (cost.rows() <= cost.cols()) return hungarian_wide(cost);

  CostMatrix t(cost.cols(), cost.rows());
  for (std::size_t r = 0; r < cost.rows(); ++r)
    for (std::size_t c = 0; c < cost.cols(); ++c) t(c, r) = cost(r, c);
  const std::vector<int> col_to_row = hungarian_wide(t);
  std::vector<int> out(cost.rows(), -1);
  for (std::size_t c = 0; c < col_to_row.size(); ++c) {
    if (col_to_row[c] >= 0) out[static_cast<std::size_t>(col_to_row[c])] = static_cast<int>(c);
  }
  return out;
}

double assignment_cost(const CostMatrix& cost, std::span<const int> assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] >= 0) total += cost(r, static_cast<std::size_t>(assignment[r]));
  }
  return total;
}

namespace {

// Optimal cost of the sub-problem restricted to the listed rows/cols.
double sub_optimum(const CostMatrix& cost, const std::vector<std::size_t>& rows,
                   const std::vector<std::size_t>& cols) {
  if (rows.empty() || cols.empty()) return 0.0;
  CostMatrix sub(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = cost(rows[i], cols[j]);
  const auto a = solve_assignment(sub);
  return assignment_cost(sub, a);
}

// Rewrites an optimal assignment into the lexicographically smallest one of
// equal cost: each row in turn takes the lowest column that still admits
// an optimal completion.
std::vector<int> lexicographic_optimum(const CostMatrix& cost, double optimum) {
  std::vector<std::size_t> rows(cost.rows()), cols(cost.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  std::vector<int> out(cost.rows(), -1);
  double remaining = optimum;

  while (!rows.empty() && !cols.empty()) {
    const std::size_t r = rows.front();
    std::vector<std::size_t> rest_rows(rows.begin() + 1, rows.end());
    const double tol = 1e-9 * (1.0 + std::abs(remaining));
    bool fixed = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::vector<std::size_t> rest_cols = cols;
      rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(k));
      const double value = cost(r, cols[k]) + sub_optimum(cost, rest_rows, rest_cols);
      if (std::abs(value - remaining) <= tol) {
        out[r] = static_cast<int>(cols[k]);
        remaining -= cost(r, cols[k]);
        cols = std::move(rest_cols);
        fixed = true;
        break;
      }
    }
    // Leaving r unmatched keeps the cardinality only when rows outnumber cols.
    if (!fixed && rows.size() <= cols.size()) return {};
    rows = std::move(rest_rows);
  }
  return out;
}

}  // namespace

AssociationResult associate(std::span<const Eigen::Vector2d> predicted,
                            std::span<const Detection> detections, double gate) {
  AssociationResult result;
  const std::size_t nt = predicted.size();
  const std::size_t nd = detections.size();

  if (nt == 0 || nd == 0) {
    for (std::size_t i = 0; i < nt; ++i) result.unmatched_tracks.push_back(i);
    for (std::size_t j = 0; j < nd; ++j) result.unmatched_detections.push_back(j);
    return result;
  }

  // Forbidden pairs cost more than any set of allowed pairs, so the optimum
  // first maximises the allowed count and then minimises distance.
  const double forbidden = (gate + 1.0) * static_cast<double>(nt + nd + 1) * 1e3;
  CostMatrix cost(nt, nd);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nd; ++j) {
      const double d = std::hypot(predicted[i].x() - detections[j].centroid_x,
                                  predicted[i].y() - detections[j].centroid_y);
      cost(i, j) = d <= gate ? d : forbidden;
    }
  }

  std::vector<int> assignment = solve_assignment(cost);
  if (nt * nd <= 64) {
    std::vector<int> lex = lexicographic_optimum(cost, assignment_cost(cost, assignment));
    if (!lex.empty()) assignment = std::move(lex);
  }

  std::vector<char> det_used(nd, 0);
  for (std::size_t i = 0; i < nt; ++i) {
    const int j = assignment[i];
    if (j >= 0 && cost(i, static_cast<std::size_t>(j)) <= gate) {
      result.matches.emplace_back(i, static_cast<std::size_t>(j));
      det_used[static_cast<std::size_t>(j)] = 1;
    } else {
      result.unmatched_tracks.push_back(i);
    }
  }
  for (std::size_t j = 0; j < nd; ++j) {
    if (!det_used[j]) result.unmatched_detections.push_back(j);
  }
  return result;
}

}  // namespace gaitpipe
