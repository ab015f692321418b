#include "panotrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "panotrack/errors.hpp"

namespace panotrack {
namespace {

// Shortest augmenting path Hungarian method on a square matrix with
// 1-based potentials. Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment solve_assignment(const std::vector<std::vector<double>>& cost, double gate) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows == 0 ? 0 : cost.front().size();
  for (const auto& r : cost) {
    if (r.size() != cols) throw InputError("cost matrix rows differ in length");
  }

  Assignment out;
  if (rows == 0 || cols == 0) {
    for (std::size_t i = 0; i < rows; ++i) out.unmatched_rows.push_back(i);
    for (std::size_t j = 0; j < cols; ++j) out.unmatched_cols.push_back(j);
    return out;
  }

  auto allowed = [&](std::size_t i, std::size_t j) {
    return std::isfinite(cost[i][j]) && cost[i][j] <= gate;
  };

  // A forbidden entry must cost more than any full set of allowed entries, so
  // the solver first maximizes the number of allowed pairs.
  const std::size_t n = std::max(rows, cols);
  double max_allowed = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (allowed(i, j)) max_allowed = std::max(max_allowed, std::abs(cost[i][j]));
    }
  }
  const double forbidden = (static_cast<double>(n) + 1.0) * (max_allowed + 1.0);

  std::vector<std::vector<double>> square(n, std::vector<double>(n, forbidden));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (allowed(i, j)) square[i][j] = cost[i][j];
    }
  }

  const std::vector<std::size_t> row_to_col = hungarian(square);
  std::vector<bool> col_used(cols, false);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = row_to_col[i];
    if (j < cols && allowed(i, j)) {
      out.pairs.emplace_back(i, j);
      out.total_cost += cost[i][j];
      col_used[j] = true;
    } else {
      out.unmatched_rows.push_back(i);
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (!col_used[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

}  // namespace panotrack
