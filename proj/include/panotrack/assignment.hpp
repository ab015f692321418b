#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace panotrack {

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, column), sorted by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
  double total_cost = 0.0;
};

/// Gated optimal assignment. Entries above `gate` (or non-finite) are
/// forbidden. Among assignments using only allowed entries the solver
/// maximizes the number of pairs first, then minimizes the summed cost.
/// Hungarian algorithm, O(n^3) in max(rows, cols).
Assignment solve_assignment(const std::vector<std::vector<double>>& cost, double gate);

}  // namespace panotrack
