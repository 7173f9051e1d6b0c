#pragma once

#include <utility>
#include <vector>

#include "dynkf/filter.hpp"

namespace dynkf {

/// Minimum-cost assignment on a rectangular cost matrix (Hungarian method,
/// shortest augmenting paths with potentials, O(n^2 m)). Every row of the
/// smaller side is assigned. Returns, for each row, its column or -1.
std::vector<int> solve_assignment(const Matrix& cost);

struct GatedAssignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Assignment restricted to entries with cost <= gate. Pairs above the gate are
/// forbidden: the result has the largest possible number of in-gate pairs and,
/// among those, the smallest summed cost.
GatedAssignment gated_assignment(const Matrix& cost, double gate);

/// Pairwise ground-plane Euclidean distances, rows = a, cols = b.
Matrix distance_matrix(const std::vector<Vector2>& a, const std::vector<Vector2>& b);

}  // namespace dynkf
