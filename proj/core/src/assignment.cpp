#include "dynkf/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynkf {
namespace {

// Requires rows <= cols. 1-based potentials u, v and matching p (classic form).
std::vector<int> solve_wide(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
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
      for (int j = 0; j <= m; ++j) {
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> solve_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (n == 0 || m == 0) return std::vector<int>(n, -1);
  if (!cost.allFinite()) throw ContractError("assignment cost matrix must be finite");
  if (n <= m) return solve_wide(cost);
  const std::vector<int> col_to_row = solve_wide(cost.transpose());
  std::vector<int> row_to_col(n, -1);
  for (int c = 0; c < m; ++c) {
    if (col_to_row[c] >= 0) row_to_col[col_to_row[c]] = c;
  }
  return row_to_col;
}

GatedAssignment gated_assignment(const Matrix& cost, double gate) {
  if (!(gate > 0.0)) throw ContractError("association gate must be positive");
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  GatedAssignment out;

  // A forbidden pair costs more than any complete set of allowed pairs, so the
  // optimum first maximizes the number of allowed pairs.
  double allowed_max = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (cost(i, j) <= gate) allowed_max = std::max(allowed_max, cost(i, j));
    }
  }
  const double forbidden = (allowed_max + 1.0) * static_cast<double>(std::min(n, m) + 1);
  Matrix padded = cost;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!(cost(i, j) <= gate)) padded(i, j) = forbidden;
    }
  }

  const std::vector<int> row_to_col = solve_assignment(padded);
  std::vector<char> col_used(m, 0);
  for (int i = 0; i < n; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && cost(i, j) <= gate) {
      out.pairs.emplace_back(i, j);
      col_used[j] = 1;
    } else {
      out.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < m; ++j) {
    if (!col_used[j]) out.unmatched_cols.push_back(j);
  }
  return out;
}

Matrix distance_matrix(const std::vector<Vector2>& a, const std::vector<Vector2>& b) {
  Matrix d(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) d(i, j) = (a[i] - b[j]).norm();
  }
  return d;
}

}  // namespace dynkf
