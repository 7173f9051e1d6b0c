#pragma once

// Seeded generators for the property tests.

#include <cstdint>
#include <random>

#include "dynkf/filter.hpp"

namespace dynkf::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(engine_); }
  bool coin() { return integer(0, 1) == 1; }

  Matrix matrix(int rows, int cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = normal(scale);
    }
    return m;
  }

  /// A A^T + eps I, symmetric positive definite.
  Matrix spd(int n, double scale = 1.0, double eps = 1e-3) {
    const Matrix a = matrix(n, n, scale);
    Matrix s = a * a.transpose() + eps * Matrix::Identity(n, n);
    return 0.5 * (s + s.transpose());
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dynkf::testing
