#pragma once

// Motion-dynamics estimation: windowed fluctuation statistics of cleaned
// positions, normalized into per-derivative weights in [0, 1].
//
// Entry layout of every 4-vector below: [position/leading, velocity,
// acceleration, jerk]. The leading entry is fixed at 1.

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "dynkf/filter.hpp"

namespace dynkf {

using Series = std::vector<double>;

/// Ring buffer of the k most recent cleaned ground-plane positions.
class DynamicsWindow {
 public:
  explicit DynamicsWindow(int capacity);

  void push(const Vector2& position);
  void clear() { buffer_.clear(); }

  int capacity() const { return capacity_; }
  int count() const { return static_cast<int>(buffer_.size()); }
  bool empty() const { return buffer_.empty(); }

  /// Oldest-to-newest positions along one axis.
  Series axis_series(int axis) const;
  const std::deque<Vector2>& entries() const { return buffer_; }

 private:
  int capacity_;
  std::deque<Vector2> buffer_;
};

struct Differences {
  Series first;   // dz_i  = z_i - z_{i-1}
  Series second;  // d2z_i = dz_i - dz_{i-1}
};

/// Returns nullopt when fewer than three positions are available.
std::optional<Differences> finite_differences(std::span<const double> positions);

/// Sample standard deviation with divisor n-1. Series shorter than 2 give 0.
double sample_stddev(std::span<const double> values);

/// d = [1, sigma(z), sigma(dz), sigma(d2z)] for one axis.
struct DynamicsVector {
  std::array<double, 4> values{1.0, 0.0, 0.0, 0.0};

  double operator[](std::size_t i) const { return values[i]; }
};

std::optional<DynamicsVector> dynamics_vector(std::span<const double> positions);

/// Per-axis dynamics for the two ground-plane axes; nullopt below three entries.
std::optional<std::array<DynamicsVector, kPlaneAxes>> dynamics_vector(
    const DynamicsWindow& window);

/// Fluctuation magnitudes at which each weight saturates, [1, l_v, l_a, l_j].
struct DynamicsFactors {
  double velocity = 0.5;       // m
  double acceleration = 0.25;  // m
  double jerk = 0.15;          // m

  std::array<double, 4> as_array() const { return {1.0, velocity, acceleration, jerk}; }
  /// Throws ConfigError unless every factor is positive and finite.
  void validate() const;
};

struct WeightVector {
  std::array<double, 4> values{1.0, 1.0, 1.0, 1.0};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

/// Normalization in its algebraic matrix form,
///   d_norm = d o l^-1,  w = 1/2 (1 + d_norm - |1 - d_norm|).
WeightVector update_weights(const DynamicsVector& d, const DynamicsFactors& factors);

/// Same normalization written as min(d / l, 1) elementwise.
WeightVector saturate_weights(const DynamicsVector& d, const DynamicsFactors& factors);

/// Elementwise mean of the last min(m, history.size()) weight vectors.
/// Throws ContractError on an empty history or m < 1.
WeightVector smooth_weights(std::span<const WeightVector> history, int m);

/// Diagonal weight matrix with one diag(w[0..order]) block per axis, followed
/// by aux_dim identity rows.
Matrix weight_matrix(const WeightVector& w, MotionOrder order, int axes = kPlaneAxes,
                     int aux_dim = 0);
Matrix weight_matrix(std::span<const WeightVector> per_axis, MotionOrder order,
                     int aux_dim = 0);

}  // namespace dynkf
