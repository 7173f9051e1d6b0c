#include "dynkf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dynkf {

DynamicsWindow::DynamicsWindow(int capacity) : capacity_(capacity) {
  if (capacity < 3) {
    throw ConfigError("transition window must hold at least 3 entries, got " +
                      std::to_string(capacity));
  }
}

void DynamicsWindow::push(const Vector2& position) {
  if (count() == capacity_) buffer_.pop_front();
  buffer_.push_back(position);
}

Series DynamicsWindow::axis_series(int axis) const {
  Series out;
  out.reserve(buffer_.size());
  for (const auto& p : buffer_) out.push_back(p[axis]);
  return out;
}

std::optional<Differences> finite_differences(std::span<const double> positions) {
  if (positions.size() < 3) return std::nullopt;
  Differences d;
  d.first.reserve(positions.size() - 1);
  for (std::size_t i = 1; i < positions.size(); ++i) {
    d.first.push_back(positions[i] - positions[i - 1]);
  }
  d.second.reserve(d.first.size() - 1);
  for (std::size_t i = 1; i < d.first.size(); ++i) {
    d.second.push_back(d.first[i] - d.first[i - 1]);
  }
  return d;
}

double sample_stddev(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

std::optional<DynamicsVector> dynamics_vector(std::span<const double> positions) {
  const auto diffs = finite_differences(positions);
  if (!diffs) return std::nullopt;
  DynamicsVector d;
  d.values = {1.0, sample_stddev(positions), sample_stddev(diffs->first),
              sample_stddev(diffs->second)};
  return d;
}

std::optional<std::array<DynamicsVector, kPlaneAxes>> dynamics_vector(
    const DynamicsWindow& window) {
  if (window.count() < 3) return std::nullopt;
  std::array<DynamicsVector, kPlaneAxes> out;
  for (int axis = 0; axis < kPlaneAxes; ++axis) {
    out[axis] = *dynamics_vector(window.axis_series(axis));
  }
  return out;
}

void DynamicsFactors::validate() const {
  const auto check = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(key) + " must be positive, got " + std::to_string(v));
    }
  };
  check(velocity, "dynamics_factor_v");
  check(acceleration, "dynamics_factor_a");
  check(jerk, "dynamics_factor_j");
}

WeightVector update_weights(const DynamicsVector& d, const DynamicsFactors& factors) {
  using Array4 = Eigen::Array4d;
  const auto l = factors.as_array();
  const Array4 dv(d.values[0], d.values[1], d.values[2], d.values[3]);
  const Array4 lv(l[0], l[1], l[2], l[3]);
  const Array4 d_norm = dv * lv.inverse();
  const Array4 ones = Array4::Ones();
  const Array4 w = 0.5 * (ones + d_norm - (ones - d_norm).abs());
  // Rounding in 1 + d - (d - 1) can leave the result an ulp above 1.
  WeightVector out;
  for (int i = 0; i < 4; ++i) out.values[i] = std::clamp(w[i], 0.0, 1.0);
  return out;
}

WeightVector saturate_weights(const DynamicsVector& d, const DynamicsFactors& factors) {
  const auto l = factors.as_array();
  WeightVector out;
  for (int i = 0; i < 4; ++i) out.values[i] = std::min(d.values[i] / l[i], 1.0);
  return out;
}

WeightVector smooth_weights(std::span<const WeightVector> history, int m) {
  if (history.empty()) throw ContractError("smooth_weights: empty weight history");
  if (m < 1) throw ContractError("smooth_weights: smoothing window must be >= 1");
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(m), history.size());
  const auto recent = history.last(take);
  WeightVector out;
  for (int i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (const auto& w : recent) sum += w.values[i];
    out.values[i] = sum / static_cast<double>(take);
  }
  return out;
}

Matrix weight_matrix(const WeightVector& w, MotionOrder order, int axes, int aux_dim) {
  std::vector<WeightVector> per_axis(static_cast<std::size_t>(axes), w);
  return weight_matrix(per_axis, order, aux_dim);
}

Matrix weight_matrix(std::span<const WeightVector> per_axis, MotionOrder order, int aux_dim) {
  const int b = block_size(order);
  const int axes = static_cast<int>(per_axis.size());
  const int n = axes * b + aux_dim;
  Matrix W = Matrix::Zero(n, n);
  for (int axis = 0; axis < axes; ++axis) {
    for (int i = 0; i < b; ++i) W(axis * b + i, axis * b + i) = per_axis[axis].values[i];
  }
  for (int i = axes * b; i < n; ++i) W(i, i) = 1.0;
  return W;
}

}  // namespace dynkf
