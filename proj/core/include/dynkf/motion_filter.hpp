#pragma once

// Per-object filter that couples the Kalman machinery with the motion-dynamics
// weights. One instance per tracked object; not shared between threads.

#include <array>
#include <deque>
#include <optional>

#include "dynkf/dynamics.hpp"
#include "dynkf/filter.hpp"

namespace dynkf {

enum class FilterVariant {
  kBaseline,         // textbook KF at the configured order
  kDynamic,          // weighted prediction with adaptive weights
  kDynamicIdentity,  // weighted algebra with weights pinned to identity
};

/// Which position estimate feeds the dynamics window.
enum class LocalizationTerm {
  kMeasurement,      // raw detector position z
  kUpdatedState,     // H x_{t|t}
  kPostMeasurement,  // z - (H K) diag(D)
};

struct FilterConfig {
  MotionOrder order = MotionOrder::kJerk;
  FilterVariant variant = FilterVariant::kDynamic;
  double dt = 0.1;             // s
  double process_noise = 1.0;  // q, spectral density of the driving white noise
  double sigma_meas = 0.3;     // m
  int transition_window = 8;   // k
  int smoothing_window = 4;    // m
  DynamicsFactors factors;
  /// Weights used until the window supports an estimate for each derivative.
  WeightVector cold_start{{1.0, 1.0, 0.0, 0.0}};
  LocalizationTerm localization = LocalizationTerm::kPostMeasurement;
  /// Weighting P along with the mean zeroes the uncertainty of suppressed
  /// derivatives, which then cannot follow a regime change.
  CovariancePropagation covariance = CovariancePropagation::kTransition;
  double aux_smoothing = 0.7;  // weight of the newest measurement

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct FilterStepInfo {
  Vector2 measured = Vector2::Zero();
  Vector2 localized = Vector2::Zero();  // entry pushed into the dynamics window
  Vector residual;
};

class MotionFilter {
 public:
  /// Starts a track at `first`: zero derivatives, inflated covariance.
  MotionFilter(const FilterConfig& config, const Measurement& first);

  /// Advances one frame using the current weights.
  void predict();

  /// Corrects with a measurement, refreshes the dynamics window and weights.
  FilterStepInfo update(const Measurement& z);

  const StateEstimate& state() const { return est_; }
  Vector2 position() const;
  Vector2 velocity() const;
  const AuxState& aux() const { return aux_; }
  const FilterConfig& config() const { return config_; }

  const std::array<WeightVector, kPlaneAxes>& weights() const { return weights_; }
  /// Weight matrix applied by the next predict.
  Matrix current_weight_matrix() const;
  const DynamicsWindow& window() const { return window_; }

 private:
  void refresh_weights();

  FilterConfig config_;
  Matrix F_;
  Matrix Q_;
  Matrix H_;
  Matrix R_;
  Matrix identity_;
  StateEstimate est_;
  AuxState aux_;
  DynamicsWindow window_;
  std::array<std::deque<WeightVector>, kPlaneAxes> raw_history_;
  std::array<WeightVector, kPlaneAxes> weights_;
};

}  // namespace dynkf
