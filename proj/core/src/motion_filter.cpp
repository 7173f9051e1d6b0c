#include "dynkf/motion_filter.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dynkf {
namespace {

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

AuxState smooth_aux(const AuxState& prev, const AuxState& meas, double alpha) {
  const auto blend = [alpha](double old_v, double new_v) { return old_v + alpha * (new_v - old_v); };
  AuxState out;
  out.elevation = blend(prev.elevation, meas.elevation);
  out.yaw = wrap_angle(prev.yaw + alpha * wrap_angle(meas.yaw - prev.yaw));
  out.length = blend(prev.length, meas.length);
  out.width = blend(prev.width, meas.width);
  out.height = blend(prev.height, meas.height);
  return out;
}

// Number of window entries needed before weight i has a defined fluctuation:
// its series has count - (i - 1) samples and needs at least two.
constexpr int kEntriesForWeight[4] = {0, 2, 3, 4};

}  // namespace

void FilterConfig::validate() const {
  motion_order_from_int(to_int(order));
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(process_noise >= 0.0) || !std::isfinite(process_noise)) {
    throw ConfigError("process_noise must be non-negative");
  }
  if (!(sigma_meas > 0.0) || !std::isfinite(sigma_meas)) {
    throw ConfigError("sigma_meas must be positive");
  }
  if (transition_window < 3) throw ConfigError("transition_window must be >= 3");
  if (smoothing_window < 1) throw ConfigError("smoothing_window must be >= 1");
  factors.validate();
  if (cold_start[0] != 1.0) throw ConfigError("cold_start leading weight must be 1");
  for (double w : cold_start.values) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("cold_start weights must lie in [0, 1]");
  }
  if (!(aux_smoothing > 0.0 && aux_smoothing <= 1.0)) {
    throw ConfigError("aux_smoothing must lie in (0, 1]");
  }
}

MotionFilter::MotionFilter(const FilterConfig& config, const Measurement& first)
    : config_(config), window_(config.transition_window) {
  config_.validate();
  const auto order = config_.order;
  F_ = build_transition(order, config_.dt).F;
  Q_ = build_process_noise(order, config_.dt, config_.process_noise);
  H_ = build_measurement_matrix(order);
  R_ = build_measurement_noise(config_.sigma_meas);
  const int n = state_dim(order);
  identity_ = Matrix::Identity(n, n);

  const int b = block_size(order);
  constexpr double kDerivativeVariance[4] = {0.0, 1e2, 1e3, 1e4};
  est_.mean = Vector::Zero(n);
  est_.covariance = Matrix::Zero(n, n);
  for (int axis = 0; axis < kPlaneAxes; ++axis) {
    est_.mean[axis * b] = first.position[axis];
    est_.covariance(axis * b, axis * b) = 10.0 * R_(axis, axis);
    for (int i = 1; i < b; ++i) {
      est_.covariance(axis * b + i, axis * b + i) = kDerivativeVariance[i];
    }
  }
  aux_ = first.aux;
  aux_.yaw = wrap_angle(aux_.yaw);
  weights_.fill(config_.cold_start);
  if (config_.variant != FilterVariant::kBaseline) window_.push(first.position);
}

Vector2 MotionFilter::position() const {
  const int b = block_size(config_.order);
  return {est_.mean[0], est_.mean[b]};
}

Vector2 MotionFilter::velocity() const {
  const int b = block_size(config_.order);
  return {est_.mean[1], est_.mean[b + 1]};
}

Matrix MotionFilter::current_weight_matrix() const {
  if (config_.variant != FilterVariant::kDynamic) return identity_;
  return weight_matrix(weights_, config_.order);
}

void MotionFilter::predict() {
  switch (config_.variant) {
    case FilterVariant::kBaseline:
      est_ = predict_standard(est_, F_, Q_);
      break;
    case FilterVariant::kDynamicIdentity:
      est_ = dynkf::predict(est_, F_, identity_, Q_, config_.covariance);
      break;
    case FilterVariant::kDynamic:
      est_ = dynkf::predict(est_, F_, weight_matrix(weights_, config_.order), Q_,
                            config_.covariance);
      break;
  }
}

FilterStepInfo MotionFilter::update(const Measurement& z) {
  const Vector zv = z.position;
  auto result = dynkf::update(est_, zv, H_, R_);
  est_ = std::move(result.posterior);
  aux_ = smooth_aux(aux_, z.aux, config_.aux_smoothing);

  FilterStepInfo info;
  info.measured = z.position;
  info.residual = result.residual;
  switch (config_.localization) {
    case LocalizationTerm::kMeasurement:
      info.localized = z.position;
      break;
    case LocalizationTerm::kUpdatedState:
      info.localized = H_ * est_.mean;
      break;
    case LocalizationTerm::kPostMeasurement:
      info.localized =
          post_measurement(zv, result.gain, noise_term_from_innovation(result.residual), H_);
      break;
  }

  if (config_.variant != FilterVariant::kBaseline) {
    window_.push(info.localized);
    refresh_weights();
  }
  return info;
}

void MotionFilter::refresh_weights() {
  const auto dynamics = dynamics_vector(window_);
  if (!dynamics) return;
  const int count = window_.count();
  for (int axis = 0; axis < kPlaneAxes; ++axis) {
    WeightVector raw = update_weights((*dynamics)[axis], config_.factors);
    for (int i = 1; i < 4; ++i) {
      if (count < kEntriesForWeight[i]) raw[i] = config_.cold_start[i];
    }
    auto& history = raw_history_[axis];
    history.push_back(raw);
    while (static_cast<int>(history.size()) > config_.smoothing_window) history.pop_front();
    const std::vector<WeightVector> recent(history.begin(), history.end());
    weights_[axis] = smooth_weights(recent, config_.smoothing_window);
  }
}

}  // namespace dynkf
