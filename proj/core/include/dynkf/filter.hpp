#pragma once

// Linear Kalman filter machinery for Taylor-series motion models.
//
// State layout is axis-major over the ground plane:
//   [x, vx, ax, jx | y, vy, ay, jy]
// truncated to (order + 1) entries per axis. Measurements are ground-plane
// positions, so H selects entry 0 of every axis block.

#include <Eigen/Dense>

#include "dynkf/errors.hpp"

namespace dynkf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;

inline constexpr int kPlaneAxes = 2;

enum class MotionOrder : int { kVelocity = 1, kAcceleration = 2, kJerk = 3 };

/// Throws ConfigError unless value is 1, 2 or 3.
MotionOrder motion_order_from_int(int value);

constexpr int to_int(MotionOrder order) { return static_cast<int>(order); }
constexpr int block_size(MotionOrder order) { return to_int(order) + 1; }
constexpr int state_dim(MotionOrder order, int axes = kPlaneAxes) {
  return axes * block_size(order);
}

/// Slowly varying box attributes carried next to the kinematic state.
/// They are not part of the Kalman state; see MotionFilter for the smoothing rule.
struct AuxState {
  double elevation = 0.0;  // m
  double yaw = 0.0;        // rad
  double length = 0.0;     // m
  double width = 0.0;      // m
  double height = 0.0;     // m
};

struct Measurement {
  Vector2 position = Vector2::Zero();  // ground plane (m)
  AuxState aux;
};

struct StateEstimate {
  Vector mean;
  Matrix covariance;

  int dim() const { return static_cast<int>(mean.size()); }
};

struct TransitionModel {
  Matrix F;
  double dt = 0.0;
  MotionOrder order = MotionOrder::kJerk;
};

struct NoiseModel {
  Matrix Q;
  Matrix R;
};

struct UpdateResult {
  StateEstimate posterior;
  Matrix gain;                  // K, state_dim x meas_dim
  Vector residual;              // z - H * mean_pred
  Matrix innovation_covariance; // S = H P H^T + R
};

/// Block-diagonal Taylor transition. Each axis block is upper triangular with
/// F(i, j) = dt^(j-i) / (j-i)!.
TransitionModel build_transition(MotionOrder order, double dt, int axes = kPlaneAxes);

/// Discretized continuous white noise driving the first unmodeled derivative,
/// with spectral density q per axis:
///   Q(i, j) = q dt^(2n+1-i-j) / ((n-i)! (n-j)! (2n+1-i-j)),  n = order.
Matrix build_process_noise(MotionOrder order, double dt, double q, int axes = kPlaneAxes);

/// Selects the position entry of every axis block.
Matrix build_measurement_matrix(MotionOrder order, int axes = kPlaneAxes);

/// sigma^2 * I over the measured coordinates.
Matrix build_measurement_noise(double sigma, int axes = kPlaneAxes);

NoiseModel build_noise_model(MotionOrder order, double dt, double q, double sigma,
                             int axes = kPlaneAxes);

/// How the weighted predict moves the covariance.
enum class CovariancePropagation {
  kWeighted,    // P' = (F W) P (F W)^T + Q
  kTransition,  // P' = F P F^T + Q; the weights act on the mean only
};

/// Weighted prediction: mean' = F W mean, covariance per `covariance`.
/// W must be diagonal with entries in [0, 1].
StateEstimate predict(const StateEstimate& est, const Matrix& F, const Matrix& W,
                      const Matrix& Q,
                      CovariancePropagation covariance = CovariancePropagation::kWeighted);

/// Unweighted textbook prediction, mean' = F mean, P' = F P F^T + Q.
StateEstimate predict_standard(const StateEstimate& est, const Matrix& F, const Matrix& Q);

/// Measurement update, Joseph-form covariance. The innovation covariance is
/// factored with Cholesky; if that fails a ridge of 1e-9 trace(S) is added.
/// Throws NumericalError if S is still not positive definite.
UpdateResult update(const StateEstimate& pred, const Vector& z, const Matrix& H,
                    const Matrix& R);

/// Detector noise vector diag(D_t) for the post-measurement. The default
/// realization is the innovation residual itself.
inline Vector noise_term_from_innovation(const Vector& residual) { return residual; }

/// Post-measurement: z_hat = z - (H K) noise_term.
Vector post_measurement(const Vector& z, const Matrix& K, const Vector& noise_term,
                        const Matrix& H);

/// True when P is symmetric within rel_tol and its smallest eigenvalue is at
/// least -eig_tol * trace(P).
bool is_valid_covariance(const Matrix& P, double rel_tol = 1e-9, double eig_tol = 1e-9);

}  // namespace dynkf
