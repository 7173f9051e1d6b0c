#include "dynkf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace dynkf {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double power(double base, int exponent) {
  double p = 1.0;
  for (int i = 0; i < exponent; ++i) p *= base;
  return p;
}

void require_square(const Matrix& m, int dim, const char* name) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream os;
    os << name << " must be " << dim << "x" << dim << ", got " << m.rows() << "x" << m.cols();
    throw ContractError(os.str());
  }
}

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("time step dt must be positive and finite, got " + std::to_string(dt));
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double condition_number(const Matrix& S) {
  if (!S.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  const auto abs_vals = eig.eigenvalues().cwiseAbs();
  const double lo = abs_vals.minCoeff();
  const double hi = abs_vals.maxCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// Shared by the weighted and the standard predict so that A = F W with W = I
// reproduces the standard result bit for bit.
StateEstimate propagate(const StateEstimate& est, const Matrix& A, const Matrix& B,
                        const Matrix& Q) {
  StateEstimate out;
  out.mean = A * est.mean;
  out.covariance = symmetrized(B * est.covariance * B.transpose() + Q);
  return out;
}

void check_estimate(const StateEstimate& est) {
  const int n = est.dim();
  require_square(est.covariance, n, "covariance");
}

}  // namespace

MotionOrder motion_order_from_int(int value) {
  if (value < 1 || value > 3) {
    throw ConfigError("model order must be 1 (velocity), 2 (acceleration) or 3 (jerk), got " +
                      std::to_string(value));
  }
  return static_cast<MotionOrder>(value);
}

TransitionModel build_transition(MotionOrder order, double dt, int axes) {
  motion_order_from_int(to_int(order));
  require_positive_dt(dt);
  const int b = block_size(order);
  TransitionModel model;
  model.dt = dt;
  model.order = order;
  model.F = Matrix::Zero(axes * b, axes * b);
  for (int axis = 0; axis < axes; ++axis) {
    const int off = axis * b;
    for (int i = 0; i < b; ++i) {
      for (int j = i; j < b; ++j) {
        model.F(off + i, off + j) = power(dt, j - i) / factorial(j - i);
      }
    }
  }
  return model;
}

Matrix build_process_noise(MotionOrder order, double dt, double q, int axes) {
  motion_order_from_int(to_int(order));
  require_positive_dt(dt);
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw ConfigError("process noise density q must be non-negative, got " + std::to_string(q));
  }
  const int n = to_int(order);
  const int b = n + 1;
  Matrix Q = Matrix::Zero(axes * b, axes * b);
  for (int axis = 0; axis < axes; ++axis) {
    const int off = axis * b;
    for (int i = 0; i < b; ++i) {
      for (int j = 0; j < b; ++j) {
        const int e = 2 * n + 1 - i - j;
        Q(off + i, off + j) = q * power(dt, e) / (factorial(n - i) * factorial(n - j) * e);
      }
    }
  }
  return Q;
}

Matrix build_measurement_matrix(MotionOrder order, int axes) {
  const int b = block_size(order);
  Matrix H = Matrix::Zero(axes, axes * b);
  for (int axis = 0; axis < axes; ++axis) H(axis, axis * b) = 1.0;
  return H;
}

Matrix build_measurement_noise(double sigma, int axes) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("measurement sigma must be positive, got " + std::to_string(sigma));
  }
  return Matrix::Identity(axes, axes) * (sigma * sigma);
}

NoiseModel build_noise_model(MotionOrder order, double dt, double q, double sigma, int axes) {
  return NoiseModel{build_process_noise(order, dt, q, axes), build_measurement_noise(sigma, axes)};
}

StateEstimate predict(const StateEstimate& est, const Matrix& F, const Matrix& W,
                      const Matrix& Q, CovariancePropagation covariance) {
  check_estimate(est);
  const int n = est.dim();
  require_square(F, n, "F");
  require_square(W, n, "W");
  require_square(Q, n, "Q");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = W(i, j);
      if (i != j && w != 0.0) throw ContractError("weight matrix must be diagonal");
      if (i == j && !(w >= 0.0 && w <= 1.0)) {
        throw ContractError("weight matrix entries must lie in [0, 1]");
      }
    }
  }
  const Matrix A = F * W;
  return covariance == CovariancePropagation::kWeighted ? propagate(est, A, A, Q)
                                                        : propagate(est, A, F, Q);
}

StateEstimate predict_standard(const StateEstimate& est, const Matrix& F, const Matrix& Q) {
  check_estimate(est);
  const int n = est.dim();
  require_square(F, n, "F");
  require_square(Q, n, "Q");
  return propagate(est, F, F, Q);
}

UpdateResult update(const StateEstimate& pred, const Vector& z, const Matrix& H,
                    const Matrix& R) {
  check_estimate(pred);
  const int n = pred.dim();
  const int m = static_cast<int>(z.size());
  if (H.rows() != m || H.cols() != n) {
    throw ContractError("H must be measurement_dim x state_dim");
  }
  require_square(R, m, "R");

  const Matrix PHt = pred.covariance * H.transpose();
  Matrix S = symmetrized(H * PHt + R);

  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    const double ridge = 1e-9 * S.trace();
    Matrix ridged = S;
    if (std::isfinite(ridge) && ridge > 0.0) ridged.diagonal().array() += ridge;
    llt.compute(ridged);
    if (llt.info() != Eigen::Success || !ridged.allFinite()) {
      const double cond = condition_number(S);
      std::ostringstream os;
      os << "innovation covariance is singular (condition number " << cond << ")";
      throw NumericalError(os.str(), cond);
    }
    S = ridged;
  }

  UpdateResult out;
  out.innovation_covariance = S;
  out.gain = llt.solve(PHt.transpose()).transpose();
  out.residual = z - H * pred.mean;
  out.posterior.mean = pred.mean + out.gain * out.residual;
  const Matrix IKH = Matrix::Identity(n, n) - out.gain * H;
  out.posterior.covariance = symmetrized(IKH * pred.covariance * IKH.transpose() +
                                         out.gain * R * out.gain.transpose());
  return out;
}

Vector post_measurement(const Vector& z, const Matrix& K, const Vector& noise_term,
                        const Matrix& H) {
  if (H.cols() != K.rows() || H.rows() != z.size() || K.cols() != noise_term.size()) {
    throw ContractError("post_measurement: dimension mismatch between z, K, H and noise term");
  }
  return z - (H * K) * noise_term;
}

bool is_valid_covariance(const Matrix& P, double rel_tol, double eig_tol) {
  if (P.rows() != P.cols() || !P.allFinite()) return false;
  const double scale = std::max(P.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(P), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -eig_tol * std::abs(P.trace());
}

}  // namespace dynkf
