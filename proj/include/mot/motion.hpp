#pragma once

#include <optional>

#include <Eigen/Dense>

#include "mot/model.hpp"

namespace mot {

using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Matrix48 = Eigen::Matrix<double, 4, 8>;

// Kalman state over (cx, cy, a, h, v_cx, v_cy, v_a, v_h): box center,
// aspect ratio width/height, height, and per-frame velocities.
struct TrackState {
  Vector8 mean = Vector8::Zero();
  Matrix8 cov = Matrix8::Identity();

  Box to_box() const;
  bool finite() const;
};

// Measurement vector (cx, cy, a, h) of a box.
Vector4 measurement_of(const Box& box);

// Noise covariances. The effective diagonals add a height-proportional part
// to the base terms, following the DeepSORT parameterization:
//   R = diag(measurement_base) + diag((fp h)^2, (fp h)^2, 0, (fp h)^2)
//   Q = diag(process_base) + diag((fp h)^2, (fp h)^2, 0, (fp h)^2,
//                                 (fv h)^2, (fv h)^2, 0, (fv h)^2)
// with fp = position_std_factor and fv = velocity_std_factor.
struct NoiseConfig {
  Vector4 measurement_base = (Vector4() << 1.0, 1.0, 1e-2, 1.0).finished();
  Vector8 process_base =
      (Vector8() << 1e-2, 1e-2, 1e-4, 1e-2, 1e-4, 1e-4, 1e-10, 1e-4).finished();
  double position_std_factor = 1.0 / 20.0;
  double velocity_std_factor = 1.0 / 160.0;

  Matrix4 measurement_cov(double height) const;
  Matrix8 process_cov(double height) const;
  // Throws InputError on negative or non-finite terms.
  void validate() const;
};

struct MotionModel {
  enum class Kind { kConstantVelocity, kConstantTurnRate };

  Kind kind = Kind::kConstantVelocity;
  // Rotation of the (v_cx, v_cy) velocity per frame, radians. Used only by
  // kConstantTurnRate; the state carries no turn-rate component.
  double turn_rate = 0.0;
  static constexpr double kDt = 1.0;
};

enum class NoiseMode { kVanilla, kNsa };

struct UkfParams {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;
};

// Deterministic state propagation of one frame.
Vector8 propagate(const MotionModel& model, const Vector8& x);
// Jacobian of propagate (exact; the supported models are linear in the state).
Matrix8 transition_matrix(const MotionModel& model);
const Matrix48& measurement_matrix();

// New track state from a first detection.
TrackState initiate(const Box& box, const NoiseConfig& noise);

// One-frame prediction. Constant velocity uses the closed-form linear
// propagation; constant turn rate goes through the unscented transform.
TrackState predict(const TrackState& state, const MotionModel& model, const NoiseConfig& noise,
                   const UkfParams& ukf = {});

// Noise-scale-adaptive covariance (1 - confidence) * base.
Matrix4 nsa_covariance(const Matrix4& base, double confidence);

// Kalman correction with R (vanilla) or the NSA-scaled R.
TrackState update(const TrackState& state, const Vector4& z, double confidence, NoiseMode mode,
                  const NoiseConfig& noise);

// Squared Mahalanobis distance of z under the projected state with the
// unscaled measurement noise.
double gating_distance(const TrackState& state, const Vector4& z, const NoiseConfig& noise);

// Sigma points are spread with (alpha, beta, kappa). A covariance without a
// Cholesky factor is retried once with 1e-9 I jitter before NumericalError.
TrackState ukf_predict(const TrackState& state, const MotionModel& model, const NoiseConfig& noise,
                       const UkfParams& params = {});
TrackState ukf_update(const TrackState& state, const Vector4& z, double confidence, NoiseMode mode,
                      const NoiseConfig& noise, const UkfParams& params = {});

// Predict, then correct when a measurement is supplied.
TrackState ukf_step(const TrackState& state, const MotionModel& model,
                    const std::optional<Vector4>& z, double confidence, NoiseMode mode,
                    const NoiseConfig& noise, const UkfParams& params = {});

}  // namespace mot
