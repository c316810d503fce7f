#include "mot/motion.hpp"

#include <cmath>
#include <string>

#include "mot/errors.hpp"

namespace mot {

namespace {

constexpr int kStateDim = 8;
constexpr int kSigmaCount = 2 * kStateDim + 1;

using SigmaMatrix = Eigen::Matrix<double, kStateDim, kSigmaCount>;

struct SigmaWeights {
  double mean0 = 0.0;
  double cov0 = 0.0;
  double rest = 0.0;
};

SigmaWeights sigma_weights(const UkfParams& p) {
  const double n = kStateDim;
  const double lambda = p.alpha * p.alpha * (n + p.kappa) - n;
  const double c = n + lambda;
  SigmaWeights w;
  w.mean0 = lambda / c;
  w.cov0 = lambda / c + (1.0 - p.alpha * p.alpha + p.beta);
  w.rest = 1.0 / (2.0 * c);
  return w;
}

SigmaMatrix sigma_points(const Vector8& mean, const Matrix8& cov, const UkfParams& p) {
  const double n = kStateDim;
  const double c = p.alpha * p.alpha * (n + p.kappa);
  Eigen::LLT<Matrix8> llt(c * cov);
  if (llt.info() != Eigen::Success) {
    llt.compute(c * (cov + 1e-9 * Matrix8::Identity()));
    if (llt.info() != Eigen::Success) {
      throw NumericalError("unscented transform: covariance is not positive semi-definite");
    }
  }
  const Matrix8 root = llt.matrixL();
  SigmaMatrix chi;
  chi.col(0) = mean;
  for (int i = 0; i < kStateDim; ++i) {
    chi.col(1 + i) = mean + root.col(i);
    chi.col(1 + kStateDim + i) = mean - root.col(i);
  }
  return chi;
}

// Weighted mean about the central point: sum(W) = 1, so subtracting column 0
// first avoids the cancellation the large negative central weight causes.
template <int Rows>
Eigen::Matrix<double, Rows, 1> sigma_mean(const Eigen::Matrix<double, Rows, kSigmaCount>& y,
                                          const SigmaWeights& w) {
  Eigen::Matrix<double, Rows, 1> offset = Eigen::Matrix<double, Rows, 1>::Zero();
  for (int i = 1; i < kSigmaCount; ++i) offset += w.rest * (y.col(i) - y.col(0));
  return y.col(0) + offset;
}

template <int RowsA, int RowsB>
Eigen::Matrix<double, RowsA, RowsB> sigma_cross(
    const Eigen::Matrix<double, RowsA, kSigmaCount>& a, const Eigen::Matrix<double, RowsA, 1>& ma,
    const Eigen::Matrix<double, RowsB, kSigmaCount>& b, const Eigen::Matrix<double, RowsB, 1>& mb,
    const SigmaWeights& w) {
  Eigen::Matrix<double, RowsA, RowsB> out =
      w.cov0 * (a.col(0) - ma) * (b.col(0) - mb).transpose();
  for (int i = 1; i < kSigmaCount; ++i) {
    out += w.rest * (a.col(i) - ma) * (b.col(i) - mb).transpose();
  }
  return out;
}

template <typename M>
M symmetrized(const M& m) {
  return 0.5 * (m + m.transpose());
}

void require_finite(const TrackState& state, const char* where) {
  if (!state.finite()) throw InputError(std::string(where) + ": non-finite track state");
}

}  // namespace

Box TrackState::to_box() const {
  const double h = mean(3);
  const double w = mean(2) * h;
  return box_from_center(mean(0), mean(1), w, h);
}

bool TrackState::finite() const { return mean.allFinite() && cov.allFinite(); }

Vector4 measurement_of(const Box& box) {
  return Vector4(box.center_x(), box.center_y(), box.width / box.height, box.height);
}

Matrix4 NoiseConfig::measurement_cov(double height) const {
  const double pos = position_std_factor * height;
  Vector4 diag = measurement_base;
  diag(0) += pos * pos;
  diag(1) += pos * pos;
  diag(3) += pos * pos;
  return diag.asDiagonal();
}

Matrix8 NoiseConfig::process_cov(double height) const {
  const double pos = position_std_factor * height;
  const double vel = velocity_std_factor * height;
  Vector8 diag = process_base;
  diag(0) += pos * pos;
  diag(1) += pos * pos;
  diag(3) += pos * pos;
  diag(4) += vel * vel;
  diag(5) += vel * vel;
  diag(7) += vel * vel;
  return diag.asDiagonal();
}

void NoiseConfig::validate() const {
  if (!measurement_base.allFinite() || (measurement_base.array() < 0.0).any() ||
      !process_base.allFinite() || (process_base.array() < 0.0).any() ||
      !(position_std_factor >= 0.0) || !(velocity_std_factor >= 0.0)) {
    throw InputError("noise configuration terms must be finite and non-negative");
  }
}

Matrix8 transition_matrix(const MotionModel& model) {
  Matrix8 f = Matrix8::Identity();
  const double dt = MotionModel::kDt;
  for (int i = 0; i < 4; ++i) f(i, 4 + i) = dt;
  if (model.kind == MotionModel::Kind::kConstantTurnRate && model.turn_rate != 0.0) {
    const double w = model.turn_rate * dt;
    const double s = std::sin(w);
    const double c = std::cos(w);
    // Exact integration of a velocity rotating at a constant rate.
    const double sw = s / model.turn_rate;
    const double cw = (1.0 - c) / model.turn_rate;
    f(0, 4) = sw;
    f(0, 5) = -cw;
    f(1, 4) = cw;
    f(1, 5) = sw;
    f(4, 4) = c;
    f(4, 5) = -s;
    f(5, 4) = s;
    f(5, 5) = c;
  }
  return f;
}

Vector8 propagate(const MotionModel& model, const Vector8& x) { return transition_matrix(model) * x; }

const Matrix48& measurement_matrix() {
  static const Matrix48 h = [] {
    Matrix48 m = Matrix48::Zero();
    m.leftCols<4>().setIdentity();
    return m;
  }();
  return h;
}

TrackState initiate(const Box& box, const NoiseConfig& noise) {
  TrackState state;
  state.mean.head<4>() = measurement_of(box);
  state.mean.tail<4>().setZero();
  const double h = box.height;
  const double pos = 2.0 * noise.position_std_factor * h;
  const double vel = 10.0 * noise.velocity_std_factor * h;
  Vector8 stds;
  stds << pos, pos, 1e-2, pos, vel, vel, 1e-5, vel;
  Vector8 var = stds.array().square();
  var.head<4>() += noise.measurement_base;
  var.tail<4>() += noise.process_base.tail<4>();
  state.cov = var.asDiagonal();
  return state;
}

TrackState predict(const TrackState& state, const MotionModel& model, const NoiseConfig& noise,
                   const UkfParams& ukf) {
  require_finite(state, "predict");
  if (model.kind == MotionModel::Kind::kConstantTurnRate) return ukf_predict(state, model, noise, ukf);
  const Matrix8 f = transition_matrix(model);
  TrackState out;
  out.mean = f * state.mean;
  out.cov = symmetrized(Matrix8(f * state.cov * f.transpose() + noise.process_cov(state.mean(3))));
  return out;
}

Matrix4 nsa_covariance(const Matrix4& base, double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw InputError("NSA confidence must lie in [0, 1], got " + std::to_string(confidence));
  }
  return (1.0 - confidence) * base;
}

TrackState update(const TrackState& state, const Vector4& z, double confidence, NoiseMode mode,
                  const NoiseConfig& noise) {
  require_finite(state, "update");
  const Matrix48& h = measurement_matrix();
  Matrix4 r = noise.measurement_cov(state.mean(3));
  if (mode == NoiseMode::kNsa) r = nsa_covariance(r, confidence);

  const Matrix4 s = h * state.cov * h.transpose() + r;
  Eigen::LLT<Matrix4> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Kalman update: innovation covariance is singular");
  }
  // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(h * state.cov).transpose();
  TrackState out;
  out.mean = state.mean + gain * (z - h * state.mean);
  out.cov = symmetrized(Matrix8((Matrix8::Identity() - gain * h) * state.cov));
  return out;
}

double gating_distance(const TrackState& state, const Vector4& z, const NoiseConfig& noise) {
  const Matrix48& h = measurement_matrix();
  const Matrix4 s = h * state.cov * h.transpose() + noise.measurement_cov(state.mean(3));
  Eigen::LLT<Matrix4> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("gating distance: innovation covariance is singular");
  }
  const Vector4 residual = z - h * state.mean;
  return residual.dot(llt.solve(residual));
}

TrackState ukf_predict(const TrackState& state, const MotionModel& model, const NoiseConfig& noise,
                       const UkfParams& params) {
  require_finite(state, "ukf_predict");
  const SigmaWeights w = sigma_weights(params);
  const SigmaMatrix chi = sigma_points(state.mean, state.cov, params);
  SigmaMatrix y;
  for (int i = 0; i < kSigmaCount; ++i) y.col(i) = propagate(model, chi.col(i));

  TrackState out;
  out.mean = sigma_mean<kStateDim>(y, w);
  out.cov = sigma_cross<kStateDim, kStateDim>(y, out.mean, y, out.mean, w) +
            noise.process_cov(state.mean(3));
  out.cov = symmetrized(out.cov);
  return out;
}

TrackState ukf_update(const TrackState& state, const Vector4& z, double confidence, NoiseMode mode,
                      const NoiseConfig& noise, const UkfParams& params) {
  require_finite(state, "ukf_update");
  const SigmaWeights w = sigma_weights(params);
  const SigmaMatrix chi = sigma_points(state.mean, state.cov, params);
  const Eigen::Matrix<double, 4, kSigmaCount> zs = measurement_matrix() * chi;

  Matrix4 r = noise.measurement_cov(state.mean(3));
  if (mode == NoiseMode::kNsa) r = nsa_covariance(r, confidence);

  const Vector4 z_mean = sigma_mean<4>(zs, w);
  const Matrix4 s = sigma_cross<4, 4>(zs, z_mean, zs, z_mean, w) + r;
  const Eigen::Matrix<double, 8, 4> cross = sigma_cross<8, 4>(chi, state.mean, zs, z_mean, w);

  Eigen::LLT<Matrix4> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("UKF update: innovation covariance is singular");
  }
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(cross.transpose()).transpose();
  TrackState out;
  out.mean = state.mean + gain * (z - z_mean);
  out.cov = symmetrized(Matrix8(state.cov - gain * s * gain.transpose()));
  return out;
}

TrackState ukf_step(const TrackState& state, const MotionModel& model,
                    const std::optional<Vector4>& z, double confidence, NoiseMode mode,
                    const NoiseConfig& noise, const UkfParams& params) {
  TrackState predicted = ukf_predict(state, model, noise, params);
  if (!z) return predicted;
  return ukf_update(predicted, *z, confidence, mode, noise, params);
}

}  // namespace mot
