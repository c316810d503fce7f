#include "mot/camera.hpp"

#include <algorithm>
#include <cmath>

#include "mot/errors.hpp"

namespace mot {

namespace {

void require_nonsingular(const AffineTransform& t) {
  if (!(std::abs(t.det()) > 1e-9) || !std::isfinite(t.det())) {
    throw NumericalError("affine transform has a singular linear part");
  }
}

}  // namespace

bool AffineTransform::is_identity() const { return *this == identity(); }

AffineTransform AffineTransform::inverse() const {
  require_nonsingular(*this);
  const double d = det();
  AffineTransform inv;
  inv.a11 = a22 / d;
  inv.a12 = -a12 / d;
  inv.a21 = -a21 / d;
  inv.a22 = a11 / d;
  inv.tx = -(inv.a11 * tx + inv.a12 * ty);
  inv.ty = -(inv.a21 * tx + inv.a22 * ty);
  return inv;
}

AffineTransform AffineTransform::compose(const AffineTransform& o) const {
  AffineTransform r;
  r.a11 = a11 * o.a11 + a12 * o.a21;
  r.a12 = a11 * o.a12 + a12 * o.a22;
  r.a21 = a21 * o.a11 + a22 * o.a21;
  r.a22 = a21 * o.a12 + a22 * o.a22;
  r.tx = a11 * o.tx + a12 * o.ty + tx;
  r.ty = a21 * o.tx + a22 * o.ty + ty;
  return r;
}

void AffineTransform::apply(double x, double y, double& out_x, double& out_y) const {
  out_x = a11 * x + a12 * y + tx;
  out_y = a21 * x + a22 * y + ty;
}

Box warp_box(const AffineTransform& t, const Box& box) {
  const double xs[2] = {box.left, box.right()};
  const double ys[2] = {box.top, box.bottom()};
  double min_x = INFINITY, min_y = INFINITY, max_x = -INFINITY, max_y = -INFINITY;
  for (double x : xs) {
    for (double y : ys) {
      double wx = 0.0, wy = 0.0;
      t.apply(x, y, wx, wy);
      min_x = std::min(min_x, wx);
      max_x = std::max(max_x, wx);
      min_y = std::min(min_y, wy);
      max_y = std::max(max_y, wy);
    }
  }
  Box out{min_x, min_y, max_x - min_x, max_y - min_y};
  if (!out.valid()) throw NumericalError("warped box is degenerate");
  return out;
}

TrackState compensate(const TrackState& state, const AffineTransform& t) {
  require_nonsingular(t);
  Eigen::Matrix2d a;
  a << t.a11, t.a12, t.a21, t.a22;
  const double height_scale = std::sqrt(std::abs(t.det()));
  const double aspect_scale = std::sqrt((a.col(0).norm() * a.row(0).norm()) /
                                        (a.col(1).norm() * a.row(1).norm()));

  Matrix8 jac = Matrix8::Zero();
  jac.block<2, 2>(0, 0) = a;
  jac(2, 2) = aspect_scale;
  jac(3, 3) = height_scale;
  jac.block<2, 2>(4, 4) = a;
  jac(6, 6) = aspect_scale;
  jac(7, 7) = height_scale;

  TrackState out;
  out.mean = jac * state.mean;
  out.mean(0) += t.tx;
  out.mean(1) += t.ty;
  out.cov = jac * state.cov * jac.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  if (!(out.mean(3) > 0.0) || !(out.mean(2) > 0.0)) {
    throw NumericalError("compensated state has a degenerate box");
  }
  return out;
}

void TransformTable::set(int frame, const AffineTransform& t) {
  require_nonsingular(t);
  table_[frame] = t;
}

const AffineTransform& TransformTable::at(int frame) const {
  static const AffineTransform kIdentity = AffineTransform::identity();
  auto it = table_.find(frame);
  return it == table_.end() ? kIdentity : it->second;
}

}  // namespace mot
