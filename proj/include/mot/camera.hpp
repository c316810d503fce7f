#pragma once

#include <map>

#include "mot/model.hpp"
#include "mot/motion.hpp"

namespace mot {

// 2x3 affine map from frame t-1 image coordinates into frame t coordinates:
//   x' = a11 x + a12 y + tx,  y' = a21 x + a22 y + ty
struct AffineTransform {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;
  double tx = 0.0;
  double ty = 0.0;

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double dx, double dy) { return {1.0, 0.0, 0.0, 1.0, dx, dy}; }

  double det() const { return a11 * a22 - a12 * a21; }
  bool is_identity() const;
  // Throws NumericalError when |det| <= 1e-9.
  AffineTransform inverse() const;
  // this after other: x -> this(other(x)).
  AffineTransform compose(const AffineTransform& other) const;
  void apply(double x, double y, double& out_x, double& out_y) const;

  bool operator==(const AffineTransform&) const = default;
};

// Axis-aligned bounding box of the four transformed corners.
Box warp_box(const AffineTransform& t, const Box& box);

// Maps a predicted state into the next frame's coordinates: the center goes
// through t, velocities through the linear part, height scales by
// sqrt|det| and aspect ratio by the anisotropy factor
//   g = sqrt((|col1| |row1|) / (|col2| |row2|))
// of the linear part, which reduces to |col1| / |col2| for axis-aligned
// scaling and satisfies g(A^-1) = 1 / g(A). The covariance is conjugated by
// the matching Jacobian.
TrackState compensate(const TrackState& state, const AffineTransform& t);

// Per-frame transforms; frames without an entry map to the identity.
class TransformTable {
 public:
  void set(int frame, const AffineTransform& t);
  const AffineTransform& at(int frame) const;
  bool contains(int frame) const { return table_.count(frame) != 0; }
  const std::map<int, AffineTransform>& table() const { return table_; }
  bool empty() const { return table_.empty(); }

 private:
  std::map<int, AffineTransform> table_;
};

}  // namespace mot
