#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nemrelief {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;

// Raised when a gradient is not compatible with a unit director (n^T G != 0).
struct InconsistentGradient : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a closed-form expression has a vanishing denominator.
struct SingularFactor : std::domain_error {
  using std::domain_error::domain_error;
};

// Raised when a stencil or a query leaves the admissible domain.
struct OutsideDomain : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  double width() const { return hi - lo; }
};

struct Rect {
  double x_min = -1, x_max = 1, y_min = -1, y_max = 1;
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double diagonal() const { return std::hypot(width(), height()); }
};

// Unit vector modulo sign. Construction checks the norm.
class Director {
 public:
  static constexpr double norm_tol = 1e-12;

  explicit Director(const Vec3& v) : v_(v) {
    if (!(std::abs(v.norm() - 1.0) <= norm_tol))
      throw std::invalid_argument("director must have unit norm, got |n| = " + std::to_string(v.norm()));
  }
  static Director normalized(const Vec3& v) {
    const double nv = v.norm();
    if (!(nv > 0.0) || !std::isfinite(nv)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    return Director(v / nv);
  }
  static Director planar(double phi) { return Director(Vec3(std::cos(phi), std::sin(phi), 0.0)); }

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  Director flipped() const { return Director(-v_); }

 private:
  Vec3 v_;
};

// n and -n describe the same nematic state.
inline bool nematic_equal(const Director& a, const Director& b, double tol = 1e-12) {
  return a.vec().cross(b.vec()).norm() <= tol;
}

// Signed angle reduced to (-pi/2, pi/2]: the headless angle difference.
inline double wrap_half_pi(double a) {
  double r = std::remainder(a, pi);
  if (r <= -pi / 2) r += pi;
  return r;
}

inline double wrap_two_pi(double a) {
  double r = std::fmod(a, 2 * pi);
  if (r < 0) r += 2 * pi;
  return r;
}

inline Vec3 to3(const Vec2& p) { return Vec3(p.x(), p.y(), 0.0); }

}  // namespace nemrelief
