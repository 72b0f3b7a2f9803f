#pragma once

#include "types.hpp"

#include <functional>
#include <string>
#include <utility>

namespace nemrelief {

// A director field given pointwise, with the domain where it is defined.
struct FieldSampler {
  std::function<Vec3(const Vec3&)> director;
  std::function<bool(const Vec3&)> domain;  // empty means everywhere
  std::string name;
  double length_scale = 1.0;

  bool contains(const Vec3& p) const { return !domain || domain(p); }
  Director at(const Vec3& p) const {
    if (!contains(p)) throw OutsideDomain("field '" + name + "' evaluated outside its domain");
    return Director(director(p));
  }
};

// Planar field from an azimuth phi(x, y).
inline FieldSampler planar_angle_field(std::function<double(double, double)> phi, std::string name,
                                       std::function<bool(const Vec3&)> domain = {}) {
  FieldSampler fs;
  fs.director = [phi = std::move(phi)](const Vec3& p) {
    const double a = phi(p.x(), p.y());
    return Vec3(std::cos(a), std::sin(a), 0.0);
  };
  fs.domain = std::move(domain);
  fs.name = std::move(name);
  return fs;
}

inline FieldSampler uniform_field(double phi) {
  return planar_angle_field([phi](double, double) { return phi; }, "uniform");
}

inline FieldSampler hedgehog_field(Vec3 center = Vec3::Zero()) {
  FieldSampler fs;
  fs.director = [center](const Vec3& p) { return Vec3((p - center).normalized()); };
  fs.domain = [center](const Vec3& p) { return (p - center).norm() > 1e-9; };
  fs.name = "hedgehog";
  return fs;
}

// n = cos(alpha) e_r + sin(alpha) e_theta about a planar centre. alpha = 0 is the planar
// splay, alpha = pi/2 the pure bend.
inline FieldSampler spiral_field(double alpha, Vec2 center = Vec2::Zero()) {
  auto dom = [center](const Vec3& p) { return std::hypot(p.x() - center.x(), p.y() - center.y()) > 1e-9; };
  auto fs = planar_angle_field(
      [alpha, center](double x, double y) { return std::atan2(y - center.y(), x - center.x()) + alpha; }, "spiral",
      dom);
  return fs;
}

inline FieldSampler planar_splay_field() {
  auto fs = spiral_field(0.0);
  fs.name = "planar_splay";
  return fs;
}

inline FieldSampler pure_bend_field() {
  auto fs = spiral_field(pi / 2);
  fs.name = "pure_bend";
  return fs;
}

// phi depends on x only.
inline FieldSampler single_variable_field(std::function<double(double)> phi) {
  return planar_angle_field([phi = std::move(phi)](double x, double) { return phi(x); }, "single_variable");
}

// Heliconical twist-bend field n = sin(a)(cos g, sin g, 0) + cos(a) e_z with g = g(z).
inline FieldSampler heliconical_field(double alpha, std::function<double(double)> g) {
  FieldSampler fs;
  fs.director = [alpha, g = std::move(g)](const Vec3& p) {
    const double gz = g(p.z());
    return Vec3(std::sin(alpha) * std::cos(gz), std::sin(alpha) * std::sin(gz), std::cos(alpha));
  };
  fs.name = "heliconical";
  return fs;
}

// Field rotated rigidly by R: n'(p) = R n(R^T p).
inline FieldSampler rotated_field(FieldSampler base, const Mat3& R) {
  FieldSampler fs;
  fs.name = base.name + "_rotated";
  fs.length_scale = base.length_scale;
  auto dir = base.director;
  fs.director = [dir, R](const Vec3& p) { return Vec3(R * dir(R.transpose() * p)); };
  if (base.domain) {
    auto dom = base.domain;
    fs.domain = [dom, R](const Vec3& p) { return dom(R.transpose() * p); };
  }
  return fs;
}

inline FieldSampler flipped_field(FieldSampler base) {
  auto dir = base.director;
  base.director = [dir](const Vec3& p) { return Vec3(-dir(p)); };
  base.name += "_flipped";
  return base;
}

// Central-difference gradient G_ij = d n_i / d x_j. Sampled directors are flipped into the
// hemisphere of the centre value, since n and -n are the same state.
inline Mat3 fd_gradient(const FieldSampler& field, const Vec3& p, double h) {
  if (!(h > 0)) throw std::invalid_argument("fd_gradient: step must be positive");
  const Vec3 n0 = field.at(p).vec();
  Mat3 G;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = h * Vec3::Unit(k);
    if (!field.contains(p + e) || !field.contains(p - e))
      throw OutsideDomain("fd_gradient: stencil leaves the domain of '" + field.name + "'");
    Vec3 np = field.director(p + e), nm = field.director(p - e);
    if (np.dot(n0) < 0) np = -np;
    if (nm.dot(n0) < 0) nm = -nm;
    G.col(k) = (np - nm) / (2 * h);
  }
  // differences of unit vectors carry an O(h^2) part along n0; drop it
  return (Mat3::Identity() - n0 * n0.transpose()) * G;
}

inline Mat3 fd_gradient(const FieldSampler& field, const Vec3& p) { return fd_gradient(field, p, 1e-5 * field.length_scale); }

}  // namespace nemrelief
