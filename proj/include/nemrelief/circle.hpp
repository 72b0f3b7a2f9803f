#pragma once

#include "distortion.hpp"
#include "field.hpp"
#include "halfplane.hpp"
#include "roots.hpp"
#include "table_profile.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nemrelief::circle {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class ProfileKind { frank, perturbed, custom };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::frank: return "frank";
    case ProfileKind::perturbed: return "perturbed";
    case ProfileKind::custom: return "custom";
  }
  return "?";
}

// Local angle alpha0(theta0) prescribed on the unit circle; n = cos(alpha) e_r + sin(alpha) e_theta.
struct CircleFrustration {
  std::function<double(double)> alpha0;
  std::function<double(double)> dalpha0;
  double m = 1;
  double c0 = 0;
  ProfileKind kind = ProfileKind::frank;

  double phi0(double t) const { return alpha0(t) + t; }
  double dphi0(double t) const { return dalpha0(t) + 1; }
};

inline CircleFrustration frank_profile(double m, double c0) {
  return {[=](double t) { return (m - 1) * t + c0; }, [=](double) { return m - 1; }, m, c0, ProfileKind::frank};
}

// Frank profile plus (m/3) sin(theta0); same winding.
inline CircleFrustration perturbed_profile(double m, double c0) {
  return {[=](double t) { return (m - 1) * t + m / 3 * std::sin(t) + c0; },
          [=](double t) { return (m - 1) + m / 3 * std::cos(t); }, m, c0, ProfileKind::perturbed};
}

// Offset that puts the single tangency of a charge-m Frank profile at theta0 = 3pi/2.
inline double auto_c0(double m, double bstar) { return -1.5 * pi * (m - 1) - std::atan(1 / bstar); }

// Sampled alpha0 on [0, 2pi], continued by alpha0(t + 2pi) = alpha0(t) + 2(m-1)pi.
inline CircleFrustration table_profile(std::vector<double> theta0, std::vector<double> alpha0) {
  if (theta0.empty() || std::abs(theta0.front()) > 1e-12 || std::abs(theta0.back() - 2 * pi) > 1e-9)
    throw std::invalid_argument("circle profile table must span [0, 2pi]");
  const double jump = alpha0.back() - alpha0.front();
  const double m = 1 + jump / (2 * pi);
  if (std::abs(2 * m - std::round(2 * m)) > 1e-10)
    throw std::invalid_argument("circle profile table: alpha0(2pi) - alpha0(0) must be a multiple of pi");
  TableProfile t(std::move(theta0), std::move(alpha0));
  const double mm = std::round(2 * m) / 2;
  const double step = 2 * (mm - 1) * pi;
  auto reduce = [](double th, double& k) {
    k = std::floor(th / (2 * pi));
    return th - 2 * pi * k;
  };
  CircleFrustration fr;
  fr.alpha0 = [t, step, reduce](double th) {
    double k;
    const double r = reduce(th, k);
    return t(r) + k * step;
  };
  fr.dalpha0 = [t, reduce](double th) {
    double k;
    return t.prime(reduce(th, k));
  };
  fr.m = mm;
  fr.c0 = t(0.0);
  fr.kind = ProfileKind::custom;
  return fr;
}

inline CircleFrustration read_profile_csv(std::istream& in) {
  auto [t, a] = read_two_column_csv(in, "theta0,alpha0");
  return table_profile(std::move(t), std::move(a));
}

inline double winding_charge(const CircleFrustration& fr) {
  return 1 + (fr.alpha0(2 * pi) - fr.alpha0(0)) / (2 * pi);
}

// Slope of the characteristic carrying phi0.
inline Slope circle_slope(double phi0, double bstar) {
  const double den = bstar * std::sin(phi0) + std::cos(phi0);
  if (std::abs(den) < 1e-14) return {0.0, true};
  return {-(bstar * std::cos(phi0) - std::sin(phi0)) / den, false};
}

// b* sin(alpha0) + cos(alpha0): zero where the characteristic is tangent to the circle.
inline double contact_factor(double alpha0, double bstar) { return bstar * std::sin(alpha0) + std::cos(alpha0); }

inline std::vector<double> tangency_set(const CircleFrustration& fr, double bstar, int n_scan = 4096) {
  if (n_scan < 8) throw std::invalid_argument("tangency_set: n_scan must be at least 8");
  auto r = scan_roots_periodic([&](double t) { return contact_factor(fr.alpha0(t), bstar); }, n_scan);
  std::sort(r.begin(), r.end());
  return r;
}

// Tangency points of a Frank profile in closed form, sorted in [0, 2pi).
inline std::vector<double> frank_tangency_closed_form(double m, double c0, double bstar) {
  std::vector<double> out;
  if (m == 1) return out;
  const int count = static_cast<int>(std::lround(2 * std::abs(m - 1)));
  for (int n = 1; n <= count; ++n) out.push_back(wrap_two_pi((n * pi - std::atan(1 / bstar) - c0) / (m - 1)));
  std::sort(out.begin(), out.end());
  return out;
}

enum class DomainKind { whole_plane, exterior_of_circle, half_plane_intersection };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::whole_plane: return "whole_plane";
    case DomainKind::exterior_of_circle: return "exterior_of_circle";
    case DomainKind::half_plane_intersection: return "half_plane_intersection";
  }
  return "?";
}

// Circle exterior cut by the tangent half-planes x cos t + y sin t < 1.
struct DomainRegion {
  DomainKind kind = DomainKind::exterior_of_circle;
  std::vector<double> tangency;
  bool exterior = true;

  bool contains(double x, double y) const {
    if (kind == DomainKind::whole_plane) return true;
    if (exterior && x * x + y * y <= 1) return false;
    for (double t : tangency)
      if (!(x * std::cos(t) + y * std::sin(t) < 1)) return false;
    return true;
  }
  // A polygon circumscribed to the circle is bounded once its vertices surround it.
  bool bounded() const {
    if (kind != DomainKind::half_plane_intersection || tangency.size() < 3) return false;
    for (std::size_t i = 0; i < tangency.size(); ++i) {
      const double next = i + 1 < tangency.size() ? tangency[i + 1] : tangency.front() + 2 * pi;
      if (next - tangency[i] >= pi - 1e-12) return false;
    }
    return true;
  }
};

namespace detail {

inline bool is_constant_phi(const CircleFrustration& fr) {
  const double p0 = fr.phi0(0);
  for (int i = 1; i <= 64; ++i)
    if (std::abs(fr.phi0(2 * pi * i / 64) - p0) > 1e-12) return false;
  return true;
}

inline bool is_resonant(const CircleFrustration& fr, double bstar) {
  const double a = std::atan(bstar);
  for (int i = 0; i <= 64; ++i)
    if (std::abs(wrap_half_pi(fr.alpha0(2 * pi * i / 64) - a)) > 1e-10) return false;
  return true;
}

}  // namespace detail

inline DomainRegion admissible_domain(const CircleFrustration& fr, double bstar, int n_scan = 4096) {
  DomainRegion d;
  if (detail::is_constant_phi(fr)) {
    d.kind = DomainKind::whole_plane;
    d.exterior = false;
    return d;
  }
  d.tangency = tangency_set(fr, bstar, n_scan);
  d.kind = d.tangency.empty() ? DomainKind::exterior_of_circle : DomainKind::half_plane_intersection;
  return d;
}

// Straight characteristic through (cos t0, sin t0).
struct CharacteristicRay {
  double theta0 = 0;
  Vec2 anchor;
  Vec2 direction;  // arc-length direction used for the s-range
  Vec2 transport;  // (B, -A)/sqrt(1 + b*^2)
  double angle = 0;  // carried phi0
  Interval s_range;
  bool vertical = false;
  bool tangent = false;
  Vec2 at(double s) const { return anchor + s * direction; }
};

inline CharacteristicRay characteristic_ray(double theta0, const CircleFrustration& fr, double bstar) {
  CharacteristicRay ray;
  ray.theta0 = theta0;
  ray.anchor = Vec2(std::cos(theta0), std::sin(theta0));
  ray.angle = fr.phi0(theta0);
  const double cp = std::cos(ray.angle), sp = std::sin(ray.angle);
  const double A = bstar * cp - sp, B = bstar * sp + cp, norm = std::sqrt(1 + bstar * bstar);
  ray.transport = Vec2(B, -A) / norm;
  ray.vertical = std::abs(B) < 1e-14;
  ray.direction = ray.vertical ? Vec2(0, 1) : Vec2(std::abs(B), -(B > 0 ? 1 : -1) * A) / norm;
  const double contact = contact_factor(fr.alpha0(theta0), bstar);
  ray.tangent = std::abs(contact) < 1e-12;
  // the admissible half of the line leaves the circle
  const double out = ray.direction.dot(ray.anchor);
  if (ray.tangent) ray.s_range = {-inf, inf};
  else if (out > 0) ray.s_range = {0, inf};
  else ray.s_range = {-inf, 0};
  return ray;
}

// f on a ray; s is measured along ray.direction.
inline double f_at_circle(double theta0, double s, const CircleFrustration& fr, double bstar) {
  const auto ray = characteristic_ray(theta0, fr, bstar);
  const double dp = fr.dphi0(theta0);
  const double C = contact_factor(fr.alpha0(theta0), bstar);
  const double st = ray.transport.dot(ray.direction) * s;
  const double den = C + std::sqrt(1 + bstar * bstar) * dp * st;
  if (std::abs(den) < 1e-14) throw SingularFactor("f_at_circle: vanishing denominator (tangent or focal point)");
  return 0.5 * dp / den;
}

struct CircleSolveOptions {
  int n_scan = 4096;
  bool extend_inside = false;
  double x_tol = 0;
};

struct DegeneracyReport {
  std::vector<double> tangency;
  std::vector<double> radial;  // R0 = |b* cos(alpha0) - sin(alpha0)| = 0
  bool resonant_global = false;
};

inline DegeneracyReport classify_degeneracies(const CircleFrustration& fr, double bstar, int n_scan = 4096) {
  DegeneracyReport rep;
  rep.resonant_global = detail::is_resonant(fr, bstar);
  rep.tangency = tangency_set(fr, bstar, n_scan);
  if (!rep.resonant_global) {
    rep.radial = scan_roots_periodic(
        [&](double t) {
          const double a = fr.alpha0(t);
          return bstar * std::cos(a) - std::sin(a);
        },
        n_scan);
    std::sort(rep.radial.begin(), rep.radial.end());
  }
  return rep;
}

namespace detail {

// Per-theta0 line coefficients on the scan grid, independent of the query point.
struct LineTable {
  int n = 0;
  std::vector<double> c, s, A, B;

  // n + 1 entries: the one at 2pi is evaluated, since phi0 may have advanced by an odd multiple of pi
  LineTable(const CircleFrustration& fr, double bstar, int n_scan)
      : n(n_scan), c(n + 1), s(n + 1), A(n + 1), B(n + 1) {
    for (int i = 0; i <= n; ++i) {
      const double t = 2 * pi * i / n, p = fr.phi0(t);
      c[i] = std::cos(t);
      s[i] = std::sin(t);
      A[i] = bstar * std::cos(p) - std::sin(p);
      B[i] = bstar * std::sin(p) + std::cos(p);
    }
  }
};

// theta0 values whose full characteristic line passes through (x, y).
inline std::vector<double> line_roots(const LineTable& tab, const CircleFrustration& fr, double bstar, double x,
                                      double y, double x_tol) {
  auto h = [&](double t) {
    const double p = fr.phi0(t);
    return (bstar * std::cos(p) - std::sin(p)) * (x - std::cos(t)) + (bstar * std::sin(p) + std::cos(p)) * (y - std::sin(t));
  };
  auto hi = [&](int i) { return tab.A[i] * (x - tab.c[i]) + tab.B[i] * (y - tab.s[i]); };
  std::vector<double> roots;
  const double step = 2 * pi / tab.n;
  double fa = hi(0);
  for (int i = 1; i <= tab.n; ++i) {
    const double fb = hi(i);
    if (fa == 0) {
      roots.push_back((i - 1) * step);
    } else if ((fa < 0) != (fb < 0) && fb != 0) {
      roots.push_back(bisect(h, (i - 1) * step, i * step, fa, fb, x_tol));
    }
    fa = fb;
  }
  if (!roots.empty() && roots.back() >= 2 * pi - 1e-15 && roots.front() == 0) roots.pop_back();
  return roots;
}

}  // namespace detail

// The relieved field outside the unit circle, optionally continued inside.
class CircleSolution {
 public:
  CircleSolution(CircleFrustration fr, double bstar, CircleSolveOptions opts = {})
      : fr_(std::move(fr)), bstar_(bstar), opts_(opts) {
    constant_ = detail::is_constant_phi(fr_);
    deg_ = classify_degeneracies(fr_, bstar_, opts_.n_scan);
    domain_ = admissible_domain(fr_, bstar_, opts_.n_scan);
    table_ = std::make_shared<detail::LineTable>(fr_, bstar_, opts_.n_scan);
  }

  const CircleFrustration& frustration() const { return fr_; }
  double bstar() const { return bstar_; }
  const DomainRegion& domain() const { return domain_; }
  const DegeneracyReport& degeneracies() const { return deg_; }
  bool resonant() const { return deg_.resonant_global; }
  bool constant() const { return constant_; }
  bool extends_inside() const { return opts_.extend_inside; }

  // Root search for the characteristic through (x, y). foot is theta0.
  FieldAngle locate(double x, double y) const {
    FieldAngle fa;
    const double r = std::hypot(x, y);
    if (constant_) {
      fa.status = Coverage::covered;
      fa.angle = fr_.phi0(0);
      fa.foot = std::atan2(y, x);
      fa.roots = 1;
      return fa;
    }
    if (deg_.resonant_global) {
      if (r == 0 || (r < 1 && !opts_.extend_inside)) return fa;
      fa.status = Coverage::covered;
      fa.foot = wrap_two_pi(std::atan2(y, x));
      fa.angle = fr_.phi0(fa.foot);
      fa.roots = 1;
      return fa;
    }
    if (r < 1 && !opts_.extend_inside) return fa;
    if (r == 1) {
      fa.status = Coverage::covered;
      fa.foot = wrap_two_pi(std::atan2(y, x));
      fa.angle = fr_.phi0(fa.foot);
      fa.roots = 1;
      return fa;
    }
    const bool on_rays = r > 1 && domain_.contains(x, y);
    if (!on_rays && !opts_.extend_inside) return fa;
    auto roots = detail::line_roots(*table_, fr_, bstar_, x, y, opts_.x_tol);
    if (on_rays) {
      // keep only lines whose admissible half reaches the point
      std::erase_if(roots, [&](double t) {
        const auto ray = characteristic_ray(t, fr_, bstar_);
        const double s = ray.direction.dot(Vec2(x, y) - ray.anchor);
        return !ray.s_range.contains(s, 1e-12);
      });
    }
    fa.roots = static_cast<int>(roots.size());
    if (roots.empty()) return fa;
    if (roots.size() > 1) {
      fa.status = Coverage::multi_covered;
      return fa;
    }
    fa.status = Coverage::covered;
    fa.foot = roots.front();
    fa.angle = fr_.phi0(fa.foot);
    return fa;
  }

  std::optional<double> angle(double x, double y) const {
    auto fa = locate(x, y);
    if (!fa.ok()) return std::nullopt;
    return fa.angle;
  }

  double f(double x, double y) const {
    if (constant_) return 0.0;
    auto fa = locate(x, y);
    if (!fa.ok()) throw OutsideDomain("circle f: point not uniquely covered");
    if (deg_.resonant_global) {
      // log spiral about the origin with local angle alpha0
      return 0.5 * std::cos(fr_.alpha0(fa.foot)) / std::hypot(x, y);
    }
    const auto ray = characteristic_ray(fa.foot, fr_, bstar_);
    return f_at_circle(fa.foot, ray.direction.dot(Vec2(x, y) - ray.anchor), fr_, bstar_);
  }

  CharacteristicRay ray(double theta0) const { return characteristic_ray(theta0, fr_, bstar_); }

  FieldSampler sampler() const {
    FieldSampler fs;
    auto self = *this;
    fs.name = std::string("circle_") + to_string(fr_.kind);
    fs.domain = [self](const Vec3& p) { return self.angle(p.x(), p.y()).has_value(); };
    fs.director = [self](const Vec3& p) {
      auto a = self.angle(p.x(), p.y());
      if (!a) throw OutsideDomain("circle field: point not uniquely covered");
      return Vec3(std::cos(*a), std::sin(*a), 0.0);
    };
    return fs;
  }

 private:
  CircleFrustration fr_;
  double bstar_;
  CircleSolveOptions opts_;
  bool constant_ = false;
  DegeneracyReport deg_;
  DomainRegion domain_;
  std::shared_ptr<const detail::LineTable> table_;
};

// Angle at (x, y) for a single query; see CircleSolution for repeated use.
inline FieldAngle field_angle_at_circle(double x, double y, const CircleFrustration& fr, double bstar,
                                        const CircleSolveOptions& opts = {}) {
  if (std::hypot(x, y) < 1 && !opts.extend_inside)
    throw std::invalid_argument("field_angle_at_circle: point inside the unit circle without extension");
  return CircleSolution(fr, bstar, opts).locate(x, y);
}

}  // namespace nemrelief::circle
