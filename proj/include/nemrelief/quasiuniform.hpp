#pragma once

#include "circle.hpp"
#include "distortion.hpp"
#include "field.hpp"
#include "halfplane.hpp"
#include "parallel.hpp"

#include <array>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nemrelief {

struct QUConstants {
  double S = 0, T = 0, b1 = 0, b2 = 0, q = 0;

  std::array<double, 5> as_array() const { return {S, T, b1, b2, q}; }
  static QUConstants from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
};

struct QUReport {
  bool verdict = false;
  std::string kind;        // quasi_uniform, not_quasi_uniform, constant
  std::string convention;  // q*=1, |b*|=1 or |v*|=1
  QUConstants constants;
  double fitted_bstar = 0;  // (b1* + b2*)/|S*| for splay-bend fields
  double max_deviation = 0;
  std::size_t reference = 0;
  std::vector<double> f;  // NaN where the distortion vanishes

  std::string to_record() const {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.12g", v);
      return std::string(buf);
    };
    os << "verdict=" << (verdict ? "true" : "false") << "\n"
       << "kind=" << kind << "\n"
       << "convention=" << convention << "\n"
       << "S*=" << num(constants.S) << "\n"
       << "T*=" << num(constants.T) << "\n"
       << "b1*=" << num(constants.b1) << "\n"
       << "b2*=" << num(constants.b2) << "\n"
       << "q*=" << num(constants.q) << "\n"
       << "fitted_bstar=" << num(fitted_bstar) << "\n"
       << "max_deviation=" << num(max_deviation) << "\n"
       << "probes=" << f.size() << "\n"
       << "reference=" << reference << "\n";
    return os.str();
  }
};

// Characteristics at a point with the director sign fixed so that S >= 0 (n and -n are
// the same state, and S is the only characteristic that changes sign under the flip).
inline DistortionState canonical_state(const FieldSampler& field, const Vec3& p, double h) {
  const Mat3 G = fd_gradient(field, p, h);
  DecomposeOptions opt;
  opt.zero_tol = 1e-7 * std::max(1.0, G.norm());
  const Director n = field.at(p);
  auto st = decompose_gradient(n, G, opt);
  if (st.S < 0) st = decompose_gradient(n.flipped(), -G, opt);
  return st;
}

inline QUReport verify_characteristics(const std::vector<std::array<double, 5>>& v, double tol);

inline QUReport verify_quasi_uniformity(const FieldSampler& field, const std::vector<Vec3>& probes, double tol = 1e-5,
                                        double h = 0) {
  if (probes.size() < 3) throw std::invalid_argument("verify_quasi_uniformity: need at least three probes");
  if (h <= 0) h = 1e-5 * field.length_scale;
  std::vector<std::array<double, 5>> v(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    const auto st = canonical_state(field, probes[i], h);
    v[i] = {st.S, st.T, st.b1, st.b2, st.q};
  });
  return verify_characteristics(v, tol);
}

// Same test on tabulated (S, T, b1, b2, q) rows, already in the canonical sign convention.
inline QUReport verify_characteristics(const std::vector<std::array<double, 5>>& v, double tol = 1e-5) {
  if (v.size() < 3) throw std::invalid_argument("verify: need at least three samples");
  auto norm = [](const std::array<double, 5>& a) {
    double s = 0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
  };

  QUReport rep;
  rep.f.assign(v.size(), std::numeric_limits<double>::quiet_NaN());
  double vmax = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (norm(v[i]) > vmax) {
      vmax = norm(v[i]);
      rep.reference = i;
    }
  if (vmax < 1e-8) {
    rep.verdict = true;
    rep.kind = "constant";
    rep.convention = "none";
    for (auto& f : rep.f) f = 0;
    return rep;
  }

  const auto& ref = v[rep.reference];
  int k = 0;
  for (int j = 1; j < 5; ++j)
    if (std::abs(ref[j]) > std::abs(ref[k])) k = j;

  // constants in the q* = 1 convention when q does not vanish
  std::array<double, 5> c;
  const double bnorm = std::hypot(ref[2], ref[3]);
  double scale;
  if (ref[4] > 1e-9 * vmax) {
    scale = ref[4];
    rep.convention = "q*=1";
  } else if (bnorm > 1e-9 * vmax) {
    scale = bnorm;
    rep.convention = "|b*|=1";
  } else {
    scale = vmax;
    rep.convention = "|v*|=1";
  }
  for (int j = 0; j < 5; ++j) c[j] = ref[j] / scale;
  rep.constants = QUConstants::from_array(c);
  if (std::abs(c[0]) > 1e-12) rep.fitted_bstar = (c[2] + c[3]) / std::abs(c[0]);

  for (std::size_t i = 0; i < v.size(); ++i) {
    if (norm(v[i]) < 1e-9 * vmax) continue;  // f vanishes here
    double dev = 0;
    if (std::abs(v[i][k]) < 1e-12 * vmax) {
      dev = std::numeric_limits<double>::infinity();
    } else {
      for (int j = 0; j < 5; ++j) dev = std::max(dev, std::abs(v[i][j] / v[i][k] - ref[j] / ref[k]));
      rep.f[i] = v[i][k] / c[k];
    }
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  rep.verdict = rep.max_deviation <= tol;
  rep.kind = rep.verdict ? "quasi_uniform" : "not_quasi_uniform";
  return rep;
}

// Probe points on a grid inside a rectangle, kept only where the stencil fits in the domain.
inline std::vector<Vec3> grid_probes(const FieldSampler& field, Rect r, int nx, int ny, double margin = 1e-4) {
  std::vector<Vec3> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec3 p(r.x_min + (i + 0.5) * r.width() / nx, r.y_min + (j + 0.5) * r.height() / ny, 0);
      bool ok = field.contains(p);
      for (int k = 0; ok && k < 2; ++k)
        ok = field.contains(p + margin * Vec3::Unit(k)) && field.contains(p - margin * Vec3::Unit(k));
      if (ok) out.push_back(p);
    }
  return out;
}

inline double planar_angle(const FieldSampler& field, const Vec3& p) {
  const Vec3 n = field.at(p).vec();
  return std::atan2(n.y(), n.x());
}

struct AsymptoticAngle {
  std::vector<double> radii;   // radii actually reached
  std::vector<double> alpha;   // local angle phi - theta, reduced modulo pi near the previous value
  double limit = 0;            // last value
  double cauchy = 0;           // |last - previous|
  bool truncated = false;
  double truncated_at = 0;
};

// Local angle along the ray at polar angle theta from the origin.
inline AsymptoticAngle asymptotic_angle(const FieldSampler& field, double theta, const std::vector<double>& radii) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("asymptotic_angle: radii must increase");
  AsymptoticAngle out;
  for (double r : radii) {
    const Vec3 p(r * std::cos(theta), r * std::sin(theta), 0);
    if (!field.contains(p)) {
      out.truncated = true;
      out.truncated_at = r;
      break;
    }
    double a = planar_angle(field, p) - theta;
    // keep a continuous branch modulo pi
    a = out.alpha.empty() ? wrap_half_pi(a) : out.alpha.back() + wrap_half_pi(a - out.alpha.back());
    out.radii.push_back(r);
    out.alpha.push_back(a);
  }
  if (!out.alpha.empty()) out.limit = out.alpha.back();
  if (out.alpha.size() > 1) out.cauchy = std::abs(out.alpha.back() - out.alpha[out.alpha.size() - 2]);
  return out;
}

struct Inclination {
  std::vector<double> dots;
  double spread = 0;  // max - min
};

inline Inclination characteristic_inclination(const FieldSampler& field, const Vec2& direction,
                                              const std::vector<Vec2>& points) {
  Inclination out;
  const Vec2 e = direction.normalized();
  for (const auto& p : points) {
    const Vec3 n = field.at(to3(p)).vec();
    out.dots.push_back(e.x() * n.x() + e.y() * n.y());
  }
  if (!out.dots.empty()) {
    auto [lo, hi] = std::minmax_element(out.dots.begin(), out.dots.end());
    out.spread = *hi - *lo;
  }
  return out;
}

inline Inclination characteristic_inclination(const FieldSampler& field, const halfplane::Characteristic& ch,
                                              const std::vector<double>& probes_s) {
  std::vector<Vec2> pts;
  for (double s : probes_s) pts.push_back(ch.at(s));
  return characteristic_inclination(field, ch.direction, pts);
}

// Circle rays use the transport direction (B, -A)/sqrt(1 + b*^2).
inline Inclination characteristic_inclination(const FieldSampler& field, const circle::CharacteristicRay& ray,
                                              const std::vector<double>& probes_s) {
  std::vector<Vec2> pts;
  for (double s : probes_s) pts.push_back(ray.at(s));
  return characteristic_inclination(field, ray.transport, pts);
}

struct OneDReport {
  std::vector<double> gamma;
  bool uniform = false;
  double gamma0 = std::numeric_limits<double>::quiet_NaN();
  double max_deviation = 0;
};

namespace detail {
inline OneDReport finish_one_d(std::vector<double> g) {
  OneDReport rep;
  rep.gamma = std::move(g);
  if (rep.gamma.empty()) return rep;
  auto [lo, hi] = std::minmax_element(rep.gamma.begin(), rep.gamma.end());
  rep.max_deviation = *hi - *lo;
  rep.uniform = rep.max_deviation < 1e-8;
  if (rep.uniform) rep.gamma0 = rep.gamma.front();
  return rep;
}
}  // namespace detail

// gamma = phi0' + tau along the curve; tau = 0 on the line.
inline OneDReport one_d_uniformity(const halfplane::LineFrustration& fr, const std::vector<double>& x0) {
  std::vector<double> g;
  for (double x : x0) g.push_back(fr.dphi0(x));
  return detail::finish_one_d(std::move(g));
}

// On the unit circle tau = 1 and the angle to the tangent changes like alpha0.
inline OneDReport one_d_uniformity(const circle::CircleFrustration& fr, const std::vector<double>& theta0) {
  std::vector<double> g;
  for (double t : theta0) g.push_back(fr.dalpha0(t) + 1.0);
  return detail::finish_one_d(std::move(g));
}

// Winding of the director angle around a circle, in units of 2pi (half-integers for nematics).
inline double circuit_charge(const FieldSampler& field, Vec2 center, double radius, int n = 720) {
  double total = 0;
  double prev = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = 2 * pi * i / n;
    const Vec3 p(center.x() + radius * std::cos(t), center.y() + radius * std::sin(t), 0);
    const double a = planar_angle(field, p);
    if (i > 0) total += wrap_half_pi(a - prev);
    prev = a;
  }
  return total / (2 * pi);
}

}  // namespace nemrelief
