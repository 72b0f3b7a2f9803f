#pragma once

#include "distortion.hpp"
#include "field.hpp"
#include "roots.hpp"
#include "table_profile.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nemrelief {

// Slope of a straight characteristic; vertical lines carry no finite value.
struct Slope {
  double value = 0;
  bool vertical = false;
};

enum class Coverage { covered, not_covered, multi_covered };

inline const char* to_string(Coverage c) {
  switch (c) {
    case Coverage::covered: return "covered";
    case Coverage::not_covered: return "not_covered";
    case Coverage::multi_covered: return "multi_covered";
  }
  return "?";
}

// Outcome of locating the boundary point whose characteristic reaches a query point.
struct FieldAngle {
  Coverage status = Coverage::not_covered;
  double angle = std::numeric_limits<double>::quiet_NaN();
  double foot = std::numeric_limits<double>::quiet_NaN();  // x0 or theta0
  int roots = 0;
  bool ok() const { return status == Coverage::covered; }
};

namespace halfplane {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Angle prescribed on y = 0, possibly only on a finite support.
struct LineFrustration {
  std::function<double(double)> phi0;
  std::function<double(double)> dphi0;
  std::string tag;
  Interval support{-inf, inf};
};

inline LineFrustration constant_profile(double phi) {
  return {[phi](double) { return phi; }, [](double) { return 0.0; }, "constant"};
}

inline LineFrustration linear_profile(double slope, double offset = 0.0, Interval support = {-inf, inf}) {
  return {[=](double x) { return offset + slope * x; }, [=](double) { return slope; }, "linear", support};
}

// -(pi/2)(tanh x0 + 1) - atan b*
inline LineFrustration tanh_profile(double bstar) {
  const double c = std::atan(bstar);
  return {[c](double x) { return -0.5 * pi * (std::tanh(x) + 1) - c; },
          [](double x) {
            const double ch = std::cosh(x);
            return -0.5 * pi / (ch * ch);
          },
          "tanh"};
}

// -pi (x0^5 + 1)/2 - atan b*, meaningful for |x0| < 1.
inline LineFrustration quintic_profile(double bstar) {
  const double c = std::atan(bstar);
  return {[c](double x) { return -0.5 * pi * (std::pow(x, 5) + 1) - c; },
          [](double x) { return -2.5 * pi * std::pow(x, 4); }, "quintic", Interval{-1, 1}};
}

// Constant for x0 < 0, smoothly decreasing by 3pi/4 for x0 >= 0.
inline LineFrustration hybrid_profile(double bstar) {
  const double c = 0.75 * pi - std::atan(bstar);
  return {[c](double x) { return x > 0 ? c - 0.75 * pi * std::exp(-1 / (x * x)) : c; },
          [](double x) { return x > 0 ? -1.5 * pi * std::exp(-1 / (x * x)) / (x * x * x) : 0.0; }, "hybrid"};
}

inline LineFrustration sinusoidal_profile(double amplitude = pi / 10, double wavenumber = pi) {
  return {[=](double x) { return amplitude * std::sin(wavenumber * x); },
          [=](double x) { return amplitude * wavenumber * std::cos(wavenumber * x); }, "sinusoidal"};
}

// Sampled profile; support is the sampled range.
inline LineFrustration table_profile(std::vector<double> x0, std::vector<double> phi0) {
  TableProfile t(std::move(x0), std::move(phi0));
  Interval sup{t.lo(), t.hi()};
  return {[t](double x) { return t(x); }, [t](double x) { return t.prime(x); }, "table", sup};
}

inline LineFrustration read_profile_csv(std::istream& in) {
  auto [x, p] = read_two_column_csv(in, "x0,phi0");
  return table_profile(std::move(x), std::move(p));
}

// Largest |dphi0 - finite difference| over the sample points.
inline double profile_consistency(const LineFrustration& fr, const std::vector<double>& xs, double h = 1e-5) {
  double worst = 0;
  for (double x : xs) {
    const double fd = (fr.phi0(x + h) - fr.phi0(x - h)) / (2 * h);
    worst = std::max(worst, std::abs(fd - fr.dphi0(x)));
  }
  return worst;
}

inline Slope line_slope(double phi0, double bstar) {
  const double den = std::cos(phi0) - bstar * std::sin(phi0);
  if (std::abs(den) < 1e-14) return {0.0, true};
  return {(std::sin(phi0) + bstar * std::cos(phi0)) / den, false};
}

enum class Verdict { relievable_upper, relievable_lower, constant, not_relievable };
enum class Monotonicity { decreasing, increasing, constant, none };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::relievable_upper: return "relievable_upper";
    case Verdict::relievable_lower: return "relievable_lower";
    case Verdict::constant: return "constant";
    case Verdict::not_relievable: return "not_relievable";
  }
  return "?";
}

inline const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::constant: return "constant";
    case Monotonicity::none: return "none";
  }
  return "?";
}

struct RelievabilityReport {
  Verdict verdict = Verdict::not_relievable;
  Monotonicity monotonicity = Monotonicity::none;
  double phi_min = 0, phi_max = 0;
  int branch = 0;  // k with u = phi0 + atan b* in [(k-1)pi, k pi]
  bool range_ok = false;
  bool endpoint_contact = false;  // u touches a multiple of pi, still admitted
  std::optional<double> first_violation;
};

inline RelievabilityReport assess_relievability(const LineFrustration& fr, double bstar, Interval window,
                                                int n_samples = 2001) {
  if (n_samples < 2) throw std::invalid_argument("assess_relievability: need at least two samples");
  window.lo = std::max(window.lo, fr.support.lo);
  window.hi = std::min(window.hi, fr.support.hi);
  if (!(window.hi > window.lo)) throw std::invalid_argument("assess_relievability: empty window");
  constexpr double mono_tol = 1e-10, range_tol = 1e-12;

  std::vector<double> xs(n_samples), phi(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    xs[i] = window.lo + window.width() * i / (n_samples - 1);
    phi[i] = fr.phi0(xs[i]);
  }
  RelievabilityReport rep;
  rep.phi_min = *std::min_element(phi.begin(), phi.end());
  rep.phi_max = *std::max_element(phi.begin(), phi.end());

  bool up = true, down = true;
  for (int i = 0; i + 1 < n_samples; ++i) {
    const double d = phi[i + 1] - phi[i];
    if (d > mono_tol) down = false;
    if (d < -mono_tol) up = false;
  }
  if (up && down) rep.monotonicity = Monotonicity::constant;
  else if (down) rep.monotonicity = Monotonicity::decreasing;
  else if (up) rep.monotonicity = Monotonicity::increasing;
  else {
    rep.monotonicity = Monotonicity::none;
    const bool trend_down = phi.back() <= phi.front();
    for (int i = 0; i + 1 < n_samples; ++i) {
      const double d = phi[i + 1] - phi[i];
      if (trend_down ? d > mono_tol : d < -mono_tol) {
        rep.first_violation = xs[i];
        break;
      }
    }
  }

  const double c = std::atan(bstar);
  const double umin = rep.phi_min + c, umax = rep.phi_max + c;
  rep.branch = static_cast<int>(std::floor(umin / pi)) + 1;
  const double lo_gap = umin - (rep.branch - 1) * pi, hi_gap = rep.branch * pi - umax;
  // touching a multiple of pi only happens at the ends of a monotone range, where the characteristics lie along
  // y = 0 and never enter the half-plane; such profiles are admitted and flagged
  rep.range_ok = lo_gap >= -range_tol && hi_gap >= -range_tol;
  rep.endpoint_contact = rep.range_ok && (lo_gap <= range_tol || hi_gap <= range_tol);

  if (rep.monotonicity == Monotonicity::constant) rep.verdict = Verdict::constant;
  else if (rep.range_ok && rep.monotonicity == Monotonicity::decreasing) rep.verdict = Verdict::relievable_upper;
  else if (rep.range_ok && rep.monotonicity == Monotonicity::increasing) rep.verdict = Verdict::relievable_lower;
  else rep.verdict = Verdict::not_relievable;
  return rep;
}

enum class Side { upper, lower };

// Straight line through (x0, 0) carrying phi0(x0), oriented into the chosen half-plane.
struct Characteristic {
  Vec2 anchor;
  Vec2 direction;
  double angle = 0;  // carried phi0
  Interval s_range;
  Slope slope;
  Vec2 at(double s) const { return anchor + s * direction; }
};

inline Characteristic characteristic_through(double x0, const LineFrustration& fr, double bstar,
                                             Side side = Side::upper) {
  Characteristic ch;
  ch.anchor = Vec2(x0, 0);
  ch.angle = fr.phi0(x0);
  ch.slope = line_slope(ch.angle, bstar);
  const double u = ch.angle + std::atan(bstar);
  if (ch.slope.vertical) {
    ch.direction = Vec2(0, side == Side::upper ? 1 : -1);
  } else {
    // (cos u, sin u) spans the line; exact horizontal lines stay on the boundary
    ch.direction = Vec2(std::cos(u), std::sin(u));
    if ((side == Side::upper) == (ch.direction.y() < 0)) ch.direction = -ch.direction;
  }
  ch.s_range = std::abs(std::sin(u)) < 1e-14 ? Interval{-inf, inf} : Interval{0, inf};
  return ch;
}

struct SolveOptions {
  Interval search{-50, 50};
  int scan_samples = 4000;
  double x_tol = 0;  // 0 = bisect to full precision
};

namespace detail {

// Zero when (x, y) lies on the characteristic through (x0, 0).
inline double line_residual(const LineFrustration& fr, double bstar, double x, double y, double x0) {
  const double p = fr.phi0(x0);
  const double c = std::cos(p), s = std::sin(p);
  return y * (c - bstar * s) - (s + bstar * c) * (x - x0);
}

inline Interval effective_search(const LineFrustration& fr, const SolveOptions& opts) {
  return {std::max(opts.search.lo, fr.support.lo), std::min(opts.search.hi, fr.support.hi)};
}

}  // namespace detail

inline FieldAngle field_angle_at(double x, double y, const LineFrustration& fr, double bstar,
                                 const SolveOptions& opts = {}) {
  FieldAngle out;
  const Interval w = detail::effective_search(fr, opts);
  if (y == 0) {
    if (!w.contains(x)) return out;
    out.status = Coverage::covered;
    out.foot = x;
    out.angle = fr.phi0(x);
    out.roots = 1;
    return out;
  }
  auto g = [&](double x0) { return detail::line_residual(fr, bstar, x, y, x0); };
  const auto roots = scan_roots(g, w.lo, w.hi, opts.scan_samples, opts.x_tol);
  out.roots = static_cast<int>(roots.size());
  if (roots.empty()) return out;
  if (roots.size() > 1) {
    out.status = Coverage::multi_covered;
    return out;
  }
  out.status = Coverage::covered;
  out.foot = roots.front();
  out.angle = fr.phi0(out.foot);
  return out;
}

// f in the (x0, s) variables, with s the x-displacement along the characteristic.
inline double f_at(double x0, double s, const LineFrustration& fr, double bstar) {
  const double p = fr.phi0(x0), dp = fr.dphi0(x0);
  const double c = std::cos(p), sn = std::sin(p);
  const double lin = c - bstar * sn, nor = sn + bstar * c;
  double den;
  if (s == 0) {
    den = -nor;
  } else {
    if (std::abs(lin) < 1e-14) throw SingularFactor("f_at: vertical characteristic has no x-displacement");
    den = (1 + bstar * bstar) / lin * s * dp - nor;
  }
  if (den == 0 || !std::isfinite(den)) throw SingularFactor("f_at: vanishing denominator");
  return 0.5 * dp / den;
}

// Same f, parametrised by the height y reached on the characteristic. Valid for vertical lines.
inline double f_at_height(double x0, double y, const LineFrustration& fr, double bstar) {
  const double p = fr.phi0(x0), dp = fr.dphi0(x0);
  const double nor = std::sin(p) + bstar * std::cos(p);
  if (nor == 0) throw SingularFactor("f_at_height: horizontal characteristic");
  const double den = (1 + bstar * bstar) * y * dp / nor - nor;
  if (den == 0 || !std::isfinite(den)) throw SingularFactor("f_at_height: vanishing denominator");
  return 0.5 * dp / den;
}

struct CoverageGrid {
  Rect window;
  int nx = 0, ny = 0;
  std::vector<int> counts;  // row-major, row j from y_min

  int count(int i, int j) const { return counts[static_cast<std::size_t>(j) * nx + i]; }
  Vec2 center(int i, int j) const {
    return {window.x_min + (i + 0.5) * window.width() / nx, window.y_min + (j + 0.5) * window.height() / ny};
  }
  int cells_with(int at_least) const {
    return static_cast<int>(std::count_if(counts.begin(), counts.end(), [&](int c) { return c >= at_least; }));
  }
};

// Number of characteristics through each cell centre, by a dense sweep over x0.
inline CoverageGrid coverage_map(Rect window, const LineFrustration& fr, double bstar, int nx, int ny,
                                 const SolveOptions& opts = {}) {
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("coverage_map: grid must be positive");
  CoverageGrid grid{window, nx, ny, std::vector<int>(static_cast<std::size_t>(nx) * ny, 0)};
  const Interval w = detail::effective_search(fr, opts);
  const int n = std::max(opts.scan_samples, 2 * nx);
  const double c = std::atan(bstar);
  std::vector<double> x0(n + 1), cu(n + 1), su(n + 1);
  for (int k = 0; k <= n; ++k) {
    x0[k] = w.lo + w.width() * k / n;
    const double u = fr.phi0(x0[k]) + c;
    cu[k] = std::cos(u);
    su[k] = std::sin(u);
  }
  const double dx = window.width() / nx;
  for (int j = 0; j < ny; ++j) {
    const double y = window.y_min + (j + 0.5) * window.height() / ny;
    int* row = &grid.counts[static_cast<std::size_t>(j) * nx];
    // crossing abscissa x0 + y cot u; a sign change of sin u breaks continuity
    auto xc = [&](int k) { return x0[k] + y * cu[k] / su[k]; };
    for (int k = 0; k < n; ++k) {
      if (su[k] == 0 || su[k + 1] == 0 || (su[k] < 0) != (su[k + 1] < 0)) continue;
      double a = xc(k), b = xc(k + 1);
      if (a > b) std::swap(a, b);
      // cell centres x_i = x_min + (i + 1/2) dx in the half-open interval (a, b]; the index range is padded
      // by one because it is rounded differently from x_i itself, and the exact test below decides
      const double fa = std::clamp((a - window.x_min) / dx - 0.5, -2.0, nx + 1.0);
      const double fb = std::clamp((b - window.x_min) / dx - 0.5, -2.0, nx + 1.0);
      const int i0 = std::max(0, static_cast<int>(std::floor(fa)));
      const int i1 = std::min(nx - 1, static_cast<int>(std::floor(fb)) + 1);
      for (int i = i0; i <= i1; ++i) {
        const double xi = window.x_min + (i + 0.5) * dx;
        if (xi > a && xi <= b) ++row[i];
      }
    }
  }
  return grid;
}

// A solved half-plane problem: the relieved field with its domain.
class HalfPlaneSolution {
 public:
  HalfPlaneSolution(LineFrustration fr, double bstar, SolveOptions opts = {}, Interval assess_window = {-10, 10})
      : fr_(std::move(fr)), bstar_(bstar), opts_(opts) {
    report_ = assess_relievability(fr_, bstar_, assess_window);
    side_ = report_.verdict == Verdict::relievable_lower ? Side::lower : Side::upper;
  }

  const LineFrustration& frustration() const { return fr_; }
  double bstar() const { return bstar_; }
  const RelievabilityReport& report() const { return report_; }
  Side side() const { return side_; }
  bool constant() const { return report_.verdict == Verdict::constant; }
  bool relievable() const { return report_.verdict == Verdict::relievable_upper || report_.verdict == Verdict::relievable_lower; }

  bool in_half_plane(double y) const { return constant() || (side_ == Side::upper ? y > 0 : y < 0); }

  // Foot x0 of the unique characteristic through (x, y), if any.
  FieldAngle locate(double x, double y) const {
    if (constant()) {
      FieldAngle fa;
      fa.status = Coverage::covered;
      fa.foot = x;
      fa.angle = fr_.phi0(0.0);
      fa.roots = 1;
      return fa;
    }
    if (relievable() && in_half_plane(y)) {
      // uniqueness is guaranteed here, so one sign change over the window suffices
      const Interval w = detail::effective_search(fr_, opts_);
      auto g = [&](double x0) { return detail::line_residual(fr_, bstar_, x, y, x0); };
      const double ga = g(w.lo), gb = g(w.hi);
      if ((ga < 0) != (gb < 0) && ga != 0 && gb != 0) {
        FieldAngle fa;
        fa.status = Coverage::covered;
        fa.roots = 1;
        fa.foot = bisect(g, w.lo, w.hi, ga, gb, opts_.x_tol);
        fa.angle = fr_.phi0(fa.foot);
        return fa;
      }
    }
    if (!in_half_plane(y)) return {};
    return field_angle_at(x, y, fr_, bstar_, opts_);
  }

  std::optional<double> angle(double x, double y) const {
    auto fa = locate(x, y);
    if (!fa.ok()) return std::nullopt;
    return fa.angle;
  }

  double f(double x, double y) const {
    if (constant()) return 0.0;
    auto fa = locate(x, y);
    if (!fa.ok()) throw OutsideDomain("half-plane f: point not uniquely covered");
    return f_at_height(fa.foot, y, fr_, bstar_);
  }

  Characteristic characteristic(double x0) const { return characteristic_through(x0, fr_, bstar_, side_); }

  FieldSampler sampler() const {
    FieldSampler fs;
    auto self = *this;
    fs.name = "halfplane_" + fr_.tag;
    fs.domain = [self](const Vec3& p) { return self.angle(p.x(), p.y()).has_value(); };
    fs.director = [self](const Vec3& p) {
      auto a = self.angle(p.x(), p.y());
      if (!a) throw OutsideDomain("half-plane field: point not uniquely covered");
      return Vec3(std::cos(*a), std::sin(*a), 0.0);
    };
    return fs;
  }

 private:
  LineFrustration fr_;
  double bstar_;
  SolveOptions opts_;
  RelievabilityReport report_;
  Side side_ = Side::upper;
};

}  // namespace halfplane
}  // namespace nemrelief
