#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace nemrelief {

// Bisection on a bracket with fa*fb <= 0, to full double precision unless x_tol is larger.
template <class F>
double bisect(F&& fn, double a, double b, double fa, double fb, double x_tol = 0.0, int max_iter = 200) {
  if (fa == 0) return a;
  if (fb == 0) return b;
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= std::min(a, b) || m >= std::max(a, b) || std::abs(b - a) <= x_tol) return m;
    const double fm = fn(m);
    if (fm == 0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// All sign changes of fn on [lo, hi] sampled at n+1 points, each refined by bisection.
// Roots closer together than the sample spacing may be missed.
template <class F>
std::vector<double> scan_roots(F&& fn, double lo, double hi, int n, double x_tol = 0.0) {
  std::vector<double> roots;
  const double h = (hi - lo) / n;
  double xa = lo, fa = fn(lo);
  for (int i = 1; i <= n; ++i) {
    const double xb = (i == n) ? hi : lo + i * h;
    const double fb = fn(xb);
    if (std::isfinite(fa) && std::isfinite(fb)) {
      if (fa == 0) {
        if (roots.empty() || roots.back() != xa) roots.push_back(xa);
      } else if ((fa < 0) != (fb < 0) && fb != 0) {
        roots.push_back(bisect(fn, xa, xb, fa, fb, x_tol));
      }
    }
    xa = xb;
    fa = fb;
  }
  if (fa == 0 && (roots.empty() || roots.back() != xa)) roots.push_back(xa);
  return roots;
}

// Sign changes on [0, 2*pi) of a function that is periodic up to sign (nematic profiles of
// half-integer charge flip sign over one turn). The end point is evaluated, not copied from 0,
// so the seam does not create a spurious crossing.
template <class F>
std::vector<double> scan_roots_periodic(F&& fn, int n, double x_tol = 0.0) {
  const double two_pi = 2 * 3.14159265358979323846;
  std::vector<double> roots;
  const double h = two_pi / n;
  double xa = 0.0, fa = fn(0.0);
  for (int i = 1; i <= n; ++i) {
    const double xb = i * h;
    const double fb = (i == n) ? fn(two_pi) : fn(xb);
    if (std::isfinite(fa) && std::isfinite(fb)) {
      if (fa == 0) {
        roots.push_back(xa);
      } else if ((fa < 0) != (fb < 0) && fb != 0) {
        roots.push_back(bisect(fn, xa, xb, fa, fb, x_tol));
      }
    }
    xa = xb;
    fa = fb;
  }
  for (double& r : roots)
    if (r >= two_pi) r -= two_pi;
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

}  // namespace nemrelief
