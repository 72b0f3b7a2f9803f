#pragma once

// Built-in figure scenarios, shared by the CLI and the acceptance suite.

#include <nemrelief/circle.hpp>
#include <nemrelief/halfplane.hpp>
#include <nemrelief/parallel.hpp>
#include <nemrelief/quasiuniform.hpp>
#include <nemrelief/render.hpp>

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace nemrelief::figures {

using render::Polyline;
using render::Scene;

struct Artifact {
  std::string file;
  std::string text;
};

struct FigureScenario {
  std::string id;
  std::string description;
  std::function<Scene()> build;
};

inline std::string svg_of(const Scene& s) {
  std::ostringstream os;
  render::emit_svg(s, os);
  return os.str();
}

inline std::string fmt_m(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", m);
  return buf;
}

// ---- scene pieces

inline Polyline circle_polyline(double r = 1, int n = 240) {
  Polyline pl;
  for (int i = 0; i <= n; ++i) pl.emplace_back(r * std::cos(2 * pi * i / n), r * std::sin(2 * pi * i / n));
  return pl;
}

inline void add_glyphs(Scene& s, const FieldSampler& field, int nx, int ny) {
  s.layer("glyphs").lines = render::director_glyphs(field, s.viewport, nx, ny);
}

inline void add_streamlines(Scene& s, const FieldSampler& field, const std::vector<Vec2>& seeds, double step,
                            double len) {
  std::vector<Polyline> lines(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    if (!field.contains(Vec3(seeds[k].x(), seeds[k].y(), 0))) return;
    lines[k] = render::integrate_streamline(field, seeds[k], step, len, s.viewport);
  });
  auto& layer = s.layer("streamlines");
  for (auto& l : lines)
    if (l.size() > 1) layer.lines.push_back(std::move(l));
}

// Viewport cut by the half-planes x cos t + y sin t < 1 of the tangency set (Sutherland-Hodgman).
inline Polyline clipped_viewport(const Rect& v, const std::vector<double>& tangency) {
  Polyline poly{Vec2(v.x_min, v.y_min), Vec2(v.x_max, v.y_min), Vec2(v.x_max, v.y_max), Vec2(v.x_min, v.y_max)};
  for (double t : tangency) {
    const Vec2 nrm(std::cos(t), std::sin(t));
    auto g = [&](const Vec2& p) { return 1 - nrm.dot(p); };
    Polyline next;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 &a = poly[i], &b = poly[(i + 1) % poly.size()];
      const double ga = g(a), gb = g(b);
      if (ga >= 0) next.push_back(a);
      if ((ga >= 0) != (gb >= 0)) next.push_back(a + ga / (ga - gb) * (b - a));
    }
    poly = std::move(next);
    if (poly.empty()) break;
  }
  return poly;
}

// Admissible domain shaded, with the disc drawn over it.
inline void add_domain(Scene& s, const circle::CircleSolution& cs) {
  auto poly = clipped_viewport(s.viewport, cs.domain().tangency);
  if (poly.size() >= 3) s.layer("regions", true).lines.push_back(std::move(poly));
  if (cs.domain().exterior) s.layer("disc", true).lines.push_back(circle_polyline());
}

inline void add_halfplane_fan(Scene& s, const halfplane::HalfPlaneSolution& hp, const std::vector<double>& x0) {
  auto& layer = s.layer("characteristics");
  for (double x : x0) {
    const auto ch = hp.characteristic(x);
    auto pl = render::ray_polyline(ch.anchor, ch.direction, ch.s_range, s.viewport);
    if (!pl.empty()) layer.lines.push_back(std::move(pl));
  }
}

// Characteristic rays leaving the circle; with inside set, their continuation through the disc and beyond.
inline void add_circle_fan(Scene& s, const circle::CircleSolution& cs, int n, bool inside) {
  auto& out = s.layer("characteristics");
  for (int k = 0; k < n; ++k) {
    const auto ray = circle::characteristic_ray(2 * pi * k / n, cs.frustration(), cs.bstar());
    auto pl = render::ray_polyline(ray.anchor, ray.direction, ray.s_range, s.viewport);
    if (!pl.empty()) out.lines.push_back(std::move(pl));
  }
  if (!inside) return;
  auto& in = s.layer("extensions");
  for (int k = 0; k < n; ++k) {
    const auto ray = circle::characteristic_ray(2 * pi * k / n, cs.frustration(), cs.bstar());
    Interval rest = ray.s_range.lo >= 0 ? Interval{-1e9, 0} : Interval{0, 1e9};
    if (ray.tangent) continue;
    auto pl = render::ray_polyline(ray.anchor, ray.direction, rest, s.viewport);
    if (!pl.empty()) in.lines.push_back(std::move(pl));
  }
}

inline void add_tangent_lines(Scene& s, const circle::CircleSolution& cs) {
  auto& layer = s.layer("boundary");
  for (double t : cs.domain().tangency) {
    const Vec2 a(std::cos(t), std::sin(t)), d(-std::sin(t), std::cos(t));
    auto pl = render::ray_polyline(a, d, {-1e9, 1e9}, s.viewport);
    if (!pl.empty()) layer.lines.push_back(std::move(pl));
  }
}

// Curves of a function sampled on [x0, x1], broken where it leaves [-clip, clip].
inline std::vector<Polyline> sampled_curve(const std::function<double(double)>& g, double x0, double x1, int n,
                                           double clip) {
  std::vector<Polyline> out(1);
  for (int i = 0; i <= n; ++i) {
    const double x = x0 + (x1 - x0) * i / n, y = g(x);
    if (std::isfinite(y) && std::abs(y) <= clip) {
      out.back().emplace_back(x, y);
    } else if (!out.back().empty()) {
      out.emplace_back();
    }
  }
  std::erase_if(out, [](const Polyline& p) { return p.size() < 2; });
  return out;
}

inline void add_axes(Scene& s, double x_axis_y, double y_axis_x) {
  auto& layer = s.layer("boundary");
  layer.lines.push_back({Vec2(s.viewport.x_min, x_axis_y), Vec2(s.viewport.x_max, x_axis_y)});
  layer.lines.push_back({Vec2(y_axis_x, s.viewport.y_min), Vec2(y_axis_x, s.viewport.y_max)});
}

// Rays used for the local angle at large distances.
inline const std::vector<double>& probe_rays() {
  static const std::vector<double> t{pi / 6, pi / 2, 5 * pi / 6, 7 * pi / 6, 3 * pi / 2, 11 * pi / 6};
  return t;
}

inline std::vector<double> log_radii(double r0, double r1, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = r0 * std::pow(r1 / r0, static_cast<double>(i) / (n - 1));
  return r;
}

// Local angle against log10 r, one curve per ray.
inline Scene alpha_rays_scene(const FieldSampler& field, const std::vector<double>& thetas, double bstar) {
  Scene s;
  // x is 1.5 log10 r
  s.viewport = {0, 3, -pi / 2, pi / 2};
  auto& curves = s.layer("curves");
  const auto radii = log_radii(1.05, 100, 80);
  std::vector<Polyline> lines(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t k) {
    const auto a = asymptotic_angle(field, thetas[k], radii);
    if (a.alpha.empty()) return;
    // the branch is continuous along the ray; shift it once so the far value is in (-pi/2, pi/2]
    const double shift = wrap_half_pi(a.alpha.back()) - a.alpha.back();
    for (std::size_t i = 0; i < a.radii.size(); ++i) lines[k].emplace_back(1.5 * std::log10(a.radii[i]), a.alpha[i] + shift);
  });
  for (auto& l : lines)
    if (l.size() > 1) curves.lines.push_back(std::move(l));
  s.layer("boundary").lines.push_back({Vec2(0, std::atan(bstar)), Vec2(3, std::atan(bstar))});
  return s;
}

// ---- scenarios

inline double perturbed_c0(double m, double bstar) {
  // keeps the tangency at 3pi/2, where the perturbation takes the value -m/3
  return m == 1 ? 0.0 : circle::auto_c0(m, bstar) + m / 3;
}

inline circle::CircleSolution frank_solution(double m, double bstar, bool inside) {
  const double c0 = m == 1 ? 0.0 : circle::auto_c0(m, bstar);
  circle::CircleSolveOptions o;
  o.extend_inside = inside;
  return circle::CircleSolution(circle::frank_profile(m, c0), bstar, o);
}

inline circle::CircleSolution perturbed_solution(double m, double bstar) {
  return circle::CircleSolution(circle::perturbed_profile(m, perturbed_c0(m, bstar)), bstar);
}

inline const halfplane::LineFrustration strip_profile() { return halfplane::linear_profile(-pi / 4, 0.0, {0, 1}); }

inline Scene strip_scene(double bstar) {
  halfplane::HalfPlaneSolution hp(strip_profile(), bstar);
  Scene s;
  s.viewport = {-1.5, 2.5, 0, 3};
  std::vector<double> x0;
  for (int k = 0; k <= 10; ++k) x0.push_back(0.1 * k);
  add_halfplane_fan(s, hp, x0);
  add_glyphs(s, hp.sampler(), 16, 12);
  // f on the base is smallest at one end; lower values give level sets that cross the whole strip
  double fmin = 1e300;
  for (int k = 0; k <= 100; ++k) fmin = std::min(fmin, halfplane::f_at_height(0.01 * k, 0, hp.frustration(), bstar));
  std::vector<double> levels;
  for (double t : {0.2, 0.4, 0.6, 0.8}) levels.push_back(t * fmin);
  auto f = [&](double x, double y) { return hp.angle(x, y) ? hp.f(x, y) : std::nan(""); };
  auto c = render::contour_f(f, s.viewport, {161, 121}, levels);
  auto& layer = s.layer("contours");
  for (auto& lev : c)
    for (auto& pl : lev) layer.lines.push_back(std::move(pl));
  s.layer("boundary").lines.push_back({Vec2(0, 0), Vec2(1, 0)});
  return s;
}

inline std::vector<FigureScenario> figure_scenarios() {
  std::vector<FigureScenario> out;

  out.push_back({"lozenges_sinusoidal", "periodic frustration with crossing characteristics", [] {
                   const double b = 1;
                   halfplane::HalfPlaneSolution hp(halfplane::sinusoidal_profile(), b);
                   Scene s;
                   s.viewport = {-2, 2, 0, 2};
                   std::vector<double> x0;
                   for (int k = -40; k <= 40; ++k) x0.push_back(0.05 * k);
                   add_halfplane_fan(s, hp, x0);
                   const auto cov = halfplane::coverage_map(s.viewport, hp.frustration(), b, 80, 40);
                   auto& reg = s.layer("regions", true);
                   s.styles["regions"] = {"none", "#e06060", 0};
                   const double hx = 0.5 * s.viewport.width() / 80, hy = 0.5 * s.viewport.height() / 40;
                   for (int j = 0; j < cov.ny; ++j)
                     for (int i = 0; i < cov.nx; ++i)
                       if (cov.count(i, j) >= 2) {
                         const Vec2 c = cov.center(i, j);
                         reg.lines.push_back({c + Vec2(-hx, -hy), c + Vec2(hx, -hy), c + Vec2(hx, hy), c + Vec2(-hx, hy)});
                       }
                   return s;
                 }});

  out.push_back({"slope_line", "slope of the line characteristics against the boundary angle", [] {
                   Scene s;
                   s.viewport = {-pi, pi, -10, 10};
                   add_axes(s, 0, 0);
                   s.layer("curves").lines = sampled_curve(
                       [](double p) {
                         const auto sl = halfplane::line_slope(p, 1.0);
                         return sl.vertical ? std::nan("") : sl.value;
                       },
                       -pi, pi, 1200, 10);
                   return s;
                 }});

  for (const auto& [id, make] :
       std::vector<std::pair<std::string, std::function<halfplane::LineFrustration()>>>{
           {"halfplane_tanh", [] { return halfplane::tanh_profile(2); }},
           {"halfplane_quintic", [] { return halfplane::quintic_profile(2); }}})
    out.push_back({id, "relieved half-plane with field lines", [make] {
                     halfplane::HalfPlaneSolution hp(make(), 2);
                     Scene s;
                     s.viewport = {-3, 3, 0, 4};
                     std::vector<double> x0;
                     for (int k = -12; k <= 12; ++k) x0.push_back(0.25 * k);
                     add_halfplane_fan(s, hp, x0);
                     std::vector<Vec2> seeds;
                     for (int k = -5; k <= 5; ++k) seeds.emplace_back(0.5 * k, 1.5);
                     add_streamlines(s, hp.sampler(), seeds, 0.02, 12);
                     add_glyphs(s, hp.sampler(), 15, 10);
                     s.layer("boundary").lines.push_back({Vec2(-3, 0), Vec2(3, 0)});
                     return s;
                   }});

  for (double m : {0.5, 1.0, 1.5})
    out.push_back({"slope_circle_m" + fmt_m(m), "slope of the circle characteristics over one turn", [m] {
                     const double b = 2;
                     const auto fr = frank_solution(m, b, false).frustration();
                     Scene s;
                     s.viewport = {0, 2 * pi, -10, 10};
                     add_axes(s, 0, 0);
                     s.layer("curves").lines = sampled_curve(
                         [&](double t) {
                           const auto sl = circle::circle_slope(fr.phi0(t), b);
                           return sl.vertical ? std::nan("") : sl.value;
                         },
                         0, 2 * pi, 1600, 10);
                     return s;
                   }});

  for (double m : {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
    out.push_back({"domain_m" + fmt_m(m), "admissible domain for a Frank profile", [m] {
                     const double b = 2;
                     circle::CircleSolution cs(circle::frank_profile(m, 0), b);
                     Scene s;
                     s.viewport = {-4, 4, -4, 4};
                     add_domain(s, cs);
                     add_tangent_lines(s, cs);
                     s.layer("boundary").lines.push_back(circle_polyline());
                     add_circle_fan(s, cs, 48, false);
                     add_glyphs(s, cs.sampler(), 16, 16);
                     return s;
                   }});

  for (double m : {0.5, 1.0, 1.5})
    out.push_back({"frank_m" + fmt_m(m), "Frank profile relieved outside the circle", [m] {
                     const double b = 2;
                     const auto cs = frank_solution(m, b, m == 0.5);
                     Scene s;
                     s.viewport = {-4, 4, -3, 5};
                     s.layer("boundary").lines.push_back(circle_polyline());
                     add_circle_fan(s, cs, 36, true);
                     std::vector<Vec2> seeds;
                     for (int k = 0; k < 12; ++k) seeds.emplace_back(2.2 * std::cos(pi / 12 + k * pi / 6), 2.2 * std::sin(pi / 12 + k * pi / 6));
                     add_streamlines(s, cs.sampler(), seeds, 0.02, 14);
                     add_glyphs(s, cs.sampler(), 14, 14);
                     return s;
                   }});

  for (double m : {0.5, 1.0, 1.5})
    out.push_back({"perturbed_m" + fmt_m(m), "perturbed profile on the circle", [m] {
                     const auto cs = perturbed_solution(m, 2);
                     Scene s;
                     s.viewport = {-4, 4, -3, 5};
                     s.layer("boundary").lines.push_back(circle_polyline());
                     add_circle_fan(s, cs, 36, true);
                     add_glyphs(s, cs.sampler(), 14, 14);
                     return s;
                   }});

  for (double m : {0.5, 1.0, 1.5}) {
    out.push_back({"alpha_rays_frank_m" + fmt_m(m), "local angle along rays, Frank profile", [m] {
                     return alpha_rays_scene(frank_solution(m, 2, false).sampler(), probe_rays(), 2);
                   }});
    out.push_back({"alpha_rays_perturbed_m" + fmt_m(m), "local angle along rays, perturbed profile", [m] {
                     return alpha_rays_scene(perturbed_solution(m, 2).sampler(), probe_rays(), 2);
                   }});
  }

  out.push_back({"hybrid_halfplane", "half-plane field with ray-dependent asymptotics", [] {
                   halfplane::HalfPlaneSolution hp(halfplane::hybrid_profile(2), 2);
                   Scene s;
                   s.viewport = {-3, 5, 0, 6};
                   std::vector<double> x0;
                   for (int k = -12; k <= 20; ++k) x0.push_back(0.25 * k);
                   add_halfplane_fan(s, hp, x0);
                   std::vector<Vec2> seeds;
                   for (int k = -2; k <= 8; ++k) seeds.emplace_back(0.5 * k, 2);
                   add_streamlines(s, hp.sampler(), seeds, 0.02, 14);
                   return s;
                 }});
  out.push_back({"hybrid_alpha_rays", "local angle along rays for the hybrid field", [] {
                   halfplane::HalfPlaneSolution hp(halfplane::hybrid_profile(2), 2);
                   return alpha_rays_scene(hp.sampler(), {pi / 6, pi / 3, pi / 2, 2 * pi / 3, 5 * pi / 6}, 2);
                 }});

  for (double b : {2.0, 4.0})
    out.push_back({"strip_b" + fmt_m(b), "one-dimensional uniformity on a segment, with level sets of f",
                   [b] { return strip_scene(b); }});
  return out;
}

// Every scenario rendered to SVG, plus a manifest listing the files in order.
inline std::vector<Artifact> render_all() {
  const auto list = figure_scenarios();
  std::vector<Artifact> out(list.size());
  parallel_for(list.size(), [&](std::size_t k) { out[k] = {list[k].id + ".svg", svg_of(list[k].build())}; });
  std::string manifest;
  for (std::size_t k = 0; k < list.size(); ++k) manifest += out[k].file + "\t" + list[k].description + "\n";
  out.push_back({"manifest.txt", manifest});
  return out;
}

}  // namespace nemrelief::figures
