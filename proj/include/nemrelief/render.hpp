#pragma once

#include "distortion.hpp"
#include "field.hpp"
#include "parallel.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace nemrelief::render {

using Polyline = std::vector<Vec2>;

struct Style {
  std::string stroke = "black";
  std::string fill = "none";
  double width = 1.0;
};

struct Layer {
  std::string role;
  std::vector<Polyline> lines;
  bool closed = false;  // polygons rather than polylines
};

inline std::map<std::string, Style> default_styles() {
  return {{"boundary", {"black", "none", 1.5}},     {"regions", {"none", "#d8e4f0", 0}},
          {"characteristics", {"#1f4e9e", "none", 0.8}}, {"glyphs", {"#c0392b", "none", 1.2}},
          {"streamlines", {"#2e8b3e", "none", 1.0}},  {"contours", {"#7d3c98", "none", 0.9}},
          {"curves", {"black", "none", 1.2}},
          {"extensions", {"#9a9a9a", "none", 0.6}},        {"disc", {"none", "white", 0}}};
}

struct Scene {
  Rect viewport;
  std::vector<Layer> layers;
  std::map<std::string, Style> styles = default_styles();

  // Layer for a role, created on first use so the order of first use is the drawing order.
  Layer& layer(const std::string& role, bool closed = false) {
    for (auto& l : layers)
      if (l.role == role) return l;
    layers.push_back({role, {}, closed});
    return layers.back();
  }

  void validate() const {
    if (!(viewport.width() > 0) || !(viewport.height() > 0) || !std::isfinite(viewport.diagonal()))
      throw std::invalid_argument("scene viewport is degenerate");
    for (const auto& l : layers)
      for (const auto& pl : l.lines)
        for (const auto& p : pl)
          if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
            throw std::invalid_argument("non-finite coordinate in layer '" + l.role + "'");
  }
};

inline bool inside(const Rect& r, const Vec2& p) {
  return p.x() >= r.x_min && p.x() <= r.x_max && p.y() >= r.y_min && p.y() <= r.y_max;
}

// Part of the line p(t) = a + t d, t in [t0, t1], inside the rectangle. Liang-Barsky.
inline std::optional<std::pair<double, double>> clip_parameter(const Vec2& a, const Vec2& d, double t0, double t1,
                                                               const Rect& r) {
  const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
  const double q[4] = {a.x() - r.x_min, r.x_max - a.x(), a.y() - r.y_min, r.y_max - a.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0) {
      if (q[i] < 0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
  }
  if (t0 > t1) return std::nullopt;
  return std::pair{t0, t1};
}

// Straight characteristic clipped to the viewport; empty when it misses.
inline Polyline ray_polyline(const Vec2& anchor, const Vec2& dir, const Interval& s_range, const Rect& view) {
  const auto c = clip_parameter(anchor, dir, s_range.lo, s_range.hi, view);
  if (!c) return {};
  return {anchor + c->first * dir, anchor + c->second * dir};
}

// ---- streamlines

namespace detail {

inline std::optional<Vec2> aligned(const FieldSampler& field, const Vec2& p, const Vec2& ref) {
  const Vec3 q(p.x(), p.y(), 0);
  if (!field.contains(q)) return std::nullopt;
  const Vec3 n = field.director(q);
  Vec2 v(n.x(), n.y());
  const double nv = v.norm();
  if (!(nv > 1e-12)) return std::nullopt;
  v /= nv;
  return v.dot(ref) < 0 ? Vec2(-v) : v;
}

inline Polyline march(const FieldSampler& field, const Vec2& seed, Vec2 dir, double step, double len,
                      const std::optional<Rect>& clip) {
  Polyline out{seed};
  Vec2 p = seed;
  const int n_steps = static_cast<int>(std::ceil(len / step - 1e-9));
  for (int i = 0; i < n_steps; ++i) {
    const double h = std::min(step, len - i * step);
    const auto k1 = aligned(field, p, dir);
    if (!k1) break;
    const auto k2 = aligned(field, p + 0.5 * h * *k1, *k1);
    if (!k2) break;
    const auto k3 = aligned(field, p + 0.5 * h * *k2, *k1);
    if (!k3) break;
    const auto k4 = aligned(field, p + h * *k3, *k1);
    if (!k4) break;
    const Vec2 next = p + h / 6 * (*k1 + 2 * *k2 + 2 * *k3 + *k4);
    if (clip && !inside(*clip, next)) break;
    if (!field.contains(Vec3(next.x(), next.y(), 0))) break;
    dir = *k1;
    p = next;
    out.push_back(p);
  }
  return out;
}

}  // namespace detail

// Field line through the seed, followed both ways for half of max_len each and joined.
inline Polyline integrate_streamline(const FieldSampler& field, const Vec2& seed, double step, double max_len,
                                     const std::optional<Rect>& clip = std::nullopt) {
  if (!(step > 0)) throw std::invalid_argument("integrate_streamline: step must be positive");
  if (!(max_len > 0)) throw std::invalid_argument("integrate_streamline: max_len must be positive");
  const Vec3 s3(seed.x(), seed.y(), 0);
  if (!field.contains(s3)) throw OutsideDomain("integrate_streamline: seed outside the field domain");
  const Vec3 n = field.at(s3).vec();
  const Vec2 d0 = Vec2(n.x(), n.y()).normalized();
  auto fwd = detail::march(field, seed, d0, step, max_len / 2, clip);
  auto bwd = detail::march(field, seed, -d0, step, max_len / 2, clip);
  Polyline out(bwd.rbegin(), bwd.rend());
  out.insert(out.end(), fwd.begin() + 1, fwd.end());
  return out;
}

// ---- level sets

struct Grid {
  int nx = 2, ny = 2;  // nodes
};

namespace detail {

struct Crossing {
  long edge;
  Vec2 p;
};

}  // namespace detail

// Marching squares. Non-finite samples drop their cells. Polylines start at open ends in edge order,
// then closed loops; loops repeat their first vertex at the end.
inline std::vector<std::vector<Polyline>> contour_f(const std::function<double(double, double)>& f, const Rect& win,
                                                    Grid grid, const std::vector<double>& levels) {
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("contour_f: grid must be at least 2x2");
  const int nx = grid.nx, ny = grid.ny;
  std::vector<double> val(static_cast<size_t>(nx) * ny);
  auto X = [&](int i) { return win.x_min + win.width() * i / (nx - 1); };
  auto Y = [&](int j) { return win.y_min + win.height() * j / (ny - 1); };
  parallel_for(static_cast<size_t>(ny), [&](size_t j) {
    for (int i = 0; i < nx; ++i) val[j * nx + i] = f(X(i), Y(static_cast<int>(j)));
  });
  auto V = [&](int i, int j) { return val[static_cast<size_t>(j) * nx + i]; };

  std::vector<std::vector<Polyline>> out;
  for (double lev : levels) {
    // edge ids: 2*(j*nx+i) horizontal from (i,j), +1 vertical from (i,j)
    std::unordered_map<long, Vec2> point;
    std::unordered_map<long, std::vector<long>> adj;
    auto cross = [&](int i, int j, bool vertical) -> long {
      const long id = 2L * (static_cast<long>(j) * nx + i) + (vertical ? 1 : 0);
      if (!point.count(id)) {
        const int i2 = vertical ? i : i + 1, j2 = vertical ? j + 1 : j;
        const double a = V(i, j) - lev, b = V(i2, j2) - lev;
        const double t = a / (a - b);
        point[id] = Vec2(X(i) + t * (X(i2) - X(i)), Y(j) + t * (Y(j2) - Y(j)));
      }
      return id;
    };
    auto link = [&](long a, long b) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    };
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        const double v0 = V(i, j), v1 = V(i + 1, j), v2 = V(i + 1, j + 1), v3 = V(i, j + 1);
        if (!std::isfinite(v0) || !std::isfinite(v1) || !std::isfinite(v2) || !std::isfinite(v3)) continue;
        const int code = (v0 >= lev) | (v1 >= lev) << 1 | (v2 >= lev) << 2 | (v3 >= lev) << 3;
        if (code == 0 || code == 15) continue;
        // edges: bottom, right, top, left
        auto e = [&](int k) {
          switch (k) {
            case 0: return cross(i, j, false);
            case 1: return cross(i + 1, j, true);
            case 2: return cross(i, j + 1, false);
            default: return cross(i, j, true);
          }
        };
        const double centre = 0.25 * (v0 + v1 + v2 + v3);
        switch (code) {
          case 1: case 14: link(e(3), e(0)); break;
          case 2: case 13: link(e(0), e(1)); break;
          case 3: case 12: link(e(3), e(1)); break;
          case 4: case 11: link(e(1), e(2)); break;
          case 6: case 9: link(e(0), e(2)); break;
          case 7: case 8: link(e(3), e(2)); break;
          case 5:
            if (centre >= lev) { link(e(3), e(2)); link(e(0), e(1)); }
            else { link(e(3), e(0)); link(e(1), e(2)); }
            break;
          case 10:
            if (centre >= lev) { link(e(3), e(0)); link(e(1), e(2)); }
            else { link(e(3), e(2)); link(e(0), e(1)); }
            break;
        }
      }
    std::vector<long> ids;
    ids.reserve(adj.size());
    for (const auto& [id, _] : adj) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    std::unordered_map<long, bool> used;
    std::vector<Polyline> lines;
    auto walk = [&](long start) {
      Polyline pl{point[start]};
      used[start] = true;
      long prev = -1, cur = start;
      for (;;) {
        long next = -1;
        for (long nb : adj[cur])
          if (nb != prev && (!used[nb] || (nb == start && pl.size() > 2))) {
            next = nb;
            break;
          }
        if (next < 0) break;
        pl.push_back(point[next]);
        if (next == start) break;
        used[next] = true;
        prev = cur;
        cur = next;
      }
      lines.push_back(std::move(pl));
    };
    for (long id : ids)
      if (!used[id] && adj[id].size() == 1) walk(id);
    for (long id : ids)
      if (!used[id]) walk(id);
    out.push_back(std::move(lines));
  }
  return out;
}

// ---- glyphs

// Short segments centred at grid points, 0.06 of the viewport diagonal long.
inline std::vector<Polyline> director_glyphs(const FieldSampler& field, const Rect& view, int nx, int ny) {
  const double half = 0.03 * view.diagonal();
  std::vector<Polyline> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 c(view.x_min + view.width() * (i + 0.5) / nx, view.y_min + view.height() * (j + 0.5) / ny);
      const Vec3 q(c.x(), c.y(), 0);
      if (!field.contains(q)) continue;
      const Vec3 n = field.director(q);
      const Vec2 d(n.x(), n.y());
      if (!(d.norm() > 1e-12)) continue;
      const Vec2 u = half * d.normalized();
      out.push_back({c - u, c + u});
    }
  return out;
}

// ---- SVG

inline void emit_svg(const Scene& scene, std::ostream& os, double width_px = 720) {
  scene.validate();
  const Rect& v = scene.viewport;
  const double scale = width_px / v.width(), height_px = v.height() * scale;
  char buf[128];
  auto px = [&](const Vec2& p) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", (p.x() - v.x_min) * scale, (v.y_max - p.y()) * scale);
    return std::string(buf);
  };
  std::snprintf(buf, sizeof buf, "%.3f", width_px);
  const std::string w = buf;
  std::snprintf(buf, sizeof buf, "%.3f", height_px);
  const std::string h = buf;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  for (const auto& layer : scene.layers) {
    const auto it = scene.styles.find(layer.role);
    const Style st = it == scene.styles.end() ? Style{} : it->second;
    std::snprintf(buf, sizeof buf, "%.3g", st.width);
    os << "<g id=\"" << layer.role << "\" stroke=\"" << st.stroke << "\" fill=\"" << st.fill << "\" stroke-width=\""
       << buf << "\">\n";
    for (const auto& pl : layer.lines) {
      if (pl.size() < 2) continue;
      os << (layer.closed ? "<polygon points=\"" : "<polyline points=\"");
      for (size_t k = 0; k < pl.size(); ++k) os << (k ? " " : "") << px(pl[k]);
      os << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
}

// ---- CSV

struct GridSample {
  double x, y, phi, S, T, b1, b2, q, f;
  bool operator==(const GridSample&) const = default;
};

inline constexpr const char* csv_header = "x,y,phi,S,T,b1,b2,q,f";

inline void emit_csv(const std::vector<GridSample>& rows, std::ostream& os) {
  os << csv_header << '\n';
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.x, r.y, r.phi, r.S, r.T,
                  r.b1, r.b2, r.q, r.f);
    os << buf;
  }
}

inline std::vector<GridSample> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != csv_header) throw std::runtime_error("grid csv: bad header");
  std::vector<GridSample> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[9];
    std::stringstream ss(line);
    std::string cell;
    int k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k == 9) throw std::runtime_error("grid csv: too many columns on line " + std::to_string(lineno));
      size_t used = 0;
      try {
        v[k] = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = std::string::npos;
      }
      if (used != cell.size()) throw std::runtime_error("grid csv: bad number on line " + std::to_string(lineno));
      ++k;
    }
    if (k != 9) throw std::runtime_error("grid csv: expected 9 columns on line " + std::to_string(lineno));
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  return out;
}

// Distortion data on a node grid. Points outside the field domain, where fval is not finite, or where f is
// singular are left out.
// The frame sign follows the sampled director, so S and f share a sign when f is S/2.
inline std::vector<GridSample> sample_grid(const FieldSampler& field, const std::function<double(double, double)>& fval,
                                           const Rect& win, int nx, int ny) {
  std::vector<std::optional<GridSample>> slot(static_cast<size_t>(nx) * ny);
  parallel_for(slot.size(), [&](size_t k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    const double x = win.x_min + win.width() * i / std::max(1, nx - 1);
    const double y = win.y_min + win.height() * j / std::max(1, ny - 1);
    const Vec3 p(x, y, 0);
    if (!field.contains(p)) return;
    try {
      const double fv = fval ? fval(x, y) : std::nan("");
      if (fval && !std::isfinite(fv)) return;
      const Director n = field.at(p);
      const auto st = decompose_gradient(n, fd_gradient(field, p));
      slot[k] = GridSample{x, y, std::atan2(n.vec().y(), n.vec().x()), st.S, st.T, st.b1, st.b2, st.q, fv};
    } catch (const OutsideDomain&) {
    } catch (const SingularFactor&) {  // focal points of the characteristics
    }
  });
  std::vector<GridSample> out;
  for (auto& s : slot)
    if (s) out.push_back(*s);
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace nemrelief::render
