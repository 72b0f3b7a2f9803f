#pragma once

#include "distortion.hpp"
#include "quasiuniform.hpp"

#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace nemrelief::compat {

// Connector data in distortion-frame components.
// df = (f1, f2, f3): derivatives of f along n1, n2, n.
// d: the connector with grad n1 = n2 (x) d + ..., so d_j = n2 . (d n1 / d n_j).
// dd(i, j): derivative of d_i along n_j.
struct ConnectorState {
  double f = 0;
  Vec3 df = Vec3::Zero();
  Vec3 d = Vec3::Zero();
  Mat3 dd = Mat3::Zero();
};

struct Connectors {
  Vec3 c1, c2;  // frame components; grad n = n1 (x) c1 + n2 (x) c2
};

inline Connectors connectors(const QUConstants& k, double f) {
  return {f * Vec3(k.S / 2 + k.q, -k.T / 2, -k.b1), f * Vec3(k.T / 2, k.S / 2 - k.q, -k.b2)};
}

struct FrameGradients {
  Mat3 n, n1, n2;  // Cartesian gradients, rows are components
};

// grad n = n1 (x) c1 + n2 (x) c2, grad n1 = -n (x) c1 + n2 (x) d, grad n2 = -n (x) c2 - n1 (x) d
inline FrameGradients reconstruct_gradients(const DistortionFrame& fr, const QUConstants& k, const ConnectorState& cs) {
  const auto c = connectors(k, cs.f);
  auto cart = [&](const Vec3& v) -> Vec3 { return v[0] * fr.n1 + v[1] * fr.n2 + v[2] * fr.n; };
  const Vec3 c1 = cart(c.c1), c2 = cart(c.c2), d = cart(cs.d);
  return {fr.n1 * c1.transpose() + fr.n2 * c2.transpose(), -fr.n * c1.transpose() + fr.n2 * d.transpose(),
          -fr.n * c2.transpose() - fr.n1 * d.transpose()};
}

// Left minus right side of each of the nine compatibility conditions, in order.
inline std::array<double, 9> compatibility_residuals(const QUConstants& k, const ConnectorState& cs) {
  const double S = k.S, T = k.T, b1 = k.b1, b2 = k.b2, q = k.q;
  const double f = cs.f, f1 = cs.df[0], f2 = cs.df[1], f3 = cs.df[2];
  const double d1 = cs.d[0], d2 = cs.d[1], d3 = cs.d[2];
  auto D = [&](int i, int j) { return cs.dd(i - 1, j - 1); };
  const double f2_ = f * f, sp = S / 2 + q, sm = S / 2 - q;
  std::array<double, 9> r;
  r[0] = (T / 2) * f1 + sp * f2 - (-f2_ * b1 * T + 2 * f * q * d1);
  r[1] = b1 * f1 + sp * f3 - (f2_ * (T * T / 4 - sp * sp - b1 * b1) + f * b2 * d1);
  r[2] = b1 * f2 - (T / 2) * f3 - (f2_ * (S * T / 2 - b1 * b2) + f * (b2 * d2 - 2 * q * d3));
  r[3] = sm * f1 - (T / 2) * f2 - (f2_ * b2 * T + 2 * f * q * d2);
  r[4] = b2 * f1 + (T / 2) * f3 - (-f2_ * (S * T / 2 + b1 * b2) - f * (b1 * d1 + 2 * q * d3));
  r[5] = b2 * f2 + sm * f3 - (f2_ * (T * T / 4 - sm * sm - b2 * b2) - f * b1 * d2);
  r[6] = f2_ * (S * S / 4 - q * q + T * T / 4) - (-f * T * d3 - d1 * d1 - d2 * d2 + D(1, 2) - D(2, 1));
  r[7] = f2_ * (b1 * T / 2 - b2 * sp) - (f * sp * d1 + f * (T / 2) * d2 - f * b1 * d3 - d2 * d3 + D(1, 3) - D(3, 1));
  r[8] = f2_ * (b1 * sm + b2 * T / 2) - (f * sm * d2 - f * (T / 2) * d1 - f * b2 * d3 + d1 * d3 + D(2, 3) - D(3, 2));
  return r;
}

// Labelled text record, one residual per line.
inline std::string residual_record(const std::array<double, 9>& r) {
  std::string out;
  char buf[64];
  for (int i = 0; i < 9; ++i) {
    std::snprintf(buf, sizeof buf, "compat.%d=%.12g\n", i + 1, r[i]);
    out += buf;
  }
  return out;
}

struct HeliconicalState {
  QUConstants constants;
  ConnectorState connector;
  DistortionState state;
};

// Heliconical twist-bend field n = sin(a)(cos g, sin g, 0) + cos(a) e_z with g = g(z), at the
// height where g takes the value g. sign = -1 is the mirror image under y -> -y.
inline HeliconicalState heliconical_state(double alpha, int sign, double gz, double gzz, double g = 0.0) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("heliconical_state: sign must be +1 or -1");
  const double sa = std::sin(alpha), ca = std::cos(alpha), cg = std::cos(g), sg = std::sin(g);
  const double r2 = std::sqrt(2.0), sc = sa * ca;
  Vec3 n(sa * cg, sa * sg, ca);
  Vec3 n1 = Vec3(ca * cg + sg, ca * sg - cg, -sa) / r2;
  Vec3 n2 = Vec3(ca * cg - sg, ca * sg + cg, -sa) / r2;
  HeliconicalState h;
  h.constants = {0, -sa * sa, sc / r2, -sc / r2, sa * sa / 2};
  h.connector.df = Vec3(-gzz * sa / r2, -gzz * sa / r2, gzz * ca);
  Vec3 dhat(-sc / r2, -sc / r2, ca * ca);
  if (sign == -1) {
    const Mat3 M = Vec3(1, -1, 1).asDiagonal();
    n = M * n;
    n1 = M * n1;
    n2 = -(M * n2);
    h.constants = {0, sa * sa, sc / r2, sc / r2, sa * sa / 2};
    h.connector.df = Vec3(-gzz * sa / r2, gzz * sa / r2, gzz * ca);
    dhat = Vec3(sc / r2, -sc / r2, -ca * ca);
  }
  h.connector.f = gz;
  h.connector.d = gz * dhat;
  // d is proportional to g', so its gradient follows that of f
  h.connector.dd = dhat * h.connector.df.transpose();
  auto& st = h.state;
  const auto& k = h.constants;
  st.S = k.S * gz;
  st.T = k.T * gz;
  st.b1 = k.b1 * gz;
  st.b2 = k.b2 * gz;
  st.q = k.q * gz;
  st.f = gz;
  st.frame = {n1, n2, n};
  return h;
}

enum class PlanarBranch { n1_ez, n2_ez };

inline const char* to_string(PlanarBranch b) { return b == PlanarBranch::n1_ez ? "n1_ez" : "n2_ez"; }

// Which frame vector is normal to the plane, if any.
inline std::optional<PlanarBranch> planar_branch_of(const DistortionFrame& fr, double tol = 1e-8) {
  if (std::abs(std::abs(fr.n1.z()) - 1) < tol) return PlanarBranch::n1_ez;
  if (std::abs(std::abs(fr.n2.z()) - 1) < tol) return PlanarBranch::n2_ez;
  return std::nullopt;
}

// The compatibility system for planar splay-bend fields, which reduces to three residuals.
// Branch n2 = e_z has S* = 2q* with the bend along n1; branch n1 = e_z has S* = -2q*.
inline std::vector<double> planar_reduction_residuals(PlanarBranch branch, const QUConstants& k, double f, double f1,
                                                      double f2, double f3, double tol = 1e-9) {
  const double scale = std::max({1.0, std::abs(k.S), std::abs(k.q)});
  if (std::abs(k.T) > tol * scale) throw std::invalid_argument("planar reduction: T* must vanish");
  const double f2_ = f * f;
  if (branch == PlanarBranch::n2_ez) {
    if (std::abs(k.S - 2 * k.q) > tol * scale) throw std::invalid_argument("planar reduction: n2 = e_z needs S* = 2q*");
    return {k.b2, f2, k.b1 * f1 + 2 * k.q * f3 + f2_ * (4 * k.q * k.q + k.b1 * k.b1)};
  }
  if (std::abs(k.S + 2 * k.q) > tol * scale) throw std::invalid_argument("planar reduction: n1 = e_z needs S* = -2q*");
  return {k.b1, f1, k.b2 * f2 - 2 * k.q * f3 + f2_ * (4 * k.q * k.q + k.b2 * k.b2)};
}

// Frame-component derivatives of a scalar at a point, by central differences.
inline Vec3 frame_gradient(const std::function<double(const Vec3&)>& fn, const Vec3& p, const DistortionFrame& fr,
                           double h = 1e-4) {
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = h * Vec3::Unit(k);
    g[k] = (fn(p + e) - fn(p - e)) / (2 * h);
  }
  return {g.dot(fr.n1), g.dot(fr.n2), g.dot(fr.n)};
}

// Connector d from differentiating the distortion frame of a sampled field:
// d_j = n2 . (d n1 / d n_j), with frames from the canonical decomposition.
inline Vec3 numerical_d(const FieldSampler& field, const Vec3& p, double h = 1e-4, double h_inner = 1e-6) {
  const auto st0 = canonical_state(field, p, h_inner);
  auto frame_at = [&](const Vec3& x) {
    auto fr = canonical_state(field, x, h_inner).frame;
    if (fr.n1.dot(st0.frame.n1) < 0) {
      fr.n1 = -fr.n1;
      fr.n2 = -fr.n2;
    }
    return fr;
  };
  Mat3 dn1;  // columns: derivative of n1 along x, y, z
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = h * Vec3::Unit(k);
    dn1.col(k) = (frame_at(p + e).n1 - frame_at(p - e).n1) / (2 * h);
  }
  const auto& fr = st0.frame;
  const Vec3 row = dn1.transpose() * fr.n2;  // Cartesian gradient of n1 projected on n2
  return {row.dot(fr.n1), row.dot(fr.n2), row.dot(fr.n)};
}

}  // namespace nemrelief::compat
