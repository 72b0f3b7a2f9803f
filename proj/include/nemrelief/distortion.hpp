#pragma once

#include "types.hpp"

#include <optional>
#include <utility>

namespace nemrelief {

struct DistortionFrame {
  Vec3 n1 = Vec3::UnitX();
  Vec3 n2 = Vec3::UnitY();
  Vec3 n = Vec3::UnitZ();
};

struct DistortionState {
  double S = 0, T = 0, b1 = 0, b2 = 0, q = 0;
  DistortionFrame frame;
  std::optional<double> f;

  Vec3 bend() const { return b1 * frame.n1 + b2 * frame.n2; }
  double bend_norm() const { return std::hypot(b1, b2); }
};

struct ElasticConstants {
  double K11 = 1, K22 = 1, K33 = 1, K24 = 0;

  ElasticConstants() = default;
  ElasticConstants(double k11, double k22, double k33, double k24) : K11(k11), K22(k22), K33(k33), K24(k24) {
    if (!(k11 >= 0 && k22 >= 0 && k33 >= 0 && k24 >= 0))
      throw std::invalid_argument("elastic constants must be nonnegative");
  }
};

struct DecomposeOptions {
  // |G^T n| allowed, relative to max(1, |G|).
  double consistency_tol = 1e-6;
  // q at or below this is treated as D = 0.
  double zero_tol = 1e-12;
  // below this fraction of |b|, b1 is considered zero when fixing the frame sign.
  double bend_sign_tol = 1e-6;
};

// W(v) x = v cross x.
inline Mat3 skew_matrix(const Vec3& v) {
  Mat3 w;
  w << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
       -v.y(), v.x(), 0;
  return w;
}

inline Mat3 transverse_projector(const Vec3& n) { return Mat3::Identity() - n * n.transpose(); }

// curl n from G_ij = d n_i / d x_j.
inline Vec3 curl_from_gradient(const Mat3& G) {
  return Vec3(G(2, 1) - G(1, 2), G(0, 2) - G(2, 0), G(1, 0) - G(0, 1));
}

namespace detail {

// An orthonormal pair spanning the plane orthogonal to n.
inline std::pair<Vec3, Vec3> transverse_basis(const Vec3& n) {
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Unit(k);
    Vec3 u = e - n.dot(e) * n;
    if (u.norm() > 0.5) {
      u.normalize();
      return {u, n.cross(u)};
    }
  }
  // unreachable for a unit n: some axis has |e.n| <= 1/sqrt(3)
  throw std::logic_error("transverse_basis: degenerate director");
}

}  // namespace detail

inline DistortionState decompose_gradient(const Director& dir, const Mat3& G_in, const DecomposeOptions& opt = {}) {
  const Vec3& n = dir.vec();
  const double scale = std::max(1.0, G_in.norm());
  if (!G_in.allFinite()) throw std::invalid_argument("gradient has non-finite entries");
  if ((G_in.transpose() * n).norm() > opt.consistency_tol * scale)
    throw InconsistentGradient("gradient is not orthogonal to the director: |G^T n| = " +
                               std::to_string((G_in.transpose() * n).norm()));
  const Mat3 G = transverse_projector(n) * G_in;

  DistortionState st;
  st.S = G.trace();
  st.T = n.dot(curl_from_gradient(G));
  const Vec3 b = -G * n;

  Mat3 D = G + b * n.transpose() - 0.5 * st.T * skew_matrix(n) - 0.5 * st.S * transverse_projector(n);
  D = 0.5 * (D + D.transpose());

  auto [u, v] = detail::transverse_basis(n);
  const double a = 0.5 * (u.dot(D * u) - v.dot(D * v));
  const double c = 0.5 * (u.dot(D * v) + v.dot(D * u));
  st.q = std::hypot(a, c);

  Vec3 n1;
  if (st.q > opt.zero_tol) {
    const double psi = 0.5 * std::atan2(c, a);
    n1 = std::cos(psi) * u + std::sin(psi) * v;
  } else {
    st.q = 0.0;
    const double bn = b.norm();
    n1 = bn > opt.zero_tol ? Vec3(b / bn) : u;
  }
  Vec3 n2 = n.cross(n1);
  double b1 = b.dot(n1), b2 = b.dot(n2);

  // The eigenvector pair is fixed up to a common sign; pick b1 > 0, else b2 >= 0.
  const bool flip = std::abs(b1) > opt.bend_sign_tol * b.norm() ? b1 < 0 : b2 < 0;
  if (flip) {
    n1 = -n1;
    n2 = -n2;
    b1 = -b1;
    b2 = -b2;
  }
  st.b1 = b1;
  st.b2 = b2;
  st.frame = {n1, n2, n};
  return st;
}

// Rebuilds G from the characteristics and frame.
inline Mat3 reassemble_gradient(const DistortionState& st) {
  const auto& fr = st.frame;
  return -st.bend() * fr.n.transpose() + 0.5 * st.T * skew_matrix(fr.n) + 0.5 * st.S * transverse_projector(fr.n) +
         st.q * (fr.n1 * fr.n1.transpose() - fr.n2 * fr.n2.transpose());
}

inline double q_identity_residual(const Mat3& G, const DistortionState& st) {
  return 2 * st.q * st.q - (G * G).trace() - 0.5 * st.T * st.T + 0.5 * st.S * st.S;
}

// Planar n = (cos phi, sin phi, 0) with gradient of phi = (phi_x, phi_y).
inline DistortionState planar_state_from_angle(double phi, double phi_x, double phi_y) {
  const double c = std::cos(phi), s = std::sin(phi);
  DistortionState st;
  st.S = phi_y * c - phi_x * s;
  st.T = 0;
  st.q = 0.5 * std::abs(st.S);
  const double bend = -(phi_x * c + phi_y * s);  // along e_z x n
  const Vec3 n(c, s, 0), nperp(-s, c, 0);
  if (st.S >= 0) {
    st.frame = {nperp, Vec3::UnitZ(), n};
    st.b1 = bend;
  } else {
    st.frame = {Vec3::UnitZ(), -nperp, n};
    st.b2 = -bend;
  }
  return st;
}

// Planar n = cos(alpha) e_r + sin(alpha) e_theta at polar angle theta.
// The frame is returned in Cartesian components.
inline DistortionState polar_state_from_angle(double alpha, double alpha_r, double alpha_theta, double r,
                                              double theta = 0.0) {
  if (!(r > 0)) throw std::invalid_argument("polar_state_from_angle: r must be positive");
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const Vec3 er(std::cos(theta), std::sin(theta), 0), et(-std::sin(theta), std::cos(theta), 0);
  DistortionState st;
  st.S = (1 + alpha_theta) * ca / r - alpha_r * sa;
  st.T = 0;
  st.q = 0.5 * std::abs(st.S);
  const double bend = alpha_r * ca + (1 + alpha_theta) * sa / r;
  const Vec3 n = ca * er + sa * et;
  const Vec3 m = sa * er - ca * et;  // -(e_z x n)
  if (st.S >= 0) {
    st.frame = {m, -Vec3::UnitZ(), n};
    st.b1 = bend;
  } else {
    st.frame = {Vec3::UnitZ(), m, n};
    st.b2 = bend;
  }
  return st;
}

struct EnergyDensity {
  double direct = 0;
  double modes = 0;
};

// Frank energy density both from G directly and from the distortion modes.
inline EnergyDensity oseen_frank_energy(const DistortionState& st, double B, const ElasticConstants& K, const Mat3& G,
                                        double tol = 1e-8) {
  const double scale = std::max(1.0, G.norm());
  if (std::abs(B - st.bend_norm()) > tol * std::max(1.0, B))
    throw std::invalid_argument("oseen_frank_energy: B does not match the bend of the state");
  if ((reassemble_gradient(st) - G).norm() > tol * scale)
    throw std::invalid_argument("oseen_frank_energy: state is not a decomposition of G");

  const Vec3& n = st.frame.n;
  const Vec3 curl = curl_from_gradient(G);
  const double S = G.trace();
  const double twist = n.dot(curl);
  EnergyDensity w;
  w.direct = 0.5 * K.K11 * S * S + 0.5 * K.K22 * twist * twist + 0.5 * K.K33 * n.cross(curl).squaredNorm() +
             K.K24 * ((G * G).trace() - S * S);
  w.modes = 0.5 * (K.K11 - K.K24) * st.S * st.S + 0.5 * (K.K22 - K.K24) * st.T * st.T + 0.5 * K.K33 * B * B +
            2 * K.K24 * st.q * st.q;
  if (!std::isfinite(w.direct) || !std::isfinite(w.modes)) throw std::domain_error("energy density is not finite");
  return w;
}

inline bool ericksen_satisfied(const ElasticConstants& K) {
  return K.K11 >= K.K24 && K.K22 >= K.K24 && K.K24 >= 0 && K.K33 >= 0;
}

}  // namespace nemrelief
