#include <nemrelief/circle.hpp>
#include <nemrelief/distortion.hpp>

#include <boost/math/tools/toms748_solve.hpp>
#include <gtest/gtest.h>

#include <sstream>

using namespace nemrelief;
using namespace nemrelief::circle;

namespace {

// Brute-force ray oracle: dense theta0 sweep of the signed point-to-line distance, each sign
// change refined with TOMS 748 and kept if the point lies on the outgoing half of the line.
std::vector<double> oracle_feet(const CircleFrustration& fr, double b, double x, double y) {
  auto dist = [&](double t) {
    const double p = fr.phi0(t);
    const Vec2 d(b * std::sin(p) + std::cos(p), -(b * std::cos(p) - std::sin(p)));
    return (x - std::cos(t)) * d.y() - (y - std::sin(t)) * d.x();
  };
  std::vector<double> out;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * pi * i / n, c = 2 * pi * (i + 1) / n;
    if (dist(a) * dist(c) < 0) {
      std::uintmax_t it = 200;
      auto r = boost::math::tools::toms748_solve(dist, a, c, boost::math::tools::eps_tolerance<double>(52), it);
      const double t = 0.5 * (r.first + r.second);
      // outgoing: moving from the contact point to (x, y) increases the radius
      const Vec2 e(std::cos(t), std::sin(t));
      if ((Vec2(x, y) - e).dot(e) > 0) out.push_back(t);
    }
  }
  return out;
}

double fd_splay_half(const CircleSolution& sol, double x, double y, double h = 1e-5) {
  auto ang = [&](double a, double b) { return *sol.angle(a, b); };
  const double phi = ang(x, y);
  const double px = wrap_half_pi(ang(x + h, y) - ang(x - h, y)) / (2 * h);
  const double py = wrap_half_pi(ang(x, y + h) - ang(x, y - h)) / (2 * h);
  return 0.5 * (py * std::cos(phi) - px * std::sin(phi));
}

}  // namespace

TEST(Winding, Examples) {
  EXPECT_NEAR(winding_charge(frank_profile(1.5, 0.3)), 1.5, 1e-12);
  EXPECT_NEAR(winding_charge(perturbed_profile(1, 0)), 1, 1e-12);
  CircleFrustration flat{[](double) { return 0.4; }, [](double) { return 0.0; }, 1, 0.4, ProfileKind::custom};
  EXPECT_NEAR(winding_charge(flat), 1, 1e-15);
}

TEST(Winding, TableProfileContinuesQuasiPeriodically) {
  std::ostringstream os;
  os << "theta0,alpha0\n";
  os.precision(17);
  for (int i = 0; i <= 64; ++i) {
    const double t = 2 * pi * i / 64;
    os << t << "," << 0.5 * t + 0.2 * std::sin(t) << "\n";
  }
  std::istringstream is(os.str());
  auto fr = read_profile_csv(is);
  EXPECT_DOUBLE_EQ(fr.m, 1.5);
  EXPECT_NEAR(fr.alpha0(2 * pi + 0.3) - fr.alpha0(0.3), pi, 1e-12);
  EXPECT_NEAR(fr.alpha0(1.0), 0.5 + 0.2 * std::sin(1.0), 1e-4);
  std::istringstream bad("theta0,alpha0\n0,0\n1,0.1\n2,0.2\n6.283185307179586,0.3\n");
  EXPECT_THROW(read_profile_csv(bad), std::invalid_argument);
}

TEST(CircleSlope, Examples) {
  EXPECT_NEAR(circle_slope(std::atan(2.0), 2).value, 0, 1e-15);
  EXPECT_TRUE(circle_slope(-std::atan(0.5), 2).vertical);
  // slope zero exactly 2m times for charge m, any b*
  for (double m : {0.5, 1.0, 1.5, 3.0})
    for (double b : {0.5, 2.0, 5.0}) {
      auto fr = frank_profile(m, 0.1);
      auto r = scan_roots_periodic(
          [&](double t) {
            const double p = fr.phi0(t);
            return b * std::cos(p) - std::sin(p);
          },
          4096);
      EXPECT_EQ(static_cast<int>(r.size()), static_cast<int>(2 * m)) << "m=" << m << " b=" << b;
    }
}

TEST(Tangency, Examples) {
  auto t = tangency_set(frank_profile(1.5, auto_c0(1.5, 2)), 2);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0], 1.5 * pi, 1e-12);
  EXPECT_TRUE(tangency_set(frank_profile(1, 0), 2).empty());
  for (double m : {-1.0, -0.5, 0.5, 1.5, 2.0, 2.5, 3.0}) {
    auto scan = tangency_set(frank_profile(m, 0.37), 2);
    auto closed = frank_tangency_closed_form(m, 0.37, 2);
    ASSERT_EQ(scan.size(), static_cast<std::size_t>(2 * std::abs(m - 1)));
    ASSERT_EQ(closed.size(), scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) EXPECT_NEAR(scan[i], closed[i], 1e-10);
  }
  EXPECT_THROW(tangency_set(frank_profile(2, 0), 2, 4), std::invalid_argument);
}

TEST(Domain, Examples) {
  auto whole = admissible_domain(frank_profile(0, 0.3), 2);
  EXPECT_EQ(whole.kind, DomainKind::whole_plane);
  EXPECT_TRUE(whole.contains(0, 0));

  auto half = admissible_domain(frank_profile(1.5, auto_c0(1.5, 2)), 2);
  EXPECT_EQ(half.kind, DomainKind::half_plane_intersection);
  EXPECT_TRUE(half.contains(3, -0.99));
  EXPECT_FALSE(half.contains(3, -1.01));
  EXPECT_FALSE(half.contains(0.5, 0.5));
  EXPECT_TRUE(half.contains(0, 5));
  EXPECT_FALSE(half.bounded());

  auto box = admissible_domain(frank_profile(3, 0), 2);
  EXPECT_EQ(box.tangency.size(), 4u);
  EXPECT_TRUE(box.bounded());
  EXPECT_FALSE(box.contains(10, 10));

  auto ext = admissible_domain(frank_profile(1, 0), 2);
  EXPECT_EQ(ext.kind, DomainKind::exterior_of_circle);
  EXPECT_TRUE(ext.contains(100, -50));
}

TEST(Ray, Examples) {
  const double b = 2;
  // phi0 with tan phi0 = -1/b gives a vertical line
  auto vert = characteristic_ray(0.0, frank_profile(1, -std::atan(1 / b)), b);
  EXPECT_TRUE(vert.vertical);
  EXPECT_NEAR(vert.at(2.0).x(), 1.0, 1e-15);

  // tangent when b sin(alpha0) + cos(alpha0) = 0
  auto fr = frank_profile(1.5, auto_c0(1.5, b));
  auto tan = characteristic_ray(1.5 * pi, fr, b);
  EXPECT_TRUE(tan.tangent);
  EXPECT_TRUE(std::isinf(tan.s_range.lo) && std::isinf(tan.s_range.hi));

  auto gen = characteristic_ray(0.7, frank_profile(1, 0), b);
  EXPECT_EQ(gen.s_range.lo, 0);
  EXPECT_TRUE(std::isinf(gen.s_range.hi));
  EXPECT_GT(gen.at(1.0).norm(), 1.0);
  EXPECT_NEAR(gen.direction.norm(), 1, 1e-15);
}

TEST(Ray, InvariantsAlongRays) {
  const double b = 2;
  CircleSolution sol(frank_profile(1, 0), b);
  for (double t0 : {0.0, 1.1, 2.9, 4.4, 5.9}) {
    auto ray = sol.ray(t0);
    const double R0 = std::abs(b * std::cos(sol.frustration().alpha0(t0)) - std::sin(sol.frustration().alpha0(t0)));
    for (double s : {0.2, 1.0, 4.0, 20.0}) {
      const Vec2 p = ray.at(s * (ray.s_range.lo < 0 ? -1 : 1));
      const double phi = *sol.angle(p.x(), p.y());
      EXPECT_NEAR(wrap_half_pi(phi - ray.angle), 0, 1e-10);
      const double alpha = phi - std::atan2(p.y(), p.x());
      EXPECT_NEAR(p.norm() * std::abs(b * std::cos(alpha) - std::sin(alpha)), R0, 1e-10);
    }
  }
}

TEST(FieldAngleCircle, OnTheCircleAndInside) {
  auto fr = frank_profile(1.5, 0.2);
  for (double t : {0.3, 2.0, 4.0}) {
    auto fa = field_angle_at_circle(std::cos(t), std::sin(t), fr, 2);
    ASSERT_TRUE(fa.ok());
    EXPECT_NEAR(fa.angle, 1.5 * t + 0.2, 1e-12);
  }
  EXPECT_THROW(field_angle_at_circle(0.2, 0.1, fr, 2), std::invalid_argument);
}

TEST(FieldAngleCircle, HalfChargeExtendedIsShiftedSpiral) {
  const double b = 2;
  CircleSolveOptions opts;
  opts.extend_inside = true;
  CircleSolution sol(frank_profile(0.5, auto_c0(0.5, b)), b, opts);
  double worst = 0;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      const double x = -3 + 6.0 * (i + 0.5) / 40, y = -3 + 6.0 * (j + 0.37) / 40;
      if (std::hypot(x, y + 1) < 0.05 || std::abs(y + 1) < 1e-3) continue;
      auto a = sol.angle(x, y);
      ASSERT_TRUE(a.has_value()) << x << "," << y;
      worst = std::max(worst, std::abs(wrap_half_pi(*a - (std::atan2(y + 1, x) + std::atan(b)))));
    }
  EXPECT_LT(worst, 1e-8);
}

TEST(FieldAngleCircle, MatchesBruteForceRayOracle) {
  const double b = 2;
  for (auto fr : {frank_profile(1, 0), frank_profile(1.5, auto_c0(1.5, b)), perturbed_profile(1, 0)}) {
    CircleSolution sol(fr, b);
    for (auto p : {Vec2(1.5, 0.3), Vec2(-2, 2), Vec2(0.1, 4), Vec2(3, -0.5)}) {
      if (!sol.domain().contains(p.x(), p.y())) continue;
      auto fa = sol.locate(p.x(), p.y());
      auto feet = oracle_feet(fr, b, p.x(), p.y());
      ASSERT_EQ(feet.size(), 1u);
      ASSERT_TRUE(fa.ok());
      EXPECT_NEAR(wrap_half_pi(fa.angle - fr.phi0(feet[0])), 0, 1e-8);
    }
  }
}

TEST(FieldAngleCircle, OutsideDomainIsNotCovered) {
  CircleSolution sol(frank_profile(1.5, auto_c0(1.5, 2)), 2);
  EXPECT_FALSE(sol.angle(0.5, -3).has_value());
  EXPECT_TRUE(sol.angle(0.5, 3).has_value());
}

TEST(FieldAngleCircle, InteriorOfThreeHalvesIsMultiplyCovered) {
  CircleSolveOptions opts;
  opts.extend_inside = true;
  CircleSolution sol(frank_profile(1.5, auto_c0(1.5, 2)), 2, opts);
  int multi = 0;
  for (int i = 0; i < 10; ++i)
    if (sol.locate(-0.5 + 0.1 * i, 0.5).status == Coverage::multi_covered) ++multi;
  EXPECT_GT(multi, 0);
}

TEST(FCircle, BoundaryValueAndFiniteDifferences) {
  const double b = 2;
  for (double t : {0.0, 1.0, 3.0}) EXPECT_NEAR(f_at_circle(t, 0, frank_profile(1, 0), b), 0.5, 1e-15);
  for (auto fr : {frank_profile(1, 0), frank_profile(1.5, auto_c0(1.5, b)), perturbed_profile(1, 0)}) {
    CircleSolution sol(fr, b);
    for (auto p : {Vec2(1.5, 0.3), Vec2(-2, 2), Vec2(0.1, 4)}) {
      if (!sol.domain().contains(p.x(), p.y())) continue;
      EXPECT_NEAR(sol.f(p.x(), p.y()), fd_splay_half(sol, p.x(), p.y()), 1e-6);
    }
  }
}

TEST(FCircle, CircleIsNotALevelSet) {
  auto fr = frank_profile(1.5, auto_c0(1.5, 2));
  EXPECT_GT(std::abs(f_at_circle(0.3, 0, fr, 2) - f_at_circle(2.0, 0, fr, 2)), 1e-3);
}

TEST(FCircle, DecaysLikeInverseDistance) {
  // f ~ 1/s far out: every ray family looks like a spiral of charge m there
  auto fr = frank_profile(1, 0);
  for (double t : {0.5, 2.5}) {
    auto ray = characteristic_ray(t, fr, 2);
    const double sign = ray.s_range.lo < 0 ? -1 : 1;
    const double f1 = std::abs(f_at_circle(t, sign * 1e3, fr, 2)), f2 = std::abs(f_at_circle(t, sign * 1e4, fr, 2));
    const double exponent = std::log(f1 / f2) / std::log(10.0);
    EXPECT_NEAR(exponent, 1.0, 0.01);
  }
}

TEST(Degeneracies, Examples) {
  const double b = 2;
  auto res = classify_degeneracies(frank_profile(1, std::atan(b)), b);
  EXPECT_TRUE(res.resonant_global);
  auto none = classify_degeneracies(frank_profile(1, 0), b);
  EXPECT_FALSE(none.resonant_global);
  EXPECT_TRUE(none.tangency.empty());
  EXPECT_TRUE(none.radial.empty());
  auto two = classify_degeneracies(frank_profile(2, 0), b);
  EXPECT_EQ(two.tangency.size(), 2u);
  EXPECT_EQ(two.radial.size(), 2u);
}

TEST(Resonant, ExplicitLogSpiral) {
  const double b = 2;
  CircleSolveOptions opts;
  opts.extend_inside = true;
  CircleSolution sol(frank_profile(1, std::atan(b)), b, opts);
  ASSERT_TRUE(sol.resonant());
  for (auto p : {Vec2(0.3, 0.2), Vec2(-2, 1)}) {
    EXPECT_NEAR(wrap_half_pi(*sol.angle(p.x(), p.y()) - std::atan2(p.y(), p.x()) - std::atan(b)), 0, 1e-12);
    EXPECT_NEAR(sol.f(p.x(), p.y()), fd_splay_half(sol, p.x(), p.y()), 1e-6);
  }
}

TEST(Solution, SplayBendRatioIsBstar) {
  const double b = 2;
  for (auto fr : {frank_profile(1, 0), frank_profile(1.5, auto_c0(1.5, b)), perturbed_profile(1, 0)}) {
    CircleSolution sol(fr, b);
    auto fs = sol.sampler();
    for (auto p : {Vec2(1.5, 0.3), Vec2(-2, 2), Vec2(0.1, 4)}) {
      const Vec3 q = to3(p);
      if (!fs.contains(q)) continue;
      auto st = decompose_gradient(fs.at(q), fd_gradient(fs, q, 1e-5));
      EXPECT_NEAR(st.bend_norm() / std::abs(st.S), b, 1e-6);
      EXPECT_NEAR(std::abs(st.S), 2 * st.q, 1e-9);
    }
  }
}
