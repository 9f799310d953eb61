#include <gtest/gtest.h>

#include <bvortex/corelocal.hpp>

using namespace bvortex;

namespace {

// Composite Simpson rule with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST(CoreProfiles, PointValues) {
  EXPECT_NEAR(core_profiles(ProfileKind::phi_star, {0.0, 1.0}), pi / 2, 1e-15);
  for (double eps : {1e-2, 1e-5}) EXPECT_NEAR(core_profiles(ProfileKind::phi_eps_star, {0.0, 0.0}, eps), pi / 2, 1e-15);
  EXPECT_THROW(core_profiles(ProfileKind::phi_star, {0.0, 0.0}), domain_error);
  EXPECT_THROW(core_profiles(ProfileKind::phi_star, {0.1, -0.1}), domain_error);
}

TEST(CoreProfiles, DegreeOneInsidePlateau) {
  double eps = 1e-5, r = 0.5;
  double xe = 1.0 / std::abs(std::log(eps));
  for (Vec2 p : {Vec2{0.1, 0.05}, Vec2{-0.2, 0.1}, Vec2{0.0, 0.2}}) {
    ASSERT_LT(norm(p), r * (1.0 - r));
    double expect = std::atan2(p.y + 2.0 * pi * eps, p.x - xe);
    EXPECT_NEAR(core_profiles(ProfileKind::phi_d_eps, p, eps, 1, r), expect, 1e-14);
  }
}

TEST(CoreProfiles, DegreeProfilePrecondition) {
  // eps must lie below exp(-1/r^2): for r = 0.3 that is 1.5e-5
  EXPECT_THROW(phi_d_eps_profile(1, 1e-4, 0.3), precondition_error);
  EXPECT_NO_THROW(phi_d_eps_profile(1, 1e-5, 0.3));
}

TEST(LocalFunctional, ZeroField) {
  Profile z{[](Vec2) { return 0.0; }, [](Vec2) { return Vec2{}; }, {}};
  auto e = local_functional(z, 0.2, 1e-3, {0.7, -0.3});
  EXPECT_EQ(e.total, 0.0);
}

TEST(LocalFunctional, SegmentTerm) {
  double eps = 1e-3, r = 0.1;
  auto e = local_functional(phi_eps_star_profile(eps), r, eps, {});
  EXPECT_NEAR(e.segment, 2.0 * std::atan(r / (2.0 * pi * eps)), 1e-4);
  EXPECT_NEAR(e.segment, 3.01609, 1e-4);
}

TEST(LocalFunctional, BulkMatchesRadialIntegral) {
  // The theta integral of 1/|x + i s|^2 over the upper half circle of radius rho is
  // 2/|rho^2 - s^2| (pi/2 - atan(2 rho s / |rho^2 - s^2|)).
  double eps = 1e-3, r = 0.1, s = 2.0 * pi * eps;
  auto inner = [&](double rho) {
    double D = std::abs(rho * rho - s * s);
    return rho * 2.0 / D * (pi / 2 - std::atan(2.0 * rho * s / D));
  };
  double oracle = 0.0;
  // geometric panels, split at the integrable log kink rho = s
  oracle += simpson(inner, 0.0, s * (1.0 - 1e-9), 20000);
  for (double a = s * (1.0 + 1e-9); a < r; a *= 1.2) oracle += simpson(inner, a, std::min(1.2 * a, r), 2000);
  auto e = local_functional(phi_eps_star_profile(eps), r, eps, {});
  EXPECT_NEAR(e.dirichlet, oracle, 1e-4);
}

TEST(LocalFunctional, DmiTermIsBoundaryFlux) {
  // -2 int delta . grad psi = -2 delta . (oint psi nu) over the boundary of the half disk
  double eps = 1e-3, r = 0.1;
  DmiVector d{0.6, -0.8};
  Profile p = phi_eps_star_profile(eps);
  auto arc_x = simpson([&](double t) { return p.value({r * std::cos(t), r * std::sin(t)}) * std::cos(t) * r; }, 0.0,
                       pi, 20000);
  auto arc_y = simpson([&](double t) { return p.value({r * std::cos(t), r * std::sin(t)}) * std::sin(t) * r; }, 0.0,
                       pi, 20000);
  auto seg_y = -simpson([&](double x) { return p.value({x, 0.0}); }, -r, r, 200000);
  double flux = -2.0 * (d.dx * arc_x + d.dy * (arc_y + seg_y));
  auto e0 = local_functional(p, r, eps, {}), e1 = local_functional(p, r, eps, d);
  EXPECT_NEAR(e1.total - e0.total, flux, 1e-6);
  EXPECT_NEAR(e1.dmi, flux, 1e-6);
}

TEST(LocalFunctional, DmiTermBoundedByRadius) {
  DmiVector d{1.0, 1.0};
  for (double r : {0.2, 0.1, 0.05})
    for (double eps : {1e-4, 1e-5, 1e-6}) {
      auto e = local_functional(phi_eps_star_profile(eps), r, eps, d);
      EXPECT_LE(std::abs(e.dmi), 5.0 * d.magnitude() * r);
    }
}

TEST(CoreConstant, Estimate) {
  auto res = core_constant_extract({1e-5, 3e-6, 1e-6}, {0.2, 0.1, 0.05});
  EXPECT_NEAR(res.estimate, -4.8099, 1e-2);
  EXPECT_NEAR(res.estimate, pi * std::log(std::exp(1.0) / (4.0 * pi)), 1e-3);
  EXPECT_EQ(res.table.size(), 9u);
  // defect shrinks with eps at fixed r
  for (double r : res.radii) {
    double prev = 1e300;
    for (double eps : {1e-5, 3e-6, 1e-6})
      for (const auto& e : res.table)
        if (e.r == r && e.eps == eps) {
          EXPECT_LT(e.defect, prev);
          prev = e.defect;
        }
  }
}

TEST(CoreConstant, DeltaIndependent) {
  auto a = core_constant_extract({1e-5, 3e-6, 1e-6}, {0.2, 0.1, 0.05});
  auto b = core_constant_extract({1e-5, 3e-6, 1e-6}, {0.2, 0.1, 0.05}, {1.0, 1.0});
  EXPECT_LE(std::abs(a.estimate - b.estimate), std::max(a.error_bar, b.error_bar));
  for (size_t i = 0; i < a.table.size(); ++i) EXPECT_LE(std::abs(a.table[i].value - b.table[i].value), 5.0 * a.table[i].r);
}

TEST(CoreConstant, ScaleSeparationRequired) {
  EXPECT_THROW(core_constant_extract({1e-3}, {0.05}), precondition_error);
}

TEST(MultiDegree, DegreeOneRatioFinite) {
  auto rep = multi_degree_bound_check(1, {1e-5}, 0.3);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_TRUE(std::isfinite(rep.rows[0].ratio));
  EXPECT_LT(std::abs(rep.rows[0].ratio), 10.0);
}

TEST(MultiDegree, DegreeTwoSlope) {
  auto rep = multi_degree_bound_check(2, {1e-7, 1e-9, 1e-11, 1e-13}, 0.5);
  EXPECT_NEAR(rep.slope, 2.0 * pi, 0.05 * 2.0 * pi);
}

TEST(MultiDegree, SquaredDegreeScaling) {
  std::vector<double> eps{1e-7, 1e-9, 1e-11, 1e-13};
  auto r1 = multi_degree_bound_check(1, eps, 0.5);
  EXPECT_TRUE(r1.bounded);
  for (int d : {2, 3}) {
    auto rd = multi_degree_bound_check(d, eps, 0.5);
    EXPECT_TRUE(rd.bounded);
    for (size_t i = 0; i < eps.size(); ++i)
      EXPECT_LE(std::abs(rd.rows[i].ratio), 10.0 * std::abs(r1.rows[i].ratio));
  }
  EXPECT_THROW(multi_degree_bound_check(4, eps, 0.5), config_error);
}
