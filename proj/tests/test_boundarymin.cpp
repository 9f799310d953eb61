#include <gtest/gtest.h>

#include <bvortex/boundarymin.hpp>

#include <random>

using namespace bvortex;

namespace {

TraceField sample(int M, double (*f)(double)) {
  std::vector<double> v(M);
  for (int k = 0; k < M; ++k) v[k] = f(2.0 * pi * k / M);
  return TraceField(v);
}

// Smooth perturbation of shift (+ theta, when ramp is set, as for a lifting).
TraceField random_smooth(int M, std::mt19937_64& rng, double shift, bool ramp = true) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<double> a(9), b(9);
  for (int n = 1; n < 9; ++n) a[n] = N(rng) / n, b[n] = N(rng) / n;
  std::vector<double> v(M);
  for (int k = 0; k < M; ++k) {
    double t = 2.0 * pi * k / M;
    v[k] = shift + (ramp ? t : 0.0);
    for (int n = 1; n < 9; ++n) v[k] += a[n] * std::cos(n * t) + b[n] * std::sin(n * t);
  }
  return TraceField(v);
}

}  // namespace

TEST(HalfSeminorm, Cosines) {
  EXPECT_NEAR(h_half_seminorm(sample(256, [](double t) { return std::cos(t); })), pi, 1e-12);
  EXPECT_NEAR(h_half_seminorm(sample(256, [](double) { return 0.7; })), 0.0, 1e-12);
  // |grad(r^3 cos 3t)|^2 = 9 r^4, integrated on a polar midpoint grid
  double oracle = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    double r = (i + 0.5) / n;
    oracle += 9.0 * std::pow(r, 4) * r * (1.0 / n) * 2.0 * pi;
  }
  double v = h_half_seminorm(sample(256, [](double t) { return std::cos(3.0 * t); }));
  EXPECT_NEAR(v, oracle, 1e-6);
  EXPECT_NEAR(v, 9.424778, 1e-6);
}

TEST(ReducedObjective, ZeroPenaltyOnG) {
  auto mesh = disk_boundary_mesh(1024);
  auto g = tangent_lifting(mesh);
  auto r = reduced_objective(g, 0.01, {}, g, mesh);
  EXPECT_NEAR(r.breakdown.boundary_penalty, 0.0, 1e-20);
  EXPECT_NEAR(r.breakdown.total,
              r.breakdown.dirichlet + r.breakdown.dmi + r.breakdown.boundary_penalty + r.breakdown.potential, 1e-12);
}

TEST(ReducedObjective, GradientMatchesFiniteDifferences) {
  const int M = 512;
  auto mesh = disk_boundary_mesh(M);
  auto g = tangent_lifting(mesh);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> N(0.0, 1.0);
  DmiVector d{0.3, -0.4};
  for (int t = 0; t < 50; ++t) {
    auto tr = random_smooth(M, rng, N(rng));
    auto r = reduced_objective(tr, 0.01, d, g, mesh);
    std::vector<double> dir(M);
    for (auto& x : dir) x = N(rng);
    double analytic = 0.0;
    for (int k = 0; k < M; ++k) analytic += r.gradient[k] * dir[k];
    double h = 1e-6;
    std::vector<double> p = tr.values(), m = tr.values();
    for (int k = 0; k < M; ++k) p[k] += h * dir[k], m[k] -= h * dir[k];
    double fd = (reduced_objective(TraceField(p), 0.01, d, g, mesh).value -
                 reduced_objective(TraceField(m), 0.01, d, g, mesh).value) /
                (2.0 * h);
    EXPECT_LE(std::abs(fd - analytic), 1e-6 * std::max(1.0, std::abs(analytic)));
  }
}

TEST(ReducedObjective, PiShiftInvariant) {
  auto mesh = disk_boundary_mesh(1024);
  auto g = tangent_lifting(mesh);
  std::mt19937_64 rng(4);
  auto tr = random_smooth(1024, rng, 0.2);
  DmiVector d{0.5, 0.5};
  auto a = reduced_objective(tr, 0.02, d, g, mesh);
  auto b = reduced_objective(tr.plus(pi), 0.02, d, g, mesh);
  EXPECT_NEAR(a.value, b.value, 1e-10);
  EXPECT_NEAR(a.breakdown.boundary_penalty, b.breakdown.boundary_penalty, 1e-10);
}

TEST(MinimizeTrace, DescentAndTwoVortices) {
  double eps = 1e-2;
  auto mesh = disk_boundary_mesh(trace_resolution(eps));
  auto init = vortex_ansatz(mesh, VortexConfig{{0.0, pi}, {1, 1}}, eps);
  auto g = tangent_lifting(mesh, choose_jump_angle(mesh, {0.0, pi}));
  double f0 = reduced_objective(init, eps, {}, g, mesh).value;
  auto r = minimize_trace(eps, {}, init);
  EXPECT_LE(r.breakdown.total, f0);
  EXPECT_LE(r.grad_norm, 1e-8);
  auto vc = detect_vortices(r.trace, g);
  ASSERT_EQ(vc.size(), 2);
  EXPECT_EQ(vc.degrees[0], 1);
  EXPECT_EQ(vc.degrees[1], 1);
}

TEST(MinimizeTrace, EpsRange) {
  auto mesh = disk_boundary_mesh(1024);
  auto init = vortex_ansatz(mesh, VortexConfig{{0.0, pi}, {1, 1}}, 0.05);
  EXPECT_THROW(minimize_trace(1e-6, {}, init), config_error);
  EXPECT_THROW(minimize_trace(0.2, {}, init), config_error);
}

TEST(MinimizeTrace, VorticesAtOptimalPair) {
  DmiVector d = DmiVector::polar(1.0, pi / 8);
  auto s = solve_boundary(1e-3, d);
  auto [a, b] = optimal_pair(d);
  ASSERT_EQ(s.vortices.size(), 2);
  EXPECT_LT(circ_dist(s.vortices.angles[0], a), 0.05);
  EXPECT_LT(circ_dist(s.vortices.angles[1], b), 0.05);
}

TEST(MinimizeTrace, AntipodalWithoutDmi) {
  auto s = solve_boundary(1e-3, {});
  ASSERT_EQ(s.vortices.size(), 2);
  EXPECT_NEAR(circ_dist(s.vortices.angles[0], s.vortices.angles[1]), pi, 0.05);
}

TEST(DetectVortices, SyntheticSteps) {
  auto mesh = disk_boundary_mesh(1000);
  auto g = tangent_lifting(mesh, 5.0);
  std::vector<double> v(mesh.M);
  for (int k = 0; k < mesh.M; ++k) {
    double t = mesh.theta[k];
    v[k] = t + pi / 2 - (t > 1.0 ? pi : 0.0) - (t > 2.5 ? pi : 0.0);
  }
  auto c = detect_vortices(TraceField(v), g);
  ASSERT_EQ(c.size(), 2);
  EXPECT_NEAR(c.angles[0], 1.0, mesh.dtheta);
  EXPECT_NEAR(c.angles[1], 2.5, mesh.dtheta);
  EXPECT_EQ(c.degrees, (std::vector<int>{1, 1}));
}

TEST(DetectVortices, GJumpReadsAsDegreeTwo) {
  auto mesh = disk_boundary_mesh(512);
  double j = choose_jump_angle(mesh);
  auto g = tangent_lifting(mesh, j);
  auto c = detect_vortices(g, g);
  ASSERT_EQ(c.size(), 1);
  EXPECT_EQ(c.degrees[0], 2);
  EXPECT_NEAR(circ_dist(c.angles[0], j), 0.0, mesh.dtheta);
}

TEST(DetectVortices, AmbiguousRejected) {
  auto mesh = disk_boundary_mesh(256);
  auto g = tangent_lifting(mesh);
  std::vector<double> v(mesh.M);
  for (int k = 0; k < mesh.M; ++k) v[k] = g[k] + 0.5 * pi;
  EXPECT_THROW(detect_vortices(TraceField(v), g), detection_error);
}

TEST(HarmonicExtend, Values) {
  auto tr = sample(128, [](double t) { return std::cos(2.0 * t); });
  EXPECT_NEAR(harmonic_extend(tr, {{0.5, 0.0}})[0], 0.25, 1e-14);
  std::mt19937_64 rng(8);
  auto rt = random_smooth(256, rng, 1.0, false);
  EXPECT_NEAR(harmonic_extend(rt, {{0.0, 0.0}})[0], rt.c0(), 1e-14);
  double mean = 0.0;
  for (double x : rt.values()) mean += x / rt.M();
  EXPECT_NEAR(rt.c0(), mean, 1e-12);
  EXPECT_THROW(harmonic_extend(tr, {{0.6, 0.8}}), domain_error);
}

TEST(HarmonicExtend, MaximumPrinciple) {
  std::mt19937_64 rng(21);
  auto rt = random_smooth(256, rng, 0.0, false);
  // the trace is band limited, so its maximum is taken over the continuous interpolant
  double mx = -1e300;
  for (int i = 0; i < 100000; ++i) mx = std::max(mx, rt.eval(2.0 * pi * i / 100000));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 1000; ++i) {
    double r = std::sqrt(U(rng)) * 0.999, t = 2.0 * pi * U(rng);
    pts.push_back({r * std::cos(t), r * std::sin(t)});
  }
  for (double v : harmonic_extend(rt, pts)) EXPECT_LE(v, mx + 1e-9);
}
