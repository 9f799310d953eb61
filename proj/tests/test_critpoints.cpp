#include <gtest/gtest.h>

#include <bvortex/critpoints.hpp>

#include <random>

using namespace bvortex;

namespace {

// Positive root of 2 m X^2 + X - 2 m by bisection on (0, 1].
double bisect_sin_theta(double m) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (2.0 * m * mid * mid + mid - 2.0 * m > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double f_pair(double p1, double p2, DmiVector d) {
  return -0.5 * std::log(2.0) - 0.5 * std::log(1.0 - std::cos(p1 - p2)) - d.dx * (std::sin(p1) + std::sin(p2)) +
         d.dy * (std::cos(p1) + std::cos(p2));
}

}  // namespace

TEST(PairEnergy, AntipodalNoDmi) {
  auto s = pair_energy_derivatives(0.0, pi, {});
  EXPECT_NEAR(s.grad[0], 0.0, 1e-15);
  EXPECT_NEAR(s.grad[1], 0.0, 1e-15);
  EXPECT_NEAR(s.value, -std::log(2.0), 1e-15);
  EXPECT_NEAR(2.0 * pi * s.value, w_disk(VortexConfig{{0.0, pi}, {1, 1}}, {}), 1e-12);
}

TEST(PairEnergy, MatchesFormulaAndDisk) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 2.0 * pi), D(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    double a = U(rng), b = U(rng);
    DmiVector d{D(rng), D(rng)};
    auto s = pair_energy_derivatives(a, b, d);
    EXPECT_NEAR(s.value, f_pair(a, b, d), 1e-12);
    EXPECT_NEAR(s.value, pair_energy_derivatives(b, a, d).value, 1e-14);
    EXPECT_NEAR(2.0 * pi * s.value, w_disk(VortexConfig{{a, b}, {1, 1}}, d), 1e-10);
  }
}

TEST(PairEnergy, CoincidentRejected) { EXPECT_THROW(pair_energy_derivatives(1.0, 1.0 + 2.0 * pi, {}), singular_error); }

TEST(PairEnergy, CriticalAtClosedForm) {
  double td = std::asin(bisect_sin_theta(1.0));
  EXPECT_NEAR(theta_delta(1.0), td, 1e-12);
  EXPECT_NEAR(td, 0.8959075, 1e-6);
  auto s = pair_energy_derivatives(pi / 2 + td, 3 * pi / 2 - td, {0.0, 1.0});
  EXPECT_LE(s.grad_norm(), 1e-8);
}

TEST(ThetaDelta, QuadraticRootOracle) {
  for (double m : {0.25, 10.0}) EXPECT_NEAR(theta_delta(m), std::asin(bisect_sin_theta(m)), 1e-12);
  EXPECT_NEAR(theta_delta(0.25), 0.427079, 1e-6);
  EXPECT_NEAR(theta_delta(0.25), std::asin(std::sqrt(2.0) - 1.0), 1e-14);
  EXPECT_NEAR(theta_delta(10.0), 1.348123, 1e-5);
}

TEST(ThetaDelta, Limits) {
  EXPECT_LT(theta_delta(1e-8), 1e-7);
  EXPECT_GT(theta_delta(1e8), pi / 2 - 1e-3);
  EXPECT_THROW(theta_delta(0.0), domain_error);
  EXPECT_THROW(theta_delta(-1.0), domain_error);
}

TEST(OptimalPair, SymmetricAboutDeltaPerp) {
  for (DmiVector d : {DmiVector{0.0, 1.0}, DmiVector::polar(0.1, pi / 8), DmiVector{-0.4, 0.9}}) {
    auto [a, b] = optimal_pair(d);
    double axis = d.phase() + pi / 2;
    EXPECT_NEAR(std::sin(0.5 * (a + b) - axis), 0.0, 1e-12);  // midpoint = axis mod pi
    auto s = pair_energy_derivatives(a, b, d);
    EXPECT_LE(s.grad_norm(), 1e-10);
    EXPECT_EQ(s.classification, Classification::minimum);
  }
}

TEST(OptimalPair, FigureOneLayoutSmallDelta) {
  // nearly antipodal, symmetric about delta^perp at angle pi/8 + pi/2
  DmiVector d = DmiVector::polar(0.1, pi / 8);
  auto [a, b] = optimal_pair(d);
  EXPECT_NEAR(circ_dist(a, b), pi - 2.0 * theta_delta(0.1), 1e-12);
  EXPECT_GT(circ_dist(a, b), 0.85 * pi);
  EXPECT_NEAR(std::min(circ_dist(a, pi / 8 + theta_delta(0.1)), circ_dist(b, pi / 8 + theta_delta(0.1))), 0.0, 1e-12);
}

TEST(OptimalPair, ChordLength) {
  auto [a, b] = optimal_pair({0.25, 0.0});
  double chord = std::abs(std::polar(1.0, a) - std::polar(1.0, b));
  double X = bisect_sin_theta(0.25);
  EXPECT_NEAR(chord, 2.0 * std::sqrt(1.0 - X * X), 1e-10);
  EXPECT_NEAR(chord, 1.820359, 1e-5);
}

TEST(OptimalPair, ZeroDeltaRejected) { EXPECT_THROW(optimal_pair({}), config_error); }

TEST(NewtonClassify, Case1Saddle) {
  auto s = newton_classify({0.0, 1.0}, {pi, 0.0});
  EXPECT_EQ(s.iterations, 0);
  EXPECT_NEAR(s.det(), -1.0, 1e-8);
  EXPECT_EQ(s.classification, Classification::saddle);
}

TEST(NewtonClassify, ConvergesToOptimalPair) {
  DmiVector d{0.25, 0.0};
  auto [a, b] = optimal_pair(d);
  auto s = newton_classify(d, {a + 0.05, b - 0.05});
  auto [p, q] = canonical_pair(s.phi1, s.phi2);
  EXPECT_NEAR(p, a, 1e-9);
  EXPECT_NEAR(q, b, 1e-9);
  EXPECT_EQ(s.classification, Classification::minimum);
}

TEST(NewtonClassify, DegenerateWithoutDmi) {
  auto s = newton_classify({}, {0.1, pi - 0.1});
  EXPECT_NEAR(circ_dist(s.phi1, s.phi2), pi, 1e-8);
  EXPECT_EQ(s.classification, Classification::degenerate);
}

TEST(MinimizeWPairGeneral, IdentityMatchesClosedForm) {
  auto mesh = disk_boundary_mesh(1024);
  DmiVector d{0.25, 0.0};
  auto r = minimize_w_pair_general(ConformalChart::identity(), d, mesh, 64);
  auto [a, b] = optimal_pair(d);
  auto [p, q] = canonical_pair(r.phi1, r.phi2);
  EXPECT_NEAR(p, a, 1e-4);
  EXPECT_NEAR(q, b, 1e-4);
}

TEST(MinimizeWPairGeneral, NoDmiAntipodal) {
  auto mesh = disk_boundary_mesh(1024);
  auto r = minimize_w_pair_general(ConformalChart::identity(), {}, mesh, 64);
  EXPECT_NEAR(std::abs(std::polar(1.0, r.phi1) - std::polar(1.0, r.phi2)), 2.0, 1e-4);
  auto m = minimize_w_pair_general(ConformalChart::moebius(0.4), {}, mesh, 64);
  EXPECT_NEAR(m.W, -2.0 * pi * std::log(2.0), 1e-3);
}

TEST(MinimizeWPairGeneral, GridTooSmall) {
  EXPECT_THROW(minimize_w_pair_general(ConformalChart::identity(), {}, disk_boundary_mesh(256), 16), config_error);
}
