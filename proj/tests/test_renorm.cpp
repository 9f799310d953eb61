#include <gtest/gtest.h>

#include <bvortex/critpoints.hpp>
#include <bvortex/renorm.hpp>

#include <random>

using namespace bvortex;

namespace {

// Direct transcription of the disk formula, for degrees +1 pairs.
double pair_w(double a, double b, DmiVector d) {
  cplx za = std::polar(1.0, a), zb = std::polar(1.0, b);
  auto perp_dot = [&](cplx z) { return d.dx * (-z.imag()) + d.dy * z.real(); };
  return -2.0 * pi * std::log(std::abs(za - zb)) + 2.0 * pi * (perp_dot(za) + perp_dot(zb));
}

// Grid search followed by local grid refinement.
double brute_min_w(DmiVector d) {
  const int n = 720;
  double best = 1e300, ba = 0.0, bb = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double a = 2.0 * pi * i / n, b = 2.0 * pi * j / n;
      double w = pair_w(a, b, d);
      if (w < best) best = w, ba = a, bb = b;
    }
  double step = 2.0 * pi / n;
  for (int level = 0; level < 12; ++level) {
    double ca = ba, cb = bb;
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        double a = ca + i * step / 4, b = cb + j * step / 4;
        double w = pair_w(a, b, d);
        if (w < best) best = w, ba = a, bb = b;
      }
    step /= 4;
  }
  return best;
}

}  // namespace

TEST(WDisk, AntipodalNoDmi) {
  VortexConfig c{{0.0, pi}, {1, 1}};
  EXPECT_NEAR(w_disk(c, {}), -2.0 * pi * std::log(2.0), 1e-14);
  EXPECT_NEAR(w_disk(c, {}), -4.355172, 1e-6);
}

TEST(WDisk, AntipodalDmiCancels) {
  VortexConfig c{{0.0, pi}, {1, 1}};
  EXPECT_NEAR(w_disk(c, {1.0, 0.0}), -2.0 * pi * std::log(2.0), 1e-14);
}

TEST(WDisk, OptimalPairMatchesGridSearch) {
  DmiVector d{0.25, 0.0};
  double td = theta_delta(0.25);
  double w = w_disk(VortexConfig{{td, pi - td}, {1, 1}}, d);
  EXPECT_NEAR(w, brute_min_w(d), 1e-9);
  EXPECT_NEAR(w, -5.06506, 1e-4);
}

TEST(WDisk, Errors) {
  EXPECT_THROW(w_disk(VortexConfig{{1.0, 1.0}, {1, 1}}, {}), singular_error);
  EXPECT_THROW(w_disk(VortexConfig{{0.0, 1.0, 2.0}, {2, 1, -1}}, {}), unsupported_degree);
  EXPECT_THROW(w_disk(VortexConfig{{0.0, 1.0, 2.0}, {1, 1, 1}}, {}), config_error);
  EXPECT_THROW(w_disk(VortexConfig{{0.0, 1.0}, {1, 0}}, {}), config_error);
}

TEST(WConformal, IdentityEqualsDisk) {
  auto mesh = disk_boundary_mesh(2048);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 2.0 * pi), D(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    VortexConfig c{{U(rng), U(rng), U(rng), U(rng)}, {1, 1, 1, -1}};
    DmiVector d{D(rng), D(rng)};
    EXPECT_NEAR(w_conformal(c, d, ConformalChart::identity(), mesh), w_disk(c, d), 1e-8);
  }
}

TEST(WConformal, MoebiusEqualsDisk) {
  auto mesh = disk_boundary_mesh(4096);
  VortexConfig c{{0.0, pi}, {1, 1}};
  DmiVector d{0.0, 0.3};
  EXPECT_NEAR(w_conformal(c, d, ConformalChart::moebius(0.4), mesh), w_disk(c, d), 1e-6);
}

TEST(Neumann, NormalDerivativeAwayFromVortices) {
  VortexConfig c{{0.0, pi}, {1, 1}};
  auto psi = neumann_psi(c);
  // second-order one-sided radial difference
  double h = 1e-4;
  auto at = [&](double r) { return psi.psi(std::polar(r, pi / 2)); };
  double fd = (3.0 * at(1.0) - 4.0 * at(1.0 - h) + at(1.0 - 2.0 * h)) / (2.0 * h);
  EXPECT_NEAR(fd, -1.0, 1e-6);
  EXPECT_NEAR(psi.normal_derivative(pi / 2), -1.0, 1e-12);
}

TEST(Neumann, RVanishes) {
  auto psi = neumann_psi(VortexConfig{{0.0, pi}, {1, 1}});
  EXPECT_NEAR(psi.R(cplx(0.2, 0.1)), 0.0, 1e-12);
}

TEST(Neumann, LaplacianVanishes) {
  auto psi = neumann_psi(VortexConfig{{0.4, 2.0, 4.0}, {1, -1, 2}});
  double h = 1e-3;
  for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.3), cplx(0.0, -0.7)}) {
    double lap = psi.psi(z + h) + psi.psi(z - h) + psi.psi(z + cplx(0, h)) + psi.psi(z - cplx(0, h)) -
                 4.0 * psi.psi(z);
    EXPECT_NEAR(lap, 0.0, 1e-6);
  }
}

TEST(Neumann, DmiBoundaryIntegral) {
  // -log|e^{it} - e^{ia}| = sum cos(n(t - a))/n, so the integral against sin t is pi sin a.
  VortexConfig c{{0.0, pi / 2}, {1, 1}};
  auto mesh = disk_boundary_mesh(1024);
  std::vector<double> f(mesh.M);
  for (int k = 0; k < mesh.M; ++k) f[k] = std::sin(mesh.theta[k]);  // delta^perp . nu for delta = (1, 0)
  double I = psi_boundary_integral(neumann_psi(c), TraceField(f), mesh);
  EXPECT_NEAR(I, pi * (std::sin(0.0) + std::sin(pi / 2)), 1e-6);
  EXPECT_NEAR(I, 3.141593, 1e-6);
}

TEST(WNeumann, AntipodalAndDmiLinearity) {
  auto mesh = disk_boundary_mesh(4096);
  VortexConfig c{{0.0, pi}, {1, 1}};
  EXPECT_NEAR(w_neumann(c, {}, neumann_psi(c), mesh), -2.0 * pi * std::log(2.0), 1e-6);
  VortexConfig c2{{0.7, 2.9}, {1, 1}};
  DmiVector d{0.3, -0.2};
  double diff = w_neumann(c2, d, neumann_psi(c2), mesh) - w_neumann(c2, {}, neumann_psi(c2), mesh);
  double lin = 0.0;
  for (double a : c2.angles) lin += 2.0 * pi * (d.dx * -std::sin(a) + d.dy * std::cos(a));
  EXPECT_NEAR(diff, lin, 1e-6);
}

TEST(WNumericLimit, AntipodalExtrapolation) {
  VortexConfig c{{0.0, pi}, {1, 1}};
  auto nl = w_numeric_limit(c, {}, {0.2, 0.1, 0.05, 0.025});
  EXPECT_NEAR(nl.extrapolated, -4.3552, 1e-3);
  for (size_t k = 2; k < nl.estimates.size(); ++k)
    EXPECT_LT(std::abs(nl.estimates[k] - nl.estimates[k - 1]), std::abs(nl.estimates[k - 1] - nl.estimates[k - 2]));
  EXPECT_TRUE(nl.cauchy);
}

TEST(WNumericLimit, WithDmi) {
  VortexConfig c{{0.0, pi}, {1, 1}};
  DmiVector d{0.0, 1.0};
  EXPECT_NEAR(w_numeric_limit(c, d, {0.2, 0.1, 0.05, 0.025}).extrapolated, w_disk(c, d), 1e-3);
}

TEST(WNumericLimit, RadiiMustNotOverlap) {
  VortexConfig c{{0.0, 0.3}, {1, 1}};
  EXPECT_THROW(w_numeric_limit(c, {}, {0.2, 0.1}), precondition_error);
}

TEST(Gamma0, ClosedForm) {
  double ref = pi * std::log(std::exp(1.0) / (4.0 * pi));
  EXPECT_NEAR(gamma0(), ref, 1e-14);
  EXPECT_NEAR(gamma0(), -4.8098545, 1e-6);
  EXPECT_NEAR(2.0 * gamma0(), -9.619709, 1e-6);
  EXPECT_LT(gamma0(), 0.0);
}
