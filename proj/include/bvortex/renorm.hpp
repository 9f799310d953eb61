#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "trace.hpp"

namespace bvortex {

struct VortexConfig {
  std::vector<double> angles;
  std::vector<int> degrees;

  int size() const { return static_cast<int>(angles.size()); }
  cplx point(int j) const { return std::polar(1.0, angles[j]); }
};

struct DmiVector {
  double dx = 0.0;
  double dy = 0.0;

  double magnitude() const { return std::hypot(dx, dy); }
  double phase() const { return std::atan2(dy, dx); }
  Vec2 vec() const { return {dx, dy}; }
  static DmiVector polar(double mag, double theta) {
    return {mag * std::cos(theta), mag * std::sin(theta)};
  }
};

// Angles wrapped to [0, 2pi) and sorted, degrees carried along.
inline VortexConfig canonical(const VortexConfig& c) {
  std::vector<int> idx(c.angles.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> w(c.angles.size());
  for (size_t j = 0; j < w.size(); ++j) w[j] = wrap_angle(c.angles[j]);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return w[a] < w[b] || (w[a] == w[b] && c.degrees[a] < c.degrees[b]);
  });
  VortexConfig out;
  for (int i : idx) {
    out.angles.push_back(w[i]);
    out.degrees.push_back(c.degrees[i]);
  }
  return out;
}

inline void validate(const VortexConfig& c, bool unit_degrees = true) {
  if (c.angles.size() != c.degrees.size())
    throw config_error("vortex config: angles and degrees differ in length");
  if (c.angles.size() < 2) throw config_error("vortex config: need at least two vortices");
  int total = 0;
  for (int d : c.degrees) {
    if (d == 0) throw config_error("vortex config: zero degree");
    if (unit_degrees && std::abs(d) != 1)
      throw unsupported_degree("vortex degree " + std::to_string(d) + " is not +-1");
    total += d;
  }
  if (total != 2) throw config_error("vortex degrees must sum to 2");
  for (size_t j = 0; j < c.angles.size(); ++j)
    for (size_t k = j + 1; k < c.angles.size(); ++k)
      if (circ_dist(c.angles[j], c.angles[k]) <= 1e-9)
        throw singular_error("coincident vortex angles");
}

inline double gamma0() { return pi * (1.0 - std::log(4.0 * pi)); }

// delta . a^perp for a = e^{i alpha}.
inline double dmi_dot_perp(const DmiVector& d, double alpha) {
  return -d.dx * std::sin(alpha) + d.dy * std::cos(alpha);
}

inline double w_disk(const VortexConfig& config, const DmiVector& delta) {
  validate(config);
  VortexConfig c = canonical(config);
  const int N = c.size();
  double pair = 0.0, lin = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int k = j + 1; k < N; ++k)
      pair += c.degrees[j] * c.degrees[k] * std::log(std::abs(c.point(j) - c.point(k)));
    lin += c.degrees[j] * dmi_dot_perp(delta, c.angles[j]);
  }
  return -two_pi * pair + two_pi * lin;
}

// Integral over the circle of f(t) log|e^{it} - e^{i alpha}| dt, computed from
// the Fourier coefficients of f against the exact series
// log|e^{it} - e^{i alpha}| = -sum_k cos(k(t - alpha)) / k.
inline double log_product_integral(const TraceField& f, double alpha) {
  double s = 0.0;
  for (int k = 1; k <= f.K(); ++k)
    s += (f.a()[k] * std::cos(k * alpha) + f.b()[k] * std::sin(k * alpha)) / k;
  int N = f.M() / 2;
  s += f.nyquist() * std::cos(N * alpha) / N;
  return -pi * s;
}

// Boundary weight kappa + 2 delta^perp . nu sampled on the mesh.
inline TraceField boundary_weight(const BoundaryMesh& mesh, const DmiVector& delta) {
  Vec2 dp = perp(delta.vec());
  std::vector<double> f(mesh.M);
  for (int k = 0; k < mesh.M; ++k) f[k] = mesh.kappa[k] + 2.0 * dot(dp, mesh.nu[k]);
  return TraceField(std::move(f));
}

inline double w_conformal(const VortexConfig& config, const DmiVector& delta, const ConformalChart& chart,
                          const BoundaryMesh& mesh, const TraceField& weight) {
  validate(config);
  VortexConfig c = canonical(config);
  const int N = c.size();
  std::vector<cplx> a(N), pa(N), dpa(N);
  for (int j = 0; j < N; ++j) {
    a[j] = c.point(j);
    std::tie(pa[j], dpa[j]) = chart_eval(chart, a[j]);
  }
  double W = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int k = j + 1; k < N; ++k)
      W -= two_pi * c.degrees[j] * c.degrees[k] * std::log(std::abs(pa[j] - pa[k]));
    W += pi * (c.degrees[j] - 1) * std::log(std::abs(dpa[j]));
  }
  // Boundary integral: log|Psi(w) - Psi(a_j)| = log|w - a_j| + smooth remainder.
  double smooth = 0.0;
  for (int k = 0; k < mesh.M; ++k) {
    cplx w = std::polar(1.0, mesh.theta[k]);
    auto [pw, dpw] = chart_eval(chart, w);
    double s = -std::log(std::abs(dpw));
    for (int j = 0; j < N; ++j) {
      cplx diff = w - a[j];
      double rem = std::abs(diff) < 1e-12 ? std::log(std::abs(dpa[j]))
                                          : std::log(std::abs((pw - pa[j]) / diff));
      s += c.degrees[j] * rem;
    }
    smooth += weight[k] * s;
  }
  W += smooth * mesh.dtheta;
  for (int j = 0; j < N; ++j) W += c.degrees[j] * log_product_integral(weight, c.angles[j]);
  return W;
}

inline double w_conformal(const VortexConfig& config, const DmiVector& delta, const ConformalChart& chart,
                          const BoundaryMesh& mesh) {
  return w_conformal(config, delta, chart, mesh, boundary_weight(mesh, delta));
}

// Solution of the Neumann problem on the disk,
// psi(z) = -sum d_j log|z - a_j| + R(z), with R identically zero.
class NeumannSolution {
 public:
  explicit NeumannSolution(VortexConfig c) : config_(canonical(c)) {
    for (int j = 0; j < config_.size(); ++j) pts_.push_back(config_.point(j));
  }

  const VortexConfig& config() const { return config_; }
  // Boundary mean of psi; zero because the circle average of log|z - a| is zero for |a| = 1.
  double normalization() const { return 0.0; }

  double R(cplx) const { return 0.0; }

  double singular(cplx z) const {
    double s = 0.0;
    for (size_t j = 0; j < pts_.size(); ++j) {
      double d = std::abs(z - pts_[j]);
      if (d == 0.0) throw singular_error("psi evaluated at a vortex");
      s -= config_.degrees[j] * std::log(d);
    }
    return s;
  }

  double psi(cplx z) const { return singular(z) + R(z); }

  Vec2 grad_psi(cplx z) const {
    Vec2 g;
    for (size_t j = 0; j < pts_.size(); ++j) {
      cplx d = z - pts_[j];
      double n2 = std::norm(d);
      if (n2 == 0.0) throw singular_error("psi gradient evaluated at a vortex");
      g.x -= config_.degrees[j] * d.real() / n2;
      g.y -= config_.degrees[j] * d.imag() / n2;
    }
    return g;
  }

  // Radial derivative on the unit circle.
  double normal_derivative(double theta) const {
    return dot(grad_psi(std::polar(1.0, theta)), {std::cos(theta), std::sin(theta)});
  }

 private:
  VortexConfig config_;
  std::vector<cplx> pts_;
};

inline NeumannSolution neumann_psi(const VortexConfig& config) {
  validate(config, false);
  return NeumannSolution(config);
}

// Boundary integral of psi * f: the log part by product integration, the
// bounded part R by the trapezoid rule.
inline double psi_boundary_integral(const NeumannSolution& psi, const TraceField& f, const BoundaryMesh& mesh) {
  const VortexConfig& c = psi.config();
  double s = 0.0;
  for (int j = 0; j < c.size(); ++j) s -= c.degrees[j] * log_product_integral(f, c.angles[j]);
  double r = 0.0;
  for (int k = 0; k < mesh.M; ++k) r += psi.R(std::polar(1.0, mesh.theta[k])) * f[k];
  return s + r * mesh.dtheta;
}

inline double w_neumann(const VortexConfig& config, const DmiVector& delta, const NeumannSolution& psi,
                        const BoundaryMesh& mesh) {
  validate(config);
  VortexConfig c = canonical(config);
  const int N = c.size();
  double W = 0.0;
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k)
      W -= two_pi * c.degrees[j] * c.degrees[k] * std::log(std::abs(c.point(j) - c.point(k)));
  W -= psi_boundary_integral(psi, boundary_weight(mesh, delta), mesh);
  for (int j = 0; j < N; ++j) W += pi * c.degrees[j] * psi.R(c.point(j));
  return W;
}

// ---------------------------------------------------------------------------
// Limit definition: integral of |grad phi*|^2 - 2 delta . grad phi* over the disk
// with half-disks B_r(a_j) removed, minus N pi log(1/r).

struct LimitGrid {
  int theta_panels = 64;
  int gauss = 16;
  int s_panels = 6;
  int beta_panels = 4;
  int rho_panels_per_octave = 2;
};

struct NumericLimit {
  std::vector<double> radii;
  std::vector<double> estimates;
  double extrapolated = 0.0;
  double exponent = 0.0;  // fitted r-exponent of the error, NaN if no fit
  bool cauchy = true;
};

// Harmonic extension phi* of the boundary lifting with jumps -pi d_j at a_j:
// phi* = sum_j d_j arg(1 - z conj(a_j)) + const. Returns its gradient.
inline Vec2 phi_star_gradient(const VortexConfig& c, cplx z) {
  Vec2 g;
  for (int j = 0; j < c.size(); ++j) {
    cplx ab = std::conj(c.point(j));
    cplx fp = -ab / (1.0 - z * ab);
    g.x += c.degrees[j] * fp.imag();
    g.y += c.degrees[j] * fp.real();
  }
  return g;
}

inline double phi_star_value(const VortexConfig& c, cplx z) {
  double s = 0.5 * pi;
  for (int j = 0; j < c.size(); ++j) s += c.degrees[j] * std::arg(1.0 - z * std::conj(c.point(j)));
  return s;
}

// Three-point fit E(r) = W + A r^p; returns W and writes p (NaN if the
// differences do not contract).
inline double power_fit(const std::vector<double>& r, const std::vector<double>& E, double& p) {
  p = std::numeric_limits<double>::quiet_NaN();
  size_t n = E.size();
  if (n < 3) return E.back();
  double r1 = r[n - 3], r2 = r[n - 2], r3 = r[n - 1];
  double d1 = E[n - 3] - E[n - 2], d2 = E[n - 2] - E[n - 1];
  if (std::abs(d2) < 1e-14 || d1 * d2 <= 0.0) return E.back();
  double target = d1 / d2;
  auto ratio = [&](double q) { return (std::pow(r1, q) - std::pow(r2, q)) / (std::pow(r2, q) - std::pow(r3, q)); };
  double lo = 0.05, hi = 6.0;
  if ((ratio(lo) - target) * (ratio(hi) - target) > 0.0) return E.back();
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((ratio(lo) - target) * (ratio(mid) - target) <= 0.0) hi = mid;
    else lo = mid;
  }
  p = 0.5 * (lo + hi);
  double A = d2 / (std::pow(r2, p) - std::pow(r3, p));
  return E.back() - A * std::pow(r3, p);
}

// Value at r = 0 of the polynomial through all (r_i, E_i) (Neville).
inline double polynomial_extrapolate(const std::vector<double>& r, const std::vector<double>& E) {
  std::vector<double> P(E);
  size_t n = P.size();
  for (size_t m = 1; m < n; ++m)
    for (size_t i = 0; i + m < n; ++i)
      P[i] = (r[i + m] * P[i] - r[i] * P[i + 1]) / (r[i + m] - r[i]);
  return P[0];
}

inline NumericLimit w_numeric_limit(const VortexConfig& config, const DmiVector& delta, std::vector<double> radii,
                                    const LimitGrid& grid = {}) {
  validate(config);
  VortexConfig c = canonical(config);
  const int N = c.size();
  if (radii.empty()) throw precondition_error("numeric limit needs at least one radius");
  double dmin = 2.0;
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k) dmin = std::min(dmin, std::abs(c.point(j) - c.point(k)));
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || radii[i] >= 0.5 * dmin)
      throw precondition_error("radius must lie in (0, half the minimal vortex distance)");
    if (i > 0 && radii[i] >= radii[i - 1]) throw precondition_error("radii must be decreasing");
  }
  const double R = std::min(0.5 * (radii[0] + 0.5 * dmin), 0.6);
  const Vec2 dv = delta.vec();
  auto integrand = [&](cplx z) {
    Vec2 g = phi_star_gradient(c, z);
    return dot(g, g) - 2.0 * dot(dv, g);
  };
  const GaussRule& gr = gauss_legendre(grid.gauss);

  // Global part: polar (t, s) over the disk minus the disks B_R(a_j).
  std::vector<double> brk;
  for (int p = 0; p <= grid.theta_panels; ++p) brk.push_back(two_pi * p / grid.theta_panels);
  const double t1 = std::asin(R), t2 = 2.0 * std::asin(0.5 * R);
  struct Sliver { double edge, inner; };
  std::vector<Sliver> slivers;
  for (int j = 0; j < N; ++j) {
    double a = c.angles[j];
    for (double sgn : {-1.0, 1.0}) {
      brk.push_back(wrap_angle(a + sgn * t1));
      brk.push_back(wrap_angle(a + sgn * t2));
      slivers.push_back({wrap_angle(a + sgn * t1), wrap_angle(a + sgn * t2)});
    }
  }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }),
            brk.end());

  auto radial_integral = [&](double t) {
    // s-intervals of the ray at angle t outside all B_R(a_j).
    std::vector<std::pair<double, double>> cut;
    for (int j = 0; j < N; ++j) {
      double cc = std::cos(t - c.angles[j]);
      double disc = cc * cc - 1.0 + R * R;
      if (cc <= 0.0 || disc <= 0.0) continue;
      double sq = std::sqrt(disc);
      cut.push_back({cc - sq, std::min(1.0, cc + sq)});
    }
    std::sort(cut.begin(), cut.end());
    std::vector<std::pair<double, double>> keep;
    double s0 = 0.0;
    for (auto& [lo, hi] : cut) {
      if (lo > s0) keep.push_back({s0, lo});
      s0 = std::max(s0, hi);
    }
    if (s0 < 1.0) keep.push_back({s0, 1.0});
    double ct = std::cos(t), st = std::sin(t);
    double total = 0.0;
    for (auto [lo, hi] : keep) {
      // Geometric panels toward the end nearer to a vortex circle.
      std::vector<double> e{lo};
      double len = hi - lo;
      for (int p = 1; p < grid.s_panels; ++p) e.push_back(hi - len * std::pow(0.5, p));
      e.push_back(hi);
      for (size_t p = 0; p + 1 < e.size(); ++p) {
        double a = e[p], b = e[p + 1];
        if (b <= a) continue;
        total += gauss_integrate([&](double s) { return integrand(cplx(s * ct, s * st)) * s; }, a, b, grid.gauss);
      }
    }
    return total;
  };

  double global = 0.0;
  for (size_t p = 0; p + 1 < brk.size() + 1; ++p) {
    double a = brk[p];
    double b = (p + 1 < brk.size()) ? brk[p + 1] : brk[0] + two_pi;
    if (b - a < 1e-15) continue;
    // Panels inside a sliver get a quadratic map toward the tangency angle,
    // where the excluded s-interval opens like a square root.
    double mid = wrap_angle(0.5 * (a + b));
    const Sliver* sl = nullptr;
    for (auto& s : slivers) {
      double w = circ_dist(s.edge, s.inner);
      if (circ_dist(mid, s.edge) < w && circ_dist(mid, s.inner) < w) sl = &s;
    }
    if (sl) {
      bool a_near = circ_dist(a, sl->edge) < circ_dist(b, sl->edge);
      double edge = a_near ? a : b;
      double other = a_near ? b : a;
      double span = other - edge;
      double acc = 0.0;
      for (int i = 0; i < grid.gauss; ++i) {
        double u = 0.5 * (gr.x[i] + 1.0);
        double t = edge + span * u * u;
        acc += 0.5 * gr.w[i] * radial_integral(t) * 2.0 * u;
      }
      global += acc * std::abs(span);
    } else {
      global += gauss_integrate(radial_integral, a, b, grid.gauss);
    }
  }

  // Local half-annuli r < rho < R around each vortex, log-spaced in rho.
  auto annulus = [&](double r_in, double r_out) {
    double total = 0.0;
    int nrho = std::max(1, static_cast<int>(std::ceil(grid.rho_panels_per_octave * std::log2(r_out / r_in))));
    double lr0 = std::log(r_in), lr1 = std::log(r_out);
    for (int j = 0; j < N; ++j) {
      cplx a = c.point(j);
      for (int p = 0; p < nrho; ++p) {
        double u0 = lr0 + (lr1 - lr0) * p / nrho, u1 = lr0 + (lr1 - lr0) * (p + 1) / nrho;
        total += gauss_integrate(
            [&](double u) {
              double rho = std::exp(u);
              double b0 = c.angles[j] + 0.5 * pi + std::asin(0.5 * rho);
              double b1 = c.angles[j] + 1.5 * pi - std::asin(0.5 * rho);
              double acc = 0.0;
              for (int q = 0; q < grid.beta_panels; ++q) {
                double ba = b0 + (b1 - b0) * q / grid.beta_panels;
                double bb = b0 + (b1 - b0) * (q + 1) / grid.beta_panels;
                acc += gauss_integrate([&](double b) { return integrand(a + std::polar(rho, b)); }, ba, bb, grid.gauss);
              }
              return acc * rho * rho;  // rho drho = rho^2 du
            },
            u0, u1, grid.gauss);
      }
    }
    return total;
  };

  NumericLimit out;
  out.radii = radii;
  double acc = global + annulus(radii[0], R);
  for (size_t i = 0; i < radii.size(); ++i) {
    if (i > 0) acc += annulus(radii[i], radii[i - 1]);
    out.estimates.push_back(acc - N * pi * std::log(1.0 / radii[i]));
  }
  for (size_t i = 2; i < out.estimates.size(); ++i)
    if (std::abs(out.estimates[i] - out.estimates[i - 1]) > std::abs(out.estimates[i - 1] - out.estimates[i - 2]))
      out.cauchy = false;
  // The leading exponent is reported as a diagnostic; the extrapolation itself
  // uses integer powers of r, which absorbs the r^2 correction that biases a
  // single-power fit.
  power_fit(out.radii, out.estimates, out.exponent);
  out.extrapolated = polynomial_extrapolate(out.radii, out.estimates);
  return out;
}

}  // namespace bvortex
