#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "critpoints.hpp"
#include "geometry.hpp"
#include "lbfgs.hpp"
#include "renorm.hpp"
#include "trace.hpp"

namespace bvortex {

// Dirichlet energy of the harmonic extension: pi sum k (a_k^2 + b_k^2).
inline double h_half_seminorm(const TraceField& t) {
  double s = 0.0;
  for (int k = 1; k <= t.K(); ++k) s += k * (t.a()[k] * t.a()[k] + t.b()[k] * t.b()[k]);
  double N = 0.5 * t.M();
  return pi * s + pi * N * t.nyquist() * t.nyquist();
}

// Node count resolving the eps-scale boundary layer.
inline int trace_resolution(double eps) {
  int M = std::max(1024, static_cast<int>(std::ceil(64.0 / eps)));
  return M + (M % 2);
}

struct ReducedValue {
  double value = 0.0;
  TraceField gradient;
  EnergyBreakdown breakdown;
};

namespace detail {

// Value and nodal gradient of the reduced functional on raw node values.
struct ReducedFunctional {
  int M;
  double eps;
  double dtheta;
  std::vector<double> g;
  std::vector<double> dnu;  // delta . nu at nodes

  ReducedFunctional(const BoundaryMesh& mesh, double eps_, const DmiVector& delta, const std::vector<double>& gvals)
      : M(mesh.M), eps(eps_), dtheta(mesh.dtheta), g(gvals), dnu(mesh.M) {
    for (int k = 0; k < M; ++k) dnu[k] = delta.dx * mesh.nu[k].x + delta.dy * mesh.nu[k].y;
  }

  double operator()(const std::vector<double>& v, std::vector<double>& grad, EnergyBreakdown* br = nullptr) const {
    auto X = rfft(v);
    const int N = M / 2;
    double E = 0.0;
    std::vector<cplx> Y(N + 1);
    const double c = 4.0 * pi / (static_cast<double>(M) * M);
    for (int k = 1; k < N; ++k) {
      E += k * std::norm(X[k]);
      Y[k] = c * k * X[k];
    }
    // |X_k|^2 = (M/2)^2 (a_k^2 + b_k^2), so pi sum k (a^2+b^2) = (4 pi / M^2) sum k |X_k|^2.
    E *= c;
    double nyq = X[N].real() / M;
    E += pi * N * nyq * nyq;
    Y[N] = 0.5 * c * N * X[N];
    grad = irfft(Y, M);
    const double sig = 1.0 / (two_pi * eps);
    double pen = 0.0, dmi = 0.0;
    for (int k = 0; k < M; ++k) {
      double s = v[k] - g[k];
      double sn = std::sin(s);
      pen += sn * sn;
      dmi += v[k] * dnu[k];
      grad[k] += sig * std::sin(2.0 * s) * dtheta - 2.0 * dnu[k] * dtheta;
    }
    pen *= sig * dtheta;
    dmi *= -2.0 * dtheta;
    if (br) {
      br->dirichlet = E;
      br->dmi = dmi;
      br->boundary_penalty = pen;
      br->potential = 0.0;
      br->sum();
    }
    return E + pen + dmi;
  }
};

}  // namespace detail

inline ReducedValue reduced_objective(const TraceField& trace, double eps, const DmiVector& delta, const TraceField& g,
                                      const BoundaryMesh& mesh) {
  if (!(eps > 0.0)) throw config_error("eps must be positive");
  if (trace.M() != mesh.M || g.M() != mesh.M) throw config_error("trace, g and mesh sizes differ");
  detail::ReducedFunctional F(mesh, eps, delta, g.values());
  std::vector<double> grad;
  ReducedValue out;
  out.value = F(trace.values(), grad, &out.breakdown);
  out.gradient = TraceField(std::move(grad));
  return out;
}

// Two-vortex style initial trace: pi/2 + sum_j (d_j / 2)(u_rho(t - a_j) + a_j - 2 pi),
// u_rho(t) = pi - 2 atan2(rho sin t, 1 - rho cos t), the Poisson-smoothed
// version of the sawtooth with a -pi d_j jump at a_j.
inline TraceField vortex_ansatz(const BoundaryMesh& mesh, const VortexConfig& c, double eps) {
  double rho = std::max(0.0, 1.0 - 4.0 * pi * eps);
  std::vector<double> v(mesh.M, 0.5 * pi);
  for (int k = 0; k < mesh.M; ++k)
    for (int j = 0; j < c.size(); ++j) {
      double t = mesh.theta[k] - c.angles[j];
      double u = pi - 2.0 * std::atan2(rho * std::sin(t), 1.0 - rho * std::cos(t));
      v[k] += 0.5 * c.degrees[j] * (u + c.angles[j] - two_pi);
    }
  return TraceField(std::move(v));
}

// Default initialization: optimal pair for delta != 0, antipodal (0, pi) otherwise.
inline TraceField default_initial_trace(const BoundaryMesh& mesh, double eps, const DmiVector& delta) {
  VortexConfig c{{0.0, pi}, {1, 1}};
  if (delta.magnitude() > 0.0) {
    auto [a, b] = optimal_pair(delta);
    c.angles = {a, b};
  }
  return vortex_ansatz(mesh, c, eps);
}

// Scans (trace - g)/pi for integer plateaus. Each net step of -s between
// plateaus is a vortex of degree s, located at the mid-level crossing; the
// 2pi jump of g enters the bookkeeping as a fixed +2.
inline VortexConfig detect_vortices(const TraceField& trace, const TraceField& g, double threshold = 0.2) {
  const int M = trace.M();
  if (g.M() != M) throw config_error("trace and g sizes differ");
  const double h = two_pi / M;
  std::vector<double> u(M), dw(M);
  for (int k = 0; k < M; ++k) u[k] = (trace[k] - g[k]) / pi;
  for (int k = 0; k < M; ++k) {
    int k1 = (k + 1) % M;
    double corr = 2.0 * std::round((g[k1] - g[k] - h) / two_pi);
    dw[k] = u[k1] - u[k] + corr;
  }
  std::vector<int> clean;
  for (int k = 0; k < M; ++k)
    if (std::abs(u[k] - std::round(u[k])) <= threshold) clean.push_back(k);
  if (clean.empty()) throw detection_error("vortex detection failed: no node of trace - g is near a multiple of pi");

  VortexConfig out;
  int total = 0;
  const int nc = static_cast<int>(clean.size());
  for (int c = 0; c < nc; ++c) {
    int i = clean[c];
    int j = clean[(c + 1) % nc];
    int cells = (j - i + M) % M;
    if (cells == 0) cells = M;  // single clean node
    if (cells - 1 > M / 8)
      throw detection_error("vortex detection ambiguous: a transition layer spans " + std::to_string(cells - 1) +
                            " nodes");
    double S = 0.0;
    for (int q = 0; q < cells; ++q) S += dw[(i + q) % M];
    double n = std::round(S);
    if (std::abs(S - n) > 2.0 * threshold)
      throw detection_error("vortex detection ambiguous: non-integer step between plateaus");
    if (n == 0.0) continue;
    double level = 0.5 * n, W = 0.0;
    double where = i * h;
    for (int q = 0; q < cells; ++q) {
      double Wn = W + dw[(i + q) % M];
      if ((W - level) * (Wn - level) <= 0.0 && Wn != W) {
        where = (i + q + (level - W) / (Wn - W)) * h;
        break;
      }
      W = Wn;
    }
    out.angles.push_back(wrap_angle(where));
    out.degrees.push_back(-static_cast<int>(n));
    total += -static_cast<int>(n);
  }
  if (total != 2)
    throw detection_error("vortex detection inconsistent: degrees sum to " + std::to_string(total));
  return canonical(out);
}

struct MinimizeOptions {
  int max_iter = 20000;
  double grad_tol = 1e-8;  // max-norm of the nodal gradient
  int restarts = 1;
  std::uint64_t seed = 0;
  int history = 20;
};

struct MinimizeResult {
  TraceField trace;
  EnergyBreakdown breakdown;
  int iterations = 0;
  double grad_norm = 0.0;
  int restart = 0;
};

namespace detail {

// Change of variables w = P^{1/2} v with P diagonal in Fourier,
// P_k = (4 pi / M)(k + 1/(2 pi eps)), the Hessian scale of the seminorm plus penalty.
struct TracePreconditioner {
  int M;
  std::vector<double> sq;
  TracePreconditioner(int M_, double eps) : M(M_), sq(M_ / 2 + 1) {
    double sig = 1.0 / (two_pi * eps);
    for (int k = 0; k <= M / 2; ++k) sq[k] = std::sqrt(4.0 * pi / M * (k + sig));
  }
  std::vector<double> apply(const std::vector<double>& x, bool inverse) const {
    auto X = rfft(x);
    for (int k = 0; k <= M / 2; ++k) X[k] *= (inverse ? 1.0 / sq[k] : sq[k]) / M;
    return irfft(X, M);
  }
};

}  // namespace detail

inline MinimizeResult minimize_single(double eps, const DmiVector& delta, const TraceField& init,
                                      const MinimizeOptions& opt) {
  const int M = init.M();
  BoundaryMesh mesh = disk_boundary_mesh(M);
  // sin^2 is pi-periodic, so the jump position of g does not affect the objective.
  TraceField g = tangent_lifting(mesh, choose_jump_angle(mesh));
  detail::ReducedFunctional F(mesh, eps, delta, g.values());
  detail::TracePreconditioner P(M, eps);

  Objective fw = [&](const std::vector<double>& w, std::vector<double>& gw) {
    auto v = P.apply(w, true);
    std::vector<double> gv;
    double f = F(v, gv);
    gw = P.apply(gv, true);
    return f;
  };
  StopMeasure meas = [&](const std::vector<double>&, const std::vector<double>& gw) {
    return detail::inf_norm(P.apply(gw, false));
  };
  LbfgsOptions lo;
  lo.history = opt.history;
  lo.max_iter = opt.max_iter;
  lo.grad_tol = opt.grad_tol;
  auto res = lbfgs_minimize(fw, P.apply(init.values(), false), lo, meas);
  auto v = P.apply(res.x, true);
  MinimizeResult out;
  std::vector<double> gv;
  F(v, gv, &out.breakdown);
  out.trace = TraceField(std::move(v));
  out.iterations = res.iterations;
  out.grad_norm = detail::inf_norm(gv);
  if (!(out.grad_norm <= opt.grad_tol))
    throw convergence_error("trace minimization stopped with gradient norm " + std::to_string(out.grad_norm),
                            out.trace.values(), out.breakdown.total, out.grad_norm, out.iterations);
  return out;
}

inline MinimizeResult minimize_trace(double eps, const DmiVector& delta, const TraceField& init,
                                     const MinimizeOptions& opt = {}) {
  if (!(eps >= 1e-5 && eps <= 0.1)) throw config_error("eps must lie in [1e-5, 0.1]");
  if (opt.restarts < 1) throw config_error("restarts must be >= 1");
  BoundaryMesh mesh = disk_boundary_mesh(init.M());
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(0.0, two_pi);

  struct Candidate {
    MinimizeResult r;
    int nvort;
    std::vector<double> angles;
  };
  std::vector<Candidate> done;
  std::vector<convergence_error> fails;
  for (int k = 0; k < opt.restarts; ++k) {
    TraceField start = init;
    if (k > 0) {
      double a = U(rng), b = U(rng);
      if (circ_dist(a, b) < 0.1) b = a + pi;
      start = vortex_ansatz(mesh, VortexConfig{{a, b}, {1, 1}}, eps);
    }
    try {
      MinimizeResult r = minimize_single(eps, delta, start, opt);
      r.restart = k;
      Candidate c{r, std::numeric_limits<int>::max(), {}};
      try {
        TraceField g = tangent_lifting(mesh, choose_jump_angle(mesh));
        VortexConfig vc = detect_vortices(r.trace, g);
        c.nvort = vc.size();
        c.angles = vc.angles;
      } catch (const detection_error&) {
      }
      done.push_back(std::move(c));
    } catch (const convergence_error& e) {
      fails.push_back(e);
    }
  }
  if (done.empty()) throw fails.back();
  auto better = [](const Candidate& a, const Candidate& b) {
    double fa = a.r.breakdown.total, fb = b.r.breakdown.total;
    double tol = 1e-10 * std::max(1.0, std::abs(fa));
    if (std::abs(fa - fb) > tol) return fa < fb;
    if (a.nvort != b.nvort) return a.nvort < b.nvort;
    return a.angles < b.angles;
  };
  auto it = std::min_element(done.begin(), done.end(), better);
  return it->r;
}

struct BoundarySolve {
  MinimizeResult result;
  VortexConfig vortices;
  TraceField g;
  int M = 0;
};

// Resolution policy, default initialization, minimization and detection.
// The jump of g is moved away from the detected vortices before the final read-out.
inline BoundarySolve solve_boundary(double eps, const DmiVector& delta, const MinimizeOptions& opt = {},
                                    int M = 0) {
  if (M <= 0) M = trace_resolution(eps);
  BoundaryMesh mesh = disk_boundary_mesh(M);
  BoundarySolve out;
  out.M = M;
  out.result = minimize_trace(eps, delta, default_initial_trace(mesh, eps, delta), opt);
  TraceField g = tangent_lifting(mesh, choose_jump_angle(mesh));
  VortexConfig vc = detect_vortices(out.result.trace, g);
  double j = choose_jump_angle(mesh, vc.angles);
  out.g = tangent_lifting(mesh, j);
  out.vortices = detect_vortices(out.result.trace, out.g);
  return out;
}

// Second-order prediction N pi |log eps| + W + N gamma0.
inline double gamma_prediction(double eps, const VortexConfig& c, const DmiVector& delta) {
  return c.size() * pi * std::abs(std::log(eps)) + w_disk(c, delta) + c.size() * gamma0();
}

}  // namespace bvortex
