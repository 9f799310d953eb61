#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "renorm.hpp"

namespace bvortex {

enum class Classification { minimum, saddle, maximum, degenerate };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::minimum: return "minimum";
    case Classification::saddle: return "saddle";
    case Classification::maximum: return "maximum";
    default: return "degenerate";
  }
}

struct PairState {
  double phi1 = 0.0, phi2 = 0.0;
  double value = 0.0;
  std::array<double, 2> grad{};
  std::array<double, 3> hessian{};  // h11, h12, h22
  std::array<double, 2> eigenvalues{};
  Classification classification = Classification::degenerate;
  int iterations = 0;

  double det() const { return hessian[0] * hessian[2] - hessian[1] * hessian[1]; }
  double grad_norm() const { return std::hypot(grad[0], grad[1]); }
};

inline std::array<double, 2> sym_eigenvalues(const std::array<double, 3>& H) {
  double m = 0.5 * (H[0] + H[2]);
  double d = std::hypot(0.5 * (H[0] - H[2]), H[1]);
  return {m - d, m + d};
}

inline Classification classify(const std::array<double, 2>& ev, double tol = 1e-10) {
  if (ev[0] > tol && ev[1] > tol) return Classification::minimum;
  if (ev[0] < -tol && ev[1] < -tol) return Classification::maximum;
  if (ev[0] < -tol && ev[1] > tol) return Classification::saddle;
  return Classification::degenerate;
}

// f = -1/2 log 2 - 1/2 log(1 - cos(p1 - p2)) - d1 (sin p1 + sin p2) + d2 (cos p1 + cos p2),
// so that 2 pi f equals w_disk for the pair with degrees (1, 1).
inline PairState pair_energy_derivatives(double phi1, double phi2, const DmiVector& delta) {
  double D = phi1 - phi2;
  double omc = 1.0 - std::cos(D);
  if (omc <= 1e-18 || circ_dist(phi1, phi2) <= 1e-9) throw singular_error("coincident pair angles");
  PairState s;
  s.phi1 = phi1;
  s.phi2 = phi2;
  s.value = -0.5 * std::log(2.0) - 0.5 * std::log(omc) - delta.dx * (std::sin(phi1) + std::sin(phi2)) +
            delta.dy * (std::cos(phi1) + std::cos(phi2));
  double q = std::sin(D) / (2.0 * omc);
  // a_j . delta and a_j . delta^perp
  double ad1 = delta.dx * std::cos(phi1) + delta.dy * std::sin(phi1);
  double ad2 = delta.dx * std::cos(phi2) + delta.dy * std::sin(phi2);
  double ap1 = delta.dx * std::sin(phi1) - delta.dy * std::cos(phi1);
  double ap2 = delta.dx * std::sin(phi2) - delta.dy * std::cos(phi2);
  s.grad = {-q - ad1, q - ad2};
  double c = 1.0 / (2.0 * omc);
  s.hessian = {c + ap1, -c, c + ap2};
  s.eigenvalues = sym_eigenvalues(s.hessian);
  s.classification = classify(s.eigenvalues);
  return s;
}

inline double theta_delta(double mag) {
  if (!(mag > 0.0)) throw domain_error("theta_delta needs |delta| > 0 (delta = 0 has an antipodal continuum)");
  // X = sqrt(1 + 1/(16 m^2)) - 1/(4 m), rewritten to avoid cancellation for small m.
  double u = 1.0 / (4.0 * mag);
  double X = 1.0 / (std::sqrt(1.0 + u * u) + u);
  return std::asin(X);
}

// Pair wrapped to [0, 2pi) and sorted ascending.
inline std::pair<double, double> canonical_pair(double a, double b) {
  a = wrap_angle(a);
  b = wrap_angle(b);
  if (b < a) std::swap(a, b);
  return {a, b};
}

inline std::pair<double, double> optimal_pair(const DmiVector& delta) {
  double m = delta.magnitude();
  if (!(m > 0.0))
    throw config_error("optimal_pair: delta = 0 gives a degenerate continuum of antipodal minimizers");
  double th = delta.phase(), td = theta_delta(m);
  return canonical_pair(th + td, th + pi - td);
}

// Case-1 critical point: antipodal pair aligned with delta^perp.
inline std::pair<double, double> aligned_saddle(const DmiVector& delta) {
  double th = delta.phase();
  return {th + 0.5 * pi, th - 0.5 * pi};
}

// Newton on grad f. Indefinite or singular Hessians are replaced by their
// absolute eigenvalues (floored), which keeps the step a descent direction.
inline PairState newton_classify(const DmiVector& delta, std::pair<double, double> init, int max_iter = 100,
                                 double tol = 1e-12) {
  double x1 = init.first, x2 = init.second;
  PairState s = pair_energy_derivatives(x1, x2, delta);
  for (int it = 0;; ++it) {
    s.iterations = it;
    if (s.grad_norm() <= tol) break;
    if (it >= max_iter) {
      std::ostringstream os;
      os.precision(17);
      os << "newton_classify did not converge: last iterate (" << x1 << ", " << x2 << "), |grad| = "
         << s.grad_norm();
      throw convergence_error(os.str(), {x1, x2}, s.value, s.grad_norm(), it);
    }
    const auto& H = s.hessian;
    auto ev = s.eigenvalues;
    std::array<double, 2> p;
    if (ev[0] > 1e-12) {
      double det = s.det();
      p = {-(H[2] * s.grad[0] - H[1] * s.grad[1]) / det, -(-H[1] * s.grad[0] + H[0] * s.grad[1]) / det};
    } else {
      // Eigenvectors of the symmetric 2x2 matrix.
      double scale = std::max({std::abs(ev[0]), std::abs(ev[1]), 1e-3});
      p = {0.0, 0.0};
      for (int k = 0; k < 2; ++k) {
        double vx, vy;
        if (std::abs(H[1]) > 1e-300) {
          vx = ev[k] - H[2];
          vy = H[1];
        } else {
          vx = (k == 0) == (H[0] <= H[2]) ? 1.0 : 0.0;
          vy = 1.0 - vx;
        }
        double n = std::hypot(vx, vy);
        vx /= n;
        vy /= n;
        double lam = std::max(std::abs(ev[k]), 1e-6 * scale);
        double c = (vx * s.grad[0] + vy * s.grad[1]) / lam;
        p[0] -= c * vx;
        p[1] -= c * vy;
      }
    }
    // Backtracking on f, accepting a gradient decrease when f is flat to roundoff.
    double t = 1.0;
    PairState next;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      double y1 = x1 + t * p[0], y2 = x2 + t * p[1];
      if (circ_dist(y1, y2) > 1e-9) {
        next = pair_energy_derivatives(y1, y2, delta);
        double slope = p[0] * s.grad[0] + p[1] * s.grad[1];
        if (next.value <= s.value + 1e-4 * t * slope || next.grad_norm() < s.grad_norm()) {
          ok = true;
          x1 = y1;
          x2 = y2;
          break;
        }
      }
      t *= 0.5;
    }
    if (!ok) {
      std::ostringstream os;
      os.precision(17);
      os << "newton_classify line search failed at (" << x1 << ", " << x2 << ")";
      throw convergence_error(os.str(), {x1, x2}, s.value, s.grad_norm(), it);
    }
    s = next;
  }
  auto [c1, c2] = canonical_pair(s.phi1, s.phi2);
  PairState out = pair_energy_derivatives(c1, c2, delta);
  out.iterations = s.iterations;
  return out;
}

// Nelder-Mead on a 2D function.
template <class F>
std::array<double, 2> nelder_mead_2d(F&& f, std::array<double, 2> x0, double step, double xtol, int max_iter,
                                     double* fbest = nullptr) {
  std::array<std::array<double, 2>, 3> P{x0, {x0[0] + step, x0[1]}, {x0[0], x0[1] + step}};
  std::array<double, 3> V{f(P[0]), f(P[1]), f(P[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return V[a] < V[b]; });
    auto best = P[o[0]], mid = P[o[1]], worst = P[o[2]];
    double fb = V[o[0]], fm = V[o[1]], fw = V[o[2]];
    double size = std::max({std::abs(mid[0] - best[0]), std::abs(mid[1] - best[1]), std::abs(worst[0] - best[0]),
                            std::abs(worst[1] - best[1])});
    P = {best, mid, worst};
    V = {fb, fm, fw};
    if (size < xtol) break;
    std::array<double, 2> c{0.5 * (best[0] + mid[0]), 0.5 * (best[1] + mid[1])};
    auto along = [&](double t) { return std::array<double, 2>{c[0] + t * (worst[0] - c[0]), c[1] + t * (worst[1] - c[1])}; };
    auto xr = along(-1.0);
    double fr = f(xr);
    if (fr < fb) {
      auto xe = along(-2.0);
      double fe = f(xe);
      if (fe < fr) P[2] = xe, V[2] = fe;
      else P[2] = xr, V[2] = fr;
    } else if (fr < fm) {
      P[2] = xr, V[2] = fr;
    } else {
      auto xc = fr < fw ? along(-0.5) : along(0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fw)) {
        P[2] = xc, V[2] = fc;
      } else {
        for (int k = 1; k < 3; ++k) {
          P[k] = {0.5 * (P[k][0] + best[0]), 0.5 * (P[k][1] + best[1])};
          V[k] = f(P[k]);
        }
      }
    }
  }
  int ib = static_cast<int>(std::min_element(V.begin(), V.end()) - V.begin());
  if (fbest) *fbest = V[ib];
  return P[ib];
}

struct PairMinimum {
  double phi1 = 0.0, phi2 = 0.0;
  double W = 0.0;
};

inline PairMinimum minimize_w_pair_general(const ConformalChart& chart, const DmiVector& delta,
                                           const BoundaryMesh& mesh, int grid_n = 64) {
  if (grid_n < 32) throw config_error("pair search grid must have at least 32 points per axis");
  TraceField weight = boundary_weight(mesh, delta);
  auto W = [&](double a, double b) {
    if (circ_dist(a, b) < 1e-6) return std::numeric_limits<double>::infinity();
    return w_conformal(VortexConfig{{a, b}, {1, 1}}, delta, chart, mesh, weight);
  };
  // Coarse search over i < j with lexicographic tie-break on (value, phi1, phi2).
  double best = std::numeric_limits<double>::infinity();
  double b1 = 0.0, b2 = 0.0;
  const double h = two_pi / grid_n;
  for (int i = 0; i < grid_n; ++i)
    for (int j = i + 1; j < grid_n; ++j) {
      double v = W(i * h, j * h);
      if (v < best) best = v, b1 = i * h, b2 = j * h;
    }
  if (!std::isfinite(best)) throw error("pair search: all grid values are infinite");
  double fb = best;
  auto x = nelder_mead_2d([&](const std::array<double, 2>& p) { return W(p[0], p[1]); }, {b1, b2}, 0.5 * h, 1e-10,
                          2000, &fb);
  auto [p1, p2] = canonical_pair(x[0], x[1]);
  return {p1, p2, fb};
}

}  // namespace bvortex
