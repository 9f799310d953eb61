#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "common.hpp"
#include "trace.hpp"

namespace bvortex {

// Uniform nodes on the unit circle with normal, tangent and curvature.
struct BoundaryMesh {
  int M = 0;
  double dtheta = 0.0;
  std::vector<double> theta;
  std::vector<Vec2> nu;
  std::vector<Vec2> tau;
  std::vector<double> kappa;

  double integrate(const std::vector<double>& f) const {
    double s = 0.0;
    for (double v : f) s += v;
    return s * dtheta;
  }
};

inline BoundaryMesh disk_boundary_mesh(int M) {
  if (M < 8 || M % 2 != 0)
    throw config_error("boundary mesh needs an even node count >= 8, got " + std::to_string(M));
  BoundaryMesh m;
  m.M = M;
  m.dtheta = two_pi / M;
  m.theta.resize(M);
  m.nu.resize(M);
  m.tau.resize(M);
  m.kappa.assign(M, 1.0);
  for (int k = 0; k < M; ++k) {
    double t = two_pi * k / M;
    m.theta[k] = t;
    m.nu[k] = {std::cos(t), std::sin(t)};
    m.tau[k] = perp(m.nu[k]);
  }
  return m;
}

inline const double golden_jump_angle = two_pi * (1.0 - 2.0 / (1.0 + std::sqrt(5.0)));

// Place the jump of g half a cell after a node, away from the given angles.
// Shifts in steps of 7 cells until every avoided angle is more than three
// cells from the jump.
inline double choose_jump_angle(const BoundaryMesh& mesh, const std::vector<double>& avoid = {},
                                double start = golden_jump_angle) {
  const double h = mesh.dtheta;
  double base = std::floor(wrap_angle(start) / h) * h + 0.5 * h;
  for (int attempt = 0; attempt < mesh.M; ++attempt) {
    double cand = wrap_angle(base + 7.0 * h * attempt);
    bool ok = true;
    for (double a : avoid)
      if (circ_dist(cand, a) <= 3.0 * h) ok = false;
    if (ok) return cand;
  }
  throw config_error("no admissible jump angle for the tangent lifting");
}

// Lifting g of the tangent field, e^{ig} = i nu, continuous except for a
// single downward 2pi jump at jump_angle.
inline TraceField tangent_lifting(const BoundaryMesh& mesh, double jump_angle) {
  double j = wrap_angle(jump_angle);
  std::vector<double> g(mesh.M);
  for (int k = 0; k < mesh.M; ++k) {
    double t = mesh.theta[k];
    g[k] = t + 0.5 * pi - (t >= j ? two_pi : 0.0);
  }
  return TraceField(std::move(g));
}

inline TraceField tangent_lifting(const BoundaryMesh& mesh) {
  return tangent_lifting(mesh, choose_jump_angle(mesh));
}

// Chart Psi from the physical domain (here B1) to B1.
struct ConformalChart {
  enum class Kind { identity, moebius };
  Kind kind = Kind::identity;
  cplx a{0.0, 0.0};

  static ConformalChart identity() { return {}; }
  static ConformalChart moebius(cplx a) {
    if (std::abs(a) >= 1.0) throw config_error("moebius parameter must lie inside the unit disk");
    return {Kind::moebius, a};
  }
};

// Returns (Psi(z), dPsi/dz).
inline std::pair<cplx, cplx> chart_eval(const ConformalChart& c, cplx z) {
  if (std::abs(z) > 1.0 + 1e-12) throw domain_error("chart evaluated outside the closed unit disk");
  if (c.kind == ConformalChart::Kind::identity) return {z, cplx(1.0, 0.0)};
  cplx den = 1.0 - std::conj(c.a) * z;
  cplx psi = (z - c.a) / den;
  cplx dpsi = (1.0 - std::norm(c.a)) / (den * den);
  return {psi, dpsi};
}

}  // namespace bvortex
