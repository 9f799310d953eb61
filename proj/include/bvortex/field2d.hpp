#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "renorm.hpp"

namespace bvortex {

// 2-vector field on a cell-centred polar grid: r_i = (i + 1/2)/Nr, t_k = 2 pi k / Nt.
// The boundary ring r = 1 is optional; when absent it is extrapolated.
struct PolarField {
  int Nr = 0, Nt = 0;
  std::vector<Vec2> v;                 // index i * Nt + k
  std::optional<std::vector<Vec2>> rim;  // values at r = 1, t_k

  PolarField() = default;
  PolarField(int nr, int nt) : Nr(nr), Nt(nt), v(static_cast<size_t>(nr) * nt) {
    if (nr < 4 || nt < 8 || nt % 2) throw config_error("polar grid needs Nr >= 4 and even Nt >= 8");
  }

  double r(int i) const { return (i + 0.5) / Nr; }
  double t(int k) const { return two_pi * k / Nt; }
  double dr() const { return 1.0 / Nr; }
  double dt() const { return two_pi / Nt; }
  Vec2& at(int i, int k) { return v[static_cast<size_t>(i) * Nt + k]; }
  const Vec2& at(int i, int k) const { return v[static_cast<size_t>(i) * Nt + k]; }

  // Value at r = 1.
  Vec2 boundary(int k) const {
    if (rim) return (*rim)[k];
    const Vec2 &a = at(Nr - 1, k), &b = at(Nr - 2, k), &c = at(Nr - 3, k);
    return {(15.0 * a.x - 10.0 * b.x + 3.0 * c.x) / 8.0, (15.0 * a.y - 10.0 * b.y + 3.0 * c.y) / 8.0};
  }

  template <class F>
  static PolarField sample(int nr, int nt, F&& f, bool with_rim = true) {
    PolarField p(nr, nt);
    for (int i = 0; i < nr; ++i)
      for (int k = 0; k < nt; ++k) p.at(i, k) = f(p.r(i), p.t(k));
    if (with_rim) {
      std::vector<Vec2> rim(nt);
      for (int k = 0; k < nt; ++k) rim[k] = f(1.0, p.t(k));
      p.rim = std::move(rim);
    }
    return p;
  }
};

// Scalar field on the same grid.
struct PolarScalar {
  int Nr = 0, Nt = 0;
  std::vector<double> s;
  std::optional<std::vector<double>> rim;

  PolarScalar() = default;
  PolarScalar(int nr, int nt) : Nr(nr), Nt(nt), s(static_cast<size_t>(nr) * nt) {}
  double& at(int i, int k) { return s[static_cast<size_t>(i) * Nt + k]; }
  double at(int i, int k) const { return s[static_cast<size_t>(i) * Nt + k]; }
  double boundary(int k) const {
    if (rim) return (*rim)[k];
    return (15.0 * at(Nr - 1, k) - 10.0 * at(Nr - 2, k) + 3.0 * at(Nr - 3, k)) / 8.0;
  }

  template <class F>
  static PolarScalar sample(int nr, int nt, F&& f, bool with_rim = true) {
    PolarScalar p(nr, nt);
    for (int i = 0; i < nr; ++i)
      for (int k = 0; k < nt; ++k) p.at(i, k) = f((i + 0.5) / nr, two_pi * k / nt);
    if (with_rim) {
      std::vector<double> rim(nt);
      for (int k = 0; k < nt; ++k) rim[k] = f(1.0, two_pi * k / nt);
      p.rim = std::move(rim);
    }
    return p;
  }
};

namespace detail {

struct V2 {
  double x, y;
  V2 operator-(const V2& o) const { return {x - o.x, y - o.y}; }
  V2 operator+(const V2& o) const { return {x + o.x, y + o.y}; }
  V2 operator/(double s) const { return {x / s, y / s}; }
  V2 operator*(double s) const { return {x * s, y * s}; }
};

// Radial and angular derivatives at cell centres. Across the origin the ghost
// ring is v(r_0, t + pi); at the outer cell a one-sided three-point formula
// uses the boundary value at distance dr/2.
template <class Get, class Bnd, class T>
void polar_derivatives(int Nr, int Nt, Get&& get, Bnd&& bnd, int i, int k, T& d_r, T& d_t) {
  const double h = 1.0 / Nr, ht = two_pi / Nt;
  int kp = (k + 1) % Nt, km = (k + Nt - 1) % Nt;
  d_t = (get(i, kp) - get(i, km)) / (2.0 * ht);
  if (i == 0) {
    d_r = (get(1, k) - get(0, (k + Nt / 2) % Nt)) / (2.0 * h);
  } else if (i == Nr - 1) {
    d_r = (bnd(k) * (4.0 / 3.0) - get(i - 1, k) * (1.0 / 3.0) - get(i, k)) / h;
  } else {
    d_r = (get(i + 1, k) - get(i - 1, k)) / (2.0 * h);
  }
}

// Cartesian gradient of the vector field at cell (i, k): columns d/dx, d/dy.
inline void cart_grad(const PolarField& f, int i, int k, V2& dx, V2& dy) {
  auto get = [&](int a, int b) { Vec2 p = f.at(a, b); return V2{p.x, p.y}; };
  auto bnd = [&](int b) { Vec2 p = f.boundary(b); return V2{p.x, p.y}; };
  V2 dr, dt;
  polar_derivatives(f.Nr, f.Nt, get, bnd, i, k, dr, dt);
  double r = f.r(i), t = f.t(k), c = std::cos(t), s = std::sin(t);
  dx = dr * c - dt * (s / r);
  dy = dr * s + dt * (c / r);
}

inline void cart_grad(const PolarScalar& f, int i, int k, double& dx, double& dy) {
  auto get = [&](int a, int b) { return f.at(a, b); };
  auto bnd = [&](int b) { return f.boundary(b); };
  double dr, dt;
  polar_derivatives(f.Nr, f.Nt, get, bnd, i, k, dr, dt);
  double r = (i + 0.5) / f.Nr, t = two_pi * k / f.Nt, c = std::cos(t), s = std::sin(t);
  dx = dr * c - dt * s / r;
  dy = dr * s + dt * c / r;
}

}  // namespace detail

inline double wedge(const detail::V2& a, const detail::V2& b) { return a.x * b.y - a.y * b.x; }

// E = int |grad v|^2 + 2 int delta . grad v ^ v + (1/eta^2) int (1 - |v|^2)^2
//   + (1/(2 pi eps)) int_{boundary} (v . nu)^2,
// with grad v ^ v = (d_1 v ^ v, d_2 v ^ v).
inline EnergyBreakdown energy_full(const PolarField& f, double eps, double eta, const DmiVector& delta) {
  if (!(eps > 0.0) || !(eta > 0.0)) throw config_error("eps and eta must be positive");
  EnergyBreakdown e;
  const double area_dt = f.dr() * f.dt();
  for (int i = 0; i < f.Nr; ++i) {
    double w = f.r(i) * area_dt;
    for (int k = 0; k < f.Nt; ++k) {
      detail::V2 dx, dy;
      detail::cart_grad(f, i, k, dx, dy);
      Vec2 p = f.at(i, k);
      detail::V2 v{p.x, p.y};
      e.dirichlet += w * (dx.x * dx.x + dx.y * dx.y + dy.x * dy.x + dy.y * dy.y);
      e.dmi += w * 2.0 * (delta.dx * wedge(dx, v) + delta.dy * wedge(dy, v));
      double m = 1.0 - (p.x * p.x + p.y * p.y);
      e.potential += w * m * m / (eta * eta);
    }
  }
  double bsum = 0.0;
  for (int k = 0; k < f.Nt; ++k) {
    Vec2 b = f.boundary(k);
    double vn = b.x * std::cos(f.t(k)) + b.y * std::sin(f.t(k));
    bsum += vn * vn;
  }
  e.boundary_penalty = bsum * f.dt() / (two_pi * eps);
  e.sum();
  return e;
}

// (int d_1 v ^ v, int d_2 v ^ v).
inline Vec2 dmi_moments(const PolarField& f) {
  Vec2 m;
  const double area_dt = f.dr() * f.dt();
  for (int i = 0; i < f.Nr; ++i)
    for (int k = 0; k < f.Nt; ++k) {
      detail::V2 dx, dy;
      detail::cart_grad(f, i, k, dx, dy);
      Vec2 p = f.at(i, k);
      detail::V2 v{p.x, p.y};
      m.x += f.r(i) * area_dt * wedge(dx, v);
      m.y += f.r(i) * area_dt * wedge(dy, v);
    }
  return m;
}

// Cell-centred divergence.
inline PolarScalar divergence(const PolarField& f) {
  PolarScalar d(f.Nr, f.Nt);
  for (int i = 0; i < f.Nr; ++i)
    for (int k = 0; k < f.Nt; ++k) {
      detail::V2 dx, dy;
      detail::cart_grad(f, i, k, dx, dy);
      d.at(i, k) = dx.x + dy.y;
    }
  return d;
}

// Pointwise check quantity: |grad v|^2 + 2 delta . grad v ^ v - (|(grad - i delta) v|^2 - |delta|^2 |v|^2).
inline double magnetic_identity_residual(const PolarField& f, const DmiVector& delta, int i, int k) {
  detail::V2 dx, dy;
  detail::cart_grad(f, i, k, dx, dy);
  Vec2 p = f.at(i, k);
  detail::V2 v{p.x, p.y};
  double lhs = dx.x * dx.x + dx.y * dx.y + dy.x * dy.x + dy.y * dy.y + 2.0 * (delta.dx * wedge(dx, v) + delta.dy * wedge(dy, v));
  // (d_j - i delta_j) v with v as a complex number: d_j v - i delta_j v = (d_j v1 + delta_j v2, d_j v2 - delta_j v1).
  auto mag = [&](const detail::V2& d, double dj) {
    double a = d.x + dj * v.y, b = d.y - dj * v.x;
    return a * a + b * b;
  };
  double rhs = mag(dx, delta.dx) + mag(dy, delta.dy) - (delta.dx * delta.dx + delta.dy * delta.dy) * (v.x * v.x + v.y * v.y);
  return lhs - rhs;
}

// <J(v), zeta> = - int v ^ grad v . grad^perp zeta, grad^perp = (-d_2, d_1).
inline double global_jacobian(const PolarField& f, const PolarScalar& zeta) {
  if (zeta.Nr != f.Nr || zeta.Nt != f.Nt) throw config_error("zeta must be sampled on the field grid");
  double s = 0.0;
  const double area_dt = f.dr() * f.dt();
  for (int i = 0; i < f.Nr; ++i) {
    double w = f.r(i) * area_dt;
    for (int k = 0; k < f.Nt; ++k) {
      double zx, zy;
      detail::cart_grad(zeta, i, k, zx, zy);
      if (zx == 0.0 && zy == 0.0) continue;
      detail::V2 dx, dy;
      detail::cart_grad(f, i, k, dx, dy);
      Vec2 p = f.at(i, k);
      detail::V2 v{p.x, p.y};
      s -= w * (wedge(v, dx) * (-zy) + wedge(v, dy) * zx);
    }
  }
  return s;
}

// Integral of |v| |grad v| (for the Jacobian bound).
inline double jacobian_bound_mass(const PolarField& f) {
  double s = 0.0;
  const double area_dt = f.dr() * f.dt();
  for (int i = 0; i < f.Nr; ++i)
    for (int k = 0; k < f.Nt; ++k) {
      detail::V2 dx, dy;
      detail::cart_grad(f, i, k, dx, dy);
      Vec2 p = f.at(i, k);
      s += f.r(i) * area_dt * norm(p) * std::sqrt(dx.x * dx.x + dx.y * dx.y + dy.x * dy.x + dy.y * dy.y);
    }
  return s;
}

struct LiftResult {
  PolarField V;
  PolarScalar phi;
  double max_residue = 0.0;  // largest plaquette circulation found by the audit
};

// Normalizes v and lifts V = e^{i phi} along a spanning tree: radially along
// the t = 0 ray, then around each ring. Every plaquette and the innermost ring
// are audited for nonzero circulation (an interior vortex).
inline LiftResult project_and_lift(const PolarField& v, double tol = 0.5) {
  LiftResult out;
  out.V = PolarField(v.Nr, v.Nt);
  out.phi = PolarScalar(v.Nr, v.Nt);
  for (int i = 0; i < v.Nr; ++i)
    for (int k = 0; k < v.Nt; ++k) {
      Vec2 p = v.at(i, k);
      double n = norm(p);
      if (!(n >= tol))
        throw precondition_error("projection failed: |v| = " + std::to_string(n) + " < tol at node (" +
                                 std::to_string(i) + ", " + std::to_string(k) + ")");
      out.V.at(i, k) = {p.x / n, p.y / n};
    }
  if (v.rim) {
    std::vector<Vec2> rim(v.Nt);
    for (int k = 0; k < v.Nt; ++k) {
      Vec2 p = (*v.rim)[k];
      double n = norm(p);
      if (!(n >= tol)) throw precondition_error("projection failed on the boundary ring at node " + std::to_string(k));
      rim[k] = {p.x / n, p.y / n};
    }
    out.V.rim = std::move(rim);
  }
  auto step = [&](Vec2 a, Vec2 b) { return std::atan2(wedge(a, b), dot(a, b)); };
  const auto& V = out.V;
  out.phi.at(0, 0) = std::atan2(V.at(0, 0).y, V.at(0, 0).x);
  for (int i = 1; i < v.Nr; ++i) out.phi.at(i, 0) = out.phi.at(i - 1, 0) + step(V.at(i - 1, 0), V.at(i, 0));
  for (int i = 0; i < v.Nr; ++i)
    for (int k = 1; k < v.Nt; ++k) out.phi.at(i, k) = out.phi.at(i, k - 1) + step(V.at(i, k - 1), V.at(i, k));

  auto circulation = [&](std::initializer_list<std::pair<int, int>> loop) {
    double s = 0.0;
    auto it = loop.begin();
    auto prev = *it;
    for (++it; it != loop.end(); ++it) {
      s += step(V.at(prev.first, prev.second), V.at(it->first, it->second));
      prev = *it;
    }
    s += step(V.at(prev.first, prev.second), V.at(loop.begin()->first, loop.begin()->second));
    return std::abs(s);
  };
  double worst = 0.0;
  for (int i = 0; i + 1 < v.Nr; ++i)
    for (int k = 0; k < v.Nt; ++k) {
      int kp = (k + 1) % v.Nt;
      worst = std::max(worst, circulation({{i, k}, {i + 1, k}, {i + 1, kp}, {i, kp}}));
    }
  double ring0 = 0.0;
  for (int k = 0; k < v.Nt; ++k) ring0 += step(V.at(0, k), V.at(0, (k + 1) % v.Nt));
  worst = std::max(worst, std::abs(ring0));
  out.max_residue = worst;
  if (worst > 1e-6) throw precondition_error("lifting failed: nonzero loop circulation (interior vortex)");
  return out;
}

// Field e^{i phi} for a harmonic lifting given on the boundary as a trace.
// Rings are synthesized by an inverse FFT of the damped coefficients when Nt divides M.
inline PolarScalar harmonic_on_grid(const TraceField& tr, int Nr, int Nt) {
  PolarScalar s(Nr, Nt);
  const int M = tr.M();
  auto ring = [&](double r, auto&& put) {
    if (M % Nt == 0) {
      std::vector<cplx> X(M / 2 + 1);
      X[0] = tr.c0();
      double rk = 1.0;
      for (int k = 1; k <= tr.K(); ++k) {
        rk *= r;
        X[k] = cplx(0.5 * tr.a()[k], -0.5 * tr.b()[k]) * rk;
      }
      X[M / 2] = tr.nyquist() * rk * r;
      auto vals = irfft(X, M);
      for (int k = 0; k < Nt; ++k) put(k, vals[static_cast<size_t>(k) * (M / Nt)]);
    } else {
      for (int k = 0; k < Nt; ++k) put(k, tr.extend_polar(r, two_pi * k / Nt));
    }
  };
  for (int i = 0; i < Nr; ++i) ring((i + 0.5) / Nr, [&](int k, double x) { s.at(i, k) = x; });
  std::vector<double> rim(Nt);
  ring(1.0, [&](int k, double x) { rim[k] = x; });
  s.rim = std::move(rim);
  return s;
}

inline PolarField field_from_trace(const TraceField& tr, int Nr, int Nt) {
  PolarScalar p = harmonic_on_grid(tr, Nr, Nt);
  PolarField f(Nr, Nt);
  for (size_t n = 0; n < f.v.size(); ++n) f.v[n] = {std::cos(p.s[n]), std::sin(p.s[n])};
  std::vector<Vec2> rim(Nt);
  for (int k = 0; k < Nt; ++k) rim[k] = {std::cos((*p.rim)[k]), std::sin((*p.rim)[k])};
  f.rim = std::move(rim);
  return f;
}

// Field e^{i phi*} for the harmonic extension of the vortex lifting.
inline PolarField phi_star_field(const VortexConfig& c, int Nr, int Nt, double scale = 1.0) {
  return PolarField::sample(
      Nr, Nt,
      [&](double r, double t) {
        double p = phi_star_value(c, std::polar(r, t));
        return Vec2{scale * std::cos(p), scale * std::sin(p)};
      },
      false);
}

}  // namespace bvortex
