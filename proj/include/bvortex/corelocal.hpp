#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "common.hpp"
#include "quadrature.hpp"
#include "renorm.hpp"

namespace bvortex {

// A point where a profile varies on a small scale; the grid is graded towards it.
struct Focus {
  Vec2 at;
  double scale = 0.0;
};

// Polar cell of B_r^+ in coordinates centred at the origin.
struct HalfDiskCell {
  double r0, r1, t0, t1;
};

struct HalfDiskGridOptions {
  int base_nr = 8;
  int base_nt = 16;
  double tau = 0.05;   // cell size / distance to the nearest focus
  int gauss = 2;       // points per axis in each cell (1 = midpoint)
  int segment_pieces = 4;   // trapezoid panels per grid interval on I_r
  int segment_refine = 8;   // extra factor inside the core layer
};

// Cell list over B_r^+ = B_r intersect {x2 > 0}: a uniform polar base grid,
// split until every cell is small relative to its distance from each focus.
struct HalfDiskGrid {
  double r = 0.0;
  HalfDiskGridOptions opt;
  std::vector<HalfDiskCell> cells;
  std::vector<double> segment;  // sorted nodes on I_r = (-r, r)

  double area() const {
    double s = 0.0;
    for (const auto& c : cells) s += 0.5 * (c.r1 * c.r1 - c.r0 * c.r0) * (c.t1 - c.t0);
    return s;
  }
};

inline HalfDiskGrid make_half_disk_grid(double r, const std::vector<Focus>& foci, HalfDiskGridOptions opt = {}) {
  if (!(r > 0.0 && r <= 1.0)) throw config_error("half-disk radius must lie in (0, 1]");
  if (opt.base_nr < 1 || opt.base_nt < 2 || !(opt.tau > 0.0) || opt.gauss < 1)
    throw config_error("invalid half-disk grid options");
  HalfDiskGrid g;
  g.r = r;
  g.opt = opt;
  std::vector<HalfDiskCell> stack;
  for (int i = 0; i < opt.base_nr; ++i)
    for (int k = 0; k < opt.base_nt; ++k)
      stack.push_back({r * i / opt.base_nr, r * (i + 1) / opt.base_nr, pi * k / opt.base_nt, pi * (k + 1) / opt.base_nt});
  while (!stack.empty()) {
    HalfDiskCell c = stack.back();
    stack.pop_back();
    double rm = 0.5 * (c.r0 + c.r1), tm = 0.5 * (c.t0 + c.t1);
    double dr = c.r1 - c.r0, arc = c.r1 * (c.t1 - c.t0);
    Vec2 ctr{rm * std::cos(tm), rm * std::sin(tm)};
    double half_diag = 0.5 * std::hypot(dr, arc);
    bool split_r = false, split_t = false;
    for (const Focus& f : foci) {
      double d = std::max(norm({ctr.x - f.at.x, ctr.y - f.at.y}) - half_diag, f.scale);
      if (dr > opt.tau * d) split_r = true;
      if (arc > opt.tau * d) split_t = true;
    }
    if (!split_r && !split_t) {
      g.cells.push_back(c);
      continue;
    }
    double rs = split_r ? rm : c.r1, ts = split_t ? tm : c.t1;
    stack.push_back({c.r0, rs, c.t0, ts});
    if (split_r) stack.push_back({rs, c.r1, c.t0, ts});
    if (split_t) stack.push_back({c.r0, rs, ts, c.t1});
    if (split_r && split_t) stack.push_back({rs, c.r1, ts, c.t1});
  }
  std::vector<double> nodes{-r, 0.0, r};
  for (const auto& c : g.cells) {
    if (c.t0 == 0.0) nodes.push_back(c.r1), nodes.push_back(c.r0);
    if (c.t1 == pi) nodes.push_back(-c.r1), nodes.push_back(-c.r0);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  g.segment = std::move(nodes);
  return g;
}

// Scalar profile with an analytic gradient.
struct Profile {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> grad;
  std::vector<Focus> foci;
};

enum class ProfileKind { phi_star, phi_eps_star, phi_d_eps };

namespace detail {

// arg(u + i v) in [0, pi] for v >= 0 and its gradient given grad u, grad v.
inline double arg_upper(double u, double v) { return std::atan2(v, u); }
inline Vec2 arg_grad(double u, double v, Vec2 gu, Vec2 gv) {
  double q = u * u + v * v;
  return {(u * gv.x - v * gu.x) / q, (u * gv.y - v * gu.y) / q};
}

}  // namespace detail

// phi*(x) = arg(x1 + i x2).
inline Profile phi_star_profile() {
  Profile p;
  p.value = [](Vec2 x) {
    if (x.x == 0.0 && x.y == 0.0) throw domain_error("phi_star is undefined at the origin");
    return detail::arg_upper(x.x, x.y);
  };
  p.grad = [](Vec2 x) { return detail::arg_grad(x.x, x.y, {1, 0}, {0, 1}); };
  p.foci = {{{0.0, 0.0}, 0.0}};
  return p;
}

// phi_eps*(x) = arg(x1 + i (x2 + 2 pi eps)).
inline Profile phi_eps_star_profile(double eps) {
  if (!(eps > 0.0)) throw config_error("eps must be positive");
  const double s = two_pi * eps;
  Profile p;
  p.value = [s](Vec2 x) { return detail::arg_upper(x.x, x.y + s); };
  p.grad = [s](Vec2 x) { return detail::arg_grad(x.x, x.y + s, {1, 0}, {0, 1}); };
  p.foci = {{{0.0, 0.0}, s}};
  return p;
}

// Multi-degree competitor: sum_j arg(x1 - f x_j + i (x2 + 2 pi eps f)) with
// poles x_j = j / |log eps| and f = 1 on B_{r(1-r)}, (r - |x|)/r^2 on the ramp, 0 outside B_r.
inline Profile phi_d_eps_profile(int d, double eps, double r) {
  if (d < 1) throw config_error("degree must be at least 1");
  if (!(r > 0.0 && r < 1.0)) throw config_error("r must lie in (0, 1)");
  if (!(eps > 0.0 && eps < std::exp(-1.0 / (r * r))))
    throw precondition_error("phi_d_eps needs 0 < eps < exp(-1/r^2) = " + std::to_string(std::exp(-1.0 / (r * r))));
  const double s = two_pi * eps, a = 1.0 / std::abs(std::log(eps));
  auto f = [r](Vec2 x, Vec2& gf) {
    double n = norm(x);
    gf = {0.0, 0.0};
    if (n < r * (1.0 - r)) return 1.0;
    if (n > r) return 0.0;
    gf = {-x.x / (n * r * r), -x.y / (n * r * r)};
    return (r - n) / (r * r);
  };
  Profile p;
  p.value = [=](Vec2 x) {
    Vec2 gf;
    double fv = f(x, gf), sum = 0.0;
    for (int j = 1; j <= d; ++j) sum += detail::arg_upper(x.x - fv * j * a, x.y + s * fv);
    return sum;
  };
  p.grad = [=](Vec2 x) {
    Vec2 gf;
    double fv = f(x, gf);
    Vec2 g{0.0, 0.0};
    for (int j = 1; j <= d; ++j) {
      double xj = j * a;
      Vec2 q = detail::arg_grad(x.x - fv * xj, x.y + s * fv, {1.0 - xj * gf.x, -xj * gf.y}, {s * gf.x, 1.0 + s * gf.y});
      g.x += q.x;
      g.y += q.y;
    }
    return g;
  };
  for (int j = 1; j <= d; ++j) {
    double xj = j * a;
    // Pole location on the axis: x1 = f(x1) x_j.
    double x1 = xj < r * (1.0 - r) ? xj : r * xj / (r * r + xj);
    double fv = xj < r * (1.0 - r) ? 1.0 : (r - x1) / (r * r);
    p.foci.push_back({{x1, 0.0}, std::max(s * fv, 1e-300)});
  }
  return p;
}

// Point evaluation of the canonical profiles. For phi_d_eps, r is the outer radius of B_r^+.
inline double core_profiles(ProfileKind kind, Vec2 point, double eps = 0.0, int d = 1, double r = 0.5) {
  if (point.y < 0.0) throw domain_error("core profiles live on the closed upper half-plane");
  switch (kind) {
    case ProfileKind::phi_star: return phi_star_profile().value(point);
    case ProfileKind::phi_eps_star: return phi_eps_star_profile(eps).value(point);
    default: return phi_d_eps_profile(d, eps, r).value(point);
  }
}

struct LocalEnergy {
  double dirichlet = 0.0;
  double dmi = 0.0;      // -2 int delta . grad psi
  double segment = 0.0;  // (1/(2 pi eps)) int_{I_r} sin^2 psi(x1, 0)
  double total = 0.0;
};

// F(psi; B_r^+) = int (|grad psi|^2 - 2 delta . grad psi) + (1/(2 pi eps)) int_{I_r} sin^2 psi(x1, 0).
inline LocalEnergy local_functional(const Profile& psi, const HalfDiskGrid& grid, double eps, const DmiVector& delta) {
  if (!(eps > 0.0)) throw config_error("eps must be positive");
  const GaussRule& G = gauss_legendre(grid.opt.gauss);
  LocalEnergy e;
  double gx = 0.0, gy = 0.0;
  for (const auto& c : grid.cells) {
    double hr = 0.5 * (c.r1 - c.r0), ht = 0.5 * (c.t1 - c.t0);
    double rc = 0.5 * (c.r0 + c.r1), tc = 0.5 * (c.t0 + c.t1);
    for (int a = 0; a < grid.opt.gauss; ++a) {
      double rr = rc + hr * G.x[a];
      for (int b = 0; b < grid.opt.gauss; ++b) {
        double tt = tc + ht * G.x[b];
        double w = G.w[a] * G.w[b] * hr * ht * rr;
        Vec2 g = psi.grad({rr * std::cos(tt), rr * std::sin(tt)});
        e.dirichlet += w * (g.x * g.x + g.y * g.y);
        gx += w * g.x;
        gy += w * g.y;
      }
    }
  }
  e.dmi = -2.0 * (delta.dx * gx + delta.dy * gy);
  // Composite trapezoid; intervals where |d_1 psi| exceeds 1/(4 pi eps) are subdivided.
  const double trigger = 1.0 / (4.0 * pi * eps);
  auto s2 = [&](double x) {
    double v = std::sin(psi.value({x, 0.0}));
    return v * v;
  };
  double seg = 0.0;
  for (size_t n = 0; n + 1 < grid.segment.size(); ++n) {
    double a = grid.segment[n], b = grid.segment[n + 1];
    double m = 0.5 * (a + b);
    double d1 = std::max({std::abs(psi.grad({a, 0.0}).x), std::abs(psi.grad({m, 0.0}).x), std::abs(psi.grad({b, 0.0}).x)});
    int pieces = grid.opt.segment_pieces * (d1 > trigger ? grid.opt.segment_refine : 1);
    double h = (b - a) / pieces;
    double s = 0.5 * (s2(a) + s2(b));
    for (int k = 1; k < pieces; ++k) s += s2(a + k * h);
    seg += s * h;
  }
  e.segment = seg / (two_pi * eps);
  e.total = e.dirichlet + e.dmi + e.segment;
  return e;
}

inline LocalEnergy local_functional(const Profile& psi, double r, double eps, const DmiVector& delta,
                                    HalfDiskGridOptions opt = {}) {
  return local_functional(psi, make_half_disk_grid(r, psi.foci, opt), eps, delta);
}

struct CoreTableEntry {
  double eps = 0.0, r = 0.0;
  double value = 0.0;   // F(phi_eps*; B_r^+) - pi log(r/eps)
  double defect = 0.0;  // |value - gamma0|
};

struct CoreConstantResult {
  std::vector<CoreTableEntry> table;
  std::vector<double> radii;
  std::vector<double> eps_limits;  // eps -> 0 limit at each radius
  double estimate = 0.0;
  double alpha = 1.0;  // fitted exponent of the r-correction
  double amplitude = 0.0;
  double error_bar = 0.0;
};

namespace detail {

// Least squares fit y = c0 + A x^alpha with alpha scanned on [0.25, 3] and refined.
inline void fit_power_offset(const std::vector<double>& x, const std::vector<double>& y, double& c0, double& A,
                             double& alpha, double& rms) {
  auto solve = [&](double al, double& c, double& amp) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      double t = std::pow(x[i], al);
      sx += t;
      sy += y[i];
      sxx += t * t;
      sxy += t * y[i];
    }
    double det = n * sxx - sx * sx;
    amp = det != 0.0 ? (n * sxy - sx * sy) / det : 0.0;
    c = (sy - amp * sx) / n;
    double res = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      double d = y[i] - c - amp * std::pow(x[i], al);
      res += d * d;
    }
    return res;
  };
  double best = std::numeric_limits<double>::infinity(), ba = 1.0;
  for (double al = 0.25; al <= 3.0 + 1e-12; al += 0.01) {
    double c, amp, res = solve(al, c, amp);
    if (res < best) best = res, ba = al;
  }
  double lo = std::max(0.25, ba - 0.01), hi = std::min(3.0, ba + 0.01);
  for (int it = 0; it < 60; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0, c, amp;
    if (solve(m1, c, amp) < solve(m2, c, amp)) hi = m2;
    else lo = m1;
  }
  alpha = 0.5 * (lo + hi);
  rms = std::sqrt(solve(alpha, c0, A) / static_cast<double>(x.size()));
}

}  // namespace detail

// Table of F(phi_eps*; B_r^+) - pi log(r/eps), extrapolated linearly in eps/r
// at each radius, then in r with the model gamma + A r^alpha.
inline CoreConstantResult core_constant_extract(std::vector<double> eps_list, std::vector<double> r_list,
                                                const DmiVector& delta = {}, HalfDiskGridOptions opt = {}) {
  if (eps_list.empty() || r_list.empty()) throw config_error("core_constant_extract needs eps and r values");
  for (double r : r_list)
    for (double e : eps_list)
      if (!(e > 0.0 && r > 0.0 && r <= 1.0 && e <= r * r / 10.0))
        throw precondition_error("insufficient separation of scales: need eps <= r^2/10 (eps = " + std::to_string(e) +
                                 ", r = " + std::to_string(r) + ")");
  std::sort(r_list.begin(), r_list.end(), std::greater<>());
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  CoreConstantResult out;
  out.radii = r_list;
  for (double r : r_list) {
    std::vector<double> xs, ys;
    for (double e : eps_list) {
      LocalEnergy F = local_functional(phi_eps_star_profile(e), r, e, delta, opt);
      double v = F.total - pi * std::log(r / e);
      out.table.push_back({e, r, v, std::abs(v - gamma0())});
      xs.push_back(e / r);
      ys.push_back(v);
    }
    if (xs.size() == 1) {
      out.eps_limits.push_back(ys[0]);
    } else {
      double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
      double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      out.eps_limits.push_back((sy - slope * sx) / n);
    }
  }
  const auto& L = out.eps_limits;
  const size_t nr = L.size();
  if (nr == 1) {
    out.estimate = L[0];
    out.error_bar = std::abs(out.table.back().value - L[0]);
    return out;
  }
  // Linear-in-r extrapolation from the two smallest radii, used as the cross-check.
  double r1 = r_list[nr - 2], r2 = r_list[nr - 1];
  double lin = (r1 * L[nr - 1] - r2 * L[nr - 2]) / (r1 - r2);
  if (nr == 2) {
    out.estimate = lin;
    out.alpha = 1.0;
    out.amplitude = (L[nr - 2] - L[nr - 1]) / (r1 - r2);
    out.error_bar = std::abs(L[nr - 1] - lin);
    return out;
  }
  double spread = *std::max_element(L.begin(), L.end()) - *std::min_element(L.begin(), L.end());
  double rms = 0.0;
  if (spread < 1e-9 * (1.0 + std::abs(L[0]))) {
    out.estimate = L[nr - 1];
    out.alpha = 1.0;
    out.amplitude = 0.0;
  } else {
    detail::fit_power_offset(r_list, L, out.estimate, out.amplitude, out.alpha, rms);
  }
  // Cross-check against the linear model plus the eps-extrapolation step size.
  double eps_step = 0.0;
  for (size_t k = 0; k < nr; ++k) {
    const auto& last = out.table[k * eps_list.size() + eps_list.size() - 1];
    eps_step = std::max(eps_step, std::abs(last.value - L[k]));
  }
  out.error_bar = std::abs(out.estimate - lin) + rms + eps_step;
  return out;
}

struct DegreeBoundRow {
  double eps = 0.0;
  double F = 0.0;
  double ratio = 0.0;  // (F - pi d log(r/eps)) / (d^2 (1 + |log r| + log|log eps|))
};

struct DegreeBoundReport {
  int d = 1;
  double r = 0.0;
  std::vector<DegreeBoundRow> rows;
  double max_ratio = 0.0;
  double slope = 0.0;  // coefficient of log(1/eps) in F ~ A log(1/eps) + B log|log eps| + C
  bool bounded = false;
};

inline DegreeBoundReport multi_degree_bound_check(int d, std::vector<double> eps_list, double r,
                                                  const DmiVector& delta = {}, double bound = 10.0,
                                                  HalfDiskGridOptions opt = {}) {
  if (d < 1 || d > 3) throw config_error("multi_degree_bound_check supports d = 1, 2, 3");
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  DegreeBoundReport rep;
  rep.d = d;
  rep.r = r;
  bool finite = true;
  for (double e : eps_list) {
    LocalEnergy F = local_functional(phi_d_eps_profile(d, e, r), r, e, delta, opt);
    double lle = std::log(std::abs(std::log(e)));
    double ratio = (F.total - pi * d * std::log(r / e)) / (d * d * (1.0 + std::abs(std::log(r)) + lle));
    rep.rows.push_back({e, F.total, ratio});
    finite = finite && std::isfinite(ratio);
    rep.max_ratio = std::max(rep.max_ratio, std::abs(ratio));
  }
  rep.bounded = finite && rep.max_ratio <= bound;
  if (rep.rows.size() >= 3) {
    // Normal equations for F = A L + B LL + C.
    double S[3][3] = {}, R[3] = {};
    for (const auto& row : rep.rows) {
      double b[3] = {std::log(1.0 / row.eps), std::log(std::abs(std::log(row.eps))), 1.0};
      for (int i = 0; i < 3; ++i) {
        R[i] += b[i] * row.F;
        for (int j = 0; j < 3; ++j) S[i][j] += b[i] * b[j];
      }
    }
    for (int c = 0; c < 3; ++c) {
      int p = c;
      for (int i = c + 1; i < 3; ++i)
        if (std::abs(S[i][c]) > std::abs(S[p][c])) p = i;
      std::swap(S[c], S[p]);
      std::swap(R[c], R[p]);
      for (int i = c + 1; i < 3; ++i) {
        double m = S[i][c] / S[c][c];
        for (int j = c; j < 3; ++j) S[i][j] -= m * S[c][j];
        R[i] -= m * R[c];
      }
    }
    double x[3];
    for (int i = 2; i >= 0; --i) {
      double s = R[i];
      for (int j = i + 1; j < 3; ++j) s -= S[i][j] * x[j];
      x[i] = s / S[i][i];
    }
    rep.slope = x[0];
  } else if (rep.rows.size() == 2) {
    rep.slope = (rep.rows[1].F - rep.rows[0].F) / std::log(rep.rows[0].eps / rep.rows[1].eps);
  }
  return rep;
}

}  // namespace bvortex
