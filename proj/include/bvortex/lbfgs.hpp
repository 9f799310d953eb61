#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "common.hpp"

namespace bvortex {

struct LbfgsOptions {
  int history = 20;
  int max_iter = 5000;
  double grad_tol = 1e-9;   // applied to stop_measure
  double f_rel_tol = 0.0;   // optional stall criterion, 0 disables
  int max_linesearch = 40;
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> g;
  double measure = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Objective returns f and writes the gradient into g.
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;
using StopMeasure = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

namespace detail {

inline double vdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Minimizer of the cubic through (a, fa, ga), (b, fb, gb), clipped into the bracket.
inline double cubic_min(double a, double fa, double ga, double b, double fb, double gb) {
  double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  double disc = d1 * d1 - ga * gb;
  double lo = std::min(a, b), hi = std::max(a, b);
  if (disc >= 0.0) {
    double d2 = std::copysign(std::sqrt(disc), b - a);
    double t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
    double margin = 0.1 * (hi - lo);
    if (std::isfinite(t) && t > lo + margin && t < hi - margin) return t;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Limited-memory BFGS with a strong Wolfe line search.
inline LbfgsResult lbfgs_minimize(const Objective& fg, std::vector<double> x, const LbfgsOptions& opt,
                                  const StopMeasure& measure = {}) {
  using detail::vdot;
  const size_t n = x.size();
  auto meas = [&](const std::vector<double>& xx, const std::vector<double>& gg) {
    return measure ? measure(xx, gg) : detail::inf_norm(gg);
  };

  LbfgsResult res;
  std::vector<double> g(n), gnew(n), xnew(n), d(n);
  double f = fg(x, g);
  res.evaluations = 1;
  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  const double c1 = 1e-4, c2 = 0.9;
  int stall = 0;

  for (int it = 0;; ++it) {
    res.iterations = it;
    double m = meas(x, g);
    if (!std::isfinite(f)) break;
    if (m <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    if (it >= opt.max_iter) break;

    // Two-loop recursion.
    d = g;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      alpha[i] = rho[i] * vdot(S[i], d);
      for (size_t k = 0; k < n; ++k) d[k] -= alpha[i] * Y[i][k];
    }
    double gamma = 1.0;
    if (!S.empty()) gamma = vdot(S.back(), Y.back()) / vdot(Y.back(), Y.back());
    else gamma = 1.0 / std::max(1.0, std::sqrt(vdot(g, g)));
    for (double& v : d) v *= gamma;
    for (size_t i = 0; i < S.size(); ++i) {
      double beta = rho[i] * vdot(Y[i], d);
      for (size_t k = 0; k < n; ++k) d[k] += S[i][k] * (alpha[i] - beta);
    }
    for (double& v : d) v = -v;
    double dg0 = vdot(d, g);
    if (!(dg0 < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      for (size_t k = 0; k < n; ++k) d[k] = -g[k] / std::max(1.0, std::sqrt(vdot(g, g)));
      dg0 = vdot(d, g);
    }

    // Strong Wolfe search on phi(t) = f(x + t d).
    auto eval = [&](double t, double& ft, double& dgt) {
      for (size_t k = 0; k < n; ++k) xnew[k] = x[k] + t * d[k];
      ft = fg(xnew, gnew);
      ++res.evaluations;
      dgt = vdot(gnew, d);
    };
    double t_prev = 0.0, f_prev = f, dg_prev = dg0;
    double t = 1.0, ft = 0.0, dgt = 0.0;
    bool found = false;
    double lo = 0, flo = f, dglo = dg0, hi = 0, fhi = 0, dghi = 0;
    bool zoom = false;
    for (int ls = 0; ls < opt.max_linesearch; ++ls) {
      eval(t, ft, dgt);
      if (!std::isfinite(ft) || ft > f + c1 * t * dg0 || (ls > 0 && ft >= f_prev)) {
        lo = t_prev; flo = f_prev; dglo = dg_prev;
        hi = t; fhi = ft; dghi = dgt;
        zoom = true;
        break;
      }
      if (std::abs(dgt) <= -c2 * dg0) {
        found = true;
        break;
      }
      if (dgt >= 0.0) {
        lo = t; flo = ft; dglo = dgt;
        hi = t_prev; fhi = f_prev; dghi = dg_prev;
        zoom = true;
        break;
      }
      t_prev = t; f_prev = ft; dg_prev = dgt;
      t *= 2.0;
    }
    if (zoom) {
      for (int ls = 0; ls < opt.max_linesearch; ++ls) {
        if (std::isfinite(fhi))
          t = detail::cubic_min(lo, flo, dglo, hi, fhi, dghi);
        else
          t = 0.5 * (lo + hi);
        eval(t, ft, dgt);
        if (!std::isfinite(ft) || ft > f + c1 * t * dg0 || ft >= flo) {
          hi = t; fhi = ft; dghi = dgt;
        } else {
          if (std::abs(dgt) <= -c2 * dg0) {
            found = true;
            break;
          }
          if (dgt * (hi - lo) >= 0.0) {
            hi = lo; fhi = flo; dghi = dglo;
          }
          lo = t; flo = ft; dglo = dgt;
        }
        if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
      if (!found && lo > 0.0 && flo < f) {
        // Accept the best sufficient-decrease point even without curvature.
        t = lo;
        eval(t, ft, dgt);
        found = true;
      }
    }
    if (!found) {
      if (S.empty()) break;  // steepest descent also failed
      S.clear();
      Y.clear();
      rho.clear();
      continue;
    }

    std::vector<double> s(n), y(n);
    for (size_t k = 0; k < n; ++k) {
      s[k] = xnew[k] - x[k];
      y[k] = gnew[k] - g[k];
    }
    double sy = vdot(s, y);
    double fold = f;
    x.swap(xnew);
    g.swap(gnew);
    f = ft;
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.history) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    if (opt.f_rel_tol > 0.0 && std::abs(fold - f) <= opt.f_rel_tol * std::max(1.0, std::abs(f))) {
      if (++stall >= 5) break;
    } else {
      stall = 0;
    }
  }
  res.measure = meas(x, g);
  res.x = std::move(x);
  res.f = f;
  res.g = std::move(g);
  return res;
}

}  // namespace bvortex
