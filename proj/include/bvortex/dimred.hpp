#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "field2d.hpp"
#include "quadrature.hpp"
#include "renorm.hpp"
#include "trace.hpp"

namespace bvortex {

// g_h(xi) = (1 - exp(-2 pi h xi)) / (2 pi h xi), with g_h(0) = 1.
inline double g_h_factor(double h, double xi_mag) {
  if (!(h > 0.0)) throw config_error("g_h needs h > 0");
  double x = two_pi * h * std::abs(xi_mag);
  if (x < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// J_0(x) .. J_nmax(x) by Miller's backward recurrence, normalized with J_0 + 2 sum J_2k = 1.
inline void bessel_j_all(int nmax, double x, std::vector<double>& J) {
  J.assign(nmax + 2, 0.0);
  if (x == 0.0) {
    J[0] = 1.0;
    return;
  }
  x = std::abs(x);
  int top = std::max(nmax, static_cast<int>(x)) + 20 + static_cast<int>(std::sqrt(40.0 * std::max(nmax, static_cast<int>(x)) + 40.0));
  top += top % 2;
  std::vector<double> w(top + 2, 0.0);
  w[top + 1] = 0.0;
  w[top] = 1e-300;
  double sum = 0.0;
  for (int k = top; k >= 1; --k) {
    w[k - 1] = 2.0 * k / x * w[k] - w[k + 1];
    if (std::abs(w[k - 1]) > 1e250) {
      for (int j = k - 1; j <= top + 1; ++j) w[j] *= 1e-250;
      sum *= 1e-250;
    }
    if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2.0 * w[k - 1];
  }
  sum += w[0];
  for (int n = 0; n <= nmax + 1 && n <= top; ++n) J[n] = w[n] / sum;
}

// x3-invariant magnetization (m', m3) on the polar grid of the unit disk, zero outside.
struct SheetField {
  PolarField mp;
  PolarScalar m3;

  SheetField() = default;
  explicit SheetField(PolarField in_plane) : mp(std::move(in_plane)), m3(mp.Nr, mp.Nt) {
    std::vector<double> z(mp.Nt, 0.0);
    m3.rim = z;
    validate();
  }
  SheetField(PolarField in_plane, PolarScalar normal) : mp(std::move(in_plane)), m3(std::move(normal)) {
    if (m3.Nr != mp.Nr || m3.Nt != mp.Nt) throw config_error("m' and m3 grids differ");
    validate();
  }

  static SheetField uniform(int Nr, int Nt, double m1, double m2, double m3v) {
    auto mp = PolarField::sample(Nr, Nt, [&](double, double) { return Vec2{m1, m2}; });
    auto s = PolarScalar::sample(Nr, Nt, [&](double, double) { return m3v; });
    return SheetField(std::move(mp), std::move(s));
  }

  void validate() const {
    for (size_t n = 0; n < mp.v.size(); ++n) {
      double a = mp.v[n].x * mp.v[n].x + mp.v[n].y * mp.v[n].y + m3.s[n] * m3.s[n];
      if (!std::isfinite(a) || std::sqrt(a) > 1.0 + 1e-12) throw config_error("sheet field must satisfy |m| <= 1");
    }
  }
};

struct StrayOptions {
  double xi_max_factor = 4.0;   // cutoff Xi_max = factor / h
  double resolve_factor = 0.5;  // direct quadrature up to rho with 2 pi rho dr <= factor
  int panels_per_unit = 2;      // Gauss panels per unit of rho on the resolved range
  int gauss = 8;
  int log_panels_per_decade = 8;
  double tail_tolerance = 0.05;
};

struct StrayTerms {
  double fourier_exact = 0.0;
  double volume_charge = 0.0;
  double lateral_charge = 0.0;
  double surface_charge = 0.0;
  double tail = 0.0;  // analytic estimate beyond Xi_max, included in fourier_exact
};

namespace detail {

// Angular Fourier data of the sheet: ring coefficients of div m' and m3,
// their traces at r = 1, and sigma = m' . nu on the boundary.
struct SheetSpectrum {
  int Nr = 0, Nt = 0, nmax = 0;
  std::vector<std::vector<cplx>> div, m3;  // [ring][n], n = 0..Nt/2
  std::vector<cplx> tdiv, t3, sigma;
  std::vector<double> weight;  // multiplicity of +-n
};

inline std::vector<cplx> ring_coeffs(const std::vector<double>& vals) {
  auto X = rfft(vals);
  for (auto& x : X) x /= static_cast<double>(vals.size());
  return X;
}

inline SheetSpectrum sheet_spectrum(const SheetField& m) {
  SheetSpectrum s;
  const PolarField& f = m.mp;
  s.Nr = f.Nr;
  s.Nt = f.Nt;
  const int N = f.Nt / 2;
  PolarScalar dv = divergence(f);
  std::vector<double> row(f.Nt);
  s.div.resize(f.Nr);
  s.m3.resize(f.Nr);
  for (int i = 0; i < f.Nr; ++i) {
    for (int k = 0; k < f.Nt; ++k) row[k] = dv.at(i, k);
    s.div[i] = ring_coeffs(row);
    for (int k = 0; k < f.Nt; ++k) row[k] = m.m3.at(i, k);
    s.m3[i] = ring_coeffs(row);
  }
  for (int k = 0; k < f.Nt; ++k) row[k] = dv.boundary(k);
  s.tdiv = ring_coeffs(row);
  for (int k = 0; k < f.Nt; ++k) row[k] = m.m3.boundary(k);
  s.t3 = ring_coeffs(row);
  for (int k = 0; k < f.Nt; ++k) {
    Vec2 b = f.boundary(k);
    row[k] = b.x * std::cos(f.t(k)) + b.y * std::sin(f.t(k));
  }
  s.sigma = ring_coeffs(row);
  s.weight.assign(N + 1, 2.0);
  s.weight[0] = 1.0;
  s.weight[N] = 1.0;
  double scale = 0.0;
  auto upd = [&](const std::vector<cplx>& c) {
    for (const auto& x : c) scale = std::max(scale, std::abs(x));
  };
  for (int i = 0; i < f.Nr; ++i) upd(s.div[i]), upd(s.m3[i]);
  upd(s.tdiv), upd(s.t3), upd(s.sigma);
  s.nmax = 0;
  auto big = [&](cplx x) { return std::abs(x) > 1e-14 * scale; };
  for (int n = N; n >= 0 && s.nmax == 0; --n) {
    bool any = big(s.tdiv[n]) || big(s.t3[n]) || big(s.sigma[n]);
    for (int i = 0; i < f.Nr && !any; ++i) any = big(s.div[i][n]) || big(s.m3[i][n]);
    if (any) s.nmax = n;
  }
  return s;
}

struct SpectralSums {
  double SD = 0.0;  // sum |H_n(div) - sigma_n J_n|^2
  double S3 = 0.0;  // sum |H_n(m3)|^2
  double SV = 0.0;  // sum |H_n(div)|^2
};

// H_n(rho) = int_0^1 q_n(r) J_n(2 pi rho r) r dr, with the trace part t_n r^n
// integrated exactly (int_0^1 r^{n+1} J_n(k r) dr = J_{n+1}(k)/k) and midpoint on the rest.
inline SpectralSums resolved_sums(const SheetSpectrum& s, double rho) {
  const double k = two_pi * rho, dr = 1.0 / s.Nr;
  const int nm = s.nmax;
  std::vector<cplx> Hd(nm + 1), H3(nm + 1);
  std::vector<double> J, JK;
  bessel_j_all(nm + 1, k, JK);
  for (int n = 0; n <= nm; ++n) {
    double T = k > 0.0 ? JK[n + 1] / k : (n == 0 ? 0.5 : 0.0);
    Hd[n] = s.tdiv[n] * T;
    H3[n] = s.t3[n] * T;
  }
  for (int i = 0; i < s.Nr; ++i) {
    double r = (i + 0.5) * dr;
    bessel_j_all(nm, k * r, J);
    double rn = 1.0;
    for (int n = 0; n <= nm; ++n) {
      double w = J[n] * r * dr;
      Hd[n] += (s.div[i][n] - s.tdiv[n] * rn) * w;
      H3[n] += (s.m3[i][n] - s.t3[n] * rn) * w;
      rn *= r;
    }
  }
  SpectralSums out;
  for (int n = 0; n <= nm; ++n) {
    double w = s.weight[n];
    out.SD += w * std::norm(Hd[n] - s.sigma[n] * JK[n]);
    out.S3 += w * std::norm(H3[n]);
    out.SV += w * std::norm(Hd[n]);
  }
  return out;
}

// Phase-averaged J_n(x)^2.
inline double mean_j2(int n, double x) {
  double q = std::max(x * x - static_cast<double>(n) * n, 0.25 * x * x);
  return 1.0 / (pi * std::sqrt(q));
}

// Boundary-dominated sums for large rho: oscillating cross terms averaged out.
inline SpectralSums asymptotic_sums(const SheetSpectrum& s, double rho) {
  const double x = two_pi * rho;
  SpectralSums out;
  for (int n = 0; n <= s.nmax; ++n) {
    double w = s.weight[n], a = mean_j2(n + 1, x) / (x * x);
    out.SD += w * (std::norm(s.sigma[n]) * mean_j2(n, x) + std::norm(s.tdiv[n]) * a);
    out.S3 += w * std::norm(s.t3[n]) * a;
    out.SV += w * std::norm(s.tdiv[n]) * a;
  }
  return out;
}

}  // namespace detail

// h int |xi . F(m' 1)|^2 / |xi|^2 (1 - g_h) + h int |F(m3 1)|^2 g_h, with the
// frequency integral in polar coordinates; also returns the volume term.
inline StrayTerms strayfield_terms(const SheetField& m, double h, const StrayOptions& opt = {}) {
  if (!(h > 0.0 && h < 1.0)) throw config_error("strayfield needs 0 < h < 1");
  auto s = detail::sheet_spectrum(m);
  const double xi_max = opt.xi_max_factor / h;
  const double rho_res = std::min(opt.resolve_factor * s.Nr / two_pi, xi_max);
  const GaussRule& G = gauss_legendre(opt.gauss);
  double exact = 0.0, vol = 0.0;
  auto accumulate = [&](double rho, double w, const detail::SpectralSums& S) {
    double g = g_h_factor(h, rho);
    exact += w * h * two_pi * ((1.0 - g) * S.SD / rho + 4.0 * pi * pi * rho * g * S.S3);
    vol += w * 2.0 * pi * pi * h * h * S.SV;
  };
  int np = std::max(1, static_cast<int>(std::ceil(rho_res * opt.panels_per_unit)));
  for (int p = 0; p < np; ++p) {
    double a = rho_res * p / np, b = rho_res * (p + 1) / np, c = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int q = 0; q < opt.gauss; ++q) {
      double rho = c + hw * G.x[q];
      accumulate(rho, hw * G.w[q], detail::resolved_sums(s, rho));
    }
  }
  if (xi_max > rho_res) {
    double la = std::log(rho_res), lb = std::log(xi_max);
    int nl = std::max(1, static_cast<int>(std::ceil((lb - la) / std::log(10.0) * opt.log_panels_per_decade)));
    for (int p = 0; p < nl; ++p) {
      double a = la + (lb - la) * p / nl, b = la + (lb - la) * (p + 1) / nl, c = 0.5 * (a + b), hw = 0.5 * (b - a);
      for (int q = 0; q < opt.gauss; ++q) {
        double rho = std::exp(c + hw * G.x[q]);
        accumulate(rho, hw * G.w[q] * rho, detail::asymptotic_sums(s, rho));
      }
    }
  }
  // Tails beyond Xi_max with g_h ~ 1/(2 pi h rho) and mean J^2 ~ 1/(pi x).
  double As = 0.0, Atd = 0.0, A3 = 0.0;
  for (int n = 0; n <= s.nmax; ++n) {
    As += s.weight[n] * std::norm(s.sigma[n]);
    Atd += s.weight[n] * std::norm(s.tdiv[n]);
    A3 += s.weight[n] * std::norm(s.t3[n]);
  }
  StrayTerms t;
  t.tail = h * As / (pi * xi_max) + A3 / (4.0 * pi * pi * xi_max * xi_max);
  exact += t.tail;
  vol += h * h * Atd / (8.0 * pi * pi * xi_max * xi_max);
  if (t.tail > opt.tail_tolerance * std::abs(exact))
    throw resolution_error("stray-field tail beyond Xi_max is " + std::to_string(t.tail / exact * 100.0) +
                           "% of the total; raise xi_max_factor");
  t.fourier_exact = exact;
  t.volume_charge = vol;
  const PolarField& f = m.mp;
  double lat = 0.0;
  for (int k = 0; k < f.Nt; ++k) {
    Vec2 b = f.boundary(k);
    double vn = b.x * std::cos(f.t(k)) + b.y * std::sin(f.t(k));
    lat += vn * vn;
  }
  t.lateral_charge = h * h * std::abs(std::log(h)) / two_pi * lat * f.dt();
  double surf = 0.0;
  for (int i = 0; i < f.Nr; ++i)
    for (int k = 0; k < f.Nt; ++k) surf += f.r(i) * m.m3.at(i, k) * m.m3.at(i, k);
  t.surface_charge = h * surf * f.dr() * f.dt();
  return t;
}

inline double strayfield_fourier(const SheetField& m, double h, const StrayOptions& opt = {}) {
  return strayfield_terms(m, h, opt).fourier_exact;
}

inline StrayTerms strayfield_asymptotic(const SheetField& m, double h, const StrayOptions& opt = {}) {
  return strayfield_terms(m, h, opt);
}

struct RegimeParams {
  double h = 0.0, eta = 0.0, eps = 0.0;
  std::array<std::array<double, 3>, 3> Dhat{};
  DmiVector delta;
  std::optional<double> A, ell, t;  // exchange length, lateral size, thickness

  // eps = eta^2 / (h |log h|); Dhat_13 = 2 delta_1 eta^2, Dhat_23 = 2 delta_2 eta^2.
  static RegimeParams make(double h, double eta, const DmiVector& delta) {
    RegimeParams p;
    p.h = h;
    p.eta = eta;
    p.delta = delta;
    p.eps = eta * eta / (h * std::abs(std::log(h)));
    p.Dhat[0][2] = 2.0 * delta.dx * eta * eta;
    p.Dhat[1][2] = 2.0 * delta.dy * eta * eta;
    p.check();
    return p;
  }
  static RegimeParams physical(double A, double ell, double t, const DmiVector& delta) {
    if (!(A > 0.0 && ell > 0.0 && t > 0.0)) throw config_error("physical lengths must be positive");
    RegimeParams p = make(t / ell, A / ell, delta);
    p.A = A;
    p.ell = ell;
    p.t = t;
    return p;
  }
  // eta^2 = h |log h|^p, hence eps = |log h|^(p - 1).
  static RegimeParams on_path(double h, double p, const DmiVector& delta) {
    if (!(p > 0.5 && p < 1.0)) throw config_error("regime path exponent must lie in (1/2, 1)");
    if (!(h > 0.0 && h < 1.0)) throw config_error("h must lie in (0, 1)");
    return make(h, std::sqrt(h * std::pow(std::abs(std::log(h)), p)), delta);
  }
  void check() const {
    auto in01 = [](double x) { return x > 0.0 && x < 1.0; };
    if (!in01(h) || !in01(eta) || !in01(eps))
      throw config_error("regime parameters must satisfy h, eta, eps in (0, 1)");
  }
};

struct SheetComparison {
  double E_h = 0.0;
  double E_2d_scaled = 0.0;
  double gap = 0.0;
  double exchange = 0.0, dmi = 0.0, stray = 0.0;
  EnergyBreakdown two_d;
};

// E_h of the x3-invariant magnetization (m', 0) against E_{eps,eta}^delta(m') / |log eps|.
inline SheetComparison sheet_energy_compare(const PolarField& mprime, const RegimeParams& params,
                                            const StrayOptions& opt = {}) {
  params.check();
  for (const Vec2& p : mprime.v)
    if (std::abs(norm(p) - 1.0) > 1e-9) throw precondition_error("sheet_energy_compare needs |m'| = 1");
  if (mprime.rim)
    for (const Vec2& p : *mprime.rim)
      if (std::abs(norm(p) - 1.0) > 1e-9) throw precondition_error("sheet_energy_compare needs |m'| = 1");
  const double L = std::abs(std::log(params.eps));
  SheetComparison c;
  c.two_d = energy_full(mprime, params.eps, params.eta, params.delta);
  c.E_2d_scaled = c.two_d.total / L;
  c.exchange = c.two_d.dirichlet;
  // With m3 = 0 and no x3 dependence only D_13 and D_23 couple: D_j3 (d_j m' ^ m').
  Vec2 mom = dmi_moments(mprime);
  const double e2 = params.eta * params.eta;
  c.dmi = (params.Dhat[0][2] * mom.x + params.Dhat[1][2] * mom.y) / e2;
  c.stray = strayfield_fourier(SheetField(mprime), params.h, opt);
  c.E_h = (c.exchange + c.dmi + c.stray / (params.h * e2)) / L;
  c.gap = std::abs(c.E_h - c.E_2d_scaled);
  return c;
}

struct RegimeRow {
  double h = 0.0, eta = 0.0, eps = 0.0;
  double r13 = 0.0;  // eps |log h|
  double r14 = 0.0;  // eps |log h| / log |log h|
};

struct RegimeTable {
  double p = 0.0;
  std::vector<RegimeRow> rows;
  bool r13_increasing = true, r14_increasing = true, eps_decreasing = true;
};

// Rows are reported in order of decreasing h.
inline RegimeTable regime_probe(std::vector<double> h_list, double p) {
  if (!(p > 0.5 && p < 1.0)) throw config_error("regime path exponent must lie in (1/2, 1)");
  std::sort(h_list.begin(), h_list.end(), std::greater<>());
  RegimeTable t;
  t.p = p;
  for (double h : h_list) {
    if (!(h > 0.0 && h < 1.0)) throw config_error("h must lie in (0, 1)");
    double L = std::abs(std::log(h));
    RegimeRow r;
    r.h = h;
    r.eta = std::sqrt(h * std::pow(L, p));
    r.eps = std::pow(L, p - 1.0);
    r.r13 = r.eps * L;
    r.r14 = r.eps * L / std::log(L);
    t.rows.push_back(r);
  }
  for (size_t i = 1; i < t.rows.size(); ++i) {
    t.r13_increasing = t.r13_increasing && t.rows[i].r13 > t.rows[i - 1].r13;
    t.r14_increasing = t.r14_increasing && t.rows[i].r14 > t.rows[i - 1].r14;
    t.eps_decreasing = t.eps_decreasing && t.rows[i].eps < t.rows[i - 1].eps;
  }
  return t;
}

}  // namespace bvortex
