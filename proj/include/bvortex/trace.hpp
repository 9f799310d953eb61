#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "common.hpp"

namespace bvortex {

namespace detail {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per size with FFTW_UNALIGNED so they apply to any
// std::vector buffer.
class FftPlans {
 public:
  static FftPlans& get() {
    static FftPlans p;
    return p;
  }
  fftw_plan r2c(int n) { return plan(n, true); }
  fftw_plan c2r(int n) { return plan(n, false); }

 private:
  std::mutex mu_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;

  fftw_plan plan(int n, bool forward) {
    std::lock_guard<std::mutex> lk(mu_);
    auto key = std::make_pair(n, forward);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<double> re(n);
    std::vector<cplx> co(n / 2 + 1);
    auto* cp = reinterpret_cast<fftw_complex*>(co.data());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = forward ? fftw_plan_dft_r2c_1d(n, re.data(), cp, flags)
                          : fftw_plan_dft_c2r_1d(n, cp, re.data(), flags | FFTW_DESTROY_INPUT);
    plans_[key] = p;
    return p;
  }
};

}  // namespace detail

// X_k = sum_j x_j exp(-2 pi i j k / n), k = 0..n/2.
inline std::vector<cplx> rfft(const std::vector<double>& x) {
  int n = static_cast<int>(x.size());
  std::vector<double> in(x);
  std::vector<cplx> out(n / 2 + 1);
  fftw_execute_dft_r2c(detail::FftPlans::get().r2c(n), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

// Unnormalized inverse: x_j = sum over the full Hermitian spectrum.
inline std::vector<double> irfft(const std::vector<cplx>& X, int n) {
  std::vector<cplx> in(X);
  in.resize(n / 2 + 1);
  std::vector<double> out(n);
  fftw_execute_dft_c2r(detail::FftPlans::get().c2r(n), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  return out;
}

// Periodic boundary scalar on M uniform nodes. Values are the primary data;
// the real Fourier coefficients are derived once at construction:
//   v(t) = c0 + sum_{k=1}^{K} (a_k cos kt + b_k sin kt) + nyquist cos(M t / 2),
// with K = M/2 - 1.
class TraceField {
 public:
  TraceField() = default;
  explicit TraceField(std::vector<double> values) : values_(std::move(values)) {
    M_ = static_cast<int>(values_.size());
    if (M_ < 2 || M_ % 2) throw config_error("trace field needs an even node count");
    derive();
  }

  static TraceField from_coeffs(int M, double c0, const std::vector<double>& a,
                                const std::vector<double>& b, double nyquist = 0.0) {
    if (M < 2 || M % 2) throw config_error("trace field needs an even node count");
    std::vector<cplx> X(M / 2 + 1, cplx(0.0, 0.0));
    X[0] = c0;
    int K = M / 2 - 1;
    for (int k = 1; k <= K; ++k) {
      double ak = k < static_cast<int>(a.size()) ? a[k] : 0.0;
      double bk = k < static_cast<int>(b.size()) ? b[k] : 0.0;
      X[k] = cplx(0.5 * ak, -0.5 * bk);
    }
    X[M / 2] = nyquist;
    return TraceField(irfft(X, M));
  }

  int M() const { return M_; }
  int K() const { return M_ / 2 - 1; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int k) const { return values_[k]; }
  double c0() const { return c0_; }
  const std::vector<double>& a() const { return a_; }  // index 1..K
  const std::vector<double>& b() const { return b_; }
  double nyquist() const { return nyq_; }

  // Rebuild nodal values from the stored coefficients.
  std::vector<double> synthesize() const {
    std::vector<cplx> X(M_ / 2 + 1);
    X[0] = c0_;
    for (int k = 1; k <= K(); ++k) X[k] = cplx(0.5 * a_[k], -0.5 * b_[k]);
    X[M_ / 2] = nyq_;
    return irfft(X, M_);
  }

  // Trigonometric interpolant at an arbitrary angle.
  double eval(double t) const { return extend_polar(1.0, t); }

  // Harmonic extension c0 + sum r^k (a_k cos kt + b_k sin kt) (+ Nyquist mode).
  double extend_polar(double r, double t) const {
    cplx z = std::polar(r, t);
    cplx zk(1.0, 0.0);
    double s = c0_;
    for (int k = 1; k <= K(); ++k) {
      zk *= z;
      s += a_[k] * zk.real() + b_[k] * zk.imag();
    }
    zk *= z;
    s += nyq_ * zk.real();
    return s;
  }

  TraceField plus(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x += c;
    return TraceField(std::move(v));
  }

 private:
  int M_ = 0;
  std::vector<double> values_;
  double c0_ = 0.0;
  std::vector<double> a_, b_;
  double nyq_ = 0.0;

  void derive() {
    auto X = rfft(values_);
    double inv = 1.0 / M_;
    c0_ = X[0].real() * inv;
    a_.assign(M_ / 2, 0.0);
    b_.assign(M_ / 2, 0.0);
    for (int k = 1; k <= K(); ++k) {
      a_[k] = 2.0 * inv * X[k].real();
      b_[k] = -2.0 * inv * X[k].imag();
    }
    nyq_ = X[M_ / 2].real() * inv;
  }
};

inline std::vector<double> harmonic_extend(const TraceField& tr, const std::vector<Vec2>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) {
    double r = norm(p);
    if (r >= 1.0) throw domain_error("harmonic extension requested at |x| >= 1");
    out.push_back(tr.extend_polar(r, std::atan2(p.y, p.x)));
  }
  return out;
}

}  // namespace bvortex
