#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvortex {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Error taxonomy. Everything derives from bvortex::error so callers can
// catch one type; the cli maps the subclasses onto exit codes.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : error {
  using error::error;
};
struct domain_error : error {
  using error::error;
};
struct singular_error : error {
  using error::error;
};
struct unsupported_degree : error {
  using error::error;
};
struct precondition_error : error {
  using error::error;
};
struct resolution_error : error {
  using error::error;
};
struct detection_error : error {
  using error::error;
};

// Thrown when an iterative method stops before meeting its tolerance.
// Carries the best iterate so callers can inspect or resume.
struct convergence_error : error {
  std::vector<double> best;
  double best_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  convergence_error(const std::string& what, std::vector<double> best_x,
                    double value, double gnorm, int iters)
      : error(what), best(std::move(best_x)), best_value(value),
        grad_norm(gnorm), iterations(iters) {}
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double wedge(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
// Rotation by +pi/2.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

// Named energy terms; total is their sum.
struct EnergyBreakdown {
  double dirichlet = 0.0;
  double dmi = 0.0;
  double boundary_penalty = 0.0;
  double potential = 0.0;
  double total = 0.0;

  void sum() { total = dirichlet + dmi + boundary_penalty + potential; }
};

// Map an angle into [0, 2pi).
inline double wrap_angle(double t) {
  double w = std::fmod(t, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w -= two_pi;
  return w;
}

// Signed representative of t in (-pi, pi].
inline double principal(double t) {
  double w = wrap_angle(t + pi) - pi;
  if (w <= -pi) w += two_pi;
  return w;
}

// Distance between two angles on the circle.
inline double circ_dist(double a, double b) { return std::abs(principal(a - b)); }

}  // namespace bvortex
