#ifndef SPLITDYN_TEST_SUPPORT_HPP
#define SPLITDYN_TEST_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

// Shared oracles for the test suite: a quadrature rule and a finite-difference
// stencil that are independent of the library's closed-form derivatives, plus
// a deterministic RNG so failures reproduce.

namespace testsupport {

inline std::mt19937& rng() {
  static std::mt19937 gen(0xC0FFEEu);
  return gen;
}

[[nodiscard]] inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("quadrature did not converge");
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] (a > b allowed).
[[nodiscard]] inline double integrate(const std::function<double(double)>& f, double a, double b,
                                      double tol = 1e-12) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Five-point central difference; error O(h^4).
[[nodiscard]] inline double fd_derivative(const std::function<double(double)>& f, double x,
                                          double h) {
  return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

[[nodiscard]] inline double fd_derivative(const std::function<double(double)>& f, double x) {
  const double h = 1e-3 * std::max(1.0, std::fabs(x));
  return fd_derivative(f, x, h);
}

}  // namespace testsupport

#endif
