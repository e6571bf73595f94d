#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace cansys {

/// Solves phi(x) = target for a strictly increasing phi on (0, inf).
/// Brackets geometrically from x_hint, then bisects in log x, so it copes
/// with targets many orders of magnitude apart (scale-function inversion
/// routinely spans 1e-18 .. 1e6).
inline double solve_increasing(const std::function<double(double)>& phi, double target,
                               double x_hint = 1.0, double rel_tol = 1e-13) {
  if (!(x_hint > 0.0)) x_hint = 1.0;
  double lo = x_hint, hi = x_hint;
  double flo = phi(lo), fhi = flo;
  int guard = 0;
  while (flo > target) {
    lo *= 0.25;
    flo = phi(lo);
    if (++guard > 4200 || lo < 1e-305) throw std::runtime_error("solve_increasing: no lower bracket");
  }
  guard = 0;
  while (fhi < target) {
    hi *= 4.0;
    fhi = phi(hi);
    if (++guard > 4200 || hi > 1e305) throw std::runtime_error("solve_increasing: no upper bracket");
  }
  if (lo == hi) return lo;
  double llo = std::log(lo), lhi = std::log(hi);
  for (int it = 0; it < 200 && (lhi - llo) > rel_tol; ++it) {
    const double lm = 0.5 * (llo + lhi);
    const double m = std::exp(lm);
    if (phi(m) < target)
      llo = lm;
    else
      lhi = lm;
  }
  return std::exp(0.5 * (llo + lhi));
}

/// Same, for a strictly decreasing phi.
inline double solve_decreasing(const std::function<double(double)>& phi, double target,
                               double x_hint = 1.0, double rel_tol = 1e-13) {
  return solve_increasing([&phi](double x) { return -phi(x); }, -target, x_hint, rel_tol);
}

}  // namespace cansys
