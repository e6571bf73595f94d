#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cansys/weyl.hpp"

namespace cansys {

/// Normalized spectral function table: left-continuous nondecreasing
/// interpolant with rho(0) = 0. Detected atoms ride along for reporting.
struct SpectralFunction {
  std::vector<double> breakpoints;  // increasing, contains 0
  std::vector<double> values;       // rho at breakpoints
  std::vector<std::pair<double, double>> atoms;  // (location, mass)
  int clamped_increments = 0;

  double eval(double t) const;  // piecewise-linear between breakpoints
};

struct StieltjesOptions {
  std::vector<double> eps_schedule{1e-1, 3e-2, 1e-2};  // scaled by (1 + |t|)
  int gauss_points = 4;
  double atom_ratio = 10.0;  // jump detection: cell increment vs neighbors
};

/// Evaluates m at many points at once; second vector flags per-point success.
using BatchMSampler =
    std::function<std::pair<std::vector<cplx>, std::vector<bool>>(std::span<const cplx>)>;

/// Stieltjes inversion of the Herglotz representation:
/// rho(t2) - rho(t1) = lim (1/pi) int Im m(t + i eps) dt, Richardson-extrapolated
/// over the tail of the eps schedule. Monotonicity is enforced by clamping
/// negative increments (counted in the result). The grid must bracket 0.
SpectralFunction stieltjes_invert(const BatchMSampler& m, std::span<const double> t_grid,
                                  const StieltjesOptions& opt = {});
SpectralFunction stieltjes_invert(const MSampler& m, std::span<const double> t_grid,
                                  const StieltjesOptions& opt = {});

/// Batch sampler adapter for the numeric m-function of a descriptor.
BatchMSampler numeric_m_sampler(const HamiltonianDescriptor& h, TruncationPolicy policy = {});

/// Exact model spectral functions. The spectral measures of the model
/// families are even (Step excepted), so the normalized spectral function is
/// odd; this returns the signed value at any real t.
double model_rho(const ModelFamily& family, double t);
bool model_has_atom_at_zero(const ModelFamily& family);

struct TauberianRow {
  double t;
  double ratio_plus, ratio_minus;  // jump form stores the single ratio in ratio_plus
};

struct TauberianReport {
  bool jump_form = false;
  std::vector<TauberianRow> rows;
  bool precondition_ok = true;  // f(r)/r eventually decreasing on the ladder
  bool pass = false;
  double tolerance = 0.05;
};

/// Ratio table rho(+-t) / (t f(t) rho_model(+-1)) over the ladder, or the
/// difference form when the model has an atom at zero. f enters in the
/// normalization of eq:tauberm, i.e. m(r mu) ~ f(r) m_model(mu).
TauberianReport tauberian_compare(const SpectralFunction& rho,
                                  const std::function<double(double)>& f,
                                  const ModelFamily& rho_model, std::span<const double> t_ladder,
                                  double tolerance = 0.05);

}  // namespace cansys
