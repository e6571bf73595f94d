#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cansys/hamiltonian.hpp"
#include "cansys/propagator.hpp"

namespace cansys {

/// m-value at one spectral point with the Weyl-disk diameter bound achieved
/// at the final truncation. converged=false flags NonConvergence; the sample
/// still carries the best value and the radius actually reached.
struct MFunctionSample {
  cplx z;
  cplx value{0.0};
  double radius = kInf;
  bool converged = false;
  double truncation = 0;
};

struct TruncationPolicy {
  double x0 = 0;             // first truncation point; 0 = auto (1, or L/2 for finite L)
  int k_max = 60;            // doubling steps
  double tolerance = 1e-9;   // accept radius <= tolerance * max(1, |m|)
  MeshPolicy mesh;
};

/// Weyl m-function of a canonical system, via the truncated fractional-linear
/// approximants at two boundary values in the closed lower half-plane whose
/// images lie inside every nested Weyl disk. Im z != 0 required; the lower
/// z half-plane is served by reflection, so m(conj z) == conj(m(z)) exactly.
MFunctionSample m_function(const HamiltonianDescriptor& h, cplx z,
                           const TruncationPolicy& policy = {});

/// Batch variant: one shared cell mesh, kernel-dispatched lanes, adaptive
/// truncation per lane. Results are ordered like the input.
std::vector<MFunctionSample> m_function_batch(const HamiltonianDescriptor& h,
                                              std::span<const cplx> zs,
                                              const TruncationPolicy& policy = {});

// ---------------------------------------------------------------------------
// Closed-form model families

enum class ModelTag { ConstantZeta, Alpha, Step, DiracKappa };

struct ModelFamily {
  ModelTag tag = ModelTag::ConstantZeta;
  Triple triple{0.5, 0.0, 0.5};  // ConstantZeta backing matrix
  cplx zeta0{0.0, 1.0};
  double alpha = 0;
  double d = 1;  // leading coefficient of the dominant primitive, cor:3.08 sense
  double kappa = 0;

  static ModelFamily constant(cplx zeta0);
  static ModelFamily constant(const Triple& t);
  static ModelFamily alpha_family(double alpha, double d = 1);
  static ModelFamily step();
  static ModelFamily dirac(double kappa);
};

/// d_nu = (1-nu)^nu Gamma(1-nu) / (nu^(1-nu) Gamma(nu)), via log-gamma.
double d_nu(double nu);

/// Exact model m-function on C+ (lower half-plane by reflection); principal
/// branch for every fractional power, cut along the negative semi-axis.
cplx model_m(const ModelFamily& family, cplx z);

/// Trace-normed constant Hamiltonian with m identically zeta0.
Triple constant_from_m(cplx zeta0);

/// 0F1(c; w) = sum Gamma(c)/Gamma(k+c) w^k/k!, summed to relative 1e-17,
/// term cap 1e4 (throws SeriesCapExceeded beyond).
cplx hypergeometric_0F1(double c, cplx w);

struct SeriesCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Entire solutions of -y'' = zeta p_alpha y for alpha >= 0:
/// theta = 0F1(1-nu, (nu^2-nu) zeta x^(1/nu)), phi = x 0F1(1+nu, ...),
/// nu = 1/(2+alpha). Wronskian theta phi' - theta' phi == 1.
struct AlphaSolutions {
  cplx theta, phi;
};
AlphaSolutions model_solutions_alpha(double alpha, cplx zeta, double x);

using MSampler = std::function<cplx(cplx)>;

/// M(z) = z^(2 floor(kappa+1/2)) M0(z); kappa + 1/2 must not be an integer.
cplx kappa_reduce(const MSampler& m0, double kappa, cplx z);
double kappa_reduced_order(double kappa);  // kappa - floor(kappa + 1/2)

/// m_q(zeta) = z m(z) with z the square root of zeta in C+ (zeta off [0, inf)).
cplx dirac_to_schrodinger_m(const MSampler& m, cplx zeta);

/// Square root landing in the closed upper half-plane; throws on [0, inf).
cplx sqrt_uhp(cplx zeta);

}  // namespace cansys
