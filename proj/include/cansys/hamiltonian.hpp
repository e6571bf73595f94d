#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cansys/mat2.hpp"

namespace cansys {

/// Cell of a piecewise-constant Hamiltonian, the unit the propagation kernels
/// consume. h0w caches sqrt(det H0) * width.
struct Cell {
  double a = 0, b = 0, c = 0;
  double width = 0;
  double h0w = 0;
};

struct Triple {
  double a = 0, b = 0, c = 0;
};

inline double triple_det(const Triple& t) { return t.a * t.c - t.b * t.b; }

// ---------------------------------------------------------------------------
// Descriptor forms

struct ConstantForm {
  double a = 1, b = 0, c = 1;
};

/// H = diag(p_alpha, p_{-alpha}) with p_a(x) = (1+a) x^a for a >= 0, else 1.
struct PowerLawAlphaForm {
  double alpha = 0;
};

/// H = diag(1_[1,inf), 1_[0,1)).
struct StepForm {};

/// H = diag(scale^-2 x^-2k, scale^2 x^2k), |k| < 1/2. scale <= 0 requests the
/// radial-model normalization C_kappa = sqrt(pi) / (2^k Gamma(k + 1/2)).
struct DiagonalPowerForm {
  double kappa = 0;
  double scale = 0;
  double effective_scale() const;
};

struct PiecewiseConstantForm {
  std::vector<double> breakpoints;  // size n+1, breakpoints[0] == 0; last may be +inf
  std::vector<Triple> cells;        // size n
};

/// Stores the primitive integrals A, B, C on a grid; densities are derived.
struct SampledPrimitiveForm {
  std::vector<double> x, A, B, C;  // x[0] == 0, A[0] == B[0] == C[0] == 0
};

using HamiltonianForm = std::variant<ConstantForm, PowerLawAlphaForm, StepForm, DiagonalPowerForm,
                                     PiecewiseConstantForm, SampledPrimitiveForm>;

struct PrimitiveIntegrals {
  double A = 0, B = 0, C = 0;
};

struct HamiltonianDescriptor {
  double L = kInf;  // domain [0, L)
  HamiltonianForm form;

  bool is_piecewise_constant() const { return std::holds_alternative<PiecewiseConstantForm>(form); }
  bool is_sampled() const { return std::holds_alternative<SampledPrimitiveForm>(form); }
  bool has_closed_form() const { return !is_sampled(); }

  /// x-values where the density changes non-smoothly; meshes must align here.
  std::vector<double> structural_breakpoints() const;
};

HamiltonianDescriptor make_constant(double a, double b, double c, double L = kInf);
HamiltonianDescriptor make_power_law(double alpha);
HamiltonianDescriptor make_step();
HamiltonianDescriptor make_diagonal_power(double kappa, double scale = 0);
HamiltonianDescriptor make_piecewise(std::vector<double> breakpoints, std::vector<Triple> cells,
                                     double L = -1);
HamiltonianDescriptor make_sampled(std::vector<double> x, std::vector<double> A,
                                   std::vector<double> B, std::vector<double> C);

// ---------------------------------------------------------------------------
// Operations

struct ValidationIssue {
  enum class Severity { Error, Warning } severity = Severity::Error;
  std::string code;
  std::string message;
};

struct ValidationReport {
  bool valid = true;  // no errors (warnings allowed)
  std::vector<ValidationIssue> issues;

  bool has(const std::string& code) const;
  void add(ValidationIssue::Severity sev, std::string code, std::string message);
};

/// Structural checks: PSD cells, nondegeneracy, the b=c=0 exclusion, and the
/// limit-point trace condition (closed forms only; sampled data is flagged
/// unverifiable). Reports, never throws.
ValidationReport validate(const HamiltonianDescriptor& h);

/// Exact closed-form primitives for symbolic forms, exact cell sums for
/// piecewise-constant, table interpolation for sampled data.
PrimitiveIntegrals primitive_integrals(const HamiltonianDescriptor& h, double x);

struct MeshPolicy {
  enum class Grading { Uniform, Geometric } grading = Grading::Geometric;
  int cells_per_decade = 64;    // geometric grading
  int uniform_cells = 256;      // uniform grading
  double x_min = 0;             // geometric: smallest positive breakpoint; 0 = auto
  double window = 0;            // discretization window [0, window]; 0 = auto
};

/// Piecewise-constant approximation whose cell values are exact primitive
/// integral differences, so int_0^x H is preserved at every breakpoint.
HamiltonianDescriptor discretize(const HamiltonianDescriptor& h, const MeshPolicy& policy);

/// PSD clamp used when turning triples into propagation cells: small negative
/// determinants (measurement noise, det >= -1e-12 (a+c)^2) are projected onto
/// the PSD cone, anything worse is left alone for validate() to reject.
Triple clamp_psd(const Triple& t);

/// Flattens a piecewise-constant descriptor into kernel cells covering [0, up_to].
/// The final cell is split at up_to; a +inf tail cell is materialized as needed.
std::vector<Cell> to_cells(const HamiltonianDescriptor& pwc, double up_to);

std::vector<double> geometric_breakpoints(double x_lo, double x_hi, int cells_per_decade);

}  // namespace cansys
