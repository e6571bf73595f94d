#pragma once

#include "cansys/hamiltonian.hpp"
#include "cansys/kernels.hpp"
#include "cansys/mat2.hpp"

namespace cansys {

/// Fundamental-matrix value at one (z, x), stored as e^{log_scale} * u with
/// det(u) e^{2 log_scale} = 1. Layout follows the theta/phi columns:
/// u = [[theta1, phi1], [theta2, phi2]].
struct TransferMatrix {
  Mat2 u;
  double log_scale = 0;

  /// |det - 1| residual, evaluated in log space so huge scales stay exact.
  double det_residual() const;

  /// -(theta1 xi + theta2) / (phi1 xi + phi2); the scale cancels.
  cplx mobius(cplx xi) const;
};

struct SymmetricCell {
  double a = 0, b = 0, c = 0;
  double width = 0;
};

/// exp(-w J M) for a complex symmetric M = [[ma, mb], [mb, mc]]; (JM)^2 = -det(M) I,
/// so the exponential is cos(q) I - w sinc(q) J M with q^2 = det(M) w^2. det(M) may
/// be negative or complex; cos/sinc of the complex root cover the hyperbolic case.
TransferMatrix cell_exponential(cplx ma, cplx mb, cplx mc, double width);

/// Single-cell step of JY' = zHY. PSD cell; series switch for small |z h0 w|
/// and rescaling into log_scale happen inside.
TransferMatrix step_exponential(const SymmetricCell& cell, cplx z);

/// U(z, x) for a validated descriptor: ordered product of cell exponentials
/// over the discretization, later cells multiplying from the left.
TransferMatrix fundamental_matrix(const HamiltonianDescriptor& h, cplx z, double x,
                                  const MeshPolicy& mesh = {});

/// U(0, x) of JY' + QY = 0 for a piecewise-constant symmetric field Q
/// (no positivity assumed; det Q < 0 gives hyperbolic cells).
TransferMatrix zero_energy_matrix(const PiecewiseConstantForm& q, double x);

/// Propagates an existing state through explicit cells (kernel dispatch).
void propagate_cells(std::span<const Cell> cells, ZBatch& batch);

}  // namespace cansys
