#include "cansys/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace cansys {

double TransferMatrix::det_residual() const {
  const cplx d = u.det();
  if (d == cplx(0.0)) return 1.0;
  const double mag = std::log(std::abs(d)) + 2.0 * log_scale;
  const double ang = std::arg(d);
  return std::hypot(std::expm1(mag), ang);
}

cplx TransferMatrix::mobius(cplx xi) const {
  return -(u.a11 * xi + u.a21) / (u.a12 * xi + u.a22);
}

TransferMatrix cell_exponential(cplx ma, cplx mb, cplx mc, double width) {
  const cplx det = ma * mc - mb * mb;
  const cplx q = std::sqrt(det) * width;  // either root; cos and sinc are even
  cplx cosq, sincq;
  if (std::abs(q) < 1e-4) {
    const cplx q2 = q * q;
    cosq = 1.0 + q2 * (-0.5 + q2 / 24.0);
    sincq = 1.0 + q2 * (-1.0 / 6.0 + q2 / 120.0);
  } else {
    cosq = std::cos(q);
    sincq = std::sin(q) / q;
  }
  // exp(-w J M) = cos I - w sinc JM, JM = [[-mb, -mc], [ma, mb]]
  const cplx p = sincq * width;
  TransferMatrix out;
  out.u = {cosq + p * mb, p * mc, -p * ma, cosq - p * mb};
  out.log_scale = 0;
  const double mag = out.u.max_abs();
  if (mag > 1e100) {
    const double s = std::log(mag);
    out.u = out.u * std::exp(-s);
    out.log_scale = s;
  }
  return out;
}

TransferMatrix step_exponential(const SymmetricCell& cell, cplx z) {
  return cell_exponential(z * cell.a, z * cell.b, z * cell.c, cell.width);
}

void propagate_cells(std::span<const Cell> cells, ZBatch& batch) {
  if (cells.empty() || batch.size() == 0) return;
  active_kernel().propagate(cells.data(), cells.size(), batch, 0, batch.size());
}

TransferMatrix fundamental_matrix(const HamiltonianDescriptor& h, cplx z, double x,
                                  const MeshPolicy& mesh) {
  if (!(x >= 0) || (std::isfinite(h.L) && x > h.L))
    throw std::domain_error("fundamental_matrix: x outside domain");
  std::vector<Cell> cells;
  if (h.is_piecewise_constant()) {
    cells = to_cells(h, x);
  } else {
    MeshPolicy m = mesh;
    m.window = x;
    if (m.x_min <= 0) m.x_min = std::min(1e-8, 1e-3 / std::max(1.0, std::abs(z))) * std::min(1.0, x);
    cells = to_cells(discretize(h, m), x);
  }
  ZBatch batch;
  const cplx zs[1] = {z};
  batch.reset(zs);
  propagate_cells(cells, batch);
  return {batch.matrix(0), batch.log_scale[0]};
}

TransferMatrix zero_energy_matrix(const PiecewiseConstantForm& q, double x) {
  TransferMatrix acc;  // identity
  for (std::size_t i = 0; i < q.cells.size() && x > q.breakpoints[i]; ++i) {
    const double hi = std::min(x, q.breakpoints[i + 1]);
    const double w = hi - q.breakpoints[i];
    if (!(w > 0) || !std::isfinite(w)) break;
    // JY' + QY = 0  <=>  Y' = JQY = exp(+JQ w) steps, i.e. -Q in place of zH.
    const TransferMatrix step =
        cell_exponential(-cplx(q.cells[i].a), -cplx(q.cells[i].b), -cplx(q.cells[i].c), w);
    acc.u = step.u * acc.u;
    acc.log_scale += step.log_scale;
  }
  return acc;
}

}  // namespace cansys
