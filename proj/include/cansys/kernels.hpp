#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cansys/hamiltonian.hpp"
#include "cansys/mat2.hpp"

namespace cansys {

/// Transfer-matrix state for a batch of spectral points, structure-of-arrays
/// so SIMD kernels can run one z per lane. Entry k indexes the 2x2 matrix
/// row-major: 0 -> u11 (theta1), 1 -> u12 (phi1), 2 -> u21 (theta2), 3 -> u22 (phi2).
/// Each lane represents e^{log_scale} * U.
struct ZBatch {
  std::vector<cplx> z;
  std::vector<double> re[4], im[4];
  std::vector<double> log_scale;

  void reset(std::span<const cplx> zs);
  std::size_t size() const { return z.size(); }
  Mat2 matrix(std::size_t lane) const;
  void swap_lanes(std::size_t i, std::size_t j);
};

/// Propagates lanes [lane_lo, lane_hi) through the ordered cell product
/// U <- U_cell * U. Every implementation must be lane-wise deterministic:
/// a lane's result may not depend on how the batch is grouped or split.
using PropagateFn = void (*)(const Cell* cells, std::size_t ncells, ZBatch& batch,
                             std::size_t lane_lo, std::size_t lane_hi);

struct Kernel {
  std::string name;
  PropagateFn propagate = nullptr;
};

const Kernel& scalar_kernel();
const std::vector<Kernel>& available_kernels();

/// Best available kernel, or the one named by CANSYS_KERNEL. Unknown names
/// fall back to scalar.
const Kernel& active_kernel();

}  // namespace cansys
