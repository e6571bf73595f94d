// NEON propagation kernel (aarch64 native simd width).

#include "kernel_simd.hpp"

namespace cansys {

namespace {

void propagate_neon(const Cell* cells, std::size_t ncells, ZBatch& batch, std::size_t lane_lo,
                    std::size_t lane_hi) {
  detail::propagate_simd<detail::stdx::simd_abi::native<double>>(cells, ncells, batch, lane_lo,
                                                                 lane_hi);
}

}  // namespace

void register_neon_kernel(std::vector<Kernel>& out) { out.push_back({"neon", &propagate_neon}); }

}  // namespace cansys
