// AVX2 propagation kernel. This TU is compiled with -mavx2 -mfma; the kernel
// registers only when the running CPU reports AVX2.

#include "kernel_simd.hpp"

namespace cansys {

namespace {

void propagate_avx2(const Cell* cells, std::size_t ncells, ZBatch& batch, std::size_t lane_lo,
                    std::size_t lane_hi) {
  detail::propagate_simd<detail::stdx::simd_abi::native<double>>(cells, ncells, batch, lane_lo,
                                                                 lane_hi);
}

}  // namespace

void register_avx2_kernel(std::vector<Kernel>& out) {
  if (__builtin_cpu_supports("avx2")) out.push_back({"avx2", &propagate_avx2});
}

}  // namespace cansys
