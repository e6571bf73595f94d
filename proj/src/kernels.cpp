#include "cansys/kernels.hpp"

#include <cstdlib>

#include "kernel_step.hpp"

namespace cansys {

void ZBatch::reset(std::span<const cplx> zs) {
  z.assign(zs.begin(), zs.end());
  const std::size_t n = z.size();
  for (int k = 0; k < 4; ++k) {
    re[k].assign(n, (k == 0 || k == 3) ? 1.0 : 0.0);
    im[k].assign(n, 0.0);
  }
  log_scale.assign(n, 0.0);
}

Mat2 ZBatch::matrix(std::size_t lane) const {
  return {cplx(re[0][lane], im[0][lane]), cplx(re[1][lane], im[1][lane]),
          cplx(re[2][lane], im[2][lane]), cplx(re[3][lane], im[3][lane])};
}

void ZBatch::swap_lanes(std::size_t i, std::size_t j) {
  if (i == j) return;
  std::swap(z[i], z[j]);
  std::swap(log_scale[i], log_scale[j]);
  for (int k = 0; k < 4; ++k) {
    std::swap(re[k][i], re[k][j]);
    std::swap(im[k][i], im[k][j]);
  }
}

namespace {

void propagate_scalar(const Cell* cells, std::size_t ncells, ZBatch& batch, std::size_t lane_lo,
                      std::size_t lane_hi) {
  using P = detail::ScalarPack;
  detail::StepEval<P> step;
  for (std::size_t lane = lane_lo; lane < lane_hi; ++lane) {
    const double zr = batch.z[lane].real();
    const double zi = batch.z[lane].imag();
    const double azi = std::fabs(zi);
    double ur[4], ui[4];
    for (int k = 0; k < 4; ++k) {
      ur[k] = batch.re[k][lane];
      ui[k] = batch.im[k][lane];
    }
    double ls = batch.log_scale[lane];
    for (std::size_t ic = 0; ic < ncells; ++ic) {
      const Cell& cell = cells[ic];
      step.compute(zr, zi, azi, cell.a, cell.b, cell.c, cell.width, cell.h0w);
      const double sr[4] = {step.s11r, step.s12r, step.s21r, step.s22r};
      const double si[4] = {step.s11i, step.s12i, step.s21i, step.s22i};
      detail::mul_accumulate<double>(sr, si, ur, ui);
      ls += step.scale;
      detail::renormalize<P>(ur, ui, ls);
    }
    for (int k = 0; k < 4; ++k) {
      batch.re[k][lane] = ur[k];
      batch.im[k][lane] = ui[k];
    }
    batch.log_scale[lane] = ls;
  }
}

}  // namespace

#ifdef CANSYS_BUILD_AVX2
void register_avx2_kernel(std::vector<Kernel>& out);
#endif
#ifdef CANSYS_BUILD_NEON
void register_neon_kernel(std::vector<Kernel>& out);
#endif

const Kernel& scalar_kernel() {
  static const Kernel k{"scalar", &propagate_scalar};
  return k;
}

const std::vector<Kernel>& available_kernels() {
  static const std::vector<Kernel> kernels = [] {
    std::vector<Kernel> out;
    out.push_back(scalar_kernel());
#ifdef CANSYS_BUILD_AVX2
    register_avx2_kernel(out);
#endif
#ifdef CANSYS_BUILD_NEON
    register_neon_kernel(out);
#endif
    return out;
  }();
  return kernels;
}

const Kernel& active_kernel() {
  static const Kernel& chosen = []() -> const Kernel& {
    const auto& all = available_kernels();
    if (const char* env = std::getenv("CANSYS_KERNEL")) {
      for (const auto& k : all)
        if (k.name == env) return k;
      return all.front();
    }
    return all.back();  // registration order: scalar first, best SIMD last
  }();
  return chosen;
}

}  // namespace cansys
