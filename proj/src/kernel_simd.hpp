#pragma once

// Generic std::experimental::simd propagation kernel, instantiated per target
// (AVX2, NEON) in its own translation unit with the matching codegen flags.
// Per-lane arithmetic matches kernel_step.hpp's formulas; batches whose size
// is not a multiple of the vector width are finished on a padded stack copy so
// a lane's result never depends on batch grouping.

#include <experimental/simd>

#include "cansys/kernels.hpp"
#include "kernel_step.hpp"

namespace cansys::detail {

namespace stdx = std::experimental;

template <class Abi>
struct SimdPack {
  using V = stdx::simd<double, Abi>;
  using M = typename V::mask_type;
  static V broadcast(double x) { return V(x); }
  static V sin(const V& x) { return stdx::sin(x); }
  static V cos(const V& x) { return stdx::cos(x); }
  static V exp(const V& x) { return stdx::exp(x); }
  static V sqrt(const V& x) { return stdx::sqrt(x); }
  static V abs(const V& x) { return stdx::abs(x); }
  static V max(const V& x, const V& y) { return stdx::max(x, y); }
  static M less(const V& x, const V& y) { return x < y; }
  static V select(const M& m, const V& x, const V& y) {
    V out = y;
    stdx::where(m, out) = x;
    return out;
  }
};

template <class Abi>
void propagate_simd(const Cell* cells, std::size_t ncells, ZBatch& batch, std::size_t lane_lo,
                    std::size_t lane_hi) {
  using P = SimdPack<Abi>;
  using V = typename P::V;
  constexpr std::size_t W = V::size();

  const auto run_block = [&](double* zr_p, double* zi_p, double* ur_p[4], double* ui_p[4],
                             double* ls_p) {
    V zr, zi, ur[4], ui[4], ls;
    zr.copy_from(zr_p, stdx::element_aligned);
    zi.copy_from(zi_p, stdx::element_aligned);
    for (int k = 0; k < 4; ++k) {
      ur[k].copy_from(ur_p[k], stdx::element_aligned);
      ui[k].copy_from(ui_p[k], stdx::element_aligned);
    }
    ls.copy_from(ls_p, stdx::element_aligned);
    const V azi = P::abs(zi);

    StepEval<P> step;
    for (std::size_t ic = 0; ic < ncells; ++ic) {
      const Cell& cell = cells[ic];
      step.compute(zr, zi, azi, cell.a, cell.b, cell.c, cell.width, cell.h0w);
      const V sr[4] = {step.s11r, step.s12r, step.s21r, step.s22r};
      const V si[4] = {step.s11i, step.s12i, step.s21i, step.s22i};
      mul_accumulate<V>(sr, si, ur, ui);
      ls = ls + step.scale;
      renormalize<P>(ur, ui, ls);
    }

    for (int k = 0; k < 4; ++k) {
      ur[k].copy_to(ur_p[k], stdx::element_aligned);
      ui[k].copy_to(ui_p[k], stdx::element_aligned);
    }
    ls.copy_to(ls_p, stdx::element_aligned);
  };

  std::size_t lane = lane_lo;
  std::vector<double> zr_s(batch.size()), zi_s(batch.size());
  for (std::size_t i = lane_lo; i < lane_hi; ++i) {
    zr_s[i] = batch.z[i].real();
    zi_s[i] = batch.z[i].imag();
  }
  for (; lane + W <= lane_hi; lane += W) {
    double* ur_p[4];
    double* ui_p[4];
    for (int k = 0; k < 4; ++k) {
      ur_p[k] = batch.re[k].data() + lane;
      ui_p[k] = batch.im[k].data() + lane;
    }
    run_block(zr_s.data() + lane, zi_s.data() + lane, ur_p, ui_p, batch.log_scale.data() + lane);
  }
  if (lane < lane_hi) {
    // Padded tail: replicate the last lane so every slot runs the same math.
    const std::size_t rem = lane_hi - lane;
    double zr_t[W], zi_t[W], ur_t[4][W], ui_t[4][W], ls_t[W];
    for (std::size_t j = 0; j < W; ++j) {
      const std::size_t src = lane + std::min(j, rem - 1);
      zr_t[j] = zr_s[src];
      zi_t[j] = zi_s[src];
      ls_t[j] = batch.log_scale[src];
      for (int k = 0; k < 4; ++k) {
        ur_t[k][j] = batch.re[k][src];
        ui_t[k][j] = batch.im[k][src];
      }
    }
    double* ur_p[4] = {ur_t[0], ur_t[1], ur_t[2], ur_t[3]};
    double* ui_p[4] = {ui_t[0], ui_t[1], ui_t[2], ui_t[3]};
    run_block(zr_t, zi_t, ur_p, ui_p, ls_t);
    for (std::size_t j = 0; j < rem; ++j) {
      batch.log_scale[lane + j] = ls_t[j];
      for (int k = 0; k < 4; ++k) {
        batch.re[k][lane + j] = ur_t[k][j];
        batch.im[k][lane + j] = ui_t[k][j];
      }
    }
  }
}

}  // namespace cansys::detail
