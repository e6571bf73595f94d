#pragma once

// Shared cell-step math for the propagation kernels. One cell of a canonical
// system JY' = zHY with constant H0 advances the fundamental matrix by
//
//   U_cell = exp(-z J H0 w) = cos(z h0 w) I - z w sinc(z h0 w) J H0,
//
// h0 = sqrt(det H0) >= 0, sinc(t) = sin(t)/t. Everything here works on the
// rescaled matrix e^{-s} U_cell with s = |Im(z h0 w)|, so no intermediate can
// overflow no matter how large Im(z) * width grows; s is accumulated into the
// lane's log_scale. Mobius ratios downstream cancel the scale.
//
// The formulas are written against a minimal "lane pack" concept (see
// ScalarPack below and the SIMD packs in the kernel TUs) so the scalar
// reference kernel and the SIMD kernels run literally the same arithmetic.

#include <cmath>

namespace cansys::detail {

// Requirements on P: value type P::V supporting +,-,*,/ and the statics
// sin/cos/exp/sqrt/abs/max/select/less/broadcast.
template <class P>
struct StepEval {
  using V = typename P::V;

  // Outputs: the rescaled step entries and the scale s spent on this cell.
  V s11r, s11i, s12r, s12i, s21r, s21i, s22r, s22i, scale;

  void compute(V zr, V zi, V azi, double a, double b, double c, double width, double h0w) {
    const V wr = zr * P::broadcast(h0w);
    const V wi = zi * P::broadcast(h0w);
    const V s = azi * P::broadcast(h0w);  // |Im w|
    const V em2 = P::exp(P::broadcast(-2.0) * s);
    const V half = P::broadcast(0.5);
    const V hp = half * (P::broadcast(1.0) + em2);
    const V hm = half * (P::broadcast(1.0) - em2);
    const V snr = P::sin(wr), csr = P::cos(wr);
    // sign of Im w folded into hm via sign(zi)
    const V sg = P::select(P::less(zi, P::broadcast(0.0)), P::broadcast(-1.0), P::broadcast(1.0));
    const V hms = sg * hm;

    // e^{-s} cos(w), e^{-s} sin(w)
    const V cos_r = csr * hp, cos_i = P::broadcast(-1.0) * snr * hms;
    const V sin_r = snr * hp, sin_i = csr * hms;

    // e^{-s} sinc(w): direct quotient, power series near w = 0.
    const V w2r = wr * wr - wi * wi, w2i = P::broadcast(2.0) * wr * wi;
    const V wabs2 = wr * wr + wi * wi;
    const V inv = P::broadcast(1.0) / wabs2;
    const V sinc_dir_r = (sin_r * wr + sin_i * wi) * inv;
    const V sinc_dir_i = (sin_i * wr - sin_r * wi) * inv;

    const V c6 = P::broadcast(-1.0 / 6.0), c120 = P::broadcast(1.0 / 120.0);
    const V w4r = w2r * w2r - w2i * w2i, w4i = P::broadcast(2.0) * w2r * w2i;
    const V em1 = P::sqrt(em2);  // e^{-s}
    const V ser_r = (P::broadcast(1.0) + c6 * w2r + c120 * w4r) * em1;
    const V ser_i = (c6 * w2i + c120 * w4i) * em1;

    const auto small = P::less(wabs2, P::broadcast(1e-8));
    const V sinc_r = P::select(small, ser_r, sinc_dir_r);
    const V sinc_i = P::select(small, ser_i, sinc_dir_i);

    // p = width * z * sinc(w) * e^{-s}
    const V vw = P::broadcast(width);
    const V pr = vw * (zr * sinc_r - zi * sinc_i);
    const V pi = vw * (zr * sinc_i + zi * sinc_r);

    const V vb = P::broadcast(b), vc = P::broadcast(c), va = P::broadcast(-a);
    s11r = cos_r + vb * pr;
    s11i = cos_i + vb * pi;
    s12r = vc * pr;
    s12i = vc * pi;
    s21r = va * pr;
    s21i = va * pi;
    s22r = cos_r - vb * pr;
    s22i = cos_i - vb * pi;
    scale = s;
  }
};

// 2x2 complex multiply U <- S * U on lane-pack values.
template <class V>
inline void mul_accumulate(const V sr[4], const V si[4], V ur[4], V ui[4]) {
  V nr[4], ni[4];
  // n11 = s11 u11 + s12 u21 ; n12 = s11 u12 + s12 u22
  // n21 = s21 u11 + s22 u21 ; n22 = s21 u12 + s22 u22
  auto cmul_add = [](V ar, V ai, V br, V bi, V cr, V ci, V dr, V di, V& outr, V& outi) {
    outr = ar * br - ai * bi + cr * dr - ci * di;
    outi = ar * bi + ai * br + cr * di + ci * dr;
  };
  cmul_add(sr[0], si[0], ur[0], ui[0], sr[1], si[1], ur[2], ui[2], nr[0], ni[0]);
  cmul_add(sr[0], si[0], ur[1], ui[1], sr[1], si[1], ur[3], ui[3], nr[1], ni[1]);
  cmul_add(sr[2], si[2], ur[0], ui[0], sr[3], si[3], ur[2], ui[2], nr[2], ni[2]);
  cmul_add(sr[2], si[2], ur[1], ui[1], sr[3], si[3], ur[3], ui[3], nr[3], ni[3]);
  for (int k = 0; k < 4; ++k) {
    ur[k] = nr[k];
    ui[k] = ni[k];
  }
}

inline constexpr double kRescaleHi = 1e100;
inline constexpr double kRescaleLo = 1e-100;
inline constexpr double kRescaleFactor = 1e-100;
// ln(1e100)
inline constexpr double kRescaleLog = 230.25850929940457;

// Two-sided renormalization keeping max |entry| inside [1e-100, 1e100].
template <class P>
inline void renormalize(typename P::V ur[4], typename P::V ui[4], typename P::V& ls) {
  using V = typename P::V;
  V m = P::abs(ur[0]);
  m = P::max(m, P::abs(ui[0]));
  for (int k = 1; k < 4; ++k) {
    m = P::max(m, P::abs(ur[k]));
    m = P::max(m, P::abs(ui[k]));
  }
  const auto big = P::less(P::broadcast(kRescaleHi), m);
  const auto tiny = P::less(m, P::broadcast(kRescaleLo));
  const V fac = P::select(big, P::broadcast(kRescaleFactor),
                          P::select(tiny, P::broadcast(1.0 / kRescaleFactor), P::broadcast(1.0)));
  const V dls = P::select(big, P::broadcast(kRescaleLog),
                          P::select(tiny, P::broadcast(-kRescaleLog), P::broadcast(0.0)));
  for (int k = 0; k < 4; ++k) {
    ur[k] = ur[k] * fac;
    ui[k] = ui[k] * fac;
  }
  ls = ls + dls;
}

struct ScalarPack {
  using V = double;
  using M = bool;
  static double broadcast(double x) { return x; }
  static double sin(double x) { return std::sin(x); }
  static double cos(double x) { return std::cos(x); }
  static double exp(double x) { return std::exp(x); }
  static double sqrt(double x) { return std::sqrt(x); }
  static double abs(double x) { return std::fabs(x); }
  static double max(double x, double y) { return std::fmax(x, y); }
  static bool less(double x, double y) { return x < y; }
  static double select(bool m, double x, double y) { return m ? x : y; }
};

}  // namespace cansys::detail
