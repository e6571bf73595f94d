#pragma once

#include <cmath>
#include <complex>

namespace cansys {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 2x2 complex matrix, row-major. Small enough to pass by value everywhere.
struct Mat2 {
  cplx a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};

  static Mat2 identity() { return {}; }

  cplx det() const { return a11 * a22 - a12 * a21; }

  Mat2 operator*(const Mat2& r) const {
    return {a11 * r.a11 + a12 * r.a21, a11 * r.a12 + a12 * r.a22,
            a21 * r.a11 + a22 * r.a21, a21 * r.a12 + a22 * r.a22};
  }

  Mat2 operator+(const Mat2& r) const {
    return {a11 + r.a11, a12 + r.a12, a21 + r.a21, a22 + r.a22};
  }

  Mat2 operator*(cplx s) const { return {s * a11, s * a12, s * a21, s * a22}; }

  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  Mat2 conj_transpose() const {
    return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)};
  }

  double max_abs() const {
    return std::max(std::max(std::abs(a11), std::abs(a12)),
                    std::max(std::abs(a21), std::abs(a22)));
  }
};

inline Mat2 symplectic_j() { return {0.0, -1.0, 1.0, 0.0}; }

}  // namespace cansys
