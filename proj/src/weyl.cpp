#include "cansys/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cansys/parallel.hpp"
#include "cansys/roots.hpp"

namespace cansys {

namespace {

constexpr cplx kXi1{0.0, -1.0};
constexpr cplx kXi2{0.0, -2.0};

struct LaneState {
  cplx prev_mid{0.0};
  bool has_prev = false;
};

/// Exact-average cells of h over (x_lo, x_hi], geometric spacing plus the
/// descriptor's structural breakpoints.
void append_cells(const HamiltonianDescriptor& h, double x_lo, double x_hi, double x_min, int cpd,
                  std::span<const double> structural, std::vector<Cell>& out) {
  std::vector<double> pts;
  pts.push_back(x_lo);
  const double geo_lo = std::max(x_lo, x_min);
  if (x_hi > geo_lo) {
    auto g = geometric_breakpoints(geo_lo, x_hi, cpd);
    for (double p : g)
      if (p > x_lo) pts.push_back(p);
  } else {
    pts.push_back(x_hi);
  }
  for (double b : structural)
    if (b > x_lo && b < x_hi) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.back() != x_hi) pts.push_back(x_hi);

  PrimitiveIntegrals prev = primitive_integrals(h, pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const PrimitiveIntegrals cur = primitive_integrals(h, pts[i]);
    const double w = pts[i] - pts[i - 1];
    const Triple t =
        clamp_psd({(cur.A - prev.A) / w, (cur.B - prev.B) / w, (cur.C - prev.C) / w});
    out.push_back({t.a, t.b, t.c, w, std::sqrt(std::max(triple_det(t), 0.0)) * w});
    prev = cur;
  }
}

/// Cells of a piecewise-constant descriptor over (x_lo, x_hi]; splitting a
/// constant cell at a checkpoint is exact.
void append_pwc_cells(const PiecewiseConstantForm& p, double L, double x_lo, double x_hi,
                      std::vector<Cell>& out) {
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    const double lo = std::max(p.breakpoints[i], x_lo);
    const double hi = std::min(p.breakpoints[i + 1], x_hi);
    if (hi <= lo) continue;
    const Triple t = clamp_psd(p.cells[i]);
    out.push_back({t.a, t.b, t.c, hi - lo, std::sqrt(std::max(triple_det(t), 0.0)) * (hi - lo)});
  }
  (void)L;
}

double auto_x_min(const HamiltonianDescriptor& h, double zmax, double x0) {
  const double target = std::min(1e-9, 1e-5 / std::max(1.0, zmax));
  double lo = std::min(1e-12, x0 / 1024.0);
  // head cells must carry negligible |z| * int tr H
  try {
    auto trace_primitive = [&h](double x) {
      const auto p = primitive_integrals(h, x);
      return p.A + p.C;
    };
    if (trace_primitive(lo) > target) {
      const double solved =
          solve_increasing(trace_primitive, target, std::min(1e-6, x0 / 16.0), 1e-3);
      lo = std::min(lo, solved);
    }
  } catch (const std::exception&) {
    // keep the default floor
  }
  return std::max(lo, 1e-300);
}

}  // namespace

std::vector<MFunctionSample> m_function_batch(const HamiltonianDescriptor& h,
                                              std::span<const cplx> zs,
                                              const TruncationPolicy& policy) {
  std::vector<MFunctionSample> results(zs.size());
  if (zs.empty()) return results;
  for (const cplx& z : zs)
    if (z.imag() == 0.0) throw std::domain_error("m_function: real spectral parameter");

  // Lanes run in the upper half-plane; reflected lanes are conjugated on exit.
  std::vector<cplx> z_up(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i)
    z_up[i] = zs[i].imag() > 0 ? zs[i] : std::conj(zs[i]);

  const bool finite_L = std::isfinite(h.L);
  double x0 = policy.x0;
  if (x0 <= 0) x0 = finite_L ? h.L / 2 : 1.0;

  const auto* pwc = std::get_if<PiecewiseConstantForm>(&h.form);
  const auto structural = h.structural_breakpoints();
  double zmax = 0;
  for (const cplx& z : z_up) zmax = std::max(zmax, std::abs(z));
  const double x_min = pwc ? 0.0 : auto_x_min(h, zmax, x0);
  const int cpd = policy.mesh.cells_per_decade;

  const std::size_t max_chunk = 2048;
  const std::size_t n_chunks = (zs.size() + max_chunk - 1) / max_chunk;

  parallel_for(n_chunks, [&](std::size_t chunk_lo, std::size_t chunk_hi) {
    std::vector<Cell> cells;
    for (std::size_t chunk = chunk_lo; chunk < chunk_hi; ++chunk) {
      const std::size_t lane_base = chunk * max_chunk;
      const std::size_t lane_cnt = std::min(max_chunk, zs.size() - lane_base);

      ZBatch batch;
      batch.reset(std::span<const cplx>(z_up.data() + lane_base, lane_cnt));
      std::vector<LaneState> st(lane_cnt);
      std::vector<std::size_t> orig(lane_cnt);
      for (std::size_t i = 0; i < lane_cnt; ++i) orig[i] = lane_base + i;

      std::size_t active = lane_cnt;
      double x_prev = 0;
      for (int k = 0; k <= policy.k_max && active > 0; ++k) {
        double x_k = finite_L ? h.L * (1.0 - std::ldexp(1.0, -(k + 1))) : x0 * std::ldexp(1.0, k);
        if (finite_L && k == policy.k_max) x_k = h.L;
        cells.clear();
        if (pwc)
          append_pwc_cells(*pwc, h.L, x_prev, x_k, cells);
        else
          append_cells(h, x_prev, x_k, x_min, cpd, structural, cells);
        if (!cells.empty())
          active_kernel().propagate(cells.data(), cells.size(), batch, 0, active);

        for (std::size_t lane = 0; lane < active;) {
          const Mat2 u = batch.matrix(lane);
          const cplx m1 = -(u.a11 * kXi1 + u.a21) / (u.a12 * kXi1 + u.a22);
          const cplx m2 = -(u.a11 * kXi2 + u.a21) / (u.a12 * kXi2 + u.a22);
          const cplx mid = 0.5 * (m1 + m2);
          const double diam = std::abs(m1 - m2);
          const bool finite_vals = std::isfinite(mid.real()) && std::isfinite(mid.imag());
          double radius = kInf;
          if (finite_vals) {
            radius = st[lane].has_prev ? diam + std::abs(mid - st[lane].prev_mid) : kInf;
            st[lane].prev_mid = mid;
            st[lane].has_prev = true;
          } else {
            st[lane].has_prev = false;
          }

          MFunctionSample& out = results[orig[lane]];
          if (finite_vals && radius < out.radius) {
            out.value = mid;
            out.radius = radius;
            out.truncation = x_k;
          }
          const bool done =
              finite_vals && radius <= policy.tolerance * std::max(1.0, std::abs(mid));
          if (done) {
            out.converged = true;
            out.value = mid;
            out.radius = radius;
            out.truncation = x_k;
            --active;
            batch.swap_lanes(lane, active);
            std::swap(st[lane], st[active]);
            std::swap(orig[lane], orig[active]);
          } else {
            ++lane;
          }
        }
        x_prev = x_k;
        if (finite_L && x_k >= h.L) break;
      }
    }
  });

  for (std::size_t i = 0; i < zs.size(); ++i) {
    results[i].z = zs[i];
    if (zs[i].imag() < 0) results[i].value = std::conj(results[i].value);
    if (!std::isfinite(results[i].radius)) {
      results[i].converged = false;
      results[i].radius = kInf;
    }
  }
  return results;
}

MFunctionSample m_function(const HamiltonianDescriptor& h, cplx z, const TruncationPolicy& policy) {
  const cplx zz[1] = {z};
  return m_function_batch(h, zz, policy).front();
}

// ---------------------------------------------------------------------------
// Model families

ModelFamily ModelFamily::constant(cplx zeta0) {
  ModelFamily f;
  f.tag = ModelTag::ConstantZeta;
  f.zeta0 = zeta0;
  f.triple = constant_from_m(zeta0);
  return f;
}

ModelFamily ModelFamily::constant(const Triple& t) {
  if (!(t.c > 0)) throw std::invalid_argument("ConstantZeta: c0 > 0 required");
  ModelFamily f;
  f.tag = ModelTag::ConstantZeta;
  f.triple = t;
  const double h0 = std::sqrt(std::max(triple_det(t), 0.0));
  f.zeta0 = cplx(-t.b / t.c, h0 / t.c);
  return f;
}

ModelFamily ModelFamily::alpha_family(double alpha, double d) {
  ModelFamily f;
  f.tag = ModelTag::Alpha;
  f.alpha = alpha;
  f.d = d;
  return f;
}

ModelFamily ModelFamily::step() {
  ModelFamily f;
  f.tag = ModelTag::Step;
  return f;
}

ModelFamily ModelFamily::dirac(double kappa) {
  const double frac = kappa + 0.5;
  if (frac == std::floor(frac)) throw std::invalid_argument("DiracKappa: kappa + 1/2 integer");
  ModelFamily f;
  f.tag = ModelTag::DiracKappa;
  f.kappa = kappa;
  return f;
}

double d_nu(double nu) {
  if (!(nu > 0) || !(nu < 1)) throw std::invalid_argument("d_nu: nu in (0,1) required");
  const double log_d = nu * std::log1p(-nu) + std::lgamma(1 - nu) - (1 - nu) * std::log(nu) -
                       std::lgamma(nu);
  return std::exp(log_d);
}

namespace {

cplx model_m_upper(const ModelFamily& f, cplx z) {
  using std::numbers::pi;
  switch (f.tag) {
    case ModelTag::ConstantZeta:
      return f.zeta0;
    case ModelTag::Step:
      return -1.0 / z;
    case ModelTag::Alpha: {
      const double a = f.alpha;
      if (a == 0) return cplx(0.0, 1.0);
      if (a > 0) {
        const double nu = 1.0 / (2.0 + a);
        const cplx val = -d_nu(nu) * std::exp(cplx(0.0, -pi * nu)) * std::pow(z, -a / (2.0 + a));
        return std::pow(f.d, nu) * val;
      }
      const double aa = -a;
      const double nu = 1.0 / (2.0 + aa);
      const cplx val =
          d_nu((1.0 + aa) * nu) * std::exp(cplx(0.0, pi * nu)) * std::pow(z, aa / (2.0 + aa));
      return std::pow(f.d, -nu) * val;
    }
    case ModelTag::DiracKappa: {
      const double ak = f.kappa > -0.5 ? f.kappa : -f.kappa;
      const cplx mz2 = -z * z;
      return -std::pow(mz2, ak + 0.5) / (std::cos(pi * f.kappa) * z);
    }
  }
  throw std::logic_error("model_m: unknown family");
}

}  // namespace

cplx model_m(const ModelFamily& family, cplx z) {
  if (z.imag() == 0.0) throw std::domain_error("model_m: real spectral parameter");
  if (z.imag() > 0) return model_m_upper(family, z);
  return std::conj(model_m_upper(family, std::conj(z)));
}

Triple constant_from_m(cplx zeta0) {
  if (zeta0.imag() < 0) throw std::invalid_argument("constant_from_m: Im zeta0 >= 0 required");
  const double n = std::norm(zeta0) + 1.0;
  return {std::norm(zeta0) / n, -zeta0.real() / n, 1.0 / n};
}

cplx hypergeometric_0F1(double c, cplx w) {
  if (c <= 0 && c == std::floor(c))
    throw std::invalid_argument("0F1: c must not be a nonpositive integer");
  cplx term{1.0};
  cplx sum{1.0};
  for (int k = 0; k < 10000; ++k) {
    term *= w / ((c + k) * (k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) return sum;
  }
  throw SeriesCapExceeded("0F1: term cap exceeded; rescale the argument");
}

AlphaSolutions model_solutions_alpha(double alpha, cplx zeta, double x) {
  if (alpha < 0) throw std::invalid_argument("model_solutions_alpha: alpha >= 0 required");
  if (x < 0) throw std::invalid_argument("model_solutions_alpha: x >= 0 required");
  const double nu = 1.0 / (2.0 + alpha);
  const cplx q = (nu * nu - nu) * zeta * std::pow(x, 1.0 / nu);
  return {hypergeometric_0F1(1.0 - nu, q), x * hypergeometric_0F1(1.0 + nu, q)};
}

double kappa_reduced_order(double kappa) { return kappa - std::floor(kappa + 0.5); }

cplx kappa_reduce(const MSampler& m0, double kappa, cplx z) {
  const double frac = kappa + 0.5;
  if (frac == std::floor(frac)) throw std::invalid_argument("kappa_reduce: kappa + 1/2 integer");
  const double fl = std::floor(frac);
  return std::pow(z, 2.0 * fl) * m0(z);
}

cplx sqrt_uhp(cplx zeta) {
  if (zeta.imag() == 0.0 && zeta.real() >= 0.0)
    throw std::domain_error("sqrt_uhp: branch ambiguous on [0, inf)");
  const cplx r = std::sqrt(zeta);
  return r.imag() >= 0 ? r : -r;
}

cplx dirac_to_schrodinger_m(const MSampler& m, cplx zeta) {
  const cplx z = sqrt_uhp(zeta);
  return z * m(z);
}

}  // namespace cansys
