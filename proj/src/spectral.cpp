#include "cansys/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cansys {

double SpectralFunction::eval(double t) const {
  if (breakpoints.empty()) return 0;
  if (t <= breakpoints.front()) return values.front();
  if (t >= breakpoints.back()) return values.back();
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
  const double f = (t - breakpoints[j - 1]) / (breakpoints[j] - breakpoints[j - 1]);
  return values[j - 1] + f * (values[j] - values[j - 1]);
}

namespace {

// 4-point Gauss-Legendre on [-1, 1]
constexpr double kGaussX4[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                0.8611363115940526};
constexpr double kGaussW4[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                0.3478548451374538};
constexpr double kGaussX2[2] = {-0.5773502691896257, 0.5773502691896257};
constexpr double kGaussW2[2] = {1.0, 1.0};

}  // namespace

SpectralFunction stieltjes_invert(const BatchMSampler& m, std::span<const double> t_grid,
                                  const StieltjesOptions& opt) {
  if (t_grid.size() < 2) throw std::invalid_argument("stieltjes_invert: need at least two grid points");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i + 1]))
      throw std::invalid_argument("stieltjes_invert: grid must increase");
  if (t_grid.front() > 0 || t_grid.back() < 0)
    throw std::invalid_argument("stieltjes_invert: grid must bracket 0");
  if (opt.eps_schedule.size() < 2)
    throw std::invalid_argument("stieltjes_invert: eps schedule needs two entries");

  // Normalization anchor: 0 joins the grid so no cell straddles it.
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
    grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
  }
  const std::size_t ncells = grid.size() - 1;
  const std::size_t neps = opt.eps_schedule.size();

  const double* gx = opt.gauss_points >= 4 ? kGaussX4 : kGaussX2;
  const double* gw = opt.gauss_points >= 4 ? kGaussW4 : kGaussW2;
  const int gn = opt.gauss_points >= 4 ? 4 : 2;

  std::vector<cplx> zs;
  zs.reserve(ncells * neps * gn);
  for (std::size_t ie = 0; ie < neps; ++ie)
    for (std::size_t ic = 0; ic < ncells; ++ic)
      for (int ig = 0; ig < gn; ++ig) {
        const double mid = 0.5 * (grid[ic] + grid[ic + 1]);
        const double half = 0.5 * (grid[ic + 1] - grid[ic]);
        const double t = mid + half * gx[ig];
        zs.emplace_back(t, opt.eps_schedule[ie] * (1.0 + std::abs(t)));
      }

  const auto [vals, ok] = m(zs);
  if (vals.size() != zs.size()) throw std::runtime_error("stieltjes_invert: sampler size mismatch");
  for (std::size_t i = 0; i < ok.size(); ++i)
    if (!ok[i]) throw std::runtime_error("stieltjes_invert: m sampler failed to converge");

  // Per-cell integrals per eps, then 2-point Richardson in eps (linear model).
  std::vector<double> inc(ncells, 0.0);
  {
    std::vector<double> cell_eps(ncells * neps, 0.0);
    std::size_t idx = 0;
    for (std::size_t ie = 0; ie < neps; ++ie)
      for (std::size_t ic = 0; ic < ncells; ++ic) {
        const double half = 0.5 * (grid[ic + 1] - grid[ic]);
        double acc = 0;
        for (int ig = 0; ig < gn; ++ig, ++idx) acc += gw[ig] * vals[idx].imag();
        cell_eps[ie * ncells + ic] = acc * half / std::numbers::pi;
      }
    const double e1 = opt.eps_schedule[neps - 2], e2 = opt.eps_schedule[neps - 1];
    for (std::size_t ic = 0; ic < ncells; ++ic) {
      const double i1 = cell_eps[(neps - 2) * ncells + ic];
      const double i2 = cell_eps[(neps - 1) * ncells + ic];
      inc[ic] = (e1 * i2 - e2 * i1) / (e1 - e2);
    }
  }

  SpectralFunction out;
  for (double v : inc)
    if (v < 0) ++out.clamped_increments;
  for (double& v : inc) v = std::max(v, 0.0);

  // Atoms: a cell increment dwarfing both neighbors.
  const std::size_t zero_idx = static_cast<std::size_t>(
      std::find(grid.begin(), grid.end(), 0.0) - grid.begin());
  std::vector<bool> is_atom(ncells, false);
  for (std::size_t ic = 0; ic < ncells; ++ic) {
    const double left = ic > 0 ? inc[ic - 1] : 0.0;
    const double right = ic + 1 < ncells ? inc[ic + 1] : 0.0;
    const double floor_mass = 1e-12;
    if (inc[ic] > opt.atom_ratio * std::max({left, right, floor_mass})) {
      is_atom[ic] = true;
      out.atoms.emplace_back(0.5 * (grid[ic] + grid[ic + 1]), inc[ic]);
    }
  }
  // Atom pinned at the 0 grid point: the Perron boundary terms put half the
  // mass on each side; reassign the left half to the right cell so the table
  // obeys the left-continuous normalization rho(0) = 0.
  if (zero_idx > 0 && zero_idx < ncells && is_atom[zero_idx - 1] && is_atom[zero_idx]) {
    inc[zero_idx] += inc[zero_idx - 1];
    inc[zero_idx - 1] = 0.0;
    out.atoms.clear();
    for (std::size_t ic = 0; ic < ncells; ++ic)
      if (is_atom[ic] && ic != zero_idx - 1 && inc[ic] > 0)
        out.atoms.emplace_back(ic == zero_idx ? 0.0 : 0.5 * (grid[ic] + grid[ic + 1]), inc[ic]);
  }

  out.breakpoints = grid;
  out.values.assign(grid.size(), 0.0);
  for (std::size_t j = zero_idx; j + 1 < grid.size(); ++j)
    out.values[j + 1] = out.values[j] + inc[j];
  for (std::size_t j = zero_idx; j > 0; --j)
    out.values[j - 1] = out.values[j] - inc[j - 1];
  return out;
}

SpectralFunction stieltjes_invert(const MSampler& m, std::span<const double> t_grid,
                                  const StieltjesOptions& opt) {
  BatchMSampler batch = [&m](std::span<const cplx> zs) {
    std::vector<cplx> vals(zs.size());
    std::vector<bool> ok(zs.size(), true);
    for (std::size_t i = 0; i < zs.size(); ++i) vals[i] = m(zs[i]);
    return std::make_pair(std::move(vals), std::move(ok));
  };
  return stieltjes_invert(batch, t_grid, opt);
}

BatchMSampler numeric_m_sampler(const HamiltonianDescriptor& h, TruncationPolicy policy) {
  return [h, policy](std::span<const cplx> zs) {
    const auto samples = m_function_batch(h, zs, policy);
    std::vector<cplx> vals(samples.size());
    std::vector<bool> ok(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      vals[i] = samples[i].value;
      ok[i] = samples[i].converged;
    }
    return std::make_pair(std::move(vals), std::move(ok));
  };
}

// ---------------------------------------------------------------------------

double model_rho(const ModelFamily& family, double t) {
  using std::numbers::pi;
  const double s = std::abs(t);
  const double sign = t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0);
  switch (family.tag) {
    case ModelTag::ConstantZeta: {
      const double h0 = std::sqrt(std::max(triple_det(family.triple), 0.0));
      return sign * (h0 / family.triple.c) * s / pi;
    }
    case ModelTag::Step:
      return t > 0 ? 1.0 : 0.0;
    case ModelTag::Alpha: {
      const double a = family.alpha;
      if (a == 0) return sign * s / pi;
      if (a > 0) {
        const double nu = 1.0 / (2.0 + a);
        const double r = 0.5 * (2.0 + a) * std::sin(pi * nu) * d_nu(nu) * std::pow(s, 2.0 * nu) / pi;
        return sign * std::pow(family.d, nu) * r;
      }
      const double aa = -a;
      const double nu = 1.0 / (2.0 + aa);
      const double r = (2.0 + aa) / (2.0 + 2.0 * aa) * std::sin(pi * nu) * d_nu((1.0 + aa) * nu) *
                       std::pow(s, (2.0 + 2.0 * aa) * nu) / pi;
      return sign * std::pow(family.d, -nu) * r;
    }
    case ModelTag::DiracKappa: {
      const double ak = family.kappa > -0.5 ? family.kappa : -family.kappa;
      const double p = 1.0 + 2.0 * ak;
      return sign * std::pow(s, p) / (pi * p);
    }
  }
  throw std::logic_error("model_rho: unknown family");
}

bool model_has_atom_at_zero(const ModelFamily& family) { return family.tag == ModelTag::Step; }

TauberianReport tauberian_compare(const SpectralFunction& rho,
                                  const std::function<double(double)>& f,
                                  const ModelFamily& rho_model, std::span<const double> t_ladder,
                                  double tolerance) {
  TauberianReport rep;
  rep.tolerance = tolerance;
  rep.jump_form = model_has_atom_at_zero(rho_model);

  for (std::size_t i = 0; i + 1 < t_ladder.size(); ++i) {
    const double r0 = f(t_ladder[i]) / t_ladder[i];
    const double r1 = f(t_ladder[i + 1]) / t_ladder[i + 1];
    if (r1 > r0 * (1.0 + 1e-9)) rep.precondition_ok = false;
  }

  const double model_plus = rep.jump_form ? model_rho(rho_model, 1.0) - model_rho(rho_model, -1.0)
                                          : model_rho(rho_model, 1.0);
  const double model_minus = model_rho(rho_model, -1.0);
  for (double t : t_ladder) {
    TauberianRow row{t, 0.0, 0.0};
    const double scale = t * f(t);
    if (rep.jump_form) {
      row.ratio_plus = (rho.eval(t) - rho.eval(-t)) / (scale * model_plus);
    } else {
      row.ratio_plus = rho.eval(t) / (scale * model_plus);
      row.ratio_minus = rho.eval(-t) / (scale * model_minus);
    }
    rep.rows.push_back(row);
  }

  const auto row_err = [&rep](const TauberianRow& r) {
    double e = std::abs(r.ratio_plus - 1.0);
    if (!rep.jump_form) e = std::max(e, std::abs(r.ratio_minus - 1.0));
    return e;
  };
  if (rep.rows.size() >= 2) {
    const double e_last = row_err(rep.rows.back());
    const double e_prev = row_err(rep.rows[rep.rows.size() - 2]);
    rep.pass = e_last <= tolerance && e_prev <= tolerance;
  }
  return rep;
}

}  // namespace cansys
