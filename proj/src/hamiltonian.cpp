#include "cansys/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cansys {

double DiagonalPowerForm::effective_scale() const {
  if (scale > 0) return scale;
  return std::sqrt(std::numbers::pi) / (std::pow(2.0, kappa) * std::tgamma(kappa + 0.5));
}

HamiltonianDescriptor make_constant(double a, double b, double c, double L) {
  return {L, ConstantForm{a, b, c}};
}

HamiltonianDescriptor make_power_law(double alpha) { return {kInf, PowerLawAlphaForm{alpha}}; }

HamiltonianDescriptor make_step() { return {kInf, StepForm{}}; }

HamiltonianDescriptor make_diagonal_power(double kappa, double scale) {
  if (!(std::abs(kappa) < 0.5))
    throw std::invalid_argument("diagonal_power: |kappa| < 1/2 required for local integrability");
  return {kInf, DiagonalPowerForm{kappa, scale}};
}

HamiltonianDescriptor make_piecewise(std::vector<double> breakpoints, std::vector<Triple> cells,
                                     double L) {
  if (breakpoints.size() != cells.size() + 1 || breakpoints.empty() || breakpoints.front() != 0.0)
    throw std::invalid_argument("piecewise: need breakpoints[0]=0 and one cell per interval");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw std::invalid_argument("piecewise: breakpoints must increase");
  const double domain = (L < 0) ? breakpoints.back() : L;
  if (domain != breakpoints.back())
    throw std::invalid_argument("piecewise: L must equal the last breakpoint");
  return {domain, PiecewiseConstantForm{std::move(breakpoints), std::move(cells)}};
}

HamiltonianDescriptor make_sampled(std::vector<double> x, std::vector<double> A,
                                   std::vector<double> B, std::vector<double> C) {
  if (x.size() < 2 || x.size() != A.size() || x.size() != B.size() || x.size() != C.size())
    throw std::invalid_argument("sampled: need matching x,A,B,C with at least two rows");
  if (x.front() != 0.0 || A.front() != 0.0 || B.front() != 0.0 || C.front() != 0.0)
    throw std::invalid_argument("sampled: first row must be x=0 with A=B=C=0");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1])) throw std::invalid_argument("sampled: grid must increase");
  const double L = x.back();
  return {L, SampledPrimitiveForm{std::move(x), std::move(A), std::move(B), std::move(C)}};
}

std::vector<double> HamiltonianDescriptor::structural_breakpoints() const {
  std::vector<double> out;
  if (std::holds_alternative<StepForm>(form)) out.push_back(1.0);
  if (const auto* p = std::get_if<PiecewiseConstantForm>(&form))
    for (double b : p->breakpoints)
      if (b > 0 && std::isfinite(b)) out.push_back(b);
  if (const auto* s = std::get_if<SampledPrimitiveForm>(&form))
    for (double b : s->x)
      if (b > 0) out.push_back(b);
  return out;
}

// ---------------------------------------------------------------------------

void ValidationReport::add(ValidationIssue::Severity sev, std::string code, std::string message) {
  if (sev == ValidationIssue::Severity::Error) valid = false;
  issues.push_back({sev, std::move(code), std::move(message)});
}

bool ValidationReport::has(const std::string& code) const {
  for (const auto& i : issues)
    if (i.code == code) return true;
  return false;
}

namespace {

constexpr double kPsdTol = 1e-12;

bool psd_ok(const Triple& t) {
  const double tr = t.a + t.c;
  if (t.a < -kPsdTol * tr || t.c < -kPsdTol * tr) return false;
  return triple_det(t) >= -kPsdTol * tr * tr;
}

}  // namespace

Triple clamp_psd(const Triple& t) {
  Triple out{std::max(t.a, 0.0), t.b, std::max(t.c, 0.0)};
  const double cap = std::sqrt(out.a * out.c);
  if (std::abs(out.b) > cap) out.b = std::copysign(cap, out.b);
  return out;
}

ValidationReport validate(const HamiltonianDescriptor& h) {
  ValidationReport rep;
  using Sev = ValidationIssue::Severity;

  if (!(h.L > 0)) rep.add(Sev::Error, "domain", "domain length must be positive");

  const auto check_cell = [&rep](const Triple& t, const std::string& where) {
    if (!psd_ok(t))
      rep.add(Sev::Error, "psd", where + ": not positive semidefinite (det=" +
                              std::to_string(triple_det(t)) + ")");
    if (t.a == 0 && t.b == 0 && t.c == 0)
      rep.add(Sev::Error, "zero_cell", where + ": H vanishes on a cell");
  };

  bool trace_divergent = false;
  bool trace_known = true;

  if (const auto* c = std::get_if<ConstantForm>(&h.form)) {
    check_cell({c->a, c->b, c->c}, "constant");
    if (c->b == 0 && c->c == 0)
      rep.add(Sev::Error, "b_c_zero", "b = c = 0 a.e. (excluded representation)");
    trace_divergent = (c->a + c->c > 0) && h.L == kInf;
  } else if (const auto* p = std::get_if<PowerLawAlphaForm>(&h.form)) {
    (void)p;
    trace_divergent = (h.L == kInf);
  } else if (std::holds_alternative<StepForm>(h.form)) {
    trace_divergent = (h.L == kInf);
  } else if (const auto* d = std::get_if<DiagonalPowerForm>(&h.form)) {
    if (!(std::abs(d->kappa) < 0.5))
      rep.add(Sev::Error, "kappa_range", "|kappa| < 1/2 required");
    trace_divergent = (h.L == kInf);
  } else if (const auto* p = std::get_if<PiecewiseConstantForm>(&h.form)) {
    if (p->breakpoints.size() != p->cells.size() + 1 || p->cells.empty()) {
      rep.add(Sev::Error, "shape", "breakpoints/cells size mismatch");
      return rep;
    }
    bool all_bc_zero = true;
    double trace_integral = 0;
    for (std::size_t i = 0; i < p->cells.size(); ++i) {
      check_cell(p->cells[i], "cell " + std::to_string(i));
      if (p->cells[i].b != 0 || p->cells[i].c != 0) all_bc_zero = false;
      const double w = p->breakpoints[i + 1] - p->breakpoints[i];
      const double tr = p->cells[i].a + p->cells[i].c;
      trace_integral += std::isfinite(w) ? tr * w : (tr > 0 ? kInf : 0.0);
    }
    if (all_bc_zero) rep.add(Sev::Error, "b_c_zero", "b = c = 0 a.e. (excluded representation)");
    trace_divergent = trace_integral == kInf;
  } else if (const auto* s = std::get_if<SampledPrimitiveForm>(&h.form)) {
    for (std::size_t i = 0; i + 1 < s->x.size(); ++i) {
      const double dx = s->x[i + 1] - s->x[i];
      const double da = s->A[i + 1] - s->A[i];
      const double db = s->B[i + 1] - s->B[i];
      const double dc = s->C[i + 1] - s->C[i];
      check_cell({da / dx, db / dx, dc / dx}, "sample cell " + std::to_string(i));
      if (da < 0) rep.add(Sev::Error, "A_monotone", "A must be nondecreasing");
      if (dc < 0) rep.add(Sev::Error, "C_monotone", "C must be nondecreasing");
      if (db * db > da * dc * (1 + 64 * kPsdTol) + kPsdTol)
        rep.add(Sev::Error, "B_increment", "|dB| > sqrt(dA dC) on sample cell " + std::to_string(i));
    }
    trace_known = false;
  }

  if (!trace_known) {
    rep.add(Sev::Warning, "limit_point_unverifiable",
            "finite sampled window: trace-integral divergence unverifiable");
  } else if (!trace_divergent) {
    rep.add(Sev::Warning, "limit_circle", "limit-circle: trace integral finite");
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

PrimitiveIntegrals primitives_constant(const ConstantForm& c, double x) {
  return {c.a * x, c.b * x, c.c * x};
}

PrimitiveIntegrals primitives_power(const PowerLawAlphaForm& p, double x) {
  if (p.alpha >= 0) return {std::pow(x, 1 + p.alpha), 0.0, x};
  const double aa = -p.alpha;
  return {x, 0.0, std::pow(x, 1 + aa)};
}

PrimitiveIntegrals primitives_step(double x) {
  return {std::max(x - 1.0, 0.0), 0.0, std::min(x, 1.0)};
}

PrimitiveIntegrals primitives_diag_power(const DiagonalPowerForm& d, double x) {
  const double s = d.effective_scale();
  const double pa = 1 - 2 * d.kappa, pc = 1 + 2 * d.kappa;
  return {std::pow(x, pa) / (s * s * pa), 0.0, s * s * std::pow(x, pc) / pc};
}

PrimitiveIntegrals primitives_piecewise(const PiecewiseConstantForm& p, double x) {
  PrimitiveIntegrals out;
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    const double lo = p.breakpoints[i];
    if (x <= lo) break;
    const double hi = std::min(x, p.breakpoints[i + 1]);
    const double w = hi - lo;
    out.A += p.cells[i].a * w;
    out.B += p.cells[i].b * w;
    out.C += p.cells[i].c * w;
  }
  return out;
}

PrimitiveIntegrals primitives_sampled(const SampledPrimitiveForm& s, double x) {
  const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
  if (it == s.x.begin()) return {};
  const std::size_t j = static_cast<std::size_t>(it - s.x.begin());
  if (j >= s.x.size()) return {s.A.back(), s.B.back(), s.C.back()};
  const std::size_t i = j - 1;
  const double f = (x - s.x[i]) / (s.x[j] - s.x[i]);
  return {s.A[i] + f * (s.A[j] - s.A[i]), s.B[i] + f * (s.B[j] - s.B[i]),
          s.C[i] + f * (s.C[j] - s.C[i])};
}

}  // namespace

PrimitiveIntegrals primitive_integrals(const HamiltonianDescriptor& h, double x) {
  if (x < 0 || (std::isfinite(h.L) && x > h.L))
    throw std::domain_error("primitive_integrals: x outside [0, L)");
  return std::visit(
      [x](const auto& form) -> PrimitiveIntegrals {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, ConstantForm>) return primitives_constant(form, x);
        if constexpr (std::is_same_v<T, PowerLawAlphaForm>) return primitives_power(form, x);
        if constexpr (std::is_same_v<T, StepForm>) return primitives_step(x);
        if constexpr (std::is_same_v<T, DiagonalPowerForm>) return primitives_diag_power(form, x);
        if constexpr (std::is_same_v<T, PiecewiseConstantForm>) return primitives_piecewise(form, x);
        if constexpr (std::is_same_v<T, SampledPrimitiveForm>) return primitives_sampled(form, x);
      },
      h.form);
}

std::vector<double> geometric_breakpoints(double x_lo, double x_hi, int cells_per_decade) {
  std::vector<double> pts;
  if (!(x_lo > 0) || !(x_hi > x_lo)) throw std::invalid_argument("geometric_breakpoints: bad range");
  const double decades = std::log10(x_hi / x_lo);
  const int n = std::max(1, static_cast<int>(std::ceil(decades * cells_per_decade)));
  pts.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) pts.push_back(x_lo * std::pow(x_hi / x_lo, double(i) / n));
  pts.front() = x_lo;
  pts.back() = x_hi;
  return pts;
}

HamiltonianDescriptor discretize(const HamiltonianDescriptor& h, const MeshPolicy& policy) {
  // Already piecewise constant: clip to the window, keep the cells verbatim.
  double window = policy.window;
  if (window <= 0) window = std::isfinite(h.L) ? h.L : 64.0;
  if (std::isfinite(h.L)) window = std::min(window, h.L);

  if (const auto* p = std::get_if<PiecewiseConstantForm>(&h.form)) {
    PiecewiseConstantForm out;
    out.breakpoints.push_back(0.0);
    for (std::size_t i = 0; i < p->cells.size(); ++i) {
      const double hi = std::min(p->breakpoints[i + 1], window);
      if (hi <= out.breakpoints.back()) break;
      out.breakpoints.push_back(hi);
      out.cells.push_back(p->cells[i]);
      if (hi == window) break;
    }
    if (out.breakpoints.back() < window) {  // extend the infinite tail into the window
      out.breakpoints.push_back(window);
      out.cells.push_back(p->cells.back());
    }
    return {out.breakpoints.back(), std::move(out)};
  }

  std::vector<double> pts;
  pts.push_back(0.0);
  const bool singular_origin = std::holds_alternative<DiagonalPowerForm>(h.form) ||
                               std::holds_alternative<PowerLawAlphaForm>(h.form);
  if (policy.grading == MeshPolicy::Grading::Geometric) {
    double x_min = policy.x_min;
    if (x_min <= 0) x_min = std::min(1e-8, window * 1e-6);
    auto geo = geometric_breakpoints(x_min, window, policy.cells_per_decade);
    pts.insert(pts.end(), geo.begin(), geo.end());
  } else {
    if (singular_origin)
      throw std::invalid_argument("discretize: geometric grading required for singular forms");
    const int n = std::max(1, policy.uniform_cells);
    for (int i = 1; i <= n; ++i) pts.push_back(window * double(i) / n);
  }

  // Meshes must align with structural breakpoints so integration stays exact.
  for (double b : h.structural_breakpoints())
    if (b > 0 && b < window) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  PiecewiseConstantForm out;
  out.breakpoints = pts;
  out.cells.reserve(pts.size() - 1);
  PrimitiveIntegrals prev{};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const PrimitiveIntegrals cur = primitive_integrals(h, pts[i]);
    const double w = pts[i] - pts[i - 1];
    const Triple cell =
        clamp_psd({(cur.A - prev.A) / w, (cur.B - prev.B) / w, (cur.C - prev.C) / w});
    out.cells.push_back(cell);
    prev = cur;
  }
  return {window, std::move(out)};
}

std::vector<Cell> to_cells(const HamiltonianDescriptor& pwc, double up_to) {
  const auto* p = std::get_if<PiecewiseConstantForm>(&pwc.form);
  if (!p) throw std::invalid_argument("to_cells: descriptor is not piecewise constant");
  std::vector<Cell> cells;
  cells.reserve(p->cells.size());
  for (std::size_t i = 0; i < p->cells.size() && up_to > p->breakpoints[i]; ++i) {
    const double hi = std::min(up_to, p->breakpoints[i + 1]);
    const double w = hi - p->breakpoints[i];
    if (!(w > 0) || !std::isfinite(w)) continue;
    const Triple t = clamp_psd(p->cells[i]);
    cells.push_back({t.a, t.b, t.c, w, std::sqrt(std::max(triple_det(t), 0.0)) * w});
  }
  return cells;
}

}  // namespace cansys
