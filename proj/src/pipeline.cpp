#include "usd/pipeline.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "usd/closed_form.hpp"
#include "usd/reductions.hpp"
#include "usd/solver4d.hpp"

namespace usd {

namespace {

std::optional<SolverOutcome> closed_form_outcome(const std::optional<ClosedFormResult>& r,
                                                 const WeightedDensityPair& s) {
  if (!r) return std::nullopt;
  Finalized f = certify(r->measurement, s, r->branch);
  if (auto* out = std::get_if<SolverOutcome>(&f)) {
    out->boundary = r->boundary;
    return *out;
  }
  return std::nullopt;
}

SolverOutcome solve_compressed(const WeightedDensityPair& c, const DispatchOptions& opts,
                               std::vector<std::string>& steps) {
  const Index n = c.dim();
  if (n == 0) {
    steps.push_back("[v] empty support: trivial measurement");
    SolverOutcome out;
    out.measurement = {Matrix(0, 0), Matrix(0, 0), Matrix(0, 0)};
    out.branch = Branch::trivial;
    return out;
  }
  if (auto r = closed_form_outcome(try_single_state_detection(c), c)) {
    steps.push_back("[v] single-state detection is optimal");
    return *r;
  }
  if (auto r = closed_form_outcome(try_fidelity_form(c), c)) {
    steps.push_back("[v] fidelity form is optimal");
    return *r;
  }
  steps.push_back("[v] no closed form applies");
  if (n == 4 && c.support1().dim() == 2 && c.support2().dim() == 2 && is_strictly_skew(c)) {
    try {
      SolverOutcome r = solve_4d(c);
      steps.push_back("[vi] four-dimensional solver: " + to_string(r.branch));
      return r;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_solution_found) throw;
      steps.push_back("[vi] four-dimensional solver found no certified candidate");
    }
  } else {
    steps.push_back("[iii]/[iv] unsupported for this dimension");
  }
  if (!opts.allow_oracle_fallback) raise(ErrorKind::no_solution_found, "no branch certified an optimum");
  steps.push_back("[viii] bounds only; falling back to the reference optimizer");
  OracleResult o = oracle_optimize(c, opts.oracle);
  SolverOutcome out;
  out.measurement = o.measurement;
  out.success = o.success;
  out.branch = Branch::oracle_fallback;
  out.status = Status::best_known;
  return out;
}

}  // namespace

SolverOutcome dispatch(const WeightedDensityPair& s, const DispatchOptions& opts) {
  std::vector<std::string> steps;
  std::vector<std::string> warnings;
  const bool skew = is_strictly_skew(s);
  steps.push_back(std::string("[i] strictly skew: ") + (skew ? "yes" : "no"));

  std::optional<ReductionRecord> record;
  const WeightedDensityPair* reduced = &s;
  if (!skew) {
    record = reduce_fully(s);
    warnings.insert(warnings.end(), record->warnings.begin(), record->warnings.end());
    steps.push_back("[ii] reduced; lifted offset " + std::to_string(record->lifted_offset));
    reduced = &record->reduced_pair;
  }
  const Matrix basis = reduced->support_total().basis();
  const WeightedDensityPair compressed = compress(*reduced, basis);

  SolverOutcome inner = solve_compressed(compressed, opts, steps);
  const MeasurementClassTag tag =
      compressed.dim() == 0 ? MeasurementClassTag{} : classify(inner.measurement, compressed).tag;

  UsdMeasurement m = compressed.dim() == 0
                         ? UsdMeasurement{Matrix::Zero(s.dim(), s.dim()), Matrix::Zero(s.dim(), s.dim()),
                                          Matrix::Identity(s.dim(), s.dim())}
                         : embed(inner.measurement, basis);
  if (record) m = lift_measurement(m, *record);

  SolverOutcome out;
  out.measurement = std::move(m);
  out.tag = tag;
  out.success = success_probability(out.measurement, s);
  out.branch = inner.branch;
  out.status = inner.status;
  out.boundary = inner.boundary;
  out.warnings = std::move(warnings);
  out.warnings.insert(out.warnings.end(), inner.warnings.begin(), inner.warnings.end());
  out.steps = std::move(steps);
  try {
    out.report = check_optimality(out.measurement, s);
    if (out.status == Status::optimal && !out.report->is_optimal)
      out.warnings.push_back("lifted measurement misses the optimality conditions on the original pair");
  } catch (const Error& e) {
    out.warnings.push_back(std::string("optimality check failed: ") + e.what());
  }
  if (opts.with_certificate && out.status == Status::optimal) {
    try {
      out.certificate = build_certificate(out.measurement, s);
    } catch (const Error& e) {
      out.warnings.push_back(std::string("certificate unavailable: ") + e.what());
    }
  }
  return out;
}

double single_detection_lower_bound(const WeightedDensityPair& s) {
  const ReductionRecord rec = reduce_fully(s);
  return rec.lifted_offset + single_detection_value(rec.reduced_pair);
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  std::vector<double> g;
  if (steps <= 0) return g;
  if (steps == 1) return {lo};
  for (int i = 0; i < steps; ++i) g.push_back(lo + (hi - lo) * i / (steps - 1));
  return g;
}

std::vector<SweepRow> sweep(const Matrix& rho1, const Matrix& rho2, const std::vector<double>& grid,
                            const DispatchOptions& opts, const ToleranceContext& tol) {
  // Supports do not depend on the prior, so one reduction fixes the bound triangle.
  const WeightedDensityPair mid = WeightedDensityPair::from_states(rho1, rho2, 0.5, tol);
  const ReductionRecord rec = reduce_fully(mid);
  const Matrix r1 = rec.xi * rho1 * rec.xi;
  const Matrix r2 = rec.xi * rho2 * rec.xi;
  const ProbabilityWindow left = single_detection_window(r1, r2, 2, tol);
  const ProbabilityWindow right = single_detection_window(r1, r2, 1, tol);
  const double a = left.empty ? 0.0 : left.upper;
  const double b = right.empty ? 1.0 : right.lower;
  auto lower_at = [&](double p) {
    return single_detection_lower_bound(WeightedDensityPair::from_states(rho1, rho2, p, tol));
  };
  const double la = lower_at(a);
  const double lb = lower_at(b);

  std::vector<SweepRow> rows(grid.size());
  auto work = [&](std::size_t i) {
    const double p = grid[i];
    const WeightedDensityPair s = WeightedDensityPair::from_states(rho1, rho2, p, tol);
    DispatchOptions o = opts;
    o.with_certificate = false;
    const SolverOutcome out = dispatch(s, o);
    SweepRow row{p, out.success, out.tag, out.branch, out.status, lower_at(p), 0.0};
    row.upper = (p <= a || p >= b || a >= b) ? row.lower : la + (lb - la) * (p - a) / (b - a);
    row.upper = std::max(row.upper, row.lower);
    rows[i] = row;
  };
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < grid.size(); i += workers) work(i);
    }));
  for (auto& j : jobs) j.get();
  return rows;
}

std::vector<ClassBoundary> class_boundaries(const std::vector<SweepRow>& rows) {
  std::vector<ClassBoundary> out;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].tag == rows[i - 1].tag)) out.push_back({rows[i - 1].p1, rows[i].p1, rows[i - 1].tag, rows[i].tag});
  return out;
}

}  // namespace usd
