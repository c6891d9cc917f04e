#include "usd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace usd {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& field, const std::string& what) {
  raise(ErrorKind::malformed_input, field + ": " + what);
}

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) malformed(field, "expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

const json& member(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) malformed(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

void check_density(const Matrix& rho, const std::string& field, const ToleranceContext& tol) {
  if (!is_hermitian(rho, tol.hermitian)) malformed(field, "not Hermitian");
  PsdCheck c = check_psd(rho, tol);
  if (!c.holds) malformed(field, "not positive semidefinite (min eigenvalue " + format_number(c.min_eigenvalue) + ")");
  double tr = real_trace(rho);
  if (std::abs(tr - 1.0) > tol.equality)
    malformed(field, "trace " + format_number(tr) + " differs from 1");
}

json condition_json(const ConditionResult& c) { return {{"holds", c.holds}, {"residual", c.residual}}; }

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) malformed(field, "expected a non-empty array of rows");
  const auto n = static_cast<Index>(j.size());
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const json& row = j[i];
    const std::string rf = field + "[" + std::to_string(i) + "]";
    if (!row.is_array()) malformed(rf, "expected an array");
    if (static_cast<Index>(row.size()) != n)
      malformed(rf, "has " + std::to_string(row.size()) + " entries, expected " + std::to_string(n));
    for (Index k = 0; k < n; ++k) {
      const json& e = row[k];
      const std::string ef = rf + "[" + std::to_string(k) + "]";
      if (e.is_number()) {
        m(i, k) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, k) = cplx(number_at(e[0], ef + "[0]"), number_at(e[1], ef + "[1]"));
      } else {
        malformed(ef, "expected [re, im]");
      }
    }
  }
  return m;
}

WeightedDensityPair Problem::pair(const ToleranceContext& tol) const {
  if (!p1) raise(ErrorKind::malformed_input, "p1: missing field");
  return pair_at(*p1, tol);
}

WeightedDensityPair Problem::pair_at(double p, const ToleranceContext& tol) const {
  if (!(p >= 0.0 && p <= 1.0)) raise(ErrorKind::malformed_input, "p1: must lie in [0, 1]");
  return WeightedDensityPair::from_states(rho1, rho2, p, tol);
}

Problem problem_from_json(const json& j, const ToleranceContext& tol) {
  if (!j.is_object()) malformed("<root>", "expected an object");
  Problem p;
  p.rho1 = matrix_from_json(member(j, "rho1", ""), "rho1");
  p.rho2 = matrix_from_json(member(j, "rho2", ""), "rho2");
  if (p.rho1.rows() != p.rho2.rows()) malformed("rho2", "dimension differs from rho1");
  p.dim = p.rho1.rows();
  if (auto it = j.find("dim"); it != j.end()) {
    if (!it->is_number_integer()) malformed("dim", "expected an integer");
    if (it->get<Index>() != p.dim) malformed("dim", "does not match the matrix size " + std::to_string(p.dim));
  }
  if (auto it = j.find("p1"); it != j.end() && !it->is_null()) {
    double v = number_at(*it, "p1");
    if (!(v > 0.0 && v < 1.0)) malformed("p1", "must lie in (0, 1)");
    p.p1 = v;
  }
  check_density(p.rho1, "rho1", tol);
  check_density(p.rho2, "rho2", tol);
  return p;
}

json problem_to_json(const Problem& p) {
  json j = {{"dim", p.dim}, {"rho1", matrix_to_json(p.rho1)}, {"rho2", matrix_to_json(p.rho2)}};
  if (p.p1) j["p1"] = *p.p1;
  return j;
}

UsdMeasurement measurement_from_json(const json& j, const WeightedDensityPair& s) {
  if (!j.is_object()) malformed("<root>", "expected an object");
  Matrix e = matrix_from_json(member(j, "inconclusive", ""), "inconclusive");
  if (e.rows() != s.dim()) malformed("inconclusive", "dimension differs from the problem");
  const bool has1 = j.contains("detect1"), has2 = j.contains("detect2");
  if (has1 != has2) malformed(has1 ? "detect2" : "detect1", "give both detection operators or neither");
  if (!has1) return complete_measurement(e, s);
  UsdMeasurement m{matrix_from_json(j["detect1"], "detect1"), matrix_from_json(j["detect2"], "detect2"), e};
  if (m.detect1.rows() != s.dim()) malformed("detect1", "dimension differs from the problem");
  if (m.detect2.rows() != s.dim()) malformed("detect2", "dimension differs from the problem");
  return m;
}

json measurement_to_json(const UsdMeasurement& m) {
  return {{"detect1", matrix_to_json(m.detect1)},
          {"detect2", matrix_to_json(m.detect2)},
          {"inconclusive", matrix_to_json(m.inconclusive)}};
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    raise(ErrorKind::malformed_input,
          source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::malformed_input, path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

json report_to_json(const OptimalityReport& r) {
  return {{"is_optimal", r.is_optimal},
          {"cond_a1", condition_json(r.cond_a1)},
          {"cond_a2", condition_json(r.cond_a2)},
          {"cond_cross", condition_json(r.cond_cross)},
          {"cond_b", condition_json(r.cond_b)},
          {"violated", r.violated()},
          {"max_residual", r.max_residual()}};
}

json outcome_to_json(const SolverOutcome& o) {
  json j = {{"success", o.success},
            {"status", to_string(o.status)},
            {"branch", to_string(o.branch)},
            {"class_e1", o.tag.rank1},
            {"class_e2", o.tag.rank2},
            {"boundary", o.boundary},
            {"warnings", o.warnings},
            {"steps", o.steps},
            {"measurement", measurement_to_json(o.measurement)}};
  if (o.report) j["report"] = report_to_json(*o.report);
  if (o.certificate) j["certificate_residual"] = o.certificate->residuals.max();
  return j;
}

json reduction_to_json(const ReductionRecord& r) {
  auto rank_of = [](const Matrix& p) { return static_cast<long>(std::lround(real_trace(p))); };
  std::vector<double> cos(r.cosines.data(), r.cosines.data() + r.cosines.size());
  return {{"dim_common_support", rank_of(r.pi_parallel)},
          {"dim_support1_in_kernel2", rank_of(r.sigma1)},
          {"dim_support2_in_kernel1", rank_of(r.sigma2)},
          {"dim_reduced_space", rank_of(r.xi)},
          {"lifted_offset", r.lifted_offset},
          {"reduced_rank1", r.reduced_pair.support1().dim()},
          {"reduced_rank2", r.reduced_pair.support2().dim()},
          {"reduced_gamma1", matrix_to_json(r.reduced_pair.gamma1())},
          {"reduced_gamma2", matrix_to_json(r.reduced_pair.gamma2())},
          {"cosines", cos},
          {"warnings", r.warnings}};
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "p1,success,class_e1,class_e2,branch,lower_bound,upper_bound\n";
  for (const auto& r : rows) {
    os << format_number(r.p1) << ',' << format_number(r.success) << ',' << r.tag.rank1 << ',' << r.tag.rank2
       << ',' << to_string(r.branch) << ',' << format_number(r.lower) << ',' << format_number(r.upper) << '\n';
  }
}

}  // namespace usd
