// usd: command-line front end for the unambiguous discrimination solver.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "usd/io.hpp"
#include "usd/oracle.hpp"
#include "usd/pipeline.hpp"
#include "usd/reductions.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUnsolved = 2;

int exit_code_for(usd::ErrorKind kind) {
  switch (kind) {
    case usd::ErrorKind::no_solution_found:
    case usd::ErrorKind::non_convergence:
    case usd::ErrorKind::certificate_failure:
      return kUnsolved;
    default:
      return kInvalid;
  }
}

usd::ToleranceContext parse_tolerances(const std::vector<std::string>& items) {
  usd::ToleranceContext tol;
  const std::map<std::string, double usd::ToleranceContext::*> fields = {
      {"rank_cutoff", &usd::ToleranceContext::rank_cutoff}, {"rank_floor", &usd::ToleranceContext::rank_floor},
      {"psd_floor", &usd::ToleranceContext::psd_floor},     {"hermitian", &usd::ToleranceContext::hermitian},
      {"equality", &usd::ToleranceContext::equality},       {"orthonormal", &usd::ToleranceContext::orthonormal},
      {"idempotent", &usd::ToleranceContext::idempotent}};
  auto number = [](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) usd::raise(usd::ErrorKind::malformed_input, "--tol: not a number: " + text);
    return v;
  };
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      // A bare number sets every threshold that is not rank-related.
      double v = number(item);
      tol.psd_floor = tol.hermitian = tol.equality = tol.orthonormal = v;
      tol.idempotent = 10 * v;
      continue;
    }
    auto it = fields.find(item.substr(0, eq));
    if (it == fields.end()) usd::raise(usd::ErrorKind::malformed_input, "--tol: unknown field " + item.substr(0, eq));
    tol.*(it->second) = number(item.substr(eq + 1));
  }
  return tol;
}

double resolve_p1(const usd::Problem& p, const std::optional<double>& flag) {
  if (flag) return *flag;
  if (p.p1) return *p.p1;
  usd::raise(usd::ErrorKind::malformed_input, "p1: give --p1 or a p1 field in the problem file");
}

void print_outcome_text(const usd::SolverOutcome& o) {
  std::cout << "success " << usd::format_number(o.success) << '\n'
            << "status " << usd::to_string(o.status) << '\n'
            << "branch " << usd::to_string(o.branch) << '\n'
            << "type " << o.tag.type_label() << '\n';
  if (o.report) {
    std::cout << "optimal " << (o.report->is_optimal ? "yes" : "no") << '\n';
    for (const auto& v : o.report->violated()) std::cout << "violated " << v << '\n';
  }
  if (o.certificate) std::cout << "certificate_residual " << usd::format_number(o.certificate->residuals.max()) << '\n';
  for (const auto& w : o.warnings) std::cout << "warning " << w << '\n';
}

bool claims_optimal(const usd::SolverOutcome& o) {
  return o.status == usd::Status::optimal && o.report && o.report->is_optimal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal unambiguous discrimination of two mixed states"};
  app.require_subcommand(1);
  std::vector<std::string> tol_items;
  app.add_option("--tol", tol_items, "Tolerance override: VALUE or FIELD=VALUE, repeatable");

  std::string problem_path;
  std::optional<double> p1;

  auto* solve = app.add_subcommand("solve", "Optimal measurement at one prior");
  solve->add_option("problem", problem_path, "Problem JSON")->required();
  solve->add_option("--p1", p1, "Prior of the first state");
  bool as_json = false, as_csv = false;
  auto* json_flag = solve->add_flag("--json", as_json, "Full result as JSON");
  solve->add_flag("--csv", as_csv, "One CSV row")->excludes(json_flag);

  auto* sweep_cmd = app.add_subcommand("sweep", "Success probability over a uniform prior grid");
  sweep_cmd->add_option("problem", problem_path, "Problem JSON")->required();
  double lo = 0.01, hi = 0.99;
  int steps = 99;
  std::string out_path = "-";
  sweep_cmd->add_option("--min", lo, "First grid point");
  sweep_cmd->add_option("--max", hi, "Last grid point");
  sweep_cmd->add_option("--steps", steps, "Number of grid points")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out_path, "CSV file, - for stdout");

  auto* verify = app.add_subcommand("verify", "Check a measurement for optimality");
  std::string measurement_path;
  verify->add_option("problem", problem_path, "Problem JSON")->required();
  verify->add_option("measurement", measurement_path, "Measurement JSON")->required();
  verify->add_option("--p1", p1, "Prior of the first state");

  auto* reduce = app.add_subcommand("reduce", "Summary of the reduction to the strictly skew part");
  reduce->add_option("problem", problem_path, "Problem JSON")->required();
  reduce->add_option("--p1", p1, "Prior of the first state");

  auto* oracle = app.add_subcommand("oracle", "Reference optimizer");
  usd::OracleConfig cfg;
  oracle->add_option("problem", problem_path, "Problem JSON")->required();
  oracle->add_option("--p1", p1, "Prior of the first state");
  oracle->add_option("--seed", cfg.seed, "Random seed");
  oracle->add_option("--restarts", cfg.restarts, "Independent restarts")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const usd::ToleranceContext tol = parse_tolerances(tol_items);
    const usd::Problem problem = usd::problem_from_json(usd::read_json_file(problem_path), tol);

    if (*solve) {
      double p = resolve_p1(problem, p1);
      usd::SolverOutcome o = usd::dispatch(problem.pair_at(p, tol));
      if (as_json) {
        std::cout << usd::outcome_to_json(o).dump(2) << '\n';
      } else if (as_csv) {
        usd::SweepRow row{p, o.success, o.tag, o.branch, o.status, 0.0, 0.0};
        auto pair = problem.pair_at(p, tol);
        row.lower = usd::single_detection_lower_bound(pair);
        row.upper = usd::sweep(problem.rho1, problem.rho2, {p}, {}, tol).front().upper;
        usd::write_sweep_csv(std::cout, {row});
      } else {
        print_outcome_text(o);
      }
      return claims_optimal(o) ? kOk : kUnsolved;
    }

    if (*sweep_cmd) {
      auto rows = usd::sweep(problem.rho1, problem.rho2, usd::linear_grid(lo, hi, steps), {}, tol);
      if (out_path == "-") {
        usd::write_sweep_csv(std::cout, rows);
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) usd::raise(usd::ErrorKind::malformed_input, out_path + ": cannot write");
        usd::write_sweep_csv(out, rows);
      }
      for (const auto& b : usd::class_boundaries(rows))
        std::cerr << "boundary " << b.from.type_label() << " -> " << b.to.type_label() << " in ["
                  << usd::format_number(b.left) << ", " << usd::format_number(b.right) << "]\n";
      for (const auto& r : rows)
        if (r.status != usd::Status::optimal) return kUnsolved;
      return kOk;
    }

    if (*verify) {
      auto pair = problem.pair_at(resolve_p1(problem, p1), tol);
      usd::UsdMeasurement m = usd::measurement_from_json(usd::read_json_file(measurement_path), pair);
      usd::UsdDiagnostics d = usd::check_usd(m, pair);
      if (!d.valid) {
        std::cout << "not a USD measurement: completeness " << usd::format_number(d.completeness) << ", errors "
                  << usd::format_number(d.error_first) << " " << usd::format_number(d.error_second)
                  << ", negativity " << usd::format_number(d.worst_negativity) << '\n';
        return kInvalid;
      }
      usd::OptimalityReport r = usd::check_optimality(m, pair);
      nlohmann::json j = usd::report_to_json(r);
      j["success"] = usd::success_probability(m, pair);
      if (r.is_optimal) {
        usd::CertificateZ z = usd::build_certificate(m, pair);
        j["certificate_residual"] = z.residuals.max();
      }
      std::cout << j.dump(2) << '\n';
      return r.is_optimal ? kOk : kUnsolved;
    }

    if (*reduce) {
      auto pair = problem.pair_at(resolve_p1(problem, p1), tol);
      nlohmann::json j = usd::reduction_to_json(usd::reduce_fully(pair));
      j["strictly_skew"] = usd::is_strictly_skew(pair);
      std::cout << j.dump(2) << '\n';
      return kOk;
    }

    if (*oracle) {
      auto pair = problem.pair_at(resolve_p1(problem, p1), tol);
      usd::OracleResult r = usd::oracle_optimize(pair, cfg);
      nlohmann::json j = {{"success", r.success},
                          {"gap", r.gap},
                          {"iterations", r.iterations},
                          {"converged", r.converged},
                          {"restart_successes", r.restart_successes},
                          {"measurement", usd::measurement_to_json(r.measurement)}};
      if (cfg.restarts > 1) {
        usd::UniquenessReport u = usd::uniqueness_probe(pair, cfg);
        j["unique"] = u.unique;
        j["max_distance"] = u.max_distance;
      }
      std::cout << j.dump(2) << '\n';
      return r.converged ? kOk : kUnsolved;
    }
  } catch (const usd::Error& e) {
    std::cerr << "usd: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "usd: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
