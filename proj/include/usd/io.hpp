#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "usd/core.hpp"
#include "usd/pipeline.hpp"
#include "usd/reductions.hpp"

namespace usd {

// Matrices are nested arrays of [re, im] pairs, row-major.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);

struct Problem {
  Index dim = 0;
  Matrix rho1;
  Matrix rho2;
  std::optional<double> p1;

  WeightedDensityPair pair(const ToleranceContext& tol = {}) const;
  WeightedDensityPair pair_at(double p1, const ToleranceContext& tol = {}) const;
};

// Checks shapes, Hermiticity, positivity and unit trace. Errors name the field.
Problem problem_from_json(const nlohmann::json& j, const ToleranceContext& tol = {});
nlohmann::json problem_to_json(const Problem& p);

// detect1/detect2 may be omitted; they are then completed from the inconclusive element.
UsdMeasurement measurement_from_json(const nlohmann::json& j, const WeightedDensityPair& s);
nlohmann::json measurement_to_json(const UsdMeasurement& m);

// Parse errors carry line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json read_json_file(const std::string& path);

nlohmann::json outcome_to_json(const SolverOutcome& o);
nlohmann::json report_to_json(const OptimalityReport& r);
nlohmann::json reduction_to_json(const ReductionRecord& r);

// Header p1,success,class_e1,class_e2,branch,lower_bound,upper_bound; %.17g numbers; LF endings.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::string format_number(double x);

}  // namespace usd
