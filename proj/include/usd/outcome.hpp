#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usd/closed_form.hpp"
#include "usd/optimality.hpp"

namespace usd {

enum class Status { optimal, best_known };

std::string to_string(Status s);

struct SolverOutcome {
  UsdMeasurement measurement;
  MeasurementClassTag tag;
  double success = 0.0;
  Branch branch = Branch::trivial;
  Status status = Status::optimal;
  std::optional<OptimalityReport> report;
  std::optional<CertificateZ> certificate;
  bool boundary = false;
  std::vector<std::string> warnings;
  std::vector<std::string> steps;  // dispatch trace
};

}  // namespace usd
