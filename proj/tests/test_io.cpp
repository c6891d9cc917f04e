#include <doctest.h>

#include <functional>
#include <sstream>
#include <string>

#include "support.hpp"
#include "usd/io.hpp"
#include "usd/optimality.hpp"
#include "usd/oracle.hpp"
#include "usd/pipeline.hpp"
#include "usd/reference_pairs.hpp"

using namespace usd;
using nlohmann::json;
using usd::testing::Rng;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::precondition_violated;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("problem round trip is exact") {
  Rng rng(151);
  Problem p;
  p.rho1 = testing::random_density(4, 2, rng);
  p.rho2 = testing::random_density(4, 3, rng);
  p.dim = 4;
  p.p1 = 0.3141592653589793;
  json j = problem_to_json(p);
  Problem q = problem_from_json(json::parse(j.dump()));
  CHECK(q.dim == 4);
  CHECK(q.p1 == p.p1);
  CHECK((q.rho1.array() == p.rho1.array()).all());
  CHECK((q.rho2.array() == p.rho2.array()).all());
  CHECK(problem_to_json(q).dump() == j.dump());
}

TEST_CASE("real entries may be written as plain numbers") {
  json j = json::parse(R"({"rho1": [[1, 0], [0, 0]], "rho2": [[0.5, 0.5], [0.5, 0.5]], "p1": 0.5})");
  Problem p = problem_from_json(j);
  CHECK(p.dim == 2);
  CHECK(p.rho2(0, 1) == cplx(0.5, 0.0));
}

TEST_CASE("malformed problems name the offending field") {
  auto base = [] {
    return json::parse(R"({"dim": 2, "rho1": [[1, 0], [0, 0]], "rho2": [[0.5, 0.5], [0.5, 0.5]], "p1": 0.5})");
  };
  json j = base();
  j.erase("rho2");
  CHECK(message_of([&] { problem_from_json(j); }).find("rho2") != std::string::npos);

  j = base();
  j["rho1"][1] = json::array({0});
  CHECK(message_of([&] { problem_from_json(j); }).find("rho1[1]") != std::string::npos);

  j = base();
  j["rho1"][0][1] = "x";
  CHECK(message_of([&] { problem_from_json(j); }).find("rho1[0][1]") != std::string::npos);

  j = base();
  j["rho2"][0][1] = json::array({0.5, 0.1});
  CHECK(message_of([&] { problem_from_json(j); }).find("Hermitian") != std::string::npos);

  j = base();
  j["rho1"] = json::parse("[[1.5, 0], [0, -0.5]]");
  CHECK(message_of([&] { problem_from_json(j); }).find("positive semidefinite") != std::string::npos);

  j = base();
  j["rho1"] = json::parse("[[0.7, 0], [0, 0]]");
  CHECK(message_of([&] { problem_from_json(j); }).find("trace") != std::string::npos);

  j = base();
  j["dim"] = 3;
  CHECK(message_of([&] { problem_from_json(j); }).find("dim") != std::string::npos);

  j = base();
  j["p1"] = 1.0;
  CHECK(kind_of([&] { problem_from_json(j); }) == ErrorKind::malformed_input);
}

TEST_CASE("parse errors report line and column") {
  std::string text = "{\n  \"rho1\": [[1, 0],\n   [0, 0]],,\n}";
  std::string msg = message_of([&] { parse_json_text(text, "problem.json"); });
  CHECK(msg.find("problem.json:3:") != std::string::npos);
  CHECK(kind_of([&] { read_json_file("/nonexistent/problem.json"); }) == ErrorKind::malformed_input);
}

TEST_CASE("measurement completed from the inconclusive element") {
  auto [r1, r2] = four_dim_pair_complex();
  auto s = WeightedDensityPair::from_states(r1, r2, 0.5);
  UsdMeasurement opt = oracle_optimize(s).measurement;
  json j = {{"inconclusive", matrix_to_json(opt.inconclusive)}};
  UsdMeasurement m = measurement_from_json(json::parse(j.dump()), s);
  CHECK(testing::distance(m.detect1, opt.detect1) < 1e-7);
  CHECK(testing::distance(m.detect2, opt.detect2) < 1e-7);
  CHECK(std::abs(success_probability(m, s) - success_probability(opt, s)) < 1e-12);

  json full = json::parse(measurement_to_json(opt).dump());
  UsdMeasurement back = measurement_from_json(full, s);
  CHECK((back.detect1.array() == opt.detect1.array()).all());

  full.erase("detect2");
  CHECK(message_of([&] { measurement_from_json(full, s); }).find("detect2") != std::string::npos);
}

TEST_CASE("sweep csv layout") {
  SweepRow r;
  r.p1 = 0.1;
  r.success = 1.0 / 3.0;
  r.tag = {1, 2};
  r.branch = Branch::fidelity_form;
  r.lower = 0.25;
  r.upper = 0.5;
  std::ostringstream os;
  write_sweep_csv(os, {r});
  std::string out = os.str();
  CHECK(out.rfind("p1,success,class_e1,class_e2,branch,lower_bound,upper_bound\n", 0) == 0);
  CHECK(out.find("0.10000000000000001,0.33333333333333331,1,2,") != std::string::npos);
  CHECK(out.find('\r') == std::string::npos);
  CHECK(out.back() == '\n');
  CHECK(std::stod(format_number(0.1)) == 0.1);
}

TEST_CASE("outcome serialization carries status and report") {
  auto [r1, r2] = qubit_pure_states();
  SolverOutcome o = dispatch(WeightedDensityPair::from_states(r1, r2, 0.5));
  json j = outcome_to_json(o);
  CHECK(j["status"] == "optimal");
  CHECK(j["report"]["is_optimal"] == true);
  CHECK(j["success"].get<double>() == o.success);
}
