#pragma once

#include <optional>
#include <string>

#include "usd/core.hpp"

namespace usd {

enum class Branch {
  trivial,
  single_detect_gamma2,
  single_detect_gamma1,
  fidelity_form,
  class12,
  class21,
  class11,
  oracle_fallback,
};

std::string to_string(Branch b);

struct ClosedFormResult {
  UsdMeasurement measurement;
  double success = 0.0;
  Branch branch = Branch::trivial;
  double margin = 0.0;    // smallest eigenvalue of the whitened applicability test
  bool boundary = false;  // margin within 10 psd_floor of zero
};

// Measurement detecting only one state, when that is optimal. Requires
// supp gamma1 ∩ supp gamma2 = {0}; tries detecting gamma2 first.
std::optional<ClosedFormResult> try_single_state_detection(const WeightedDensityPair& s);
// Measurement whose inconclusive element is built from the operator fidelities,
// when gamma_mu - F_mu >= 0 for both mu. Same precondition.
std::optional<ClosedFormResult> try_fidelity_form(const WeightedDensityPair& s);

// Factor A with E = P_ker S + A A^dagger for the fidelity-form measurement.
Matrix fidelity_form_factor(const WeightedDensityPair& s);

enum class WindowKind { single_detect_gamma2, single_detect_gamma1, fidelity_form };

// Range of the prior p1 on which a closed form is optimal.
struct ProbabilityWindow {
  WindowKind kind = WindowKind::fidelity_form;
  double lower = 0.0;
  double upper = 0.0;
  double spectral_quantity = 0.0;
  bool empty = true;
  bool contains(double p1, double slack = 0.0) const;
};

// `detected` selects which state the measurement detects (1 or 2).
ProbabilityWindow single_detection_window(const Matrix& rho1, const Matrix& rho2, int detected = 2,
                                          const ToleranceContext& tol = {});
ProbabilityWindow fidelity_window(const Matrix& rho1, const Matrix& rho2, const ToleranceContext& tol = {});

// tr(gamma1 + gamma2) - 2 tr|sqrt(gamma1) sqrt(gamma2)|, an upper bound on the success probability.
double fidelity_bound(const WeightedDensityPair& s);
// Best success among the two single-state detection measurements, always achievable.
double single_detection_value(const WeightedDensityPair& s);

}  // namespace usd
