#include "usd/errors.hpp"

namespace usd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::not_hermitian: return "NotHermitian";
    case ErrorKind::not_psd: return "NotPSD";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::skew_violation: return "SkewViolation";
    case ErrorKind::invalid_pair: return "InvalidPair";
    case ErrorKind::invalid_inconclusive: return "InvalidInconclusive";
    case ErrorKind::not_reconstructible: return "NotReconstructible";
    case ErrorKind::incompatible_record: return "IncompatibleRecord";
    case ErrorKind::not_proper: return "NotProper";
    case ErrorKind::certificate_failure: return "CertificateFailure";
    case ErrorKind::precondition_violated: return "PreconditionViolated";
    case ErrorKind::no_solution_found: return "NoSolutionFound";
    case ErrorKind::degenerate_family: return "DegenerateFamily";
    case ErrorKind::non_convergence: return "NonConvergence";
    case ErrorKind::malformed_input: return "MalformedInput";
  }
  return "Unknown";
}

}  // namespace usd
