#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace usd {

enum class ErrorKind {
  not_hermitian,
  not_psd,
  dimension_mismatch,
  skew_violation,
  invalid_pair,
  invalid_inconclusive,
  not_reconstructible,
  incompatible_record,
  not_proper,
  certificate_failure,
  precondition_violated,
  no_solution_found,
  degenerate_family,
  non_convergence,
  malformed_input,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace usd
