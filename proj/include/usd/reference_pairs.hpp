#pragma once

#include <utility>

#include "usd/linalg.hpp"

namespace usd {

using StatePair = std::pair<Matrix, Matrix>;

// |1><1| and |+><+| on C^2.
StatePair qubit_pure_states();
// The same states embedded in C^3.
StatePair qubit_pure_states_embedded();
// Rank-two states on C^4 with real entries.
StatePair four_dim_pair_real();
// Rank-two states on C^4 with complex phases.
StatePair four_dim_pair_complex();

}  // namespace usd
