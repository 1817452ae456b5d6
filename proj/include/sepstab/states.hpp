#pragma once

// Named state generators behind the config "target" block.

#include <cstdint>

#include "sepstab/linalg.hpp"

namespace sepstab {

Ket bell_state();                                   // (|00> + |11>)/sqrt(2)
Ket ghz_state(int parties, int d = 2);              // (sum_j |j...j>)/sqrt(d)
Ket w_state(int parties);                           // single-excitation superposition
Ket maximally_entangled_state(int d);               // (sum_j |jj>)/sqrt(d)
Ket random_state(std::vector<int> dims, std::uint64_t seed);  // Haar

} // namespace sepstab
