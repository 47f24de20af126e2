#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopdec/code.hpp"

namespace loopdec {

// Small bundled graphs used by the z-check suite and the tests.  Every
// cycle passes through a check with a pendant bit so that BP contracts.

// 3-bit repetition code, H = [[1,1,0],[0,1,1]] (a tree).
ParityCheckCode sample_tree3();

// 7-bit tree with mixed degrees.
ParityCheckCode sample_tree7();

// Single 6-cycle (3 bits / 3 checks) with one pendant bit per check.
ParityCheckCode sample_hairy_cycle();

// Two fused cycles: hairy cycle plus one extra check joining bits 0,1.
ParityCheckCode sample_fused_cycles();

// K4 subdivision (4 bits of degree 3, 6 checks of degree 2) with one
// pendant bit per check; 14 generalized loops.
ParityCheckCode sample_fig14();

// Pure single cycle of `n_cycle_bits` bits and as many degree-2 checks
// (no pendants; BP has no finite fixed point on it for generic h).
ParityCheckCode sample_pure_cycle(int n_cycle_bits);

// Random (2,3)-regular code: 9 bits of degree 2, 6 checks of degree 3,
// no repeated bit pairs.  Deterministic in the seed.
ParityCheckCode sample_rand23(std::uint64_t seed);

// (7,4) Hamming code.
ParityCheckCode sample_hamming74();

// Single even-parity check on k bits.
ParityCheckCode sample_single_check(int k);

struct NamedCode {
    std::string name;
    ParityCheckCode code;
};

// The bundled z-check suite (tree, hairy cycle, fused cycles, fig-14
// topology, random (2,3) graph).
std::vector<NamedCode> zcheck_suite();

}  // namespace loopdec
