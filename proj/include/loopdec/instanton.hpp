#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loopdec/channel.hpp"
#include "loopdec/code.hpp"
#include "loopdec/lp.hpp"

namespace loopdec {

struct InstantonRecord {
    PseudoCodeword pseudo_codeword;
    LlrVector instanton_llr;  // the equal-cost noise point (un-nudged)
    double eff_distance = 0.0;
    std::vector<std::pair<int, double>> trajectory;  // (step, d_eff)
    std::uint64_t seed = 0;
    int steps = 0;
    bool converged = false;
};

struct InstantonSearchParams {
    int max_steps = 100;
    double init_variance = 1.0;
    double nudge = 1e-6;       // displacement amplification past the tie
    double settle_tol = 1e-9;  // pseudo-codeword set distance for stopping
};

// Alternate LP decoding and equal-cost projection from a random start:
//   h_0 = 1 + g,  g ~ N(0, init_variance);
//   omega_t = LP optimum at the nudged h_t;  h_{t+1} = tie point of omega_t.
// Returns nullopt when the start decodes to the transmitted word (no
// failure direction to descend along).
std::optional<InstantonRecord> search_instanton(const ParityCheckCode& code, std::uint64_t seed,
                                                const InstantonSearchParams& params = {});

struct InstantonCatalog {
    std::vector<InstantonRecord> records;  // deduplicated, ascending d_eff
    int seeds_run = 0;
    int raw_converged = 0;  // before deduplication
};

// Runs search_instanton over seeds [seed0, seed0 + n_seeds), deduplicates
// pseudo-codewords by support and rounded values, sorts by d_eff.
// threads <= 0 picks a hardware-based default.
InstantonCatalog build_instanton_catalog(const ParityCheckCode& code, int n_seeds,
                                         std::uint64_t seed0 = 1000,
                                         const InstantonSearchParams& params = {},
                                         int threads = 0);

// line-JSON catalog (one record per line) with omega/h inline as arrays
void save_catalog(const InstantonCatalog& catalog, const std::string& dir);
InstantonCatalog load_catalog(const std::string& dir);

}  // namespace loopdec
