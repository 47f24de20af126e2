#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopdec/channel.hpp"
#include "loopdec/code.hpp"
#include "loopdec/loops.hpp"

namespace loopdec {

// min c.x subject to sparse rows a.x <= b and box 0 <= x <= 1.
struct LpProblem {
    int n_vars = 0;
    std::vector<double> objective;
    struct Row {
        std::vector<int> idx;
        std::vector<double> coef;
        double rhs = 0.0;
    };
    std::vector<Row> rows;
};

enum class LpStatus { optimal, restarted_optimal, stalled };

struct LpSolution {
    std::vector<double> x;
    double objective = 0.0;
    LpStatus status = LpStatus::optimal;
    int pivots = 0;
};

// Revised simplex on the inequality geometry: vertex-following active-set
// with Bland's anti-cycling rule, dense working-set inverse with periodic
// refactorization.  Deterministic.  Requires x = 0 feasible (true for every
// decoding polytope).
LpSolution lp_solve(const LpProblem& problem);

// Feldman polytope: for every check a and every odd S subset N(a),
//   sum_{i in S} x_i - sum_{i in N(a)\S} x_i <= |S| - 1,
// objective min sum_i 2 h_i x_i over [0,1]^N (bit domain, sigma = 1 - 2x).
LpProblem build_decoding_lp(const ParityCheckCode& code, const LlrVector& h);

struct PseudoCodeword {
    std::vector<double> omega;
    bool is_integral = false;
    double objective_value = 0.0;
    double eff_distance = 0.0;
};

struct LpDecodeResult {
    bool success = false;
    std::vector<int> decoded_spins;      // valid when success
    std::optional<PseudoCodeword> pseudo_codeword;  // set on fractional optimum
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
};

LpDecodeResult decode_lp(const ParityCheckCode& code, const LlrVector& h);

// One erasure attempt the decoder tried: which bits, from which loop, and
// what came of it.
struct ErasureAttempt {
    std::vector<int> bits;
    double loop_r = 0.0;
    double threshold = 0.0;
    double analysis_scale = 0.0;  // llr multiplier used for the BP analysis
    bool omega_guided = false;
    bool success = false;
};

struct ErasureParams {
    double epsilon = 0.0;  // 0 = full erasure of the loop bits
    // llr multipliers for the critical-loop analysis runs (large values
    // approach the LP zero-temperature structure where the tie degeneracy
    // is exact); each is recorded in the diagnostics
    std::vector<double> analysis_scales = {25.0, 50.0, 10.0, 3.3333333333333335};
    BpParams analysis_bp{3000, 1e-12, 0.5, 30.0};  // clip is scaled per run
    CriticalLoopOptions loop_options;
    int max_attempts = 12;
};

struct LpErasureResult {
    bool success = false;
    std::vector<int> decoded_spins;
    bool bare_lp_succeeded = false;
    std::vector<ErasureAttempt> attempts;
    std::optional<PseudoCodeword> bare_pseudo_codeword;
};

// LP-erasure: bare LP, then critical-loop search on the BP analysis states
// and LP reruns with the loop bits' log-likelihoods scaled by epsilon.
// Candidate loops come from the analysis-scale ladder, both unfiltered and
// restricted to the strong support of the failing LP vertex.
LpErasureResult decode_lp_erasure(const ParityCheckCode& code, const LlrVector& h,
                                  const ErasureParams& params = {});

}  // namespace loopdec
