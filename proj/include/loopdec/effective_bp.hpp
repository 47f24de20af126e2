#pragma once

#include <vector>

#include "loopdec/bp.hpp"
#include "loopdec/code.hpp"
#include "loopdec/loops.hpp"

namespace loopdec {

// Relaxed gauges: independent values on the two sides of every edge.
// gauge_check holds the bit-to-check message (enters the check-local
// measure), gauge_bit the check-to-bit one; at a bare BP fixed point they
// coincide with the standard message pair.
struct EffectiveBpState {
    std::vector<double> gauge_bit;    // per edge, bit side
    std::vector<double> gauge_check;  // per edge, check side
    std::vector<GeneralizedLoop> loops;
    int iterations_run = 0;
    bool converged = false;
    double residual = 0.0;
};

struct EffectiveBpParams {
    int max_iters = 20000;
    double tol = 1e-12;
    double damping = 0.7;
    double gauge_clip = 40.0;  // atanh clip for the gauge updates
};

// Residuals of the modified gauge system, one per directed edge
// (bit->check at edge id e, check->bit at n_edges + e):
//   m_{a->b} - tanh(g_ab + g_ba) - sum_Gamma R_Gamma dm_{a->b;Gamma},
// where R_Gamma = prod_d mu_{d;Gamma} / prod_edges (1 - m_pair^2) and dm
// follows the in-loop / boundary / outside cases.  Outside vertices carry
// the bare consistency condition (zero correction).
std::vector<double> effective_residuals(const ParityCheckCode& code, const LlrVector& h,
                                        const EffectiveBpState& state);

// Initialize the relaxed gauges from a plain BP state (messages +
// check-to-bit companions).
EffectiveBpState effective_state_from_bp(const ParityCheckCode& code, const LlrVector& h,
                                         const BpState& bp,
                                         std::vector<GeneralizedLoop> loops);

struct EffectiveBpSolution {
    EffectiveBpState state;
    std::vector<double> m_eff;  // per-bit magnetization of the degenerate ansatz
};

// Damped fixed-point iteration on the modified system in message form,
// started from the supplied state.  Saturation-stable throughout: the
// degenerate (pure cycle) case walks to the r = 1 manifold at large gauge
// values and the magnetizations converge there.
EffectiveBpSolution solve_effective_bp(const ParityCheckCode& code, const LlrVector& h,
                                       EffectiveBpState init,
                                       const EffectiveBpParams& params = {});

struct LoopCorrectedDecodeParams {
    BpParams bare_bp;
    EffectiveBpParams effective;
    std::vector<double> analysis_scales = {25.0, 50.0, 10.0};
    CriticalLoopOptions loop_options;
    int max_loops = 4;  // loops accumulated into the effective free energy
};

struct LoopCorrectedDecodeResult {
    bool success = false;
    bool bare_bp_succeeded = false;
    std::vector<int> decoded_spins;
    std::vector<GeneralizedLoop> loops_used;
    std::vector<double> loop_r;
    std::vector<double> residual_history;  // final residual after each loop set
    std::vector<double> m_eff;
};

// 1. bare BP; 2. critical-loop search; 3. modified equations and hard
// decision on m_eff; 4. add the next loop candidate and retry.
LoopCorrectedDecodeResult decode_loop_corrected_bp(const ParityCheckCode& code,
                                                   const LlrVector& h,
                                                   const LoopCorrectedDecodeParams& params = {});

}  // namespace loopdec
