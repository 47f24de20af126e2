#pragma once

#include <vector>

#include "loopdec/channel.hpp"
#include "loopdec/code.hpp"

namespace loopdec {

struct BpParams {
    int max_iters = 200;
    double tol = 1e-9;
    double damping = 0.5;
    double message_clip = 30.0;  // |eta| bound; scale with the llr scale
};

// Bit-to-check messages eta_{i a}, indexed by dense edge id.
struct BpState {
    std::vector<double> eta;
    int iterations_run = 0;
    bool converged = false;
    double residual = 0.0;
};

// Beliefs derived from a message state.  Check beliefs are stored over the
// 2^{deg-1} even-parity local configurations only, as normalized log
// probabilities (log domain keeps the deeply frozen states meaningful).
struct Beliefs {
    std::vector<double> bit_llr;          // posterior log-likelihood H_i
    std::vector<double> bit_m;            // tanh(H_i)
    std::vector<std::vector<double>> check_log_b;  // per check, per even config
    std::vector<double> edge_m;           // m_{i a} = E_{b_a}[sigma_i], per edge
    // the relaxed-gauge companions: direct posterior h_i + sum_a u_{a i} and
    // the per-edge pair log-likelihood eta_{i a} + u_{a i}; these equal
    // bit_llr at a fixed point and make the free energy stationary in eta
    std::vector<double> bit_llr_direct;
    std::vector<double> edge_pair_llr;

    double bit_one_minus_m(int i) const;  // 1 - m_i, stable
    double bit_one_plus_m(int i) const;   // 1 + m_i, stable
};

// Even-parity configurations of a degree-d check, as bitmasks over the
// check's local positions (bit k set = spin -1).  Cached per degree.
const std::vector<unsigned>& even_configs(int degree);
inline int config_spin(unsigned mask, int k) { return (mask >> k & 1u) ? -1 : 1; }

// One synchronous sweep of eta_{i a} = h_i + sum_{b != a} atanh(prod_{j in
// b, j != i} tanh eta_{j b}), convex damping toward the previous state.
BpState bp_sweep(const ParityCheckCode& code, const LlrVector& h, const BpState& state,
                 double damping, double message_clip = 30.0);

// Iterate bp_sweep until the residual drops below tol or max_iters; the
// final state is returned even when not converged.
std::pair<BpState, Beliefs> run_bp(const ParityCheckCode& code, const LlrVector& h,
                                   const BpParams& params = {});

// Beliefs from a message state.  Bit beliefs use
//   b_i ~ exp(sigma (sum_a eta_{i a} - h_i) / (q_i - 1))
// for bit degree q_i >= 2; degree-1 bits fall back to the direct posterior
// h_i + u_{a i}, the q -> 1 limit of the same fixed point.
Beliefs beliefs_from_state(const ParityCheckCode& code, const LlrVector& h,
                           const BpState& state);

// F = sum_a sum b_a ln(b_a / f_a) - sum_(ab) sum b_ab ln b_ab with edge
// beliefs (1 + sigma m_{i a})/2 and 0 ln 0 = 0.
double bethe_free_energy(const ParityCheckCode& code, const LlrVector& h,
                         const Beliefs& beliefs);

// ln Z0 of the gauge decomposition evaluated at the current messages:
// prod_a Z_a over bits and checks divided by the per-edge cosh factors.
// At a fixed point equals -bethe_free_energy.
double ln_z0(const ParityCheckCode& code, const LlrVector& h, const BpState& state);

struct DecodeResult {
    bool success = false;
    std::vector<int> decoded_spins;
    BpState state;
    Beliefs beliefs;
};

// Hard decision sign(m_i) (ties to +1) gated by the syndrome.
DecodeResult decode_bp(const ParityCheckCode& code, const LlrVector& h,
                       const BpParams& params = {});

}  // namespace loopdec
