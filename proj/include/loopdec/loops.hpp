#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "loopdec/bp.hpp"
#include "loopdec/code.hpp"

namespace loopdec {

// Marked subgraph with every touched vertex of degree >= 2 (branching
// allowed, no loose ends).  May be disconnected; the series needs the
// disconnected unions too.
struct GeneralizedLoop {
    std::vector<int> edges;  // sorted dense edge ids

    std::vector<int> bit_loop_degree(const ParityCheckCode& code) const;
    bool contains_bit(const ParityCheckCode& code, int i) const;
};

struct SaturationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoopAmplitude {
    GeneralizedLoop loop;
    double r = 0.0;
    std::vector<std::pair<int, double>> bit_factors;    // (bit, mu_i)
    std::vector<std::pair<int, double>> check_factors;  // (check, mu_a)
};

struct TriadAmplitude {
    int check = -1;
    int bit_i = -1;
    int bit_j = -1;
    double value = 0.0;  // |value| <= 1
};

struct EnumerationBudget {
    int max_edges = 64;                // marked-subgraph size cap
    long max_loops = 2'000'000;        // output cap
    long max_steps = 200'000'000;      // DFS work cap
};

// All generalized loops with |edges| <= budget.max_edges.  Exhaustive when
// max_edges >= n_edges.  relax_bit (if >= 0) lowers that bit's degree
// requirement to >= 1 and requires it to be marked: the extended family
// used by the magnetization series.
std::vector<GeneralizedLoop> enumerate_generalized_loops(
    const ParityCheckCode& code, const EnumerationBudget& budget = {}, int relax_bit = -1);

// Loop-series amplitude at the given beliefs:
//   mu_i = [(1-m)^{q-1} + (-1)^q (1+m)^{q-1}] / (2 (1-m^2)^{q-1})
//   mu_a = sum_sigma b_a(sigma) prod_{marked (i,a)} (sigma_i - m_i)
//   r(C) = prod mu_a mu_i,
// with q the loop degree of the bit and m the bit-belief magnetizations.
// Throws SaturationError when some loop bit has |m| = 1 to double precision.
LoopAmplitude loop_amplitude(const ParityCheckCode& code, const Beliefs& beliefs,
                             const GeneralizedLoop& loop);

struct LoopSeries {
    double ln_z0 = 0.0;
    double z0 = 0.0;
    double sum_r = 0.0;
    double z_series = 0.0;
    std::vector<LoopAmplitude> corrections;
};

// Z = Z0 (1 + sum_C r(C)) over the exhaustively enumerated loops.
LoopSeries partition_function_series(const ParityCheckCode& code, const LlrVector& h,
                                     const BpState& state, const Beliefs& beliefs,
                                     const EnumerationBudget& budget = {});

// Loop-corrected magnetization per bit:
//   m_i = [m_i^bp (1 + sum_{C not through i} r(C)) + sum_{ext C at i} dm] /
//         [1 + sum_C r(C)]
// where the extended family allows degree >= 1 at i.  When
// restrict_to_loop_edges is set, extended loops are enumerated inside the
// union of the supplied loops' edges (the two-term truncation on large
// graphs); otherwise the whole graph is enumerated under the budget.
std::vector<double> loop_corrected_magnetization(const ParityCheckCode& code,
                                                 const Beliefs& beliefs,
                                                 const std::vector<GeneralizedLoop>& loops,
                                                 bool restrict_to_loop_edges = false,
                                                 const EnumerationBudget& budget = {});

// Triads: normalized pair correlations through a check,
//   mu~_{a;ij} = E[(s_i - m)(s_j - m)] / sqrt(Var s_i Var s_j)
// under the check belief b_a, computed in log domain so deeply frozen
// states keep their structure.  |mu~| <= 1 by construction; equals the
// bit-belief form mu_a / sqrt((1-m_i^2)(1-m_j^2)) at BP fixed points.
std::vector<TriadAmplitude> triad_amplitudes(
    const ParityCheckCode& code, const Beliefs& beliefs,
    const std::function<bool(int)>& bit_filter = nullptr);

// The bit-belief-normalized form used by the single-connected-loop identity
// r(Gamma) = prod mu~ (exact algebra against loop_amplitude).
double triad_paper_form(const ParityCheckCode& code, const Beliefs& beliefs, int check,
                        int bit_i, int bit_j);

struct CriticalLoopOptions {
    std::vector<double> thresholds = {0.999, 0.99, 0.95, 0.9, 0.8, 0.7, 0.5};
    int max_loop_bits = 12;
    std::optional<double> llr_threshold;  // keep bits with |posterior| >= this
    long max_cycles = 200'000;
    long max_steps = 5'000'000;
};

struct CriticalLoopCycle {
    std::vector<int> bits;
    std::vector<int> checks;
    double r = 0.0;
};

struct CriticalLoopResult {
    bool found = false;
    double threshold_used = 0.0;
    // all maximal-|r| cycles (ties within 1e-9), shortest first
    std::vector<CriticalLoopCycle> best;
    // every cycle at the emergence threshold, sorted by |r| descending
    std::vector<CriticalLoopCycle> cycles;

    GeneralizedLoop best_loop(const ParityCheckCode& code) const;
    std::vector<int> erase_union() const;  // union of bits over `best`
};

// Threshold-descending search for single-connected loops in the triad bit
// graph; each check joins exactly two loop bits.  Scores r = prod mu~ over
// the cycle, returns at the first threshold that yields any cycle.
CriticalLoopResult find_critical_loop(const ParityCheckCode& code,
                                      const std::vector<TriadAmplitude>& triads,
                                      const Beliefs& beliefs,
                                      const CriticalLoopOptions& options = {});

}  // namespace loopdec
