#include "loopdec/bp.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "loopdec/numeric.hpp"

namespace loopdec {

const std::vector<unsigned>& even_configs(int degree) {
    static std::map<int, std::vector<unsigned>> cache;
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;
    std::vector<unsigned> cfgs;
    cfgs.reserve(1u << (degree - 1));
    for (unsigned mask = 0; mask < (1u << degree); ++mask)
        if (__builtin_popcount(mask) % 2 == 0) cfgs.push_back(mask);
    return cache.emplace(degree, std::move(cfgs)).first->second;
}

double Beliefs::bit_one_minus_m(int i) const { return one_minus_tanh(bit_llr[i]); }
double Beliefs::bit_one_plus_m(int i) const { return one_plus_tanh(bit_llr[i]); }

namespace {

// check->bit messages u_{a i} = atanh(prod_{j != i} tanh eta_{j a}),
// leave-one-out via prefix/suffix products (no division).
std::vector<double> check_to_bit(const ParityCheckCode& code, const std::vector<double>& eta,
                                 double message_clip) {
    std::vector<double> u(code.n_edges());
    std::vector<double> pre, suf, t;
    for (int a = 0; a < code.n_checks(); ++a) {
        int d = code.check_degree(a);
        int e0 = code.check_edge_begin(a);
        t.assign(d, 0.0);
        for (int k = 0; k < d; ++k) t[k] = std::tanh(eta[e0 + k]);
        pre.assign(d + 1, 1.0);
        suf.assign(d + 1, 1.0);
        for (int k = 0; k < d; ++k) pre[k + 1] = pre[k] * t[k];
        for (int k = d - 1; k >= 0; --k) suf[k] = suf[k + 1] * t[k];
        for (int k = 0; k < d; ++k)
            u[e0 + k] = atanh_clipped(pre[k] * suf[k + 1], message_clip);
    }
    return u;
}

std::vector<double> bit_posteriors(const ParityCheckCode& code, const LlrVector& h,
                                   const std::vector<double>& u) {
    std::vector<double> H(h);
    for (int e = 0; e < code.n_edges(); ++e) H[code.edge_bit(e)] += u[e];
    return H;
}

}  // namespace

BpState bp_sweep(const ParityCheckCode& code, const LlrVector& h, const BpState& state,
                 double damping, double message_clip) {
    if (damping < 0.0 || damping >= 1.0)
        throw std::invalid_argument("bp_sweep: damping must lie in [0, 1)");
    if (static_cast<int>(h.size()) != code.n_bits())
        throw std::invalid_argument("bp_sweep: llr length mismatch");
    BpState next;
    next.eta.resize(code.n_edges());
    const std::vector<double>& eta = state.eta;
    if (static_cast<int>(eta.size()) != code.n_edges())
        throw std::invalid_argument("bp_sweep: state not sized to the code");

    std::vector<double> u = check_to_bit(code, eta, message_clip);
    std::vector<double> H = bit_posteriors(code, h, u);
    double res = 0.0;
    for (int e = 0; e < code.n_edges(); ++e) {
        double rhs = clip(H[code.edge_bit(e)] - u[e], message_clip);
        res = std::max(res, std::fabs(rhs - eta[e]));
        next.eta[e] = (1.0 - damping) * rhs + damping * eta[e];
    }
    next.residual = res;
    next.iterations_run = state.iterations_run + 1;
    next.converged = false;
    return next;
}

std::pair<BpState, Beliefs> run_bp(const ParityCheckCode& code, const LlrVector& h,
                                   const BpParams& params) {
    if (params.max_iters < 1) throw std::invalid_argument("run_bp: max_iters must be >= 1");
    if (params.tol <= 0) throw std::invalid_argument("run_bp: tol must be positive");
    BpState state;
    state.eta.assign(code.n_edges(), 0.0);
    for (int it = 0; it < params.max_iters; ++it) {
        state = bp_sweep(code, h, state, params.damping, params.message_clip);
        if (state.residual <= params.tol) {
            state.converged = true;
            break;
        }
    }
    return {state, beliefs_from_state(code, h, state)};
}

Beliefs beliefs_from_state(const ParityCheckCode& code, const LlrVector& h,
                           const BpState& state) {
    if (static_cast<int>(state.eta.size()) != code.n_edges())
        throw std::invalid_argument("beliefs_from_state: state not sized to the code");
    Beliefs b;
    b.bit_llr.resize(code.n_bits());
    b.bit_m.resize(code.n_bits());

    std::vector<double> u = check_to_bit(code, state.eta, 700.0);
    b.bit_llr_direct = bit_posteriors(code, h, u);
    b.edge_pair_llr.resize(code.n_edges());
    for (int e = 0; e < code.n_edges(); ++e) b.edge_pair_llr[e] = state.eta[e] + u[e];
    for (int i = 0; i < code.n_bits(); ++i) {
        int q = code.bit_degree(i);
        if (q >= 2) {
            double s = 0.0;
            for (int e : code.bit_edges(i)) s += state.eta[e];
            b.bit_llr[i] = (s - h[i]) / (q - 1);
        } else {
            b.bit_llr[i] = b.bit_llr_direct[i];
        }
        b.bit_m[i] = std::tanh(b.bit_llr[i]);
    }

    b.check_log_b.resize(code.n_checks());
    b.edge_m.assign(code.n_edges(), 0.0);
    for (int a = 0; a < code.n_checks(); ++a) {
        int d = code.check_degree(a);
        int e0 = code.check_edge_begin(a);
        const auto& cfgs = even_configs(d);
        auto& logb = b.check_log_b[a];
        logb.resize(cfgs.size());
        for (size_t c = 0; c < cfgs.size(); ++c) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += state.eta[e0 + k] * config_spin(cfgs[c], k);
            logb[c] = s;
        }
        double lz = log_sum_exp(logb);
        for (double& v : logb) v -= lz;
        for (size_t c = 0; c < cfgs.size(); ++c) {
            double p = std::exp(logb[c]);
            for (int k = 0; k < d; ++k) b.edge_m[e0 + k] += p * config_spin(cfgs[c], k);
        }
    }
    return b;
}

double bethe_free_energy(const ParityCheckCode& code, const LlrVector& h,
                         const Beliefs& beliefs) {
    if (static_cast<int>(beliefs.bit_m.size()) != code.n_bits() ||
        static_cast<int>(beliefs.check_log_b.size()) != code.n_checks())
        throw std::invalid_argument("bethe_free_energy: beliefs not sized to the code");
    double F = 0.0;
    // bit terms: sum_sigma b ln b - h m
    for (int i = 0; i < code.n_bits(); ++i) {
        double bp = 0.5 * beliefs.bit_one_plus_m(i);
        double bm = 0.5 * beliefs.bit_one_minus_m(i);
        if (bp > 0) F += bp * std::log(bp);
        if (bm > 0) F += bm * std::log(bm);
        F -= h[i] * beliefs.bit_m[i];
    }
    // check terms: sum b ln b over the even configurations
    for (int a = 0; a < code.n_checks(); ++a) {
        for (double lb : beliefs.check_log_b[a]) {
            if (!std::isfinite(lb)) continue;  // 0 ln 0
            if (lb > 1e-9) throw std::invalid_argument("bethe_free_energy: invalid belief");
            F += std::exp(lb) * lb;
        }
    }
    // edge entropies enter with opposite sign: -sum b_ab ln b_ab
    for (int e = 0; e < code.n_edges(); ++e) {
        double m = beliefs.edge_m[e];
        double bp = 0.5 * (1.0 + m);
        double bm = 0.5 * (1.0 - m);
        if (bp > 0) F -= bp * std::log(bp);
        if (bm > 0) F -= bm * std::log(bm);
    }
    return F;
}

double ln_z0(const ParityCheckCode& code, const LlrVector& h, const BpState& state) {
    std::vector<double> u = check_to_bit(code, state.eta, 700.0);
    std::vector<double> H = bit_posteriors(code, h, u);
    auto ln_2cosh = [](double x) {
        // log(2 cosh x) = |x| + log(1 + e^{-2|x|})
        return std::fabs(x) + std::log1p(std::exp(-2.0 * std::fabs(x)));
    };
    double lz = 0.0;
    for (int i = 0; i < code.n_bits(); ++i) lz += ln_2cosh(H[i]);
    for (int a = 0; a < code.n_checks(); ++a) {
        int d = code.check_degree(a);
        int e0 = code.check_edge_begin(a);
        double s = (d - 1) * std::log(2.0);
        double pr = 1.0;
        for (int k = 0; k < d; ++k) {
            double x = state.eta[e0 + k];
            s += ln_2cosh(x) - std::log(2.0);
            pr *= std::tanh(x);
        }
        lz += s + std::log1p(pr);
    }
    for (int e = 0; e < code.n_edges(); ++e) lz -= ln_2cosh(state.eta[e] + u[e]);
    return lz;
}

DecodeResult decode_bp(const ParityCheckCode& code, const LlrVector& h,
                       const BpParams& params) {
    auto [state, beliefs] = run_bp(code, h, params);
    DecodeResult r;
    r.decoded_spins.resize(code.n_bits());
    for (int i = 0; i < code.n_bits(); ++i) r.decoded_spins[i] = beliefs.bit_m[i] < 0.0 ? -1 : 1;
    r.success = syndrome_ok(code, r.decoded_spins);
    r.state = std::move(state);
    r.beliefs = std::move(beliefs);
    return r;
}

}  // namespace loopdec
