#include "loopdec/effective_bp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "loopdec/numeric.hpp"

namespace loopdec {

namespace {

// Working quantities for one gauge configuration.
struct EffWork {
    std::vector<double> s_pair;  // gauge_bit + gauge_check per edge
    std::vector<double> T;       // bit local fields h_i + sum gauge_bit
    std::vector<std::vector<double>> check_log_b;  // from gauge_check
    std::vector<double> m_from_chk;  // <sigma_e> at the check vertex

    // loop bookkeeping
    struct LoopData {
        std::map<int, std::vector<int>> bit_edges;
        std::map<int, std::vector<int>> chk_edges;
        std::map<int, double> mu_bit;
        std::map<int, double> mu_chk;
        double R = 0.0;
    };
    std::vector<LoopData> loops;
};

// <sigma^{extra} prod_e (sigma - tanh s_e)> under p(sigma) ~ e^{T sigma};
// collapsed bit spins, stable tails.
double bit_avg(double T, const std::vector<double>& s_edges, const std::vector<double>& s_pair,
               bool extra_sigma) {
    double bp = 0.5 * one_plus_tanh(T);
    double bm = 0.5 * one_minus_tanh(T);
    double tp = 1.0, tm = 1.0;
    for (double se : s_edges) {
        tp *= one_minus_tanh(se);
        tm *= -one_plus_tanh(se);
    }
    (void)s_pair;
    return extra_sigma ? bp * tp - bm * tm : bp * tp + bm * tm;
}

// <prod_k (sigma_k - tanh s_k)> (optionally times sigma at one position)
// under the check-local measure.
double chk_avg(const ParityCheckCode& code, const EffWork& w, int a,
               const std::vector<std::pair<int, double>>& factors, int sigma_pos = -1) {
    int d = code.check_degree(a);
    const auto& cfgs = even_configs(d);
    const auto& logb = w.check_log_b[a];
    double s = 0.0;
    for (size_t c = 0; c < cfgs.size(); ++c) {
        double p = std::exp(logb[c]);
        if (p == 0.0) continue;
        double t = p;
        for (const auto& [k, se] : factors) t *= sigma_minus_tanh(config_spin(cfgs[c], k), se);
        if (sigma_pos >= 0) t *= config_spin(cfgs[c], sigma_pos);
        s += t;
    }
    return s;
}

EffWork prepare(const ParityCheckCode& code, const LlrVector& h, const EffectiveBpState& st) {
    EffWork w;
    int E = code.n_edges();
    w.s_pair.resize(E);
    for (int e = 0; e < E; ++e) w.s_pair[e] = st.gauge_bit[e] + st.gauge_check[e];
    w.T.assign(h.begin(), h.end());
    for (int e = 0; e < E; ++e) w.T[code.edge_bit(e)] += st.gauge_bit[e];
    w.check_log_b.resize(code.n_checks());
    w.m_from_chk.resize(E);
    for (int a = 0; a < code.n_checks(); ++a) {
        int d = code.check_degree(a);
        int e0 = code.check_edge_begin(a);
        const auto& cfgs = even_configs(d);
        auto& logb = w.check_log_b[a];
        logb.resize(cfgs.size());
        for (size_t c = 0; c < cfgs.size(); ++c) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += st.gauge_check[e0 + k] * config_spin(cfgs[c], k);
            logb[c] = s;
        }
        double lz = log_sum_exp(logb);
        for (double& v : logb) v -= lz;
        for (int k = 0; k < d; ++k) {
            double m = 0.0;
            for (size_t c = 0; c < cfgs.size(); ++c)
                m += std::exp(logb[c]) * config_spin(cfgs[c], k);
            w.m_from_chk[e0 + k] = m;
        }
    }
    // loop quantities
    for (const auto& L : st.loops) {
        EffWork::LoopData ld;
        for (int e : L.edges) {
            ld.bit_edges[code.edge_bit(e)].push_back(e);
            ld.chk_edges[code.edge_check(e)].push_back(e);
        }
        double logR = 0.0, sgn = 1.0;
        bool zero = false;
        for (const auto& [i, es] : ld.bit_edges) {
            std::vector<double> se;
            for (int e : es) se.push_back(w.s_pair[e]);
            double mu = bit_avg(w.T[i], se, w.s_pair, false);
            ld.mu_bit[i] = mu;
            if (mu == 0.0)
                zero = true;
            else {
                logR += std::log(std::fabs(mu));
                sgn *= mu > 0 ? 1.0 : -1.0;
            }
        }
        for (const auto& [a, es] : ld.chk_edges) {
            std::vector<std::pair<int, double>> factors;
            for (int e : es) factors.push_back({e - code.check_edge_begin(a), w.s_pair[e]});
            double mu = chk_avg(code, w, a, factors);
            ld.mu_chk[a] = mu;
            if (mu == 0.0)
                zero = true;
            else {
                logR += std::log(std::fabs(mu));
                sgn *= mu > 0 ? 1.0 : -1.0;
            }
        }
        for (int e : L.edges) logR -= std::log(one_minus_tanh_sq(w.s_pair[e]));
        ld.R = zero ? 0.0 : (logR < 700 ? sgn * std::exp(logR) : sgn * 1e300);
        w.loops.push_back(std::move(ld));
    }
    return w;
}

// correction sums per directed edge; bit->check at e, check->bit at E + e
std::vector<double> corrections(const ParityCheckCode& code, const EffWork& w,
                                const EffectiveBpState& st) {
    int E = code.n_edges();
    std::vector<double> rhs(2 * E, 0.0);
    for (const auto& ld : w.loops) {
        std::set<int> loop_edges;
        for (const auto& [i, es] : ld.bit_edges) loop_edges.insert(es.begin(), es.end());
        // in-loop directed edges and boundary edges of loop vertices
        for (const auto& [i, es] : ld.bit_edges) {
            for (int e : code.bit_edges(i)) {
                double d_e = one_minus_tanh_sq(w.s_pair[e]);
                if (loop_edges.count(e)) {
                    // bit->check residual at e couples through the check side
                    int a = code.edge_check(e);
                    auto itc = ld.chk_edges.find(a);
                    double mu_c = ld.mu_chk.at(a);
                    if (mu_c != 0.0) {
                        std::vector<std::pair<int, double>> factors;
                        for (int e2 : itc->second)
                            if (e2 != e)
                                factors.push_back(
                                    {e2 - code.check_edge_begin(a), w.s_pair[e2]});
                        rhs[e] += ld.R * d_e / mu_c * chk_avg(code, w, a, factors);
                    }
                    // check->bit residual couples through the bit side
                    double mu_b = ld.mu_bit.at(i);
                    if (mu_b != 0.0) {
                        std::vector<double> se;
                        for (int e2 : es)
                            if (e2 != e) se.push_back(w.s_pair[e2]);
                        rhs[E + e] += ld.R * d_e / mu_b * bit_avg(w.T[i], se, w.s_pair, false);
                    }
                } else {
                    // boundary: bit in the loop, edge leaving it
                    double mu_b = ld.mu_bit.at(i);
                    if (mu_b != 0.0) {
                        std::vector<double> se;
                        for (int e2 : es) se.push_back(w.s_pair[e2]);
                        double num = bit_avg(w.T[i], se, w.s_pair, true) -
                                     std::tanh(w.s_pair[e]) * mu_b;
                        rhs[e] += ld.R * d_e / mu_b * num;
                    }
                }
            }
        }
        for (const auto& [a, es] : ld.chk_edges) {
            int e0 = code.check_edge_begin(a);
            for (int k = 0; k < code.check_degree(a); ++k) {
                int e = e0 + k;
                if (loop_edges.count(e)) continue;  // handled above
                // boundary: check in the loop, edge to a bit outside it
                double mu_c = ld.mu_chk.at(a);
                if (mu_c == 0.0) continue;
                double d_e = one_minus_tanh_sq(w.s_pair[e]);
                std::vector<std::pair<int, double>> factors;
                for (int e2 : es) factors.push_back({e2 - e0, w.s_pair[e2]});
                factors.push_back({k, w.s_pair[e]});
                rhs[E + e] += ld.R * d_e / mu_c * chk_avg(code, w, a, factors);
            }
        }
    }
    (void)st;
    return rhs;
}

}  // namespace

std::vector<double> effective_residuals(const ParityCheckCode& code, const LlrVector& h,
                                        const EffectiveBpState& state) {
    EffWork w = prepare(code, h, state);
    std::vector<double> rhs = corrections(code, w, state);
    int E = code.n_edges();
    std::vector<double> res(2 * E);
    for (int e = 0; e < E; ++e) {
        double m_pair = std::tanh(w.s_pair[e]);
        res[e] = (std::tanh(w.T[code.edge_bit(e)]) - m_pair) - rhs[e];
        res[E + e] = (w.m_from_chk[e] - m_pair) - rhs[E + e];
    }
    return res;
}

EffectiveBpState effective_state_from_bp(const ParityCheckCode& code, const LlrVector& h,
                                         const BpState& bp, std::vector<GeneralizedLoop> loops) {
    (void)h;
    EffectiveBpState st;
    st.gauge_check = bp.eta;
    st.gauge_bit.resize(code.n_edges());
    // companions u_{a i} = atanh(prod_{j != i} tanh eta_{j a})
    for (int a = 0; a < code.n_checks(); ++a) {
        int d = code.check_degree(a);
        int e0 = code.check_edge_begin(a);
        for (int k = 0; k < d; ++k) {
            double p = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != k) p *= std::tanh(bp.eta[e0 + j]);
            st.gauge_bit[e0 + k] = atanh_clipped(p, 40.0);
        }
    }
    st.loops = std::move(loops);
    return st;
}

EffectiveBpSolution solve_effective_bp(const ParityCheckCode& code, const LlrVector& h,
                                       EffectiveBpState init, const EffectiveBpParams& params) {
    int E = code.n_edges();
    EffectiveBpState st = std::move(init);
    EffectiveBpState best = st;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < params.max_iters; ++it) {
        EffWork w = prepare(code, h, st);
        std::vector<double> rhs = corrections(code, w, st);
        double res = 0.0;
        for (int e = 0; e < E; ++e) {
            double m_pair = std::tanh(w.s_pair[e]);
            res = std::max(res, std::fabs((std::tanh(w.T[code.edge_bit(e)]) - m_pair) - rhs[e]));
            res = std::max(res, std::fabs((w.m_from_chk[e] - m_pair) - rhs[E + e]));
        }
        st.iterations_run = it;
        st.residual = res;
        if (res < best_res) {
            best_res = res;
            best = st;
        }
        if (res <= params.tol) {
            st.converged = true;
            best = st;
            break;
        }
        // check->bit: solve tanh(gb + gc) = m_from_chk - rhs for gb
        std::vector<double> gb2(st.gauge_bit), gc2(st.gauge_check);
        for (int e = 0; e < E; ++e)
            gb2[e] = atanh_clipped(w.m_from_chk[e] - rhs[E + e], params.gauge_clip) -
                     st.gauge_check[e];
        // bit->check with the updated bit side
        std::vector<double> T2(h.begin(), h.end());
        for (int e = 0; e < E; ++e) T2[code.edge_bit(e)] += gb2[e];
        for (int e = 0; e < E; ++e)
            gc2[e] = atanh_clipped(std::tanh(T2[code.edge_bit(e)]) - rhs[e], params.gauge_clip) -
                     gb2[e];
        double d = params.damping;
        for (int e = 0; e < E; ++e) {
            st.gauge_bit[e] = d * st.gauge_bit[e] + (1 - d) * gb2[e];
            st.gauge_check[e] = d * st.gauge_check[e] + (1 - d) * gc2[e];
        }
    }
    if (!st.converged) st = best;

    // a-posteriori magnetizations of the degenerate ansatz
    EffWork w = prepare(code, h, st);
    EffectiveBpSolution sol;
    sol.m_eff.resize(code.n_bits());
    double Rsum = 0.0;
    for (const auto& ld : w.loops) Rsum += ld.R;
    for (int i = 0; i < code.n_bits(); ++i) {
        double m_bare = std::tanh(w.T[i]);
        double num = m_bare;
        for (const auto& ld : w.loops) {
            auto it = ld.bit_edges.find(i);
            if (it == ld.bit_edges.end()) {
                num += m_bare * ld.R;
                continue;
            }
            // <sigma prod (sigma - m)> times the rest of the loop product
            std::vector<double> se;
            for (int e : it->second) se.push_back(w.s_pair[e]);
            double g = bit_avg(w.T[i], se, w.s_pair, true);
            double mu_i = ld.mu_bit.at(i);
            if (mu_i != 0.0) {
                num += g * (ld.R / mu_i);
            } else if (g != 0.0) {
                // recompute the ratio in log form (mu_i underflowed)
                double logv = std::log(std::fabs(g));
                double sgn = g > 0 ? 1.0 : -1.0;
                for (const auto& [j, mu] : ld.mu_bit) {
                    if (j == i) continue;
                    if (mu == 0.0) {
                        sgn = 0.0;
                        break;
                    }
                    logv += std::log(std::fabs(mu));
                    sgn *= mu > 0 ? 1.0 : -1.0;
                }
                for (const auto& [a, mu] : ld.mu_chk) {
                    if (mu == 0.0) {
                        sgn = 0.0;
                        break;
                    }
                    logv += std::log(std::fabs(mu));
                    sgn *= mu > 0 ? 1.0 : -1.0;
                }
                if (sgn != 0.0) {
                    std::set<int> le;
                    for (const auto& [j, es] : ld.bit_edges) le.insert(es.begin(), es.end());
                    for (int e : le) logv -= std::log(one_minus_tanh_sq(w.s_pair[e]));
                    if (logv < 700) num += sgn * std::exp(logv);
                }
            }
        }
        sol.m_eff[i] = num / (1.0 + Rsum);
    }
    sol.state = std::move(st);
    return sol;
}

LoopCorrectedDecodeResult decode_loop_corrected_bp(const ParityCheckCode& code,
                                                   const LlrVector& h,
                                                   const LoopCorrectedDecodeParams& params) {
    LoopCorrectedDecodeResult out;
    DecodeResult bare = decode_bp(code, h, params.bare_bp);
    if (bare.success) {
        out.success = true;
        out.bare_bp_succeeded = true;
        out.decoded_spins = bare.decoded_spins;
        return out;
    }

    // collect loop candidates over the analysis ladder
    std::vector<std::pair<GeneralizedLoop, double>> candidates;
    std::set<std::vector<int>> seen;
    for (double scale : params.analysis_scales) {
        LlrVector hs(h);
        for (double& v : hs) v *= scale;
        BpParams bp = params.bare_bp;
        bp.max_iters = std::max(bp.max_iters, 2000);
        bp.tol = 1e-12;
        bp.message_clip = 30.0 * scale;
        auto [state, beliefs] = run_bp(code, hs, bp);
        auto triads = triad_amplitudes(code, beliefs);
        auto res = find_critical_loop(code, triads, beliefs, params.loop_options);
        if (!res.found) continue;
        int taken = 0;
        for (const auto& cyc : res.cycles) {
            if (taken >= params.max_loops) break;
            CriticalLoopResult one;
            one.found = true;
            one.best = {cyc};
            GeneralizedLoop L = one.best_loop(code);
            if (seen.insert(L.edges).second) {
                candidates.push_back({std::move(L), cyc.r});
                ++taken;
            }
        }
        if (static_cast<int>(candidates.size()) >= params.max_loops) break;
    }

    // accumulate loops into the effective free energy
    std::vector<GeneralizedLoop> loops;
    for (const auto& [L, r] : candidates) {
        loops.push_back(L);
        out.loops_used.push_back(L);
        out.loop_r.push_back(r);
        EffectiveBpState init = effective_state_from_bp(code, h, bare.state, loops);
        EffectiveBpSolution sol = solve_effective_bp(code, h, std::move(init), params.effective);
        out.residual_history.push_back(sol.state.residual);
        out.m_eff = sol.m_eff;
        std::vector<int> spins(code.n_bits());
        for (int i = 0; i < code.n_bits(); ++i) spins[i] = sol.m_eff[i] < 0 ? -1 : 1;
        if (syndrome_ok(code, spins)) {
            out.success = true;
            out.decoded_spins = std::move(spins);
            return out;
        }
    }
    return out;
}

}  // namespace loopdec
