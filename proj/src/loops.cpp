#include "loopdec/loops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "loopdec/numeric.hpp"

namespace loopdec {

std::vector<int> GeneralizedLoop::bit_loop_degree(const ParityCheckCode& code) const {
    std::vector<int> deg(code.n_bits(), 0);
    for (int e : edges) ++deg[code.edge_bit(e)];
    return deg;
}

bool GeneralizedLoop::contains_bit(const ParityCheckCode& code, int i) const {
    for (int e : edges)
        if (code.edge_bit(e) == i) return true;
    return false;
}

namespace {

struct LoopEnumerator {
    const ParityCheckCode& code;
    const EnumerationBudget& budget;
    int relax_bit;
    // edge order = dense id order (check-major); a vertex "closes" at its
    // last incident edge, where its degree constraint becomes checkable.
    std::vector<int> bit_last_edge;
    std::vector<int> bit_deg;
    std::vector<int> chk_deg;
    std::vector<int> picked;
    std::vector<GeneralizedLoop> out;
    long steps = 0;

    LoopEnumerator(const ParityCheckCode& c, const EnumerationBudget& b, int relax)
        : code(c), budget(b), relax_bit(relax) {
        bit_last_edge.assign(code.n_bits(), -1);
        for (int e = 0; e < code.n_edges(); ++e)
            bit_last_edge[code.edge_bit(e)] = e;
        bit_deg.assign(code.n_bits(), 0);
        chk_deg.assign(code.n_checks(), 0);
    }

    bool bit_ok_final(int i) const {
        int lo = (i == relax_bit) ? 1 : 2;
        if (i == relax_bit && bit_deg[i] == 0) return false;
        return bit_deg[i] == 0 || bit_deg[i] >= lo;
    }

    void recurse(int e) {
        if (++steps > budget.max_steps)
            throw std::runtime_error("enumerate_generalized_loops: step budget exceeded");
        if (static_cast<long>(out.size()) >= budget.max_loops)
            throw std::runtime_error("enumerate_generalized_loops: loop budget exceeded");
        if (e == code.n_edges()) {
            if (!picked.empty() || relax_bit < 0) {
                if (relax_bit >= 0 && bit_deg[relax_bit] == 0) return;
                if (!picked.empty()) {
                    GeneralizedLoop L;
                    L.edges = picked;
                    out.push_back(std::move(L));
                }
            }
            return;
        }
        int i = code.edge_bit(e);
        int a = code.edge_check(e);
        bool bit_closes = bit_last_edge[i] == e;
        bool chk_closes = e + 1 == code.check_edge_begin(a) + code.check_degree(a);

        // exclude edge e
        {
            bool ok = true;
            if (bit_closes && !bit_ok_final(i)) ok = false;
            if (ok && chk_closes && chk_deg[a] == 1) ok = false;
            if (ok) recurse(e + 1);
        }
        // include edge e
        if (static_cast<int>(picked.size()) < budget.max_edges) {
            ++bit_deg[i];
            ++chk_deg[a];
            picked.push_back(e);
            bool ok = true;
            if (bit_closes && !bit_ok_final(i)) ok = false;
            if (ok && chk_closes && chk_deg[a] == 1) ok = false;
            if (ok) recurse(e + 1);
            picked.pop_back();
            --bit_deg[i];
            --chk_deg[a];
        }
    }
};

}  // namespace

std::vector<GeneralizedLoop> enumerate_generalized_loops(const ParityCheckCode& code,
                                                         const EnumerationBudget& budget,
                                                         int relax_bit) {
    LoopEnumerator en(code, budget, relax_bit);
    en.recurse(0);
    return en.out;
}

namespace {

// Stable per-bit quantities carried as (1-m), (1+m); |m| = 1 in double is
// the saturation condition the amplitude formulas cannot absorb.
struct BitTails {
    double omm;  // 1 - m
    double opm;  // 1 + m
};

BitTails bit_tails_checked(const Beliefs& beliefs, int i) {
    BitTails t{one_minus_tanh(beliefs.bit_llr[i]), one_plus_tanh(beliefs.bit_llr[i])};
    if (t.omm == 0.0 || t.opm == 0.0)
        throw SaturationError("loop amplitude: bit " + std::to_string(i) +
                              " has |m| = 1 at double precision");
    return t;
}

// general (unnormalized) bit vertex factor sum_s b(s) (s - m)^q
SignedLog general_bit_factor(const BitTails& t, int q) {
    SignedLogSum s;
    s.add(1.0, std::log(t.opm) - std::log(2.0) + q * std::log(t.omm));
    s.add((q % 2 == 0) ? 1.0 : -1.0, std::log(t.omm) - std::log(2.0) + q * std::log(t.opm));
    return s.total();
}

// mu_i as a SignedLog, stable for any |m| < 1:
//   [(1-m)^{q-1} + (-1)^q (1+m)^{q-1}] / (2 (1-m^2)^{q-1})
SignedLog bit_factor(const BitTails& t, int q) {
    double la = (q - 1) * std::log(t.omm);
    double lb = (q - 1) * std::log(t.opm);
    double sb = (q % 2 == 0) ? 1.0 : -1.0;
    SignedLogSum s;
    s.add(1.0, la);
    s.add(sb, lb);
    SignedLog num = s.total();
    num.log_mag -= std::log(2.0) + (q - 1) * (std::log(t.omm) + std::log(t.opm));
    return num;
}

// mu_a = sum over even configs of b_a prod_{marked k} (sigma_k - m_k)
SignedLog check_factor(const ParityCheckCode& code, const Beliefs& beliefs, int a,
                       const std::vector<std::pair<int, BitTails>>& marked) {
    int d = code.check_degree(a);
    const auto& cfgs = even_configs(d);
    const auto& logb = beliefs.check_log_b[a];
    SignedLogSum sum;
    for (size_t c = 0; c < cfgs.size(); ++c) {
        if (!std::isfinite(logb[c])) continue;
        double lm = logb[c];
        double sign = 1.0;
        for (const auto& [k, tails] : marked) {
            if (config_spin(cfgs[c], k) > 0) {
                lm += std::log(tails.omm);
            } else {
                lm += std::log(tails.opm);
                sign = -sign;
            }
        }
        sum.add(sign, lm);
    }
    return sum.total();
}

}  // namespace

LoopAmplitude loop_amplitude(const ParityCheckCode& code, const Beliefs& beliefs,
                             const GeneralizedLoop& loop) {
    LoopAmplitude out;
    out.loop = loop;
    std::map<int, int> bit_deg;
    std::map<int, std::vector<int>> chk_marked;  // check -> local positions
    for (int e : loop.edges) {
        ++bit_deg[code.edge_bit(e)];
        chk_marked[code.edge_check(e)].push_back(e - code.check_edge_begin(code.edge_check(e)));
    }
    SignedLog r{1.0, 0.0};
    for (const auto& [i, q] : bit_deg) {
        BitTails t = bit_tails_checked(beliefs, i);
        SignedLog f = bit_factor(t, q);
        out.bit_factors.push_back({i, f.value()});
        r *= f;
    }
    for (const auto& [a, positions] : chk_marked) {
        std::vector<std::pair<int, BitTails>> marked;
        for (int k : positions)
            marked.push_back({k, bit_tails_checked(beliefs, code.check_neighbors(a)[k])});
        SignedLog f = check_factor(code, beliefs, a, marked);
        out.check_factors.push_back({a, f.value()});
        r *= f;
    }
    out.r = r.value();
    if (!std::isfinite(out.r))
        throw SaturationError("loop amplitude: overflow in the factor product");
    return out;
}

LoopSeries partition_function_series(const ParityCheckCode& code, const LlrVector& h,
                                     const BpState& state, const Beliefs& beliefs,
                                     const EnumerationBudget& budget) {
    LoopSeries s;
    s.ln_z0 = ln_z0(code, h, state);
    s.z0 = std::exp(s.ln_z0);
    for (const auto& loop : enumerate_generalized_loops(code, budget)) {
        s.corrections.push_back(loop_amplitude(code, beliefs, loop));
        s.sum_r += s.corrections.back().r;
    }
    s.z_series = s.z0 * (1.0 + s.sum_r);
    return s;
}

namespace {

// Numerator of the magnetization insertion at bit i for an extended loop:
// sum_sigma b_i(sigma) sigma (sigma - m_i)^q  (collapsed bit spins).
SignedLog bit_insertion_factor(const BitTails& t, int q) {
    // b_+ = (1+m)/2, b_- = (1-m)/2; (1 - m)^q at sigma=+1, (-1)^q (1+m)^q at -1
    SignedLogSum s;
    s.add(1.0, std::log(t.opm) - std::log(2.0) + q * std::log(t.omm));
    double sb = (q % 2 == 0) ? -1.0 : 1.0;  // sigma * (-1-m)^q at sigma = -1
    s.add(sb, std::log(t.omm) - std::log(2.0) + q * std::log(t.opm));
    return s.total();
}

}  // namespace

std::vector<double> loop_corrected_magnetization(const ParityCheckCode& code,
                                                 const Beliefs& beliefs,
                                                 const std::vector<GeneralizedLoop>& loops,
                                                 bool restrict_to_loop_edges,
                                                 const EnumerationBudget& budget) {
    std::vector<double> rs;
    std::vector<std::set<int>> loop_bits;
    for (const auto& L : loops) {
        rs.push_back(loop_amplitude(code, beliefs, L).r);
        std::set<int> bits;
        for (int e : L.edges) bits.insert(code.edge_bit(e));
        loop_bits.push_back(std::move(bits));
    }
    double denom = 1.0;
    for (double r : rs) denom += r;

    std::optional<ParityCheckCode> sub;  // restricted enumeration graph
    std::vector<int> sub_bit_of;         // sub bit -> original bit
    if (restrict_to_loop_edges) {
        // build the union subgraph of the supplied loops
        std::set<int> edge_set;
        for (const auto& L : loops) edge_set.insert(L.edges.begin(), L.edges.end());
        std::map<int, int> bit_map;
        std::map<int, std::vector<int>> chk_bits;
        for (int e : edge_set) {
            int i = code.edge_bit(e);
            if (!bit_map.count(i)) {
                bit_map[i] = static_cast<int>(bit_map.size());
                sub_bit_of.push_back(i);
            }
            chk_bits[code.edge_check(e)].push_back(bit_map[i]);
        }
        std::vector<std::vector<int>> checks;
        for (auto& [a, bits] : chk_bits) checks.push_back(bits);
        sub.emplace(static_cast<int>(bit_map.size()), std::move(checks));
    }

    std::vector<double> out(code.n_bits());
    for (int i = 0; i < code.n_bits(); ++i) {
        double num = beliefs.bit_m[i];
        for (size_t l = 0; l < loops.size(); ++l)
            if (!loop_bits[l].count(i)) num += beliefs.bit_m[i] * rs[l];

        // extended family at bit i
        std::vector<GeneralizedLoop> ext;
        if (restrict_to_loop_edges) {
            auto it = std::find(sub_bit_of.begin(), sub_bit_of.end(), i);
            if (it != sub_bit_of.end()) {
                int si = static_cast<int>(it - sub_bit_of.begin());
                // enumerate on the subgraph, then translate edges back
                auto sub_loops = enumerate_generalized_loops(*sub, budget, si);
                std::set<int> edge_set;
                for (const auto& L : loops) edge_set.insert(L.edges.begin(), L.edges.end());
                std::vector<int> edge_of_sub(sub->n_edges());
                {
                    int se = 0;
                    std::map<int, std::vector<int>> chk_edges;
                    for (int e : edge_set) chk_edges[code.edge_check(e)].push_back(e);
                    for (auto& [a, es] : chk_edges)
                        for (int e : es) edge_of_sub[se++] = e;
                }
                for (auto& L : sub_loops) {
                    GeneralizedLoop t;
                    for (int se : L.edges) t.edges.push_back(edge_of_sub[se]);
                    std::sort(t.edges.begin(), t.edges.end());
                    ext.push_back(std::move(t));
                }
            }
        } else {
            ext = enumerate_generalized_loops(code, budget, i);
        }

        for (const auto& C : ext) {
            std::map<int, int> bit_deg;
            std::map<int, std::vector<int>> chk_marked;
            for (int e : C.edges) {
                ++bit_deg[code.edge_bit(e)];
                chk_marked[code.edge_check(e)].push_back(e -
                                                         code.check_edge_begin(code.edge_check(e)));
            }
            SignedLog val = bit_insertion_factor(bit_tails_checked(beliefs, i), bit_deg[i]);
            for (const auto& [j, q] : bit_deg) {
                if (j == i) continue;
                val *= general_bit_factor(bit_tails_checked(beliefs, j), q);
            }
            for (const auto& [a, positions] : chk_marked) {
                std::vector<std::pair<int, BitTails>> marked;
                for (int k : positions)
                    marked.push_back({k, bit_tails_checked(beliefs, code.check_neighbors(a)[k])});
                val *= check_factor(code, beliefs, a, marked);
            }
            // divide by prod over loop edges of (1 - m_bit^2)
            for (int e : C.edges) {
                BitTails t = bit_tails_checked(beliefs, code.edge_bit(e));
                val.log_mag -= std::log(t.omm) + std::log(t.opm);
            }
            num += val.value();
        }
        out[i] = num / denom;
    }
    return out;
}

namespace {

// Log-domain moments of one check belief: per position log P(+), log P(-),
// and pair covariance/variance exponents.
struct CheckMoments {
    std::vector<double> log_p_plus;
    std::vector<double> log_p_minus;

    double log_var(int k) const {
        // Var sigma_k = 4 P(+) P(-)
        return std::log(4.0) + log_p_plus[k] + log_p_minus[k];
    }
};

CheckMoments check_moments(const ParityCheckCode& code, const Beliefs& beliefs, int a) {
    int d = code.check_degree(a);
    const auto& cfgs = even_configs(d);
    const auto& logb = beliefs.check_log_b[a];
    CheckMoments m;
    m.log_p_plus.assign(d, 0.0);
    m.log_p_minus.assign(d, 0.0);
    std::vector<double> acc_p, acc_m;
    for (int k = 0; k < d; ++k) {
        acc_p.clear();
        acc_m.clear();
        for (size_t c = 0; c < cfgs.size(); ++c)
            (config_spin(cfgs[c], k) > 0 ? acc_p : acc_m).push_back(logb[c]);
        m.log_p_plus[k] = log_sum_exp(acc_p);
        m.log_p_minus[k] = log_sum_exp(acc_m);
    }
    return m;
}

double triad_correlation(const ParityCheckCode& code, const Beliefs& beliefs, int a,
                         const CheckMoments& m, int kx, int ky) {
    int d = code.check_degree(a);
    const auto& cfgs = even_configs(d);
    const auto& logb = beliefs.check_log_b[a];
    // |sigma - m|: sigma=+1 -> 1-m = 2P(-),  sigma=-1 -> 1+m = 2P(+)
    auto lfac = [&](int k, int spin) {
        return std::log(2.0) + (spin > 0 ? m.log_p_minus[k] : m.log_p_plus[k]);
    };
    SignedLogSum cov;
    for (size_t c = 0; c < cfgs.size(); ++c) {
        if (!std::isfinite(logb[c])) continue;
        int sx = config_spin(cfgs[c], kx);
        int sy = config_spin(cfgs[c], ky);
        cov.add(sx * sy, logb[c] + lfac(kx, sx) + lfac(ky, sy));
    }
    SignedLog num = cov.total();
    if (num.sign == 0.0) return 0.0;
    double lrho = num.log_mag - 0.5 * (m.log_var(kx) + m.log_var(ky));
    if (lrho > 1e-6)
        throw std::runtime_error("triad correlation above 1 beyond roundoff at check " +
                                 std::to_string(a));
    if (lrho > 0.0) lrho = 0.0;  // clamp roundoff overshoot
    return num.sign * std::exp(lrho);
}

}  // namespace

std::vector<TriadAmplitude> triad_amplitudes(const ParityCheckCode& code, const Beliefs& beliefs,
                                             const std::function<bool(int)>& bit_filter) {
    std::vector<TriadAmplitude> out;
    for (int a = 0; a < code.n_checks(); ++a) {
        const auto& nb = code.check_neighbors(a);
        int d = static_cast<int>(nb.size());
        bool any = false;
        for (int x = 0; x < d && !any; ++x)
            for (int y = x + 1; y < d && !any; ++y)
                if ((!bit_filter || (bit_filter(nb[x]) && bit_filter(nb[y])))) any = true;
        if (!any) continue;
        CheckMoments m = check_moments(code, beliefs, a);
        for (int x = 0; x < d; ++x) {
            for (int y = x + 1; y < d; ++y) {
                if (bit_filter && (!bit_filter(nb[x]) || !bit_filter(nb[y]))) continue;
                TriadAmplitude t;
                t.check = a;
                t.bit_i = nb[x];
                t.bit_j = nb[y];
                t.value = triad_correlation(code, beliefs, a, m, x, y);
                out.push_back(t);
            }
        }
    }
    return out;
}

double triad_paper_form(const ParityCheckCode& code, const Beliefs& beliefs, int check,
                        int bit_i, int bit_j) {
    const auto& nb = code.check_neighbors(check);
    int kx = -1, ky = -1;
    for (size_t k = 0; k < nb.size(); ++k) {
        if (nb[k] == bit_i) kx = static_cast<int>(k);
        if (nb[k] == bit_j) ky = static_cast<int>(k);
    }
    if (kx < 0 || ky < 0)
        throw std::invalid_argument("triad_paper_form: bits not on the check");
    BitTails ti = bit_tails_checked(beliefs, bit_i);
    BitTails tj = bit_tails_checked(beliefs, bit_j);
    SignedLog mu = check_factor(code, beliefs, check, {{kx, ti}, {ky, tj}});
    mu.log_mag -= 0.5 * (std::log(ti.omm) + std::log(ti.opm) + std::log(tj.omm) +
                         std::log(tj.opm));
    return mu.value();
}

GeneralizedLoop CriticalLoopResult::best_loop(const ParityCheckCode& code) const {
    GeneralizedLoop L;
    if (best.empty()) return L;
    const auto& c = best.front();
    for (size_t k = 0; k < c.checks.size(); ++k) {
        int a = c.checks[k];
        int i = c.bits[k];
        int j = c.bits[(k + 1) % c.bits.size()];
        L.edges.push_back(code.edge_id(i, a));
        L.edges.push_back(code.edge_id(j, a));
    }
    std::sort(L.edges.begin(), L.edges.end());
    return L;
}

std::vector<int> CriticalLoopResult::erase_union() const {
    std::set<int> bits;
    for (const auto& c : best) bits.insert(c.bits.begin(), c.bits.end());
    return std::vector<int>(bits.begin(), bits.end());
}

namespace {

struct CycleSearch {
    struct Edge {
        int to;
        int check;
        double value;
    };
    std::map<int, std::vector<Edge>> adj;
    int max_bits;
    long max_cycles;
    long max_steps;
    long steps = 0;
    std::vector<CriticalLoopCycle> cycles;
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;

    void add_cycle(const std::vector<int>& path, const std::vector<int>& checks, double r) {
        std::vector<int> bs(path), cs(checks);
        std::sort(bs.begin(), bs.end());
        std::sort(cs.begin(), cs.end());
        if (!seen.insert({bs, cs}).second) return;
        CriticalLoopCycle c;
        c.bits = path;
        c.checks = checks;
        c.r = r;
        cycles.push_back(std::move(c));
    }

    void dfs(int start, int u, std::vector<int>& path, std::vector<int>& checks,
             std::set<int>& used_checks, double r) {
        if (++steps > max_steps || static_cast<long>(cycles.size()) >= max_cycles) return;
        auto it = adj.find(u);
        if (it == adj.end()) return;
        for (const auto& ed : it->second) {
            if (used_checks.count(ed.check)) continue;
            if (ed.to == start && path.size() >= 2) {
                checks.push_back(ed.check);
                add_cycle(path, checks, r * ed.value);
                checks.pop_back();
            } else if (ed.to > start &&
                       std::find(path.begin(), path.end(), ed.to) == path.end() &&
                       static_cast<int>(path.size()) < max_bits) {
                path.push_back(ed.to);
                checks.push_back(ed.check);
                used_checks.insert(ed.check);
                dfs(start, ed.to, path, checks, used_checks, r * ed.value);
                used_checks.erase(ed.check);
                checks.pop_back();
                path.pop_back();
            }
        }
    }
};

}  // namespace

CriticalLoopResult find_critical_loop(const ParityCheckCode& /*code*/,
                                      const std::vector<TriadAmplitude>& triads,
                                      const Beliefs& beliefs,
                                      const CriticalLoopOptions& options) {
    CriticalLoopResult res;
    for (size_t t = 0; t + 1 < options.thresholds.size(); ++t)
        if (options.thresholds[t] <= options.thresholds[t + 1])
            throw std::invalid_argument("find_critical_loop: thresholds must strictly descend");
    if (options.max_loop_bits < 2)
        throw std::invalid_argument("find_critical_loop: max_loop_bits too small");

    for (double th : options.thresholds) {
        CycleSearch cs;
        cs.max_bits = options.max_loop_bits;
        cs.max_cycles = options.max_cycles;
        cs.max_steps = options.max_steps;
        for (const auto& tr : triads) {
            if (std::fabs(tr.value) < th) continue;
            if (options.llr_threshold &&
                (std::fabs(beliefs.bit_llr[tr.bit_i]) < *options.llr_threshold ||
                 std::fabs(beliefs.bit_llr[tr.bit_j]) < *options.llr_threshold))
                continue;
            cs.adj[tr.bit_i].push_back({tr.bit_j, tr.check, tr.value});
            cs.adj[tr.bit_j].push_back({tr.bit_i, tr.check, tr.value});
        }
        for (const auto& [s, _] : cs.adj) {
            std::vector<int> path{s}, checks;
            std::set<int> used;
            cs.dfs(s, s, path, checks, used, 1.0);
        }
        if (cs.cycles.empty()) continue;
        auto byr = [](const CriticalLoopCycle& a, const CriticalLoopCycle& b) {
            double ra = std::fabs(a.r), rb = std::fabs(b.r);
            if (ra != rb) return ra > rb;
            if (a.bits.size() != b.bits.size()) return a.bits.size() < b.bits.size();
            return a.bits < b.bits;
        };
        std::sort(cs.cycles.begin(), cs.cycles.end(), byr);
        res.found = true;
        res.threshold_used = th;
        res.cycles = cs.cycles;
        double best_r = std::fabs(cs.cycles.front().r);
        for (const auto& c : cs.cycles)
            if (std::fabs(c.r) >= best_r - 1e-9) res.best.push_back(c);
        return res;
    }
    return res;
}

}  // namespace loopdec
