#include "loopdec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <cstdlib>
#include <iostream>

namespace loopdec {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kPivotTol = 1e-11;

// All rows (user + boxes) in one indexed family.  Row order fixes Bland's
// rule: user rows first, then x_i <= 1, then -x_i <= 0.
class RowSet {
  public:
    explicit RowSet(const LpProblem& p) : p_(p) {
        n_ = p.n_vars;
        n_user_ = static_cast<int>(p.rows.size());
    }
    int count() const { return n_user_ + 2 * n_; }
    double rhs(int r) const {
        if (r < n_user_) return p_.rows[r].rhs;
        return r < n_user_ + n_ ? 1.0 : 0.0;
    }
    // deterministically perturbed rhs: relaxes every row by a distinct tiny
    // amount, splitting the degenerate vertices the decoding polytope piles
    // onto x = 0
    double rhs_perturbed(int r) const {
        if (r >= n_user_) return rhs(r);  // boxes stay exact: x = 0 is a vertex
        std::uint32_t k = static_cast<std::uint32_t>(r + 1) * 2654435761u;
        return rhs(r) + 3e-5 * (0.5 + static_cast<double>(k) * (0.5 / 4294967296.0));
    }
    // a_r . v
    double dot(int r, const std::vector<double>& v) const {
        if (r < n_user_) {
            const auto& row = p_.rows[r];
            double s = 0.0;
            for (size_t k = 0; k < row.idx.size(); ++k) s += row.coef[k] * v[row.idx[k]];
            return s;
        }
        int i = (r - n_user_) % n_;
        return r < n_user_ + n_ ? v[i] : -v[i];
    }
    // dense copy of a_r into out
    void fill(int r, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        if (r < n_user_) {
            const auto& row = p_.rows[r];
            for (size_t k = 0; k < row.idx.size(); ++k) out[row.idx[k]] = row.coef[k];
        } else {
            int i = (r - n_user_) % n_;
            out[i] = r < n_user_ + n_ ? 1.0 : -1.0;
        }
    }

  private:
    const LpProblem& p_;
    int n_ = 0;
    int n_user_ = 0;
};

// LU factorization with partial pivoting of the working-set matrix
// (rows = active constraints); refreshed every pivot.  The working sets of
// the decoding polytope mix many near-parallel odd-subset rows, which ruins
// long product-form update chains, and at n = 155 a fresh factorization is
// cheap.
class LuSolver {
  public:
    explicit LuSolver(int n) : n_(n), a_(n * n), perm_(n) {}

    bool factor(const std::vector<std::vector<double>>& rows) {
        int n = n_;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a_[r * n + c] = rows[r][c];
        for (int i = 0; i < n; ++i) perm_[i] = i;
        for (int col = 0; col < n; ++col) {
            int piv = col;
            double best = std::fabs(a_[col * n + col]);
            for (int r = col + 1; r < n; ++r) {
                double v = std::fabs(a_[r * n + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-11) return false;
            if (piv != col) {
                for (int c = 0; c < n; ++c) std::swap(a_[piv * n + c], a_[col * n + c]);
                std::swap(perm_[piv], perm_[col]);
            }
            double d = 1.0 / a_[col * n + col];
            for (int r = col + 1; r < n; ++r) {
                double f = a_[r * n + col] * d;
                a_[r * n + col] = f;
                if (f == 0.0) continue;
                for (int c = col + 1; c < n; ++c) a_[r * n + c] -= f * a_[col * n + c];
            }
        }
        return true;
    }

    // solve B x = b
    void solve(const std::vector<double>& b, std::vector<double>& x) const {
        int n = n_;
        x.resize(n);
        for (int i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) x[i] -= a_[i * n + j] * x[j];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) x[i] -= a_[i * n + j] * x[j];
            x[i] /= a_[i * n + i];
        }
    }

    // solve B^T y = c
    void solve_transposed(const std::vector<double>& c, std::vector<double>& y) const {
        int n = n_;
        std::vector<double> z(c);
        // (P B)^T = B^T P^T; factor is P B = L U, so B^T = U^T L^T P
        for (int i = 0; i < n; ++i) {  // U^T forward (diag from U)
            for (int j = 0; j < i; ++j) z[i] -= a_[j * n + i] * z[j];
            z[i] /= a_[i * n + i];
        }
        for (int i = n - 1; i >= 0; --i)
            for (int j = i + 1; j < n; ++j) z[i] -= a_[j * n + i] * z[j];  // L^T backward
        y.assign(n, 0.0);
        for (int i = 0; i < n; ++i) y[perm_[i]] = z[i];
    }

  private:
    int n_;
    std::vector<double> a_;
    std::vector<int> perm_;
};

struct SimplexRun {
    const LpProblem& p;
    RowSet rows;
    int n;
    std::vector<int> working;
    std::vector<std::vector<double>> wrows;
    LuSolver lu;
    std::vector<double> x;
    std::vector<double> slack;
    std::vector<char> in_working;
    int pivots = 0;
    int degenerate_run = 0;  // consecutive zero-step pivots -> Bland mode
    bool perturbed = true;   // phase 1: split the degenerate vertex fan
    bool bland_locked = false;
    double best_obj = std::numeric_limits<double>::infinity();
    int last_progress = 0;

    double rhs_of(int r) const { return perturbed ? rows.rhs_perturbed(r) : rows.rhs(r); }

    explicit SimplexRun(const LpProblem& prob) : p(prob), rows(prob), n(prob.n_vars), lu(n) {
        working.resize(n);
        wrows.assign(n, std::vector<double>(n, 0.0));
        int lb0 = static_cast<int>(p.rows.size()) + n;
        for (int i = 0; i < n; ++i) {
            working[i] = lb0 + i;
            rows.fill(working[i], wrows[i]);
        }
        x.assign(n, 0.0);
        slack.resize(rows.count());
        in_working.assign(rows.count(), 0);
        for (int i = 0; i < n; ++i) in_working[working[i]] = 1;
        for (int r = 0; r < rows.count(); ++r) slack[r] = rows.rhs(r) - rows.dot(r, x);
        for (int r = 0; r < rows.count(); ++r)
            if (slack[r] < -kFeasTol)
                throw std::runtime_error("lp_solve: x = 0 infeasible (row " + std::to_string(r) +
                                         "); the decoding polytope always contains it");
        resolve_vertex();
    }

    void resolve_vertex() {
        if (!lu.factor(wrows)) throw std::runtime_error("lp: singular working set");
        std::vector<double> bw(n);
        for (int k = 0; k < n; ++k) bw[k] = rhs_of(working[k]);
        lu.solve(bw, x);
        for (int r = 0; r < rows.count(); ++r) slack[r] = rhs_of(r) - rows.dot(r, x);
    }

    bool iterate(long max_pivots) {
        std::vector<double> mu(n), d(n), negc(n), e(n), a_new(n);
        for (int i = 0; i < n; ++i) negc[i] = -p.objective[i];
        int last_resolve = 0;
        while (pivots < max_pivots) {
            if (!lu.factor(wrows))
                throw std::runtime_error("lp: singular working set");
            if (pivots - last_resolve >= 128 || degenerate_run == 51) {
                resolve_vertex();
                last_resolve = pivots;
            }
            lu.solve_transposed(negc, mu);
            // objective stagnation over a long window means floating-point
            // cycling: lock the pricing to Bland's rule
            double obj = 0.0;
            for (int i = 0; i < n; ++i) obj += p.objective[i] * x[i];
            if (obj < best_obj - 1e-11 * (1.0 + std::fabs(best_obj))) {
                best_obj = obj;
                last_progress = pivots;
            }
            if (!bland_locked && pivots - last_progress > 300) {
                bland_locked = true;
                resolve_vertex();
                last_resolve = pivots;
            }
            if (bland_locked && pivots - last_progress > 20000)
                return false;  // stalled; caller restarts with a new perturbation
            // leaving constraint: Dantzig by default, Bland on a degenerate
            // plateau (anti-cycling)
            bool bland = bland_locked || degenerate_run > 50;
            int leave_pos = -1;
            if (bland) {
                int best_row = rows.count();
                for (int k = 0; k < n; ++k)
                    if (mu[k] < -1e-9 && working[k] < best_row) {
                        best_row = working[k];
                        leave_pos = k;
                    }
            } else {
                double most = -1e-9;
                for (int k = 0; k < n; ++k)
                    if (mu[k] < most ||
                        (mu[k] < -1e-9 && mu[k] == most && leave_pos >= 0 &&
                         working[k] < working[leave_pos])) {
                        most = mu[k];
                        leave_pos = k;
                    }
            }
            if (leave_pos < 0) {
                if (perturbed) {
                    // switch to the exact rhs from the current (good) basis
                    perturbed = false;
                    degenerate_run = 0;
                    resolve_vertex();
                    continue;
                }
                resolve_vertex();
                return true;
            }
            std::fill(e.begin(), e.end(), 0.0);
            e[leave_pos] = -1.0;
            lu.solve(e, d);
            // ratio test; Bland tie-break by row index
            double tmin = std::numeric_limits<double>::infinity();
            int enter = -1;
            for (int r = 0; r < rows.count(); ++r) {
                if (in_working[r]) continue;
                double ad = rows.dot(r, d);
                if (ad <= kPivotTol) continue;
                double t = std::max(slack[r], 0.0) / ad;
                if (t < tmin - 1e-12 || (t < tmin + 1e-12 && (enter < 0 || r < enter))) {
                    tmin = std::min(t, tmin);
                    enter = r;
                }
            }
            if (enter < 0)
                throw std::runtime_error("lp: unbounded direction on a boxed polytope");
            if (tmin > 1e-12) {
                for (int i = 0; i < n; ++i) x[i] += tmin * d[i];
                for (int r = 0; r < rows.count(); ++r) slack[r] -= tmin * rows.dot(r, d);
            }
            // steps below the feasibility scale do not count as progress;
            // a plateau of them switches the pricing to Bland's rule
            if (tmin > 1e-9)
                degenerate_run = 0;
            else
                ++degenerate_run;
            rows.fill(enter, a_new);
            in_working[working[leave_pos]] = 0;
            in_working[enter] = 1;
            working[leave_pos] = enter;
            wrows[leave_pos] = a_new;
            slack[enter] = 0.0;
            ++pivots;
        }
        return false;
    }
};

}  // namespace

LpSolution lp_solve(const LpProblem& problem) {
    if (problem.n_vars <= 0 || static_cast<int>(problem.objective.size()) != problem.n_vars)
        throw std::invalid_argument("lp_solve: malformed problem");
    for (const auto& row : problem.rows)
        for (int i : row.idx)
            if (i < 0 || i >= problem.n_vars)
                throw std::invalid_argument("lp_solve: row references invalid variable");

    const long kMaxPivots = 500'000;
    LpSolution sol;
    SimplexRun run(problem);
    bool ok = run.iterate(kMaxPivots);
    if (!ok) {
        // numerical stall: deterministic tiny perturbation of the rhs, then
        // one restart
        LpProblem pert = problem;
        for (size_t r = 0; r < pert.rows.size(); ++r)
            pert.rows[r].rhs += 1e-9 * static_cast<double>(1 + (r % 97));
        SimplexRun run2(pert);
        if (!run2.iterate(kMaxPivots)) {
            sol.status = LpStatus::stalled;
            sol.x = run.x;
            sol.pivots = run.pivots;
        } else {
            sol.status = LpStatus::restarted_optimal;
            sol.x = run2.x;
            sol.pivots = run.pivots + run2.pivots;
        }
    } else {
        sol.status = LpStatus::optimal;
        sol.x = run.x;
        sol.pivots = run.pivots;
    }
    sol.objective = 0.0;
    for (int i = 0; i < problem.n_vars; ++i) sol.objective += problem.objective[i] * sol.x[i];
    return sol;
}

LpProblem build_decoding_lp(const ParityCheckCode& code, const LlrVector& h) {
    if (static_cast<int>(h.size()) != code.n_bits())
        throw std::invalid_argument("build_decoding_lp: llr length mismatch");
    LpProblem p;
    p.n_vars = code.n_bits();
    p.objective.resize(p.n_vars);
    for (int i = 0; i < p.n_vars; ++i) p.objective[i] = 2.0 * h[i];
    for (int a = 0; a < code.n_checks(); ++a) {
        const auto& nb = code.check_neighbors(a);
        int d = static_cast<int>(nb.size());
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            int odd = __builtin_popcount(mask);
            if (odd % 2 == 0) continue;
            LpProblem::Row row;
            row.idx = nb;
            row.coef.resize(d);
            for (int k = 0; k < d; ++k) row.coef[k] = (mask >> k & 1u) ? 1.0 : -1.0;
            row.rhs = odd - 1.0;
            p.rows.push_back(std::move(row));
        }
    }
    return p;
}

namespace {

bool integral_within(const std::vector<double>& x, double tol) {
    for (double v : x)
        if (std::fabs(v - std::round(v)) > tol) return false;
    return true;
}

std::vector<int> spins_of(const std::vector<double>& x) {
    std::vector<int> s(x.size());
    for (size_t i = 0; i < x.size(); ++i) s[i] = x[i] > 0.5 ? -1 : 1;
    return s;
}

}  // namespace

LpDecodeResult decode_lp(const ParityCheckCode& code, const LlrVector& h) {
    LpProblem p = build_decoding_lp(code, h);
    LpSolution sol = lp_solve(p);
    LpDecodeResult r;
    r.status = sol.status;
    r.objective = sol.objective;
    if (sol.status == LpStatus::stalled)
        throw std::runtime_error("decode_lp: solver stalled");
    if (integral_within(sol.x, 1e-7)) {
        auto spins = spins_of(sol.x);
        if (syndrome_ok(code, spins)) {
            r.success = true;
            r.decoded_spins = std::move(spins);
            return r;
        }
    }
    PseudoCodeword pc;
    pc.omega = sol.x;
    pc.is_integral = integral_within(sol.x, 1e-7);
    pc.objective_value = sol.objective;
    double s = 0.0;
    for (double v : sol.x) s += v;
    pc.eff_distance = s > 0 ? effective_distance(sol.x) : 0.0;
    r.pseudo_codeword = std::move(pc);
    return r;
}

namespace {

void push_candidate(std::vector<ErasureAttempt>& cands, std::set<std::vector<int>>& seen,
                    std::vector<int> bits, double r, double th, double scale, bool guided) {
    if (bits.empty()) return;
    std::sort(bits.begin(), bits.end());
    if (!seen.insert(bits).second) return;
    ErasureAttempt a;
    a.bits = std::move(bits);
    a.loop_r = r;
    a.threshold = th;
    a.analysis_scale = scale;
    a.omega_guided = guided;
    cands.push_back(std::move(a));
}

}  // namespace

LpErasureResult decode_lp_erasure(const ParityCheckCode& code, const LlrVector& h,
                                  const ErasureParams& params) {
    if (params.epsilon < 0.0 || params.epsilon >= 1.0)
        throw std::invalid_argument("decode_lp_erasure: epsilon must lie in [0, 1)");
    LpErasureResult out;
    LpDecodeResult bare = decode_lp(code, h);
    if (bare.success) {
        out.success = true;
        out.bare_lp_succeeded = true;
        out.decoded_spins = bare.decoded_spins;
        return out;
    }
    out.bare_pseudo_codeword = bare.pseudo_codeword;
    const std::vector<double>& omega = bare.pseudo_codeword->omega;
    double omega_max = *std::max_element(omega.begin(), omega.end());

    std::vector<ErasureAttempt> candidates;
    std::set<std::vector<int>> seen;
    for (double scale : params.analysis_scales) {
        LlrVector hs(h);
        for (double& v : hs) v *= scale;
        BpParams bp = params.analysis_bp;
        bp.message_clip = params.analysis_bp.message_clip * scale;
        auto [state, beliefs] = run_bp(code, hs, bp);

        auto triads = triad_amplitudes(code, beliefs);
        auto res = find_critical_loop(code, triads, beliefs, params.loop_options);
        if (res.found) {
            push_candidate(candidates, seen, res.erase_union(), res.best.front().r,
                           res.threshold_used, scale, false);
            int extra = 0;
            for (const auto& c : res.cycles) {
                if (extra++ >= 3) break;
                push_candidate(candidates, seen, c.bits, c.r, res.threshold_used, scale, false);
            }
        }
        // restrict to the strong support of the failing LP vertex
        if (omega_max > 0) {
            auto filter = [&](int i) { return omega[i] >= 0.5 * omega_max; };
            auto ftr = triad_amplitudes(code, beliefs, filter);
            CriticalLoopOptions opt = params.loop_options;
            opt.thresholds.insert(opt.thresholds.end(), {0.3, 0.1, 0.01});
            auto res2 = find_critical_loop(code, ftr, beliefs, opt);
            if (res2.found)
                push_candidate(candidates, seen, res2.erase_union(), res2.best.front().r,
                               res2.threshold_used, scale, true);
        }
        if (static_cast<int>(candidates.size()) >= params.max_attempts) break;
    }

    for (auto& cand : candidates) {
        if (static_cast<int>(out.attempts.size()) >= params.max_attempts) break;
        LlrVector h2(h);
        for (int i : cand.bits) h2[i] *= params.epsilon;
        LpDecodeResult res = decode_lp(code, h2);
        cand.success = res.success;
        out.attempts.push_back(cand);
        if (res.success) {
            out.success = true;
            out.decoded_spins = res.decoded_spins;
            return out;
        }
    }
    return out;
}

}  // namespace loopdec
