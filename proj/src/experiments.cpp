#include "loopdec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "loopdec/bp.hpp"
#include "loopdec/numeric.hpp"
#include "loopdec/samples.hpp"

namespace loopdec {

std::pair<double, double> wilson_interval(int k, int n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    double p = static_cast<double>(k) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

CorrectionReport run_instanton_correction(const ParityCheckCode& code,
                                          const CorrectionConfig& config,
                                          const InstantonCatalog* catalog) {
    InstantonCatalog local;
    if (!catalog) {
        InstantonSearchParams sp;
        local = build_instanton_catalog(code, config.n_seeds, config.seed0, sp, config.threads);
        catalog = &local;
    }
    CorrectionReport report;
    std::vector<const InstantonRecord*> picked;
    for (const auto& r : catalog->records) {
        if (r.eff_distance >= config.hamming_distance) continue;
        picked.push_back(&r);
        if (static_cast<int>(picked.size()) >= config.max_instantons) break;
    }
    report.n_instantons = static_cast<int>(picked.size());
    if (picked.empty()) return report;

    std::vector<int> all_plus(code.n_bits(), 1);
    struct Task {
        const InstantonRecord* rec;
        double lambda;
    };
    std::vector<Task> tasks;
    for (const InstantonRecord* rec : picked) {
        double cap = std::sqrt(config.hamming_distance / rec->eff_distance);
        double lo = 1.0 + 1e-6;
        double hi = std::min(config.rescale_max, 0.999 * cap);
        int pts = std::max(1, config.rescale_points);
        for (int k = 0; k < pts; ++k) {
            double lambda =
                pts == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (pts - 1);
            tasks.push_back({rec, lambda});
        }
    }

    std::vector<CorrectionRow> rows(tasks.size());
    std::atomic<int> next{0};
    int threads = config.threads > 0 ? config.threads
                                     : std::max(1u, std::thread::hardware_concurrency());
    auto worker = [&]() {
        while (true) {
            int k = next.fetch_add(1);
            if (k >= static_cast<int>(tasks.size())) break;
            const auto& task = tasks[k];
            CorrectionRow row;
            row.seed = task.rec->seed;
            row.d_eff = task.rec->eff_distance;
            row.lambda = task.lambda;
            LlrVector h(code.n_bits());
            for (int i = 0; i < code.n_bits(); ++i)
                h[i] = 1.0 + task.lambda * (task.rec->instanton_llr[i] - 1.0);
            LpDecodeResult bare = decode_lp(code, h);
            row.bare_lp_failed = !bare.success;
            ErasureParams ep = config.erasure;
            ep.epsilon = config.epsilon;
            LpErasureResult er = decode_lp_erasure(code, h, ep);
            row.corrected = er.success;
            row.loops_tried = static_cast<int>(er.attempts.size());
            if (er.success && !er.attempts.empty()) {
                const auto& a = er.attempts.back();
                row.loop_r = a.loop_r;
                row.threshold = a.threshold;
                row.erased_bits = a.bits;
            }
            row.decoded_transmitted = er.success && er.decoded_spins == all_plus;
            rows[k] = std::move(row);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int good = 0;
    for (auto& row : rows) {
        good += row.decoded_transmitted && row.bare_lp_failed;
        report.rows.push_back(std::move(row));
    }
    report.corrected_fraction = static_cast<double>(good) / static_cast<double>(rows.size());
    return report;
}

std::vector<FerRow> run_fer_sweep(const ParityCheckCode& code, const FerConfig& config) {
    std::vector<FerRow> out;
    Codeword all_plus;
    all_plus.spins.assign(code.n_bits(), 1);
    for (double s2 : config.s2_grid) {
        FerRow row;
        row.s2 = s2;
        row.trials = config.trials;
        std::atomic<int> next{0};
        std::atomic<int> lp_fail{0}, er_fail{0};
        int threads = config.threads > 0 ? config.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
        auto worker = [&]() {
            while (true) {
                int t = next.fetch_add(1);
                if (t >= config.trials) break;
                std::uint64_t seed =
                    config.seed0 ^ (static_cast<std::uint64_t>(s2 * 4096.0) << 20) ^
                    static_cast<std::uint64_t>(t);
                NoiseConfiguration noise = awgn_sample(code, all_plus, s2, seed);
                LlrVector h = llr_from_output(noise);
                LpDecodeResult lp = decode_lp(code, h);
                bool lp_ok = lp.success && lp.decoded_spins == all_plus.spins;
                if (!lp_ok) {
                    lp_fail.fetch_add(1);
                    ErasureParams ep = config.erasure;
                    ep.epsilon = config.epsilon;
                    LpErasureResult er = decode_lp_erasure(code, h, ep);
                    bool er_ok = er.success && er.decoded_spins == all_plus.spins;
                    if (!er_ok) er_fail.fetch_add(1);
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        row.lp_failures = lp_fail.load();
        row.erasure_failures = er_fail.load();
        row.lp_fer = static_cast<double>(row.lp_failures) / row.trials;
        row.er_fer = static_cast<double>(row.erasure_failures) / row.trials;
        std::tie(row.lp_lo, row.lp_hi) = wilson_interval(row.lp_failures, row.trials);
        std::tie(row.er_lo, row.er_hi) = wilson_interval(row.erasure_failures, row.trials);
        out.push_back(row);
    }
    return out;
}

std::vector<ZCheckRow> run_zcheck_suite(const ZCheckConfig& config) {
    std::vector<ZCheckRow> out;
    for (const auto& named : zcheck_suite()) {
        const ParityCheckCode& code = named.code;
        ZCheckRow row;
        row.graph = named.name;
        row.draws = config.draws;
        auto loops = enumerate_generalized_loops(code);
        row.n_loops = static_cast<int>(loops.size());
        Rng rng(config.seed0);
        auto words = enumerate_codewords(code);
        for (int t = 0; t < config.draws; ++t) {
            LlrVector h(code.n_bits());
            for (auto& v : h) v = config.h_scale * (2.0 * rng.next_double() - 1.0);
            BpParams bp;
            bp.max_iters = 20000;
            bp.tol = 1e-13;
            auto [state, beliefs] = run_bp(code, h, bp);
            if (!state.converged) {
                ++row.skipped_saturated;
                continue;
            }
            double z_bf = 0.0;
            for (const auto& w : words) {
                double s = 0.0;
                for (int i = 0; i < code.n_bits(); ++i) s += h[i] * w.spins[i];
                z_bf += std::exp(s);
            }
            LoopSeries series;
            try {
                series = partition_function_series(code, h, state, beliefs);
            } catch (const SaturationError&) {
                ++row.skipped_saturated;
                continue;
            }
            row.max_rel_err =
                std::max(row.max_rel_err, std::fabs(series.z_series - z_bf) / z_bf);
        }
        row.pass = row.max_rel_err <= config.rel_tol &&
                   row.skipped_saturated <= config.draws / 10;
        out.push_back(row);
    }
    return out;
}

}  // namespace loopdec
