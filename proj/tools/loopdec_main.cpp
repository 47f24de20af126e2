#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "loopdec/bp.hpp"
#include "loopdec/channel.hpp"
#include "loopdec/code.hpp"
#include "loopdec/effective_bp.hpp"
#include "loopdec/experiments.hpp"
#include "loopdec/instanton.hpp"
#include "loopdec/loops.hpp"
#include "loopdec/lp.hpp"
#include "loopdec/samples.hpp"

using json = nlohmann::json;
using namespace loopdec;

namespace {

constexpr const char* kVersion = "loopdec 0.1.0";

int env_threads() {
    const char* v = std::getenv("LOOPDEC_THREADS");
    if (!v) return 0;
    return std::atoi(v);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

json state_json(const BpState& state) {
    return {{"converged", state.converged},
            {"iterations", state.iterations_run},
            {"residual", state.residual}};
}

void write_or_print(const json& out, const std::string& path) {
    if (path.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        std::ofstream f(path);
        f << out.dump(2) << '\n';
    }
}

void write_manifest(const std::filesystem::path& dir, const json& config,
                    const ParityCheckCode& code) {
    json manifest = {{"version", kVersion},
                     {"config", config},
                     {"config_hash", fnv1a(config.dump())},
                     {"code_hash", fnv1a(emit_alist(code))}};
    std::ofstream f(dir / "manifest.json");
    f << manifest.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LDPC decoding laboratory: BP, LP, loop series, instantons"};
    app.require_subcommand(1);

    // ---- code ----
    auto* code_cmd = app.add_subcommand("code", "code construction and inspection");
    code_cmd->require_subcommand(1);

    std::string info_path;
    auto* info = code_cmd->add_subcommand("info", "describe an alist code");
    info->add_option("file", info_path, "alist file")->required();
    info->callback([&] {
        ParityCheckCode code = load_alist_file(info_path);
        json out = {{"n", code.n_bits()},
                    {"m", code.n_checks()},
                    {"edges", code.n_edges()},
                    {"max_bit_degree", code.max_bit_degree()},
                    {"max_check_degree", code.max_check_degree()},
                    {"gf2_rank", gf2_rank(code)},
                    {"dimension", code.n_bits() - gf2_rank(code)},
                    {"girth", girth(code)}};
        std::cout << out.dump(2) << '\n';
    });

    std::string mk_out, mk_json;
    auto* mk = code_cmd->add_subcommand("make-tanner155", "emit the quasi-cyclic (155,64,20) code");
    mk->add_option("-o,--output", mk_out, "alist output path")->required();
    mk->add_option("--json", mk_json, "also write a JSON descriptor");
    mk->callback([&] {
        ParityCheckCode code = build_tanner_155();
        save_alist_file(code, mk_out);
        if (!mk_json.empty()) {
            std::ofstream f(mk_json);
            f << emit_code_json(code) << '\n';
        }
    });

    // ---- chan ----
    auto* chan_cmd = app.add_subcommand("chan", "channel simulation");
    chan_cmd->require_subcommand(1);
    std::string chan_code, chan_out;
    double chan_s2 = 2.0;
    std::uint64_t chan_seed = 1;
    auto* chan_sample = chan_cmd->add_subcommand("sample", "awgn sample around the all-(+1) word");
    chan_sample->add_option("--code", chan_code)->required();
    chan_sample->add_option("--s2", chan_s2, "snr parameter s^2 (noise variance 1/s^2)");
    chan_sample->add_option("--seed", chan_seed);
    chan_sample->add_option("-o,--output", chan_out, "llr csv output")->required();
    chan_sample->callback([&] {
        ParityCheckCode code = load_alist_file(chan_code);
        Codeword w;
        w.spins.assign(code.n_bits(), 1);
        auto noise = awgn_sample(code, w, chan_s2, chan_seed);
        save_llr_file(llr_from_output(noise), chan_out);
    });

    // ---- bp ----
    auto* bp_cmd = app.add_subcommand("bp", "belief propagation");
    bp_cmd->require_subcommand(1);
    std::string bp_code, bp_llr, bp_out;
    BpParams bp_params;
    auto* bp_decode_cmd = bp_cmd->add_subcommand("decode", "sum-product decode");
    bp_decode_cmd->add_option("--code", bp_code)->required();
    bp_decode_cmd->add_option("--llr", bp_llr)->required();
    bp_decode_cmd->add_option("--max-iters", bp_params.max_iters);
    bp_decode_cmd->add_option("--tol", bp_params.tol);
    bp_decode_cmd->add_option("--damping", bp_params.damping);
    bp_decode_cmd->add_option("-o,--output", bp_out);
    bp_decode_cmd->callback([&] {
        ParityCheckCode code = load_alist_file(bp_code);
        LlrVector h = load_llr_file(bp_llr);
        auto result = decode_bp(code, h, bp_params);
        json out = {{"converged", result.state.converged},
                    {"iterations", result.state.iterations_run},
                    {"residual", result.state.residual},
                    {"magnetizations", result.beliefs.bit_m},
                    {"free_energy", bethe_free_energy(code, h, result.beliefs)},
                    {"decoded", result.decoded_spins},
                    {"success", result.success},
                    {"params",
                     {{"max_iters", bp_params.max_iters},
                      {"tol", bp_params.tol},
                      {"damping", bp_params.damping},
                      {"message_clip", bp_params.message_clip}}}};
        write_or_print(out, bp_out);
    });

    std::string bl_code, bl_llr, bl_out;
    LoopCorrectedDecodeParams bl_params;
    auto* bp_loop_cmd = bp_cmd->add_subcommand("decode-loop", "loop-corrected BP decode");
    bp_loop_cmd->add_option("--code", bl_code)->required();
    bp_loop_cmd->add_option("--llr", bl_llr)->required();
    bp_loop_cmd->add_option("--max-loops", bl_params.max_loops);
    bp_loop_cmd->add_option("-o,--output", bl_out);
    bp_loop_cmd->callback([&] {
        ParityCheckCode code = load_alist_file(bl_code);
        LlrVector h = load_llr_file(bl_llr);
        auto result = decode_loop_corrected_bp(code, h, bl_params);
        json loops = json::array();
        for (size_t k = 0; k < result.loops_used.size(); ++k) {
            std::set<int> bits;
            for (int e : result.loops_used[k].edges) bits.insert(code.edge_bit(e));
            loops.push_back({{"bits", std::vector<int>(bits.begin(), bits.end())},
                             {"r", result.loop_r[k]}});
        }
        json out = {{"bare_bp_succeeded", result.bare_bp_succeeded},
                    {"success", result.success},
                    {"loops", loops},
                    {"residual_history", result.residual_history},
                    {"m_eff", result.m_eff},
                    {"decoded", result.decoded_spins}};
        write_or_print(out, bl_out);
    });

    // ---- loops ----
    auto* loops_cmd = app.add_subcommand("loops", "loop-series analysis");
    loops_cmd->require_subcommand(1);
    std::string la_code, la_llr, la_out;
    double la_scale = 25.0;
    double la_report_threshold = 0.5;
    auto* analyze = loops_cmd->add_subcommand("analyze", "triads and critical loops");
    analyze->add_option("--code", la_code)->required();
    analyze->add_option("--llr", la_llr)->required();
    analyze->add_option("--analysis-scale", la_scale,
                        "llr multiplier for the frozen-structure analysis");
    analyze->add_option("--report-threshold", la_report_threshold,
                        "report triads with |mu~| at or above this");
    analyze->add_option("-o,--output", la_out);
    analyze->callback([&] {
        ParityCheckCode code = load_alist_file(la_code);
        LlrVector h = load_llr_file(la_llr);
        for (double& v : h) v *= la_scale;
        BpParams params{3000, 1e-12, 0.5, 30.0 * la_scale};
        auto [state, beliefs] = run_bp(code, h, params);
        auto triads = triad_amplitudes(code, beliefs);
        auto res = find_critical_loop(code, triads, beliefs);
        json jt = json::array();
        for (const auto& t : triads)
            if (std::fabs(t.value) >= la_report_threshold)
                jt.push_back(
                    {{"check", t.check}, {"bits", {t.bit_i, t.bit_j}}, {"mu", t.value}});
        json jl = json::array();
        for (const auto& c : res.best)
            jl.push_back({{"bits", c.bits}, {"checks", c.checks}, {"r", c.r}});
        json out = {{"analysis_scale", la_scale},
                    {"bp", state_json(state)},
                    {"triads", jt},
                    {"found", res.found},
                    {"threshold_used", res.threshold_used},
                    {"critical_loops", jl},
                    {"bit_llr", beliefs.bit_llr}};
        write_or_print(out, la_out);
    });

    std::string zc_code, zc_llr, zc_out;
    auto* zcheck = loops_cmd->add_subcommand("z-check", "loop series vs brute force (small codes)");
    zcheck->add_option("--code", zc_code)->required();
    zcheck->add_option("--llr", zc_llr)->required();
    zcheck->add_option("-o,--output", zc_out);
    zcheck->callback([&] {
        ParityCheckCode code = load_alist_file(zc_code);
        LlrVector h = load_llr_file(zc_llr);
        BpParams params{20000, 1e-13, 0.5, 30.0};
        auto [state, beliefs] = run_bp(code, h, params);
        auto series = partition_function_series(code, h, state, beliefs);
        double z_bf = 0.0;
        for (const auto& w : enumerate_codewords(code)) {
            double s = 0.0;
            for (int i = 0; i < code.n_bits(); ++i) s += h[i] * w.spins[i];
            z_bf += std::exp(s);
        }
        json out = {{"bp", state_json(state)},
                    {"Z0", series.z0},
                    {"sum_r", series.sum_r},
                    {"n_loops", series.corrections.size()},
                    {"Z_series", series.z_series},
                    {"Z_bruteforce", z_bf},
                    {"rel_err", std::fabs(series.z_series - z_bf) / z_bf}};
        write_or_print(out, zc_out);
    });

    // ---- lp ----
    auto* lp_cmd = app.add_subcommand("lp", "linear-programming decoding");
    lp_cmd->require_subcommand(1);
    std::string lp_code, lp_llr, lp_out;
    bool lp_erasure = false;
    double lp_eps = 0.0;
    auto* lp_decode_cmd = lp_cmd->add_subcommand("decode", "LP decode (optionally LP-erasure)");
    lp_decode_cmd->add_option("--code", lp_code)->required();
    lp_decode_cmd->add_option("--llr", lp_llr)->required();
    lp_decode_cmd->add_flag("--erasure", lp_erasure, "enable the loop-erasure retry");
    lp_decode_cmd->add_option("--epsilon", lp_eps, "erasure strength (0 = full erasure)");
    lp_decode_cmd->add_option("-o,--output", lp_out);
    lp_decode_cmd->callback([&] {
        ParityCheckCode code = load_alist_file(lp_code);
        LlrVector h = load_llr_file(lp_llr);
        json out;
        if (!lp_erasure) {
            auto r = decode_lp(code, h);
            out["success"] = r.success;
            out["objective"] = r.objective;
            if (r.success) {
                out["decoded"] = r.decoded_spins;
                out["integral"] = true;
            } else {
                out["integral"] = r.pseudo_codeword->is_integral;
                out["x"] = r.pseudo_codeword->omega;
                out["d_eff"] = r.pseudo_codeword->eff_distance;
            }
        } else {
            ErasureParams params;
            params.epsilon = lp_eps;
            auto r = decode_lp_erasure(code, h, params);
            out["success"] = r.success;
            out["bare_lp_succeeded"] = r.bare_lp_succeeded;
            if (r.success) out["decoded"] = r.decoded_spins;
            if (r.bare_pseudo_codeword) {
                out["x"] = r.bare_pseudo_codeword->omega;
                out["d_eff"] = r.bare_pseudo_codeword->eff_distance;
            }
            json tried = json::array();
            for (const auto& a : r.attempts)
                tried.push_back({{"bits", a.bits},
                                 {"r", a.loop_r},
                                 {"threshold", a.threshold},
                                 {"analysis_scale", a.analysis_scale},
                                 {"omega_guided", a.omega_guided},
                                 {"success", a.success}});
            out["loops_tried"] = tried;
        }
        write_or_print(out, lp_out);
    });

    // ---- instanton ----
    auto* inst_cmd = app.add_subcommand("instanton", "pseudo-codeword search");
    inst_cmd->require_subcommand(1);
    std::string is_code, is_out;
    int is_seeds = 500;
    std::uint64_t is_seed0 = 1000;
    int is_threads = env_threads();
    auto* is_search = inst_cmd->add_subcommand("search", "seeded search campaign");
    is_search->add_option("--code", is_code)->required();
    is_search->add_option("--seeds", is_seeds);
    is_search->add_option("--seed0", is_seed0);
    is_search->add_option("--threads", is_threads);
    is_search->add_option("-o,--output", is_out, "output directory")->required();
    is_search->callback([&] {
        ParityCheckCode code = load_alist_file(is_code);
        InstantonSearchParams params;
        auto cat = build_instanton_catalog(code, is_seeds, is_seed0, params, is_threads);
        std::filesystem::create_directories(is_out);
        save_catalog(cat, is_out);
        json config = {{"seeds", is_seeds}, {"seed0", is_seed0}};
        write_manifest(is_out, config, code);
        json out = {{"seeds_run", cat.seeds_run},
                    {"raw_converged", cat.raw_converged},
                    {"distinct", cat.records.size()},
                    {"min_d_eff", cat.records.empty() ? -1.0 : cat.records.front().eff_distance}};
        std::cout << out.dump(2) << '\n';
    });

    // ---- exp ----
    auto* exp_cmd = app.add_subcommand("exp", "experiment campaigns");
    exp_cmd->require_subcommand(1);

    std::string ec_code, ec_out, ec_config;
    CorrectionConfig ec;
    ec.threads = env_threads();
    auto* correct = exp_cmd->add_subcommand("correct", "instanton correction table");
    correct->add_option("--code", ec_code)->required();
    correct->add_option("--config", ec_config, "json config (flags override)");
    correct->add_option("--seeds", ec.n_seeds);
    correct->add_option("--seed0", ec.seed0);
    correct->add_option("--max-instantons", ec.max_instantons);
    correct->add_option("--epsilon", ec.epsilon);
    correct->add_option("--threads", ec.threads);
    correct->add_option("-o,--output", ec_out, "output directory")->required();
    correct->callback([&] {
        ParityCheckCode code = load_alist_file(ec_code);
        if (!ec_config.empty()) {
            std::ifstream f(ec_config);
            json j = json::parse(f);
            if (j.contains("seeds")) ec.n_seeds = j["seeds"];
            if (j.contains("seed0")) ec.seed0 = j["seed0"];
            if (j.contains("max_instantons")) ec.max_instantons = j["max_instantons"];
            if (j.contains("epsilon")) ec.epsilon = j["epsilon"];
        }
        auto report = run_instanton_correction(code, ec);
        std::filesystem::create_directories(ec_out);
        std::ofstream rows(std::filesystem::path(ec_out) / "correction_rows.jsonl");
        for (const auto& row : report.rows) {
            json jr = {{"seed", row.seed},
                       {"d_eff", row.d_eff},
                       {"lambda", row.lambda},
                       {"bare_lp_failed", row.bare_lp_failed},
                       {"corrected", row.corrected},
                       {"decoded_transmitted", row.decoded_transmitted},
                       {"loops_tried", row.loops_tried},
                       {"loop_r", row.loop_r},
                       {"threshold", row.threshold},
                       {"erased_bits", row.erased_bits}};
            rows << jr.dump() << '\n';
        }
        std::ofstream summary(std::filesystem::path(ec_out) / "summary.csv");
        summary << "n_instantons,rows,corrected_fraction\n"
                << report.n_instantons << ',' << report.rows.size() << ','
                << report.corrected_fraction << '\n';
        json config = {{"seeds", ec.n_seeds},
                       {"seed0", ec.seed0},
                       {"max_instantons", ec.max_instantons},
                       {"epsilon", ec.epsilon}};
        write_manifest(ec_out, config, code);
        std::cout << json({{"n_instantons", report.n_instantons},
                           {"rows", report.rows.size()},
                           {"corrected_fraction", report.corrected_fraction}})
                         .dump(2)
                  << '\n';
    });

    std::string fer_code, fer_out;
    FerConfig fer;
    fer.threads = env_threads();
    std::vector<double> fer_grid;
    auto* fer_cmd = exp_cmd->add_subcommand("fer", "LP vs LP-erasure frame error rates");
    fer_cmd->add_option("--code", fer_code)->required();
    fer_cmd->add_option("--s2", fer_grid, "s2 grid points");
    fer_cmd->add_option("--trials", fer.trials);
    fer_cmd->add_option("--seed0", fer.seed0);
    fer_cmd->add_option("--epsilon", fer.epsilon);
    fer_cmd->add_option("--threads", fer.threads);
    fer_cmd->add_option("-o,--output", fer_out, "output directory")->required();
    fer_cmd->callback([&] {
        ParityCheckCode code = load_alist_file(fer_code);
        if (!fer_grid.empty()) fer.s2_grid = fer_grid;
        auto rows = run_fer_sweep(code, fer);
        std::filesystem::create_directories(fer_out);
        std::ofstream csv(std::filesystem::path(fer_out) / "fer.csv");
        csv << "s2,trials,lp_failures,erasure_failures,lp_fer,lp_lo,lp_hi,er_fer,er_lo,er_hi\n";
        for (const auto& r : rows)
            csv << r.s2 << ',' << r.trials << ',' << r.lp_failures << ',' << r.erasure_failures
                << ',' << r.lp_fer << ',' << r.lp_lo << ',' << r.lp_hi << ',' << r.er_fer << ','
                << r.er_lo << ',' << r.er_hi << '\n';
        json config = {{"s2_grid", fer.s2_grid}, {"trials", fer.trials}, {"seed0", fer.seed0}};
        write_manifest(fer_out, config, code);
        for (const auto& r : rows)
            std::cout << "s2=" << r.s2 << " lp_failures=" << r.lp_failures << "/" << r.trials
                      << " erasure_failures=" << r.erasure_failures << "/" << r.trials << '\n';
    });

    std::string zs_out;
    ZCheckConfig zs;
    auto* zsuite = exp_cmd->add_subcommand("zcheck", "loop-series regression suite");
    zsuite->add_option("--draws", zs.draws);
    zsuite->add_option("--seed0", zs.seed0);
    zsuite->add_option("-o,--output", zs_out);
    zsuite->callback([&] {
        auto rows = run_zcheck_suite(zs);
        json out = json::array();
        bool all = true;
        for (const auto& r : rows) {
            out.push_back({{"graph", r.graph},
                           {"n_loops", r.n_loops},
                           {"draws", r.draws},
                           {"skipped_saturated", r.skipped_saturated},
                           {"max_rel_err", r.max_rel_err},
                           {"pass", r.pass}});
            all = all && r.pass;
        }
        write_or_print(json{{"rows", out}, {"all_pass", all}}, zs_out);
        if (!all) std::exit(1);
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
