#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "loopdec/effective_bp.hpp"
#include "loopdec/numeric.hpp"
#include "loopdec/samples.hpp"
#include "oracle.hpp"

using namespace loopdec;

namespace {

LlrVector random_h(const ParityCheckCode& code, Rng& rng, double scale = 1.0) {
    LlrVector h(code.n_bits());
    for (auto& v : h) v = scale * (2.0 * rng.next_double() - 1.0);
    return h;
}

GeneralizedLoop whole_graph_loop(const ParityCheckCode& code) {
    GeneralizedLoop L;
    for (int e = 0; e < code.n_edges(); ++e) L.edges.push_back(e);
    return L;
}

}  // namespace

TEST_CASE("empty loop set reduces to bare BP") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        ParityCheckCode code = t % 2 ? sample_fused_cycles() : sample_hairy_cycle();
        auto h = random_h(code, rng);
        BpParams p;
        p.tol = 1e-13;
        p.max_iters = 30000;
        auto [state, beliefs] = run_bp(code, h, p);
        if (!state.converged) continue;
        EffectiveBpState st = effective_state_from_bp(code, h, state, {});
        auto res = effective_residuals(code, h, st);
        for (double r : res) CHECK(std::fabs(r) < 1e-11);
    }
}

TEST_CASE("residual support at a bare point is the loop boundary") {
    ParityCheckCode code = sample_hairy_cycle();
    Rng rng(5);
    auto h = random_h(code, rng);
    BpParams p;
    p.tol = 1e-13;
    p.max_iters = 30000;
    auto [state, beliefs] = run_bp(code, h, p);
    REQUIRE(state.converged);
    auto loops = enumerate_generalized_loops(code);
    REQUIRE(loops.size() == 1);
    EffectiveBpState st = effective_state_from_bp(code, h, state, loops);
    auto res = effective_residuals(code, h, st);

    std::set<int> loop_edges(loops[0].edges.begin(), loops[0].edges.end());
    int E = code.n_edges();
    for (int e = 0; e < E; ++e) {
        bool bit_in_loop = loops[0].contains_bit(code, code.edge_bit(e));
        bool chk_in_loop = false;
        for (int le : loops[0].edges)
            if (code.edge_check(le) == code.edge_check(e)) chk_in_loop = true;
        // boundary directed edges: source in the loop, edge not in the loop
        bool expect_bit_side = bit_in_loop && !loop_edges.count(e);
        bool expect_chk_side = chk_in_loop && !loop_edges.count(e);
        CHECK((std::fabs(res[e]) > 1e-10) == expect_bit_side);
        CHECK((std::fabs(res[E + e]) > 1e-10) == expect_chk_side);
    }
}

TEST_CASE("exact magnetizations on pure single cycles") {
    Rng rng(7);
    for (int len : {3, 4, 5}) {
        ParityCheckCode code = sample_pure_cycle(len);
        for (int t = 0; t < 3; ++t) {
            auto h = random_h(code, rng, 0.9);
            // short undamped run gives a moderate starting gauge
            BpParams p;
            p.max_iters = 8;
            p.damping = 0.0;
            p.tol = 1e-30;
            auto [state, beliefs] = run_bp(code, h, p);
            EffectiveBpState init =
                effective_state_from_bp(code, h, state, {whole_graph_loop(code)});
            EffectiveBpParams ep;
            ep.max_iters = 60000;
            auto sol = solve_effective_bp(code, h, std::move(init), ep);
            auto exact = oracle::gibbs(code, h);
            CAPTURE(len);
            CAPTURE(t);
            CHECK(sol.state.converged);
            for (int i = 0; i < code.n_bits(); ++i)
                CHECK(std::fabs(sol.m_eff[i] - exact.magnetization[i]) < 1e-8);
        }
    }
}

TEST_CASE("loop bits are exact on the one-loop hairy cycle") {
    ParityCheckCode code = sample_hairy_cycle();
    Rng rng(11);
    auto h = random_h(code, rng);
    BpParams p;
    p.tol = 1e-13;
    p.max_iters = 30000;
    auto [state, beliefs] = run_bp(code, h, p);
    REQUIRE(state.converged);
    auto loops = enumerate_generalized_loops(code);
    EffectiveBpState init = effective_state_from_bp(code, h, state, loops);
    auto sol = solve_effective_bp(code, h, std::move(init));
    REQUIRE(sol.state.converged);
    auto exact = oracle::gibbs(code, h);
    for (int i = 0; i < 3; ++i)  // the cycle bits
        CHECK(std::fabs(sol.m_eff[i] - exact.magnetization[i]) < 1e-10);
}

TEST_CASE("magnetization formula reduces to the bare value with no loops") {
    ParityCheckCode code = sample_fused_cycles();
    Rng rng(13);
    auto h = random_h(code, rng);
    BpParams p;
    p.tol = 1e-13;
    p.max_iters = 30000;
    auto [state, beliefs] = run_bp(code, h, p);
    REQUIRE(state.converged);
    EffectiveBpState init = effective_state_from_bp(code, h, state, {});
    auto sol = solve_effective_bp(code, h, std::move(init));
    for (int i = 0; i < code.n_bits(); ++i)
        CHECK(sol.m_eff[i] == doctest::Approx(beliefs.bit_m[i]).epsilon(1e-9));
}

TEST_CASE("decode_loop_corrected_bp") {
    SUBCASE("noiseless input stops at step one") {
        ParityCheckCode code = build_tanner_155();
        auto r = decode_loop_corrected_bp(code, LlrVector(155, 2.0));
        CHECK(r.success);
        CHECK(r.bare_bp_succeeded);
        CHECK(r.loops_used.empty());
    }
    SUBCASE("tree inputs never use a loop") {
        // trees have no cycles, so step two can never produce one; noisy
        // codeword transmissions already succeed at step one
        ParityCheckCode code = sample_tree7();
        Codeword w;
        w.spins.assign(7, 1);
        Rng rng(17);
        for (int t = 0; t < 10; ++t) {
            auto noise = awgn_sample(code, w, 4.0, 900 + t);
            auto r = decode_loop_corrected_bp(code, llr_from_output(noise));
            if (t < 3) CHECK(r.bare_bp_succeeded);  // quiet channel draws
            CHECK(r.loops_used.empty());
        }
        for (int t = 0; t < 5; ++t) {
            auto r = decode_loop_corrected_bp(code, random_h(code, rng));
            CHECK(r.loops_used.empty());
        }
    }
}
