#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loopdec/lp.hpp"
#include "loopdec/numeric.hpp"
#include "loopdec/samples.hpp"
#include "oracle.hpp"

using namespace loopdec;

TEST_CASE("polytope constraint counts") {
    SUBCASE("degree-3 check: 4 odd subsets") {
        auto p = build_decoding_lp(sample_single_check(3), LlrVector(3, 1.0));
        CHECK(p.rows.size() == 4);
    }
    SUBCASE("degree-5 check: 16 odd subsets; tanner-155: 1488 rows") {
        auto p = build_decoding_lp(sample_single_check(5), LlrVector(5, 1.0));
        CHECK(p.rows.size() == 16);
        auto big = build_decoding_lp(build_tanner_155(), LlrVector(155, 1.0));
        CHECK(big.rows.size() == 1488);
    }
}

TEST_CASE("lp_solve basics") {
    SUBCASE("all-positive costs stay at the zero vertex") {
        auto p = build_decoding_lp(sample_hamming74(), LlrVector(7, 1.0));
        auto sol = lp_solve(p);
        CHECK(sol.status == LpStatus::optimal);
        for (double v : sol.x) CHECK(v == doctest::Approx(0.0));
        CHECK(sol.objective == doctest::Approx(0.0));
    }
    SUBCASE("repetition code pulls all bits together") {
        ParityCheckCode code = sample_tree3();
        auto r = decode_lp(code, LlrVector{1.0, 1.0, -3.0});
        REQUIRE(r.success);
        CHECK(r.decoded_spins == std::vector<int>{-1, -1, -1});
        CHECK(r.objective == doctest::Approx(-2.0));
    }
    SUBCASE("feasibility of the returned vertex") {
        ParityCheckCode code = sample_hamming74();
        Rng rng(3);
        for (int t = 0; t < 25; ++t) {
            LlrVector h(7);
            for (auto& v : h) v = 2.0 * rng.next_double() - 1.0;
            auto p = build_decoding_lp(code, h);
            auto sol = lp_solve(p);
            for (const auto& row : p.rows) {
                double s = 0.0;
                for (size_t k = 0; k < row.idx.size(); ++k) s += row.coef[k] * sol.x[row.idx[k]];
                CHECK(s <= row.rhs + 1e-9);
            }
            for (double v : sol.x) {
                CHECK(v >= -1e-9);
                CHECK(v <= 1.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("decode_lp") {
    SUBCASE("noiseless tanner-155") {
        ParityCheckCode code = build_tanner_155();
        auto r = decode_lp(code, LlrVector(155, 1.0));
        REQUIRE(r.success);
        for (int s : r.decoded_spins) CHECK(s == 1);
    }
    SUBCASE("argmin invariance under positive scaling") {
        ParityCheckCode code = sample_hamming74();
        Rng rng(9);
        for (int t = 0; t < 10; ++t) {
            LlrVector h(7);
            for (auto& v : h) v = 2.0 * rng.next_double() - 1.0;
            auto a = lp_solve(build_decoding_lp(code, h));
            LlrVector h3(h);
            for (auto& v : h3) v *= 3.0;
            auto b = lp_solve(build_decoding_lp(code, h3));
            for (int i = 0; i < 7; ++i) CHECK(a.x[i] == b.x[i]);
        }
    }
    SUBCASE("integral outputs agree with ML on small codes") {
        for (auto maker : {+[] { return sample_hamming74(); }, +[] { return sample_fused_cycles(); }}) {
            ParityCheckCode code = maker();
            Rng rng(11);
            for (int t = 0; t < 60; ++t) {
                LlrVector h(code.n_bits());
                for (auto& v : h) v = 2.0 * rng.next_double() - 1.0;
                auto r = decode_lp(code, h);
                if (!r.success) continue;
                // LP cost of the decoded word equals the ML optimum
                auto ml = oracle::ml_decode(code, h);
                double best = 0.0, got = 0.0;
                for (int i = 0; i < code.n_bits(); ++i) {
                    best += h[i] * ml.front().spins[i];
                    got += h[i] * r.decoded_spins[i];
                }
                CHECK(got == doctest::Approx(best).epsilon(1e-9));
            }
        }
    }
    SUBCASE("exhaustive |h| = 1 sign patterns on the repetition code") {
        ParityCheckCode code = sample_tree3();
        for (unsigned mask = 0; mask < 8; ++mask) {
            LlrVector h(3);
            for (int i = 0; i < 3; ++i) h[i] = (mask >> i & 1) ? 1.0 : -1.0;
            auto r = decode_lp(code, h);
            if (r.success) {
                double got = 0.0, best = 0.0;
                auto ml = oracle::ml_decode(code, h);
                for (int i = 0; i < 3; ++i) {
                    got += h[i] * r.decoded_spins[i];
                    best += h[i] * ml.front().spins[i];
                }
                CHECK(got == doctest::Approx(best));
            }
        }
    }
}

TEST_CASE("instanton noise sits on the lp decision boundary") {
    // a fractional vertex of the hamming-74 polytope, pushed past the tie
    ParityCheckCode code = sample_hamming74();
    // find a pseudo-codeword by decoding a tilted input
    Rng rng(21);
    std::optional<PseudoCodeword> pc;
    for (int t = 0; t < 200 && !pc; ++t) {
        LlrVector h(7);
        for (auto& v : h) v = 1.0 + 1.4 * rng.next_gaussian();
        auto r = decode_lp(code, h);
        if (!r.success && !r.pseudo_codeword->is_integral) pc = r.pseudo_codeword;
    }
    REQUIRE(pc.has_value());
    auto h_tie = instanton_noise_for(pc->omega);
    // past the surface: the pseudo-codeword side wins, LP fails
    LlrVector h_in(7), h_out(7);
    for (int i = 0; i < 7; ++i) {
        h_in[i] = 1.0 + 1.001 * (h_tie[i] - 1.0);
        h_out[i] = 1.0 + 0.9 * (h_tie[i] - 1.0);
    }
    CHECK_FALSE(decode_lp(code, h_in).success);
    auto back = decode_lp(code, h_out);
    REQUIRE(back.success);
    for (int s : back.decoded_spins) CHECK(s == 1);
}

TEST_CASE("lp erasure") {
    ParityCheckCode code = build_tanner_155();
    SUBCASE("noiseless input succeeds at step one") {
        auto r = decode_lp_erasure(code, LlrVector(155, 1.0));
        CHECK(r.success);
        CHECK(r.bare_lp_succeeded);
        CHECK(r.attempts.empty());
    }
    SUBCASE("epsilon validation") {
        CHECK_THROWS_AS(decode_lp_erasure(code, LlrVector(155, 1.0), ErasureParams{1.0}),
                        std::invalid_argument);
    }
}
