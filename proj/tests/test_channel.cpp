#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loopdec/channel.hpp"
#include "loopdec/numeric.hpp"
#include "loopdec/samples.hpp"

using namespace loopdec;

namespace {

Codeword all_plus(int n) {
    Codeword w;
    w.spins.assign(n, 1);
    return w;
}

}  // namespace

TEST_CASE("awgn_sample") {
    ParityCheckCode code = sample_hamming74();
    SUBCASE("vanishing noise limit") {
        auto noise = awgn_sample(code, all_plus(7), 1e9, 1);
        for (double x : noise.x) CHECK(std::fabs(x - 1.0) < 1e-3);
    }
    SUBCASE("determinism") {
        auto a = awgn_sample(code, all_plus(7), 2.0, 42);
        auto b = awgn_sample(code, all_plus(7), 2.0, 42);
        CHECK(a.x == b.x);
        auto c = awgn_sample(code, all_plus(7), 2.0, 43);
        CHECK(a.x != c.x);
    }
    SUBCASE("moments at s2 = 1") {
        double sum = 0.0, sum2 = 0.0;
        int draws = 100000;
        for (int t = 0; t < draws; ++t) {
            auto noise = awgn_sample(code, all_plus(7), 1.0, 10000 + t);
            double g = noise.x[0] - 1.0;
            sum += g;
            sum2 += g * g;
        }
        double mean = sum / draws;
        double var = sum2 / draws - mean * mean;
        CHECK(std::fabs(mean) < 0.02);
        CHECK(std::fabs(var - 1.0) < 0.02);
    }
    SUBCASE("rejects bad s2") {
        CHECK_THROWS_AS(awgn_sample(code, all_plus(7), 0.0, 1), std::invalid_argument);
    }
}

TEST_CASE("llr_from_output is the identity for awgn") {
    NoiseConfiguration noise;
    noise.x = {1.0, -0.3};
    auto h = llr_from_output(noise);
    CHECK(h == std::vector<double>{1.0, -0.3});
}

TEST_CASE("effective_distance") {
    SUBCASE("integral codeword of weight d") {
        std::vector<double> w(155, 0.0);
        for (int i = 0; i < 20; ++i) w[3 * i] = 1.0;
        CHECK(effective_distance(w) == doctest::Approx(20.0).epsilon(1e-14));
    }
    SUBCASE("(1/2,1/2,1/2,1/2) -> 4") {
        CHECK(effective_distance({0.5, 0.5, 0.5, 0.5}) == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("scale invariance") {
        Rng rng(5);
        std::vector<double> w(31);
        for (auto& v : w) v = rng.next_double();
        double base = effective_distance(w);
        for (double c : {0.1, 2.0, 1e3}) {
            auto scaled = w;
            for (auto& v : scaled) v *= c;
            CHECK(effective_distance(scaled) == doctest::Approx(base).epsilon(1e-12));
        }
    }
    SUBCASE("zero vector rejected") {
        CHECK_THROWS_AS(effective_distance(std::vector<double>(4, 0.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("instanton_noise_for") {
    SUBCASE("weight-d codeword gives the mid-point erasure") {
        std::vector<double> w(10, 0.0);
        w[1] = w[4] = w[7] = 1.0;
        auto h = instanton_noise_for(w);
        for (int i = 0; i < 10; ++i)
            CHECK(h[i] == doctest::Approx(w[i] > 0 ? 0.0 : 1.0).epsilon(1e-14));
    }
    SUBCASE("equal-cost identity and distance identity") {
        Rng rng(8);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> w(40);
            for (auto& v : w) v = rng.next_double();
            auto h = instanton_noise_for(w);
            double cost = 0.0, dist2 = 0.0;
            for (size_t i = 0; i < w.size(); ++i) {
                cost += h[i] * w[i];
                dist2 += (h[i] - 1.0) * (h[i] - 1.0);
            }
            CHECK(std::fabs(cost) < 1e-12 * w.size());
            CHECK(dist2 == doctest::Approx(effective_distance(w)).epsilon(1e-12));
        }
    }
}

TEST_CASE("llr csv round trip") {
    LlrVector h = {1.25, -0.5, 1e-17, 42.0};
    CHECK(llr_from_csv(llr_to_csv(h)) == h);
    CHECK_THROWS_AS(llr_from_csv("1.0\nnope\n"), std::runtime_error);
}
