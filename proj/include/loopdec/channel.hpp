#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopdec/code.hpp"

namespace loopdec {

// Per-bit log-likelihoods in the paper's units (for AWGN, h = channel
// output around the +-1 signal points).
using LlrVector = std::vector<double>;

struct NoiseConfiguration {
    std::vector<double> x;  // channel output
    Codeword transmitted;
};

// x_i = sigma_i + g_i, g_i Gaussian with variance 1/s2 (the channel density
// is p(x|sigma) ~ exp(-s2 (x-sigma)^2 / 2)).
NoiseConfiguration awgn_sample(const ParityCheckCode& code, const Codeword& transmitted,
                               double s2, std::uint64_t seed);

// AWGN: h = x.  Kept as a seam so other channels can slot in.
LlrVector llr_from_output(const NoiseConfiguration& noise);

// AWGN pseudo-weight (sum w)^2 / sum w^2 of an LP vertex in [0,1]^N,
// measured relative to the all-(+1) codeword.
double effective_distance(const std::vector<double>& omega);

// Minimum-norm noise on the equal-LP-cost surface between omega and the
// zero codeword: h_i = 1 - omega_i * sum(omega) / sum(omega^2).
// Satisfies sum_i h_i omega_i = 0 and sum_i (h_i - 1)^2 = effective_distance.
LlrVector instanton_noise_for(const std::vector<double>& omega);

// CSV (one value per line) and JSON array serialization.
std::string llr_to_csv(const LlrVector& h);
LlrVector llr_from_csv(const std::string& text);
LlrVector load_llr_file(const std::string& path);
void save_llr_file(const LlrVector& h, const std::string& path);

}  // namespace loopdec
