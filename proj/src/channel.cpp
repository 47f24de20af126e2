#include "loopdec/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "loopdec/numeric.hpp"

namespace loopdec {

NoiseConfiguration awgn_sample(const ParityCheckCode& code, const Codeword& transmitted,
                               double s2, std::uint64_t seed) {
    if (s2 <= 0) throw std::invalid_argument("awgn_sample: s2 must be positive");
    if (static_cast<int>(transmitted.spins.size()) != code.n_bits())
        throw std::invalid_argument("awgn_sample: codeword length mismatch");
    Rng rng(seed);
    NoiseConfiguration out;
    out.transmitted = transmitted;
    out.x.resize(code.n_bits());
    double sigma = 1.0 / std::sqrt(s2);
    for (int i = 0; i < code.n_bits(); ++i)
        out.x[i] = transmitted.spins[i] + sigma * rng.next_gaussian();
    return out;
}

LlrVector llr_from_output(const NoiseConfiguration& noise) { return noise.x; }

double effective_distance(const std::vector<double>& omega) {
    double s = 0.0, s2 = 0.0;
    for (double w : omega) {
        s += w;
        s2 += w * w;
    }
    if (s2 == 0.0) throw std::invalid_argument("effective_distance: zero vector");
    return s * s / s2;
}

LlrVector instanton_noise_for(const std::vector<double>& omega) {
    double s = 0.0, s2 = 0.0;
    for (double w : omega) {
        s += w;
        s2 += w * w;
    }
    if (s2 == 0.0) throw std::invalid_argument("instanton_noise_for: zero vector");
    LlrVector h(omega.size());
    double scale = s / s2;
    for (size_t i = 0; i < omega.size(); ++i) h[i] = 1.0 - omega[i] * scale;
    return h;
}

std::string llr_to_csv(const LlrVector& h) {
    std::ostringstream out;
    out.precision(17);
    for (double v : h) out << v << '\n';
    return out.str();
}

LlrVector llr_from_csv(const std::string& text) {
    LlrVector h;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            h.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw std::runtime_error("llr csv: bad value '" + line + "'");
        }
    }
    return h;
}

LlrVector load_llr_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return llr_from_csv(ss.str());
}

void save_llr_file(const LlrVector& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << llr_to_csv(h);
}

}  // namespace loopdec
