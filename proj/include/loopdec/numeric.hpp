#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace loopdec {

// Saturation-stable building blocks.  Never form 1 -+ tanh(x) by
// subtraction: for |x| ~ 19 the subtraction rounds to 0 while the true
// value is ~1e-17, and the loop-amplitude ratios need those tails.

// 1 - tanh(x) = 2 / (1 + e^{2x})
inline double one_minus_tanh(double x) {
    if (x > 350.0) return 0.0;
    return 2.0 / (1.0 + std::exp(2.0 * x));
}

// 1 + tanh(x) = 2 / (1 + e^{-2x})
inline double one_plus_tanh(double x) {
    if (x < -350.0) return 0.0;
    return 2.0 / (1.0 + std::exp(-2.0 * x));
}

// 1 - tanh(x)^2
inline double one_minus_tanh_sq(double x) {
    return one_minus_tanh(x) * one_plus_tanh(x);
}

// (sigma - tanh(x)) for sigma = +-1
inline double sigma_minus_tanh(int sigma, double x) {
    return sigma > 0 ? one_minus_tanh(x) : -one_plus_tanh(x);
}

inline double clip(double v, double lim) {
    if (v > lim) return lim;
    if (v < -lim) return -lim;
    return v;
}

// atanh with clamping of the argument into (-1, 1) and of the result.
inline double atanh_clipped(double v, double lim) {
    if (v >= 1.0) return lim;
    if (v <= -1.0) return -lim;
    return clip(std::atanh(v), lim);
}

inline double log_sum_exp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v)
        if (x > m) m = x;
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Signed value carried as (sign, log|value|); multiplication-friendly.
struct SignedLog {
    double sign = 0.0;  // -1, 0, +1
    double log_mag = -std::numeric_limits<double>::infinity();

    static SignedLog from(double v) {
        if (v == 0.0) return {};
        return {v > 0 ? 1.0 : -1.0, std::log(std::fabs(v))};
    }
    double value() const {
        if (sign == 0.0) return 0.0;
        return sign * std::exp(log_mag);
    }
    SignedLog& operator*=(const SignedLog& o) {
        if (sign == 0.0 || o.sign == 0.0) {
            sign = 0.0;
            log_mag = -std::numeric_limits<double>::infinity();
        } else {
            sign *= o.sign;
            log_mag += o.log_mag;
        }
        return *this;
    }
    SignedLog& operator/=(const SignedLog& o) {
        sign = (o.sign == 0.0) ? 0.0 : sign * o.sign;
        log_mag -= o.log_mag;
        return *this;
    }
};

// Accumulates sum of signed terms given in log magnitude; used for the
// irreducible-correlation sums where positive and negative parts can each
// underflow a plain double.
struct SignedLogSum {
    std::vector<double> pos;
    std::vector<double> neg;

    void add(double sign, double log_mag) {
        if (sign > 0)
            pos.push_back(log_mag);
        else if (sign < 0)
            neg.push_back(log_mag);
    }
    SignedLog total() const {
        double lp = log_sum_exp(pos);
        double ln = log_sum_exp(neg);
        if (!std::isfinite(lp) && !std::isfinite(ln)) return {};
        if (lp >= ln) {
            double d = std::isfinite(ln) ? -std::expm1(ln - lp) : 1.0;
            if (d <= 0.0) return {};
            return {1.0, lp + std::log(d)};
        }
        double d = std::isfinite(lp) ? -std::expm1(lp - ln) : 1.0;
        if (d <= 0.0) return {};
        return {-1.0, ln + std::log(d)};
    }
};

// Deterministic RNG: splitmix64 state scrambling + xoshiro256** core.
// Gaussian via Box-Muller so streams are identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = s;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in (0, 1)
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace loopdec
