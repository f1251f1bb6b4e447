#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ctmark {

/// Deterministic 64-bit stream (splitmix64). Every random quantity in the
/// toolkit — watermark signs, noise, key draws — comes from this generator
/// so results are reproducible bit-for-bit across platforms.
class KeyedRng {
public:
    explicit KeyedRng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    /// Uniform on (0, 1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// +1 / -1 from the top bit.
    int next_sign() { return (next_u64() >> 63) ? +1 : -1; }

    /// Standard normal via Box-Muller; generates in pairs.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::vector<double> prs_sequence(uint64_t key, size_t length) {
    KeyedRng rng(key);
    std::vector<double> out(length);
    for (size_t k = 0; k < length; ++k) out[k] = static_cast<double>(rng.next_sign());
    return out;
}

}  // namespace ctmark
