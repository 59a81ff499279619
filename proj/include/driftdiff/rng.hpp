#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace driftdiff {

// Philox4x32-10 counter-based generator (Salmon et al. constants). State is
// just (key, counter), so streams are reproducible across platforms and safe
// to hand out per task without shared mutable RNG state.
class Philox4x32 {
public:
    explicit Philox4x32(std::uint64_t seed) : key_{static_cast<std::uint32_t>(seed),
                                                   static_cast<std::uint32_t>(seed >> 32)} {}

    // Four 32-bit words for counter block `index`.
    std::array<std::uint32_t, 4> block(std::uint64_t index) const {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index),
                                         static_cast<std::uint32_t>(index >> 32), 0u, 0u};
        std::uint32_t k0 = key_[0];
        std::uint32_t k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = kMul0 * static_cast<std::uint64_t>(ctr[0]);
            const std::uint64_t p1 = kMul1 * static_cast<std::uint64_t>(ctr[2]);
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::array<std::uint32_t, 2> key_;
};

// Buffered stream of uniforms/normals on top of Philox. Normals use
// Box-Muller so the mapping from counter to variate is a fixed algorithm,
// not a library-dependent distribution.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform on the open interval (0, 1).
    double uniform() {
        const std::uint64_t bits = next_u64();
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t next_u64() {
        if (word_index_ == 4) {
            buffer_ = engine_.block(counter_++);
            word_index_ = 0;
        }
        const std::uint64_t lo = buffer_[word_index_++];
        if (word_index_ == 4) {
            buffer_ = engine_.block(counter_++);
            word_index_ = 0;
        }
        const std::uint64_t hi = buffer_[word_index_++];
        return (hi << 32) | lo;
    }

    Philox4x32 engine_;
    std::array<std::uint32_t, 4> buffer_{};
    std::uint64_t counter_ = 0;
    int word_index_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace driftdiff
