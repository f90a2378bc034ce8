#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace diffcast {

/// Counter-based Philox4x32-10 generator.
///
/// The key is derived from (seed, stream) so every trajectory, ensemble
/// member or test draws from an independent, reproducible stream regardless
/// of the order in which streams are consumed.
class Philox4x32 {
public:
    using result_type = std::uint32_t;

    explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 4) {
            block_ = generate(counter_, key_);
            increment();
            pos_ = 0;
        }
        return block_[pos_++];
    }

    /// Uniform double in (0, 1), 53 bits.
    double uniform() {
        const std::uint64_t hi = (*this)() >> 5;
        const std::uint64_t lo = (*this)() >> 6;
        const double u = (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) *
                         (1.0 / 9007199254740992.0);
        return u > 0.0 ? u : 0x1p-54;
    }

private:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    static Block generate(Block ctr, Key key) {
        constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(m0, ctr[0], hi0, lo0);
            mulhilo(m1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += w0;
            key[1] += w1;
        }
        return ctr;
    }

    void increment() {
        if (++counter_[0] == 0) ++counter_[1];
    }

    Key key_;
    Block counter_;
    Block block_{};
    int pos_ = 4;
};

/// Standard normal variates via the polar Box-Muller method (portable across
/// standard libraries, unlike std::normal_distribution).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed = 0, std::uint64_t stream = 0) : rng_(seed, stream) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.uniform() - 1.0;
            v = 2.0 * rng_.uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double uniform() { return rng_.uniform(); }

private:
    Philox4x32 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace diffcast
