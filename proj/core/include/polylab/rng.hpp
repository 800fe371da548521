#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace polylab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// xoshiro256** stream. Satisfies UniformRandomBitGenerator so it can be
// handed to <random> distributions, although the library itself only uses
// the members below to keep sequences identical across standard libraries.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z = splitmix64(z);
            w = z;
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform() { return u64_to_unit((*this)()); }

    // uniform integer in [0, n) by rejection
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t lim = max() - max() % n;
        std::uint64_t v;
        do {
            v = (*this)();
        } while (v >= lim);
        return v % n;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Master seed from which per-replica streams are derived. stream(i) is a pure
// function of (master, i).
struct SeedSpec {
    std::uint64_t master = 42;

    Stream stream(std::uint64_t index) const {
        return Stream(splitmix64(master ^ splitmix64(index ^ 0x5851F42D4C957F2DULL)));
    }

    // Stateless draw keyed by an arbitrary 64-bit key; used for lazily
    // generated random fields.
    std::uint64_t keyed(std::uint64_t key) const {
        return splitmix64(splitmix64(master + 0x2545F4914F6CDD1DULL) ^ splitmix64(key));
    }
};

}  // namespace polylab
