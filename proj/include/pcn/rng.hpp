#ifndef PCN_RNG_HPP
#define PCN_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pcn {

// xoshiro256++ seeded via splitmix64. Self-contained so that identical seeds
// give identical streams on every platform; std:: distributions are not
// pinned by the standard.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) { return bound ? next_u64() % bound : 0; }

    // Exponential with the given mean (inverse-CDF).
    double exponential(double mean) { return -mean * std::log1p(-next_unit()); }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace pcn

#endif
