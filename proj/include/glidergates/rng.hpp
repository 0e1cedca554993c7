#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gg {

// SplitMix64 finalizer. Used for seed derivation and state digests.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Seeded random stream. The engine (mt19937_64) is fully specified by the
// standard; all draw helpers are hand-rolled because std:: distributions are
// implementation-defined and would break cross-platform reproducibility.
class Rng {
  public:
    explicit Rng(uint64_t seed) : seed_(seed), eng_(mix64(seed)) {}

    uint64_t seed() const { return seed_; }

    // Independent stream derived from this stream's seed (not its state), so
    // sibling streams don't perturb each other regardless of draw counts.
    Rng child(std::string_view name) const { return Rng(mix64(seed_ ^ fnv1a(name))); }

    uint64_t next_u64() { return eng_(); }

    // Uniform on [0, n), unbiased via rejection.
    uint64_t uniform_u64(uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    size_t uniform_index(size_t n) { return static_cast<size_t>(uniform_u64(n)); }

    // Uniform integer on [lo, hi] inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(uniform_u64(static_cast<uint64_t>(hi - lo) + 1));
    }

    // Uniform on [0, 1) with 53 bits.
    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    bool bernoulli(double p) { return uniform_real() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace gg
