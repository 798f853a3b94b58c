#pragma once
#include <cstdint>
#include <random>
#include <vector>

namespace prefopt {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// independent, reproducible substreams: one per (purpose, epoch) pair,
// so an interrupted run resumed from a checkpoint replays identical draws
enum class Stream : std::uint64_t {
    Lhs = 1,
    GpFit = 2,
    NetInit = 3,
    NetSteps = 4,
    Pool = 5,
    Objective = 6,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream s, std::uint64_t index) {
    std::uint64_t h = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(s)));
    return splitmix64(h ^ splitmix64(index));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // canonical double in [0,1) with 53 random bits
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    // Fisher-Yates permutation of 0..n-1
    std::vector<std::uint32_t> permutation(std::uint32_t n) {
        std::vector<std::uint32_t> p(n);
        for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
        for (std::uint32_t i = n; i > 1; --i) {
            std::uint64_t j = below(i);
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace prefopt
