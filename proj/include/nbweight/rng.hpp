#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace nbweight {

// splitmix64 finalizer; used to derive independent stream seeds from one
// master seed so that adding a consumer never shifts another stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Seed stream tags. Each distinct consumer of randomness gets its own tag so
// sequences stay aligned when one consumer changes.
namespace seed_tag {
inline constexpr std::uint64_t kInit = 1;        // model parameter init
inline constexpr std::uint64_t kShuffle = 2;     // epoch shuffling
inline constexpr std::uint64_t kSplit = 3;       // train/test split
inline constexpr std::uint64_t kSeedList = 4;    // per-experiment seed lists
inline constexpr std::uint64_t kRandomGroups = 5;
inline constexpr std::uint64_t kTestPoints = 6;  // bias-variance test draws
inline constexpr std::uint64_t kDraws = 7;       // bias-variance training draws
inline constexpr std::uint64_t kBootstrap = 8;
inline constexpr std::uint64_t kPairSeeds = 9;
}  // namespace seed_tag

// Seeded generator built on std::mt19937_64 (whose output sequence is pinned
// by the standard) with hand-written draw primitives, so every sequence is a
// pure function of the seed and call order. The <random> distribution
// templates are implementation-defined and would not reproduce across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound); rejection sampling keeps it exact
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % bound;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller; always consumes exactly two draws
    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // index drawn according to probs (assumed to sum to ~1)
    int categorical(std::span<const double> probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace nbweight
