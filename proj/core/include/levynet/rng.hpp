// Splittable random streams: a parent seed plus task index fully determines
// each stream, so parallel layouts reproduce bit-identically.
#pragma once

#include <cstdint>
#include <random>

namespace levynet {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(mix(seed, 0)) {}
    RngStream(std::uint64_t seed, std::uint64_t task) : engine_(mix(seed, task)) {}

    // Independent stream for subtask `task` of this stream's seed lineage.
    RngStream child(std::uint64_t task) const {
        return RngStream(base_, lineage_ * 0x100000001b3ULL + task + 1);
    }

    std::mt19937_64& engine() { return engine_; }

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }
    double normal() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<long>(mean)(engine_);
    }

private:
    std::mt19937_64 mix(std::uint64_t seed, std::uint64_t task) {
        base_ = seed;
        lineage_ = task;
        std::uint64_t s = seed ^ (task * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
        std::uint64_t a = detail::splitmix64(s);
        std::uint64_t b = detail::splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        return std::mt19937_64(seq);
    }

    std::uint64_t base_ = 0;
    std::uint64_t lineage_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace levynet
