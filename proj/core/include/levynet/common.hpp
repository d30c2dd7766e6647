// Shared error types and small utilities used across the library.
#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace levynet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested exponential moment does not exist for the jump law.
struct MomentDiverges : Error {
    using Error::Error;
};
// Model contains a component without an exact sampler (e.g. tempered stable).
struct NotSimulable : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct LayerMismatch : Error {
    using Error::Error;
};
struct OutputDimMismatch : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct DampingFailure : Error {
    using Error::Error;
};
struct SectorViolation : Error {
    using Error::Error;
};
struct DimensionTooLarge : Error {
    using Error::Error;
};
struct RhoTooSmall : Error {
    using Error::Error;
};
struct Diverges : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
// Resampling budget exhausted without reaching the target accuracy.
struct AttemptsExhausted : Error {
    AttemptsExhausted(const std::string& msg, double best)
        : Error(msg), bestError(best) {}
    double bestError;
};
// Paper-mode hyperparameters too large to execute.
struct InfeasibleConstruction : Error {
    using Error::Error;
};

// Round-trip safe decimal rendering of a double (17 significant digits).
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = 0.5 * (a + b);
        return out;
    }
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

// Runs fn(block) for block = 0..nBlocks-1, possibly concurrently. Callers
// combine per-block results in fixed order afterwards, so the outcome does
// not depend on the thread count.
inline void parallel_blocks(int nBlocks, int threads,
                            const std::function<void(int)>& fn) {
    if (threads <= 0)
        threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || nBlocks <= 1) {
        for (int b = 0; b < nBlocks; ++b) fn(b);
        return;
    }
    threads = std::min(threads, nBlocks);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int b = t; b < nBlocks; b += threads) fn(b);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace levynet
