// High-accuracy reference prices u(tau, s) and spatial derivatives of the
// log-price field, used as ground truth by the approximation modules.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "levynet/levy_models.hpp"
#include "levynet/relu_net.hpp"

namespace levynet {

enum class OracleKind { Analytic, Fourier, MonteCarlo };

struct OracleResult {
    double value = 0.0;
    double errorBound = 0.0;  // rigorous estimate (Fourier) or 3-SE half width (MC)
    OracleKind kind = OracleKind::Fourier;
    long sampleCount = 0;     // MC only
    std::uint64_t seed = 0;   // MC only
    int blockCount = 0;       // MC only
};

// --- closed forms -----------------------------------------------------------

// Black-Scholes call with r = 0.
double bs_call(double s, double K, double sigma, double tau);
// Merton jump-diffusion call as a series of conditional Gaussian prices.
// Uses the model's own drift; `terms` bounds the jump-count sum.
double merton_call_series(const LevyModel1D& model, double s, double K, double tau,
                          int terms = 60);

// --- Fourier pricing ----------------------------------------------------------

// Reference prices at each grid point. Calls/puts use the cosine expansion
// with cumulant-based truncation; butterflies use direct quadrature of the
// Fourier inversion (v_0 in L^2). Throws DampingFailure when the payoff
// requires a missing exponential moment.
std::vector<OracleResult> price_fourier_1d(const LevyModel1D& model,
                                           const PayoffSpec& spec, double tau,
                                           const std::vector<double>& sGrid);
OracleResult price_fourier_1d(const LevyModel1D& model, const PayoffSpec& spec,
                              double tau, double s);

// --- Monte Carlo ----------------------------------------------------------------

OracleResult price_mc(const LevyModelD& model, const PayoffSpec& spec, double tau,
                      const Eigen::VectorXd& s, long n, std::uint64_t seed,
                      int threads = 0);

// Prices every grid point on one shared sample set (block-deterministic).
std::vector<OracleResult> price_mc_grid(const LevyModelD& model, const PayoffSpec& spec,
                                        double tau,
                                        const std::vector<Eigen::VectorXd>& sGrid,
                                        long n, std::uint64_t seed, int threads = 0);

// --- Fourier derivative fields ----------------------------------------------------

// Compactly supported payoff in log coordinates, v0(x) = phi(e^x).
// When the payoff is piecewise alpha e^x + beta (all the spec payoffs are),
// the pieces are listed so the Fourier transform has a closed form.
struct LogPayoff {
    std::function<double(double)> f;
    double lo = -1.0;
    double hi = 1.0;
    std::vector<double> kinks;  // interior panel breakpoints

    struct ExpAffinePiece {
        double xLo, xHi, alpha, beta;  // alpha e^x + beta on [xLo, xHi]
    };
    std::vector<ExpAffinePiece> pieces;  // empty: fall back to quadrature
};

// Butterfly payoff in log coordinates (compact support).
LogPayoff log_payoff(const PayoffSpec& spec);

struct DerivativeField {
    std::vector<double> values;
    double errorBound = 0.0;
};

// D^k_x v(tau, .) on xGrid via (2pi)^{-1/2} int (i xi)^k e^{-tau psi} v0hat;
// throws SectorViolation when the damped integrand fails to decay.
DerivativeField derivative_fourier(const LevyModel1D& model, const LogPayoff& v0,
                                   double tau, int k, const std::vector<double>& xGrid);

// Unitary Fourier transform of v0 at xi (panel quadrature, kink-aware).
Complex payoff_transform(const LogPayoff& v0, double xi);

}  // namespace levynet
