// Analytic pipeline: Gevrey derivative bounds from the symbol's sector
// condition, parabolic-smoothing constants, Chebyshev approximation of the
// smoothed price and its ReLU emulation.
#pragma once

#include <vector>

#include "levynet/levy_models.hpp"
#include "levynet/pricing_oracle.hpp"
#include "levynet/relu_net.hpp"

namespace levynet {

// max_{eta>0} eta^m exp(-kappa eta^mu) = (m / (kappa mu e))^{m/mu}; 1 at m = 0.
double max_exp_opt(double m, double kappa, double mu);

// L^2 bound on ||D^k_x v(tau,.)||: A^k (k!)^{1/(2 rho)} ||v0||_{L2} with
// A = (2 tau C1 rho)^{-1/(2 rho)}.
double gevrey_bound(int k, double tau, const SymbolSector& sector, double v0L2);

struct GevreyProfile {
    double delta = 1.0;     // 1 / min(1, 2 rho)
    double aTauRho = 0.0;   // (2 tau C1 rho)^{-1/(2 rho)}
    double v0L2Norm = 0.0;
    std::vector<double> bounds;  // k = 0..kMax
};
GevreyProfile gevrey_profile(int kMax, double tau, const SymbolSector& sector, double v0L2);

struct SmoothingConstants {
    double Cdtau = 0.0;         // Gamma closed form of the radial smoothing constant
    double tauThreshold = 0.0;  // d^{2 rho} / (2 rho C1)
    double dAProduct = 0.0;     // d * (2 rho tau C1)^{-1/(2 rho)}
};
SmoothingConstants smoothing_constants(int d, double tau, const SymbolSector& sector);

struct ChebRow {
    int p = 0;
    double supError = 0.0;
    std::vector<double> coeffs;  // Chebyshev coefficients on [-1,1]
};

struct ChebStudy {
    double a = 0.0, b = 0.0;
    double tau = 0.0;
    double delta = 1.0;
    std::vector<ChebRow> rows;
    double decayCoefficient = 0.0;  // slope of log(supError) vs p^{1/delta}
    double decayR2 = 0.0;
    // Shared measurement grid and oracle field (reused by spectral_emulate).
    std::vector<double> gridS;
    std::vector<double> oracle;
    double oracleErrorBound = 0.0;
};

// Chebyshev interpolants of s -> u(tau, s) on [a,b] at the listed degrees,
// sup errors against the Fourier oracle on a dense grid. The declared sector
// must hold for the model (checked; throws SectorViolation).
ChebStudy cheb_approx(const LevyModel1D& model, const PayoffSpec& spec, double tau,
                      double a, double b, const std::vector<int>& pList,
                      const SymbolSector& sector, int gridPoints = 2000);

struct SpectralNet {
    ReluNetwork net;
    long M = 0;
    int L = 0;
    double chebError = 0.0;      // interpolation error of the chosen degree
    double measuredError = 0.0;  // end-to-end net error on the study grid
};

// Emulates the degree-p interpolant from the study with a ReLU network of
// tolerance deltaNet, composed with the affine map [a,b] -> [-1,1].
SpectralNet spectral_emulate(const ChebStudy& study, int p, double deltaNet);

// Chebyshev interpolation coefficients from samples at the p+1 extrema nodes
// cos(j pi / p) (values ordered j = 0..p).
std::vector<double> chebyshev_coeffs_from_values(const std::vector<double>& values);

// ||D^k_x v(tau,.)||_{L^2} by Parseval: (int xi^{2k} e^{-2 tau Re psi}
// |v0hat|^2 dxi)^{1/2}. Also used to check the Gevrey bounds numerically.
double derivative_l2_norm(const LevyModel1D& model, const LogPayoff& v0, double tau,
                          int k);
// ||v0||_{L^2} of the log-space payoff.
double payoff_l2_norm(const LogPayoff& v0);

}  // namespace levynet
