// Sparse Taylor (polynomial chaos) machinery: coefficients of the smoothed
// price at x = 0, anisotropic coefficient bounds, summability thresholds,
// nested downward-closed index sets, sparse partial sums and their ReLU
// realization for d <= 3.
#pragma once

#include <functional>
#include <vector>

#include "levynet/levy_models.hpp"
#include "levynet/relu_net.hpp"

namespace levynet {

using MultiIndex = std::vector<int>;

// One coordinate factor of a product payoff in log coordinates.
struct ChaosFactor {
    std::function<double(double)> f;       // v0 factor
    std::function<Complex(double)> fhat;   // unitary Fourier transform
    double fhatL1 = 0.0;                   // int |fhat| dxi (upper estimate)
};

// f(x) = exp(-x^2 / (2 w^2)); transform w exp(-w^2 xi^2 / 2).
ChaosFactor gaussian_factor(double width);
// Butterfly payoff factor, compact support in log coordinates.
ChaosFactor butterfly_factor(const PayoffSpec& spec);

struct ChaosExpansion {
    int d = 1;
    double tau = 0.0;
    double rhoPrime = 0.0;          // 1 - 1/(2 rho)
    std::vector<double> bSeq;       // b_j = (2 rho_j tau C1)^{-1/(2 rho_j rho')}
    double v0hatL1 = 0.0;
    // Candidate indices in the greedy (bound-descending, closure-respecting)
    // order; prefixes of this order are the nested sets Lambda_n.
    std::vector<MultiIndex> indices;
    std::vector<double> t;          // signed Taylor coefficients
    std::vector<double> bound;      // coeff_bound per index
    double quadError = 0.0;         // coarse-vs-fine quadrature discrepancy
    double analyticL1Total = 0.0;   // sum of bound over every multi-index
};

double coeff_bound(const MultiIndex& nu, double tau, const SymbolSector& sector,
                   double v0hatL1, int d);

// tau_0(d) = d^{2 rho / q} / (2 rho C1).
double tau0(int d, double rho, double q, double C1);

struct SummabilityCertificate {
    double lqNormBound = 0.0;
    bool finite = false;
    double ratio = 0.0;  // d (2 rho tau C1)^{-q/(2 rho)}
};
SummabilityCertificate summability_certificate(int d, double tau,
                                               const SymbolSector& sector, double q,
                                               double v0hatL1);

// Taylor coefficients on a bound-ordered candidate set of size candidateCount
// (plus implied closure) via tensor Gauss-Legendre quadrature. d <= 3.
ChaosExpansion taylor_coeffs(const LevyModelD& model,
                             const std::vector<ChaosFactor>& factors, double tau,
                             const SymbolSector& sector, int candidateCount,
                             int maxTotalOrder = 12);

// First n indices of the expansion's greedy order (nested, downward closed).
std::vector<MultiIndex> build_index_set(const ChaosExpansion& expansion, int n);

bool is_downward_closed(const std::vector<MultiIndex>& set);

struct SparseErrorRow {
    int n = 0;
    double supError = 0.0;
    double tailBound = 0.0;
};

struct SparseErrorStudy {
    std::vector<SparseErrorRow> rows;
    double oracleError = 0.0;  // quadrature error estimate of the reference field
};

// Compares partial sums over Lambda_n (prefixes of the expansion order) with
// the Fourier-inversion reference field on the grid.
SparseErrorStudy sparse_eval_and_error(const ChaosExpansion& expansion,
                                       const LevyModelD& model,
                                       const std::vector<ChaosFactor>& factors,
                                       const SymbolSector& sector,
                                       const std::vector<int>& nList,
                                       const std::vector<Eigen::VectorXd>& xGrid);

// Reference field v(tau, x) for x in [-1,1]^d by tensor quadrature.
std::vector<double> chaos_reference_field(const LevyModelD& model,
                                          const std::vector<ChaosFactor>& factors,
                                          double tau, const SymbolSector& sector,
                                          const std::vector<Eigen::VectorXd>& xGrid);

double sparse_partial_sum(const ChaosExpansion& expansion,
                          const std::vector<MultiIndex>& lambda,
                          const Eigen::VectorXd& x);

struct SparseNet {
    ReluNetwork net;
    long M = 0;
    int L = 0;
    double emulationError = 0.0;  // net vs exact partial sum on a check grid
};

// ReLU realization of the sparse polynomial within deltaNet on [-1,1]^d.
SparseNet sparse_to_relu(const ChaosExpansion& expansion,
                         const std::vector<MultiIndex>& lambda, double deltaNet);

}  // namespace levynet
