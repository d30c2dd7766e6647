// Parametric uni- and multivariate Levy models: characteristic symbols in
// closed form, martingale drifts, exponential moments, dimension-uniform
// triplet bounds and exact increment simulation.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levynet/common.hpp"
#include "levynet/rng.hpp"

namespace levynet {

using Complex = std::complex<double>;

struct MertonJumps {
    double lambda = 0.0;  // jumps per year
    double muJ = 0.0;     // mean log-jump
    double sigmaJ = 0.1;  // log-jump stdev, > 0
};

struct KouJumps {
    double lambda = 0.0;
    double pUp = 0.5;        // probability of an upward jump
    double etaPlus = 10.0;   // > 1 so that e^X stays integrable
    double etaMinus = 10.0;  // > 0
};

// CGMY / tempered stable density C e^{-G|y|}|y|^{-1-Y} (y<0), C e^{-My} y^{-1-Y} (y>0).
// Symbol-only: no exact sampler. Y != 1.
struct TemperedStableJumps {
    double C = 1.0;
    double G = 5.0;
    double M = 5.0;  // > 1
    double Y = 0.5;  // in (0,2) \ {1}
};

using JumpLaw = std::variant<std::monostate, MertonJumps, KouJumps, TemperedStableJumps>;

enum class Variant { BlackScholes, Merton, Kou, TemperedStable };

struct LevyModel1D {
    double sigma = 0.0;  // diffusion volatility per sqrt(year)
    double gamma = 0.0;  // drift per year (1_{|y|<=1} truncation convention)
    JumpLaw jumps{};

    Variant variant() const;
    bool simulable() const;
    void validate() const;  // throws Error on parameter violations

    static LevyModel1D black_scholes(double sigma, double gamma);
    static LevyModel1D merton(double sigma, double gamma, MertonJumps j);
    static LevyModel1D kou(double sigma, double gamma, KouJumps j);
    static LevyModel1D tempered_stable(double sigma, double gamma, TemperedStableJumps j);
};

// Common compound-Poisson factor: all components jump together by beta * J,
// J ~ Normal(muC, sigmaC^2), arrivals Poisson(lambdaC).
struct CommonJump {
    double lambdaC = 0.0;
    Eigen::VectorXd beta;
    double muC = 0.0;
    double sigmaC = 0.1;
};

struct LevyModelD {
    int d = 1;
    Eigen::MatrixXd A;      // symmetric nonnegative-definite covariance
    Eigen::VectorXd gamma;  // drift
    std::vector<JumpLaw> idioJumps;  // one (possibly empty) law per component
    std::optional<CommonJump> commonJump;

    bool simulable() const;
    void validate() const;

    static LevyModelD from_1d(const LevyModel1D& m);
    // d independent copies of a univariate model.
    static LevyModelD independent_copies(const LevyModel1D& m, int d);
};

struct SymbolSector {
    double rho = 1.0;  // in (0, 1]
    std::optional<std::vector<double>> rhoVec;  // per-coordinate, each > 1/2
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;

    void validate() const;
};

struct SectorReport {
    bool holds = false;
    double worstLowerMargin = 0.0;  // min over grid of Re psi - C1 |xi|^{2 rho}
    double worstUpperMargin = 0.0;  // min over grid of C2 |xi|^{2 rho} + C3 - |psi|
    double worstRatio = 0.0;        // min over grid of Re psi / (C1 |xi|^{2 rho})
};

struct TripletBoundReport {
    double maxA = 0.0;
    double maxGamma = 0.0;     // max_i |gamma_i|
    double maxExpTail = 0.0;   // max_i int_{||y||>1} e^{p y_i} nu(dy)
    double maxSmallSq = 0.0;   // max_i int_{||y||<=1} y_i^2 nu(dy)
    double B = 0.0;            // max of the four
};

struct JumpCounts {
    std::vector<long> idio;
    long common = 0;
};

// --- symbols -------------------------------------------------------------

// Levy exponent psi with E[e^{i xi X_t}] = e^{-t psi(xi)}.
Complex symbol(const LevyModel1D& model, double xi);
Complex symbol(const LevyModelD& model, const Eigen::VectorXd& xi);

// Analytic continuation psi(-i p) evaluated by the real closed-form branch;
// E[e^{p X_T}] = exp(-T psi(-i p)). Throws MomentDiverges.
double symbol_at_minus_ip(const LevyModel1D& model, double p);
// psi(-i p e_i) for component i of a multivariate model.
double symbol_at_minus_ip(const LevyModelD& model, int i, double p);

// --- martingale drifts and moments ---------------------------------------

double martingale_drift(const LevyModel1D& model);
Eigen::VectorXd martingale_drift(const LevyModelD& model);
LevyModel1D with_martingale_drift(LevyModel1D model);
LevyModelD with_martingale_drift(LevyModelD model);

double exp_moment(const LevyModel1D& model, double p, double T);
Eigen::VectorXd exp_moment(const LevyModelD& model, double p, double T);
// Generic bound exp(T (5 p^2 B / 2 + p^2 e^p B)) valid under a triplet bound B.
double exp_moment_bound(double B, double p, double T);

// --- sector and triplet checks -------------------------------------------

SectorReport check_sector(const LevyModel1D& model, const SymbolSector& sector,
                          const std::vector<double>& xiGrid);
SectorReport check_sector(const LevyModelD& model, const SymbolSector& sector,
                          const std::vector<Eigen::VectorXd>& xiGrid);

TripletBoundReport triplet_bounds(const LevyModelD& model, double p);

// --- simulation -----------------------------------------------------------

// Exact draw of X_T. Deterministic given the stream state. Throws NotSimulable.
Eigen::VectorXd sample_increment(const LevyModelD& model, double T, RngStream& rng,
                                 JumpCounts* counts = nullptr);
double sample_increment(const LevyModel1D& model, double T, RngStream& rng,
                        JumpCounts* counts = nullptr);

// Repeated exact draws with the drift compensator and Cholesky factor
// computed once. Same draws as sample_increment for the same stream state.
class IncrementSampler {
public:
    IncrementSampler(const LevyModelD& model, double T);
    Eigen::VectorXd operator()(RngStream& rng, JumpCounts* counts = nullptr) const;
    const LevyModelD& model() const { return model_; }

private:
    LevyModelD model_;
    double T_;
    Eigen::VectorXd driftTerm_;   // (gamma - small-jump compensator) * T
    Eigen::MatrixXd diffusionL_;  // Cholesky factor of T * A (empty if A = 0)
};

// --- cumulants (for Fourier truncation ranges) ----------------------------

struct Cumulants {
    double c1 = 0.0, c2 = 0.0, c4 = 0.0;
};
Cumulants cumulants(const LevyModel1D& model, double T);

// Largest p with finite order-p exponential moment (+inf when unbounded).
double max_exp_moment_order(const LevyModel1D& model);

}  // namespace levynet
