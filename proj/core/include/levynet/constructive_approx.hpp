// The constructive pipeline: build psi by averaging payoff networks over
// Monte-Carlo Levy samples (univariate and multivariate with capping),
// together with the proof-constants ledger and empirical rate studies.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "levynet/levy_models.hpp"
#include "levynet/pricing_oracle.hpp"
#include "levynet/relu_net.hpp"

namespace levynet {

enum class ConstructionMode { PaperConstants, Practical };

struct ConstructionConfig {
    double epsilon = 0.01;      // target sup accuracy on the box
    double a = 0.5, b = 1.5;    // componentwise box [a,b]^d, 0 < a < b
    double maturity = 1.0;      // T
    ConstructionMode mode = ConstructionMode::Practical;
    long nOverride = 4096;      // Practical-mode sample count
    std::optional<double> DOverride;  // Practical-mode cap (default log n)
    int attempts = 10;
    int gridPointsPerDim = 0;   // 0: 1000 in 1d, 64 in 2-3d, 256 LHS points d>3
    long oracleSamples = 400000;  // MC oracle budget for d > 1
    std::uint64_t seed = 1;
    int threads = 0;

    void validate() const;
};

// Proof constants of Prop 4.1 (d = 1) and Thm 5.1 Step 4 (d >= 2), evaluated
// with the model's exponential moments and triplet bounds.
struct StepConstants {
    int d = 1;
    double B = 0.0;
    double c = 0.0, q = 0.0, qTilde = 0.0, p = 2.0;
    double c1 = 0.0;
    double cTilde1 = 0.0;  // multivariate capping constant (NaN in 1d)
    double c2 = 0.0;
    double epsBar = 0.0;
    double n = 0.0;        // real-valued; astronomically large in paper mode
    double D = 0.0;        // cap threshold (NaN in 1d)
    double kappa = 0.0;    // 1d: c (1 + 4 c2^2)(c1 + 1)^{2+q}
    double sizeBound = 0.0;
};

StepConstants constants_report(const LevyModelD& model, const PayoffConstants& pc,
                               double T, double epsilon, double a, double b);

struct ConstructionReport {
    StepConstants constants;
    long nUsed = 0;
    double DUsed = 0.0;  // NaN when no capping was applied
    long M = 0;
    int L = 0;
    double measuredError = 0.0;
    double oracleErrorBound = 0.0;
    Eigen::VectorXd argmaxPoint;
    int attemptsUsed = 0;
    std::uint64_t seed = 0;
    std::string gridKind;  // "grid" or "latin-hypercube"
};

struct Construction {
    ReluNetwork net;
    ConstructionReport report;
};

// Measurement points with oracle prices; reusable across constructions so
// repeated probes (rate studies, bisection) share one reference field.
struct OracleField {
    std::vector<Eigen::VectorXd> points;
    std::vector<double> values;
    double errorBound = 0.0;
    std::string gridKind;
};

OracleField build_oracle_field(const LevyModelD& model, const PayoffSpec& spec,
                               double tau, double a, double b, int gridPointsPerDim,
                               long oracleSamples, std::uint64_t seed, int threads = 0);

// Draws n i.i.d. increments (capped at D for d >= 2), averages shifted payoff
// networks, measures the sup error against the pricing oracle and resamples up
// to cfg.attempts times. Throws AttemptsExhausted carrying the best error.
Construction construct(const LevyModelD& model, const PayoffSpec& spec,
                       const ConstructionConfig& cfg);
// Same loop without the accuracy gate: returns the best attempt.
Construction construct_best_effort(const LevyModelD& model, const PayoffSpec& spec,
                                   const ConstructionConfig& cfg);
// Best-effort against a caller-supplied oracle field.
Construction construct_with_oracle(const LevyModelD& model, const PayoffSpec& spec,
                                   const ConstructionConfig& cfg,
                                   const OracleField& field);

struct SupErrorReport {
    double supError = 0.0;
    Eigen::VectorXd argmaxPoint;
    double oracleErrorBound = 0.0;
    std::string gridKind;
};

SupErrorReport measure_sup_error(const ReluNetwork& net, const LevyModelD& model,
                                 const PayoffSpec& spec, double tau, double a, double b,
                                 int gridPointsPerDim, long oracleSamples = 400000,
                                 std::uint64_t seed = 99, int threads = 0);

struct RateRow {
    long n = 0;
    double meanError = 0.0;
    long M = 0;
};

struct RateStudy {
    std::vector<RateRow> rows;
    double slope = 0.0;      // log(meanError) vs log(n)
    double intercept = 0.0;
    double r2 = 0.0;
};

RateStudy rate_study(const LevyModelD& model, const PayoffSpec& spec,
                     const ConstructionConfig& cfg, const std::vector<long>& nList,
                     int trials);

// Ordinary least squares on (x, y); slope/intercept/r2.
struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace levynet
