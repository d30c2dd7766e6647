// Feed-forward ReLU networks as explicit weight data: exact evaluation,
// size/depth accounting, the block-matrix averaging construction, payoff
// network builders and polynomial emulation.
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "levynet/common.hpp"

namespace levynet {

struct Layer {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

// Phi = ((A_1,b_1),...,(A_L,b_L)); ReLU on all but the last layer.
struct ReluNetwork {
    int inputDim = 1;
    std::vector<Layer> layers;

    int depth() const { return static_cast<int>(layers.size()); }
    int outputDim() const { return static_cast<int>(layers.back().A.rows()); }
    void validate() const;
};

struct NetMetrics {
    long M = 0;                  // total number of nonzero weights
    int L = 0;                   // number of layers
    std::vector<long> perLayerM; // ||A_j||_0 + ||b_j||_0
    int outputDim = 1;
};

Eigen::VectorXd realize(const ReluNetwork& net, const Eigen::VectorXd& x);
// Scalar convenience for nets with 1-dimensional input and output.
double realize1(const ReluNetwork& net, double x);

// Exact nonzero counts (comparison with 0.0, no tolerance).
NetMetrics metrics(const ReluNetwork& net);

// Network realizing x -> sum_i w_i R(Phi_i)(D_i x + c_i) for nets with equal
// depth and output dimension. M_j subadditive for j >= 2; fully subadditive
// when all D_i are diagonal and c_i = 0.
ReluNetwork average(const std::vector<ReluNetwork>& nets,
                    const std::vector<double>& w,
                    const std::vector<Eigen::MatrixXd>& D,
                    const std::vector<Eigen::VectorXd>& c);
// Diagonal-D, zero-shift case; scales[i] holds the diagonal of D_i.
ReluNetwork average_scaled(const std::vector<ReluNetwork>& nets,
                           const std::vector<double>& w,
                           const std::vector<Eigen::VectorXd>& scales);

// Realization-preserving depth extension (identity passing via ReLU pairs).
ReluNetwork pad_depth(const ReluNetwork& net, int targetL);

// --- payoffs ---------------------------------------------------------------

enum class PayoffKind { Call, Put, Butterfly, BasketCall, SumOfCalls, CallOnMax, Constant };

struct PayoffSpec {
    PayoffKind kind = PayoffKind::Call;
    double K = 1.0;               // strike (Call/Put/BasketCall/SumOfCalls/CallOnMax)
    double K1 = 0.5, K2 = 1.5;    // butterfly wings (K1 < K < K2)
    std::vector<double> weights;  // basket weights; defaults to 1/d each
    double constant = 0.0;        // Constant payoff level

    static PayoffSpec call(double K) { return {PayoffKind::Call, K, 0, 0, {}, 0}; }
    static PayoffSpec put(double K) { return {PayoffKind::Put, K, 0, 0, {}, 0}; }
    static PayoffSpec butterfly(double K1, double K, double K2) {
        return {PayoffKind::Butterfly, K, K1, K2, {}, 0};
    }
    static PayoffSpec basket_call(std::vector<double> w, double K) {
        return {PayoffKind::BasketCall, K, 0, 0, std::move(w), 0};
    }
    static PayoffSpec sum_of_calls(std::vector<double> w, double K) {
        return {PayoffKind::SumOfCalls, K, 0, 0, std::move(w), 0};
    }
    static PayoffSpec call_on_max(double K) { return {PayoffKind::CallOnMax, K, 0, 0, {}, 0}; }
    static PayoffSpec constant_payoff(double c) {
        return {PayoffKind::Constant, 0, 0, 0, {}, c};
    }

    std::vector<double> effective_weights(int d) const;
};

// Growth/Lipschitz constants reported alongside an exact payoff network:
// |phi - R| = 0 with q = 0, M(phi) <= c d^{qTilde}, Lip <= c d^{qTilde}.
struct PayoffConstants {
    double c = 1.0;
    double q = 0.0;
    double qTilde = 0.0;
    double p = 2.0;
    double lipschitz = 1.0;
};

struct PayoffNet {
    ReluNetwork net;
    PayoffConstants constants;
};

// Exact ReLU realization of the payoff on the nonnegative orthant.
PayoffNet payoff_net(const PayoffSpec& spec, int d);
// Mathematical payoff value (oracle side).
double payoff_value(const PayoffSpec& spec, const Eigen::VectorXd& s);
double payoff_value(const PayoffSpec& spec, double s);

// Allocation-free repeated payoff evaluation (weights resolved once).
class PayoffEvaluator {
public:
    PayoffEvaluator(const PayoffSpec& spec, int d);
    double operator()(const Eigen::VectorXd& s) const;

private:
    PayoffSpec spec_;
    std::vector<double> weights_;
};

// --- polynomial emulation ----------------------------------------------------

// Value of sum_k c_k T_k(x) by Clenshaw recurrence.
double chebyshev_eval(const std::vector<double>& chebCoeffs, double x);

// ReLU network approximating the Chebyshev expansion on [-1,1] within delta
// (verified on a dense grid; product subnetworks sized accordingly).
ReluNetwork polynomial_emulator(const std::vector<double>& chebCoeffs, double delta);

// Network approximating the monomial x^nu on [-1,1]^d via a chain of product
// subnetworks with squaring chains of depth `chainDepth`. Exponents of order
// <= 1 give exact networks.
ReluNetwork monomial_emulator(int d, const std::vector<int>& exponents, int chainDepth);

// --- serialization -------------------------------------------------------------

nlohmann::json serialize(const ReluNetwork& net);
ReluNetwork deserialize(const nlohmann::json& doc);
void save_network(const ReluNetwork& net, const std::string& path);
ReluNetwork load_network(const std::string& path);

}  // namespace levynet
