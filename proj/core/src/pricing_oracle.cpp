#include "levynet/pricing_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "levynet/quadrature.hpp"

namespace levynet {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

// E[(s e^G - K)^+] for G ~ N(m, v).
double lognormal_call(double s, double K, double m, double v) {
    if (v <= 0.0) return std::max(s * std::exp(m) - K, 0.0);
    const double sd = std::sqrt(v);
    const double d2 = (m + std::log(s / K)) / sd;
    const double d1 = d2 + sd;
    return s * std::exp(m + 0.5 * v) * norm_cdf(d1) - K * norm_cdf(d2);
}

}  // namespace

double bs_call(double s, double K, double sigma, double tau) {
    return lognormal_call(s, K, -0.5 * sigma * sigma * tau, sigma * sigma * tau);
}

double merton_call_series(const LevyModel1D& model, double s, double K, double tau,
                          int terms) {
    const auto* j = std::get_if<MertonJumps>(&model.jumps);
    double lambda = 0.0, muJ = 0.0, sigmaJ = 0.0;
    if (j) {
        lambda = j->lambda;
        muJ = j->muJ;
        sigmaJ = j->sigmaJ;
    } else if (model.variant() != Variant::BlackScholes) {
        throw Error("merton_call_series needs a Merton or Black-Scholes model");
    }
    // Conditional on N = k jumps, X_tau ~ N(b tau + k muJ, sigma^2 tau + k sigmaJ^2)
    // where b = gamma - compensator of the small jumps.
    const Cumulants cum = cumulants(model, tau);
    const double meanJump = lambda * muJ;
    const double b = cum.c1 / tau - meanJump;  // c1 = tau (b + lambda E[J])
    const double lt = lambda * tau;
    double price = 0.0, weight = std::exp(-lt);
    for (int k = 0; k < terms; ++k) {
        const double m = b * tau + k * muJ;
        const double v = model.sigma * model.sigma * tau + k * sigmaJ * sigmaJ;
        price += weight * lognormal_call(s, K, m, v);
        weight *= lt / (k + 1);
    }
    return price;
}

// ---- COS pricing -------------------------------------------------------------

namespace {

struct CosPlan {
    double A = 0.0, B = 0.0;
    int N = 2048;
    std::vector<Complex> cf;  // exp(-tau psi(u_k)) for u_k = k pi / (B - A)
};

CosPlan make_cos_plan(const LevyModel1D& model, double tau, double x0min, double x0max,
                      int N) {
    const Cumulants c = cumulants(model, tau);
    const double width = 12.0 * std::sqrt(std::max(c.c2, 1e-16) + std::sqrt(std::max(c.c4, 0.0)));
    CosPlan plan;
    plan.A = x0min + c.c1 - width;
    plan.B = x0max + c.c1 + width;
    plan.N = N;
    plan.cf.resize(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        const double u = k * 3.14159265358979323846 / (plan.B - plan.A);
        plan.cf[static_cast<std::size_t>(k)] = std::exp(-tau * symbol(model, u));
    }
    return plan;
}

// Cosine coefficients of the call payoff K(e^y - 1)^+ on [A, B]:
// chi on [0, B] minus psi on [0, B]. `put` flips to K(1 - e^y)^+ on [A, 0].
// The payoff segment is clipped to the truncation interval; if the interval
// lies entirely on the worthless side the coefficients vanish.
std::vector<double> cos_call_coeffs(const CosPlan& plan, bool put) {
    const double A = plan.A, B = plan.B;
    const double span = B - A;
    const double lo = put ? A : std::min(std::max(0.0, A), B);
    const double hi = put ? std::max(std::min(0.0, B), A) : B;
    std::vector<double> out(static_cast<std::size_t>(plan.N));
    if (hi <= lo) return out;
    for (int k = 0; k < plan.N; ++k) {
        const double w = k * 3.14159265358979323846 / span;
        auto theta = [&](double y) { return w * (y - A); };
        const double chi =
            (std::exp(hi) * (std::cos(theta(hi)) + w * std::sin(theta(hi))) -
             std::exp(lo) * (std::cos(theta(lo)) + w * std::sin(theta(lo)))) /
            (1.0 + w * w);
        const double psiInt =
            (k == 0) ? (hi - lo) : (std::sin(theta(hi)) - std::sin(theta(lo))) / w;
        out[static_cast<std::size_t>(k)] = (2.0 / span) * (put ? (psiInt - chi) : (chi - psiInt));
    }
    return out;
}

OracleResult cos_price(const CosPlan& plan, const std::vector<double>& payoffCoeffs,
                       double K, double x0) {
    double total = 0.0, tail = 0.0;
    for (int k = 0; k < plan.N; ++k) {
        const double w = k * 3.14159265358979323846 / (plan.B - plan.A);
        const Complex phase = std::exp(Complex(0.0, w * (x0 - plan.A)));
        double term = (plan.cf[static_cast<std::size_t>(k)] * phase).real() *
                      payoffCoeffs[static_cast<std::size_t>(k)];
        if (k == 0) term *= 0.5;
        total += term;
        if (2 * k >= plan.N) tail += term;
    }
    OracleResult res;
    res.kind = OracleKind::Fourier;
    res.value = K * total;
    res.errorBound = std::abs(K * tail) + 1e-13 * (1.0 + std::abs(res.value));
    return res;
}

}  // namespace

Complex payoff_transform(const LogPayoff& v0, double xi) {
    if (!v0.pieces.empty()) {
        // Closed form per exp-affine piece:
        // int (alpha e^x + beta) e^{-i xi x} dx
        //   = alpha (e^{(1-i xi) x}) / (1-i xi) - beta (e^{-i xi x}) / (i xi).
        Complex acc(0.0, 0.0);
        const Complex iXi(0.0, xi);
        for (const auto& pc : v0.pieces) {
            if (xi == 0.0) {
                acc += pc.alpha * (std::exp(pc.xHi) - std::exp(pc.xLo)) +
                       pc.beta * (pc.xHi - pc.xLo);
                continue;
            }
            const Complex expo = Complex(1.0, -xi);
            acc += pc.alpha * (std::exp(expo * pc.xHi) - std::exp(expo * pc.xLo)) / expo;
            acc += pc.beta * (std::exp(-iXi * pc.xHi) - std::exp(-iXi * pc.xLo)) / (-iXi);
        }
        return acc / 2.5066282746310002;
    }
    // Panel count scales with the phase so the oscillatory factor is resolved.
    const double span = v0.hi - v0.lo;
    const int panels = std::max(4, static_cast<int>(std::ceil(std::abs(xi) * span / 24.0)) * 4);
    auto f = [&](double x) {
        return v0.f(x) * std::exp(Complex(0.0, -xi * x));
    };
    const Complex val = integrate_panels(f, v0.lo, v0.hi, v0.kinks, panels, 32);
    return val / 2.5066282746310002;
}

LogPayoff log_payoff(const PayoffSpec& spec) {
    if (spec.kind != PayoffKind::Butterfly)
        throw Error("log_payoff currently supports the butterfly (compact support)");
    LogPayoff lp;
    lp.lo = std::log(spec.K1);
    lp.hi = std::log(spec.K2);
    lp.kinks = {std::log(spec.K)};
    lp.f = [spec](double x) { return payoff_value(spec, std::exp(x)); };
    // Butterfly weights on (s - K1)^+, (s - K)^+, (s - K2)^+.
    const double a = 1.0;
    const double b = -(spec.K2 - spec.K1) / (spec.K2 - spec.K);
    lp.pieces = {{std::log(spec.K1), std::log(spec.K), a, -a * spec.K1},
                 {std::log(spec.K), std::log(spec.K2), a + b, -a * spec.K1 - b * spec.K}};
    return lp;
}

namespace {

// Truncation radius: grow until the damped envelope is negligible.
double derivative_truncation(const LevyModel1D& model, double tau, int k,
                             double scale) {
    double R = 4.0;
    for (int it = 0; it < 60; ++it) {
        const double damp = std::exp(-tau * symbol(model, R).real());
        const double envelope = std::pow(R, k) * damp * scale;
        if (envelope < 1e-16) return R;
        R *= 1.35;
    }
    throw SectorViolation("damped integrand does not decay on the truncation domain");
}

}  // namespace

DerivativeField derivative_fourier(const LevyModel1D& model, const LogPayoff& v0,
                                   double tau, int k, const std::vector<double>& xGrid) {
    if (k < 0 || k > 12) throw Error("derivative order must lie in [0, 12]");
    if (tau <= 0.0) throw Error("tau must be > 0");

    const double R = derivative_truncation(model, tau, k, 1.0);
    double xMax = 1.0;
    for (double x : xGrid) xMax = std::max(xMax, std::abs(x));

    // Panels sized so that both e^{i x xi} and the transform stay resolved.
    const double panelWidth = std::min(2.0, 20.0 / xMax);
    const int panels = std::max(16, static_cast<int>(std::ceil(2.0 * R / panelWidth)));
    const auto& rule = gl_rule(64);
    std::vector<double> nodes, weights;
    nodes.reserve(static_cast<std::size_t>(panels) * rule.nodes.size());
    const double h = 2.0 * R / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = -R + p * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            nodes.push_back(lo + 0.5 * h * (rule.nodes[i] + 1.0));
            weights.push_back(0.5 * h * rule.weights[i]);
        }
    }

    std::vector<Complex> kernel(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double xi = nodes[i];
        const Complex damp = std::exp(-tau * symbol(model, xi));
        kernel[i] = std::pow(Complex(0.0, xi), k) * damp * payoff_transform(v0, xi);
    }

    DerivativeField out;
    out.values.resize(xGrid.size());
    double tailMag = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (std::abs(nodes[i]) > 0.9 * R) tailMag += std::abs(kernel[i]) * weights[i];
    for (std::size_t g = 0; g < xGrid.size(); ++g) {
        Complex acc(0.0, 0.0);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * kernel[i] * std::exp(Complex(0.0, xGrid[g] * nodes[i]));
        out.values[g] = acc.real() / 2.5066282746310002;
    }
    out.errorBound = tailMag / 2.5066282746310002 + 1e-12;
    return out;
}

// ---- public Fourier pricing ------------------------------------------------------

std::vector<OracleResult> price_fourier_1d(const LevyModel1D& model,
                                           const PayoffSpec& spec, double tau,
                                           const std::vector<double>& sGrid) {
    if (tau <= 0.0) throw Error("tau must be > 0");
    std::vector<OracleResult> out(sGrid.size());

    switch (spec.kind) {
        case PayoffKind::Constant: {
            for (auto& r : out) {
                r.kind = OracleKind::Analytic;
                r.value = spec.constant;
                r.errorBound = 0.0;
            }
            return out;
        }
        case PayoffKind::Call:
        case PayoffKind::Put:
        case PayoffKind::BasketCall:
        case PayoffKind::SumOfCalls: {
            // In one dimension these all reduce to a (weighted) vanilla.
            double weight = 1.0;
            if (spec.kind == PayoffKind::BasketCall || spec.kind == PayoffKind::SumOfCalls)
                weight = spec.effective_weights(1)[0];
            const bool put = spec.kind == PayoffKind::Put;
            if (!put && max_exp_moment_order(model) <= 1.0)
                throw DampingFailure("call pricing requires E[e^{X}] < infinity");
            double sMin = sGrid.empty() ? 1.0 : *std::min_element(sGrid.begin(), sGrid.end());
            double sMax = sGrid.empty() ? 1.0 : *std::max_element(sGrid.begin(), sGrid.end());
            if (sMin <= 0.0) throw Error("spot grid must be positive");
            const double K = spec.K;
            const CosPlan plan =
                make_cos_plan(model, tau, std::log(sMin / K), std::log(sMax / K), 4096);
            const auto coeffs = cos_call_coeffs(plan, put);
            for (std::size_t i = 0; i < sGrid.size(); ++i) {
                // Basket/sum weights scale the payoff: w (s e^X - K)^+ prices as
                // w * call(s).
                OracleResult r = cos_price(plan, coeffs, K, std::log(sGrid[i] / K));
                r.value *= weight;
                r.errorBound *= std::abs(weight);
                out[i] = r;
            }
            return out;
        }
        case PayoffKind::Butterfly: {
            const LogPayoff v0 = log_payoff(spec);
            std::vector<double> xGrid(sGrid.size());
            for (std::size_t i = 0; i < sGrid.size(); ++i) xGrid[i] = std::log(sGrid[i]);
            const DerivativeField field = derivative_fourier(model, v0, tau, 0, xGrid);
            for (std::size_t i = 0; i < sGrid.size(); ++i) {
                out[i].kind = OracleKind::Fourier;
                out[i].value = field.values[i];
                out[i].errorBound = field.errorBound;
            }
            return out;
        }
        default:
            throw Error("payoff not supported by the 1d Fourier oracle");
    }
}

OracleResult price_fourier_1d(const LevyModel1D& model, const PayoffSpec& spec,
                              double tau, double s) {
    return price_fourier_1d(model, spec, tau, std::vector<double>{s})[0];
}

// ---- Monte Carlo ------------------------------------------------------------------

std::vector<OracleResult> price_mc_grid(const LevyModelD& model, const PayoffSpec& spec,
                                        double tau,
                                        const std::vector<Eigen::VectorXd>& sGrid,
                                        long n, std::uint64_t seed, int threads) {
    if (n < 100) throw Error("price_mc needs n >= 100");
    if (!model.simulable()) throw NotSimulable("model has no exact sampler");
    const int blockCount = 64;
    const long perBlock = (n + blockCount - 1) / blockCount;
    const long total = perBlock * blockCount;
    const std::size_t G = sGrid.size();

    std::vector<std::vector<double>> blockSum(blockCount, std::vector<double>(G, 0.0));
    std::vector<std::vector<double>> blockSq(blockCount, std::vector<double>(G, 0.0));
    RngStream root(seed);
    const PayoffEvaluator payoff(spec, model.d);
    const IncrementSampler sampler(model, tau);

    parallel_blocks(blockCount, threads, [&](int b) {
        RngStream stream = root.child(static_cast<std::uint64_t>(b));
        Eigen::VectorXd scaled(model.d);
        Eigen::VectorXd growth(model.d);
        auto& sums = blockSum[static_cast<std::size_t>(b)];
        auto& sqs = blockSq[static_cast<std::size_t>(b)];
        for (long i = 0; i < perBlock; ++i) {
            const Eigen::VectorXd x = sampler(stream);
            growth = x.array().exp().matrix();
            for (std::size_t g = 0; g < G; ++g) {
                scaled.noalias() = sGrid[g].cwiseProduct(growth);
                const double v = payoff(scaled);
                sums[g] += v;
                sqs[g] += v * v;
            }
        }
    });

    std::vector<OracleResult> out(G);
    for (std::size_t g = 0; g < G; ++g) {
        double sum = 0.0, sq = 0.0;
        for (int b = 0; b < blockCount; ++b) {
            sum += blockSum[static_cast<std::size_t>(b)][g];
            sq += blockSq[static_cast<std::size_t>(b)][g];
        }
        const double mean = sum / static_cast<double>(total);
        const double var =
            std::max(0.0, sq / static_cast<double>(total) - mean * mean);
        OracleResult r;
        r.kind = OracleKind::MonteCarlo;
        r.value = mean;
        r.errorBound = 3.0 * std::sqrt(var / static_cast<double>(total));
        r.sampleCount = total;
        r.seed = seed;
        r.blockCount = blockCount;
        out[g] = r;
    }
    return out;
}

OracleResult price_mc(const LevyModelD& model, const PayoffSpec& spec, double tau,
                      const Eigen::VectorXd& s, long n, std::uint64_t seed, int threads) {
    return price_mc_grid(model, spec, tau, {s}, n, seed, threads)[0];
}

}  // namespace levynet
