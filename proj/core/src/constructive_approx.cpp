#include "levynet/constructive_approx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levynet {

void ConstructionConfig::validate() const {
    if (!(0.0 < a && a < b)) throw Error("construction box requires 0 < a < b");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("epsilon must lie in (0,1]");
    if (attempts < 1) throw Error("attempts must be >= 1");
    if (maturity <= 0.0) throw Error("maturity must be > 0");
    if (mode == ConstructionMode::Practical && nOverride < 1)
        throw Error("Practical mode needs nOverride >= 1");
}

StepConstants constants_report(const LevyModelD& model, const PayoffConstants& pc,
                               double T, double epsilon, double a, double b) {
    (void)a;
    StepConstants sc;
    sc.d = model.d;
    sc.c = pc.c;
    sc.q = pc.q;
    sc.qTilde = pc.qTilde;
    sc.p = pc.p;

    if (model.d == 1) {
        const double e1 = exp_moment(model, 1.0, T)[0];
        const double e2 = exp_moment(model, 2.0, T)[0];
        sc.B = triplet_bounds(model, sc.p).B;
        sc.c1 = sc.c * (1.0 + b * e1);
        sc.c2 = 4.0 * b * sc.c * std::sqrt(e2);
        sc.cTilde1 = std::numeric_limits<double>::quiet_NaN();
        sc.epsBar = epsilon / (sc.c1 + 1.0);
        const double n = std::pow(2.0 * sc.c2 / sc.epsBar, 2.0);
        sc.n = std::max(1.0, std::ceil(n));
        sc.D = std::numeric_limits<double>::quiet_NaN();
        sc.kappa = sc.c * (1.0 + 4.0 * sc.c2 * sc.c2) * std::pow(sc.c1 + 1.0, 2.0 + sc.q);
        sc.sizeBound = sc.kappa * std::pow(epsilon, -2.0 - sc.q);
        return sc;
    }

    const double d = static_cast<double>(model.d);
    const double p = sc.p;
    sc.B = triplet_bounds(model, p).B;
    double supMoment = 0.0;
    const Eigen::VectorXd moments = exp_moment(model, p, T);
    for (int i = 0; i < model.d; ++i) supMoment = std::max(supMoment, moments[i]);
    sc.c1 = sc.c * std::max(1.0, std::pow(b, p)) * (1.0 + supMoment);
    sc.cTilde1 = 2.0 * b * sc.c * std::exp(5.0 * T * p * sc.B + 2.0 * T * std::exp(p) * p * sc.B);
    sc.c2 = 4.0 * std::sqrt(3.14159265358979323846 / 2.0) * sc.c * b *
            std::exp(2.5 * sc.B * T * p + sc.B * T * p * std::exp(p));
    const double dPowPayoff = std::pow(d, sc.qTilde + 0.5 * p + 0.5);
    sc.epsBar = epsilon / (sc.c1 * dPowPayoff + 2.0);
    sc.n = std::max(
        1.0, std::ceil(std::pow(2.0 * sc.c2 * std::pow(d, sc.qTilde + 1.0) / sc.epsBar, 2.0)));
    sc.D = std::log(std::pow(d, sc.qTilde + 1.0) * sc.cTilde1 / sc.epsBar);
    sc.kappa = (1.0 + 4.0 * sc.c2 * sc.c2) * sc.c * std::pow(sc.c1 + 2.0, 2.0 + sc.q);
    sc.sizeBound = sc.kappa *
                   std::pow(d, (sc.qTilde + 0.5 * p + 0.5) * (2.0 + sc.q) + 3.0 * sc.qTilde + 2.0) *
                   std::pow(epsilon, -2.0 - sc.q);
    return sc;
}

// ---- measurement sets --------------------------------------------------------

namespace {

std::vector<Eigen::VectorXd> tensor_grid(int d, double a, double b, int perDim) {
    std::vector<Eigen::VectorXd> pts;
    const auto axis = linspace(a, b, perDim);
    if (d == 1) {
        for (double x : axis) pts.push_back(Eigen::VectorXd::Constant(1, x));
        return pts;
    }
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        Eigen::VectorXd p(d);
        for (int j = 0; j < d; ++j) p[j] = axis[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        pts.push_back(p);
        int j = 0;
        for (; j < d; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < perDim) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
        if (j == d) break;
    }
    return pts;
}

std::vector<Eigen::VectorXd> latin_hypercube(int d, double a, double b, int count,
                                             RngStream rng) {
    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(count), Eigen::VectorXd(d));
    for (int j = 0; j < d; ++j) {
        std::vector<int> perm(static_cast<std::size_t>(count));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        for (int i = 0; i < count; ++i) {
            const double u = rng.uniform();
            const double frac = (perm[static_cast<std::size_t>(i)] + u) / count;
            pts[static_cast<std::size_t>(i)][j] = a + (b - a) * frac;
        }
    }
    return pts;
}

OracleField build_oracle_field_impl(const LevyModelD& model, const PayoffSpec& spec,
                                     double tau, double a, double b, int perDim,
                                     long oracleSamples, std::uint64_t seed, int threads) {
    OracleField ms;
    const int d = model.d;
    if (d <= 3) {
        const int def = (d == 1) ? 1000 : (d == 2 ? 64 : 16);
        const int G = perDim > 0 ? perDim : def;
        ms.points = tensor_grid(d, a, b, G);
        ms.gridKind = "grid";
    } else {
        const int count = perDim > 0 ? perDim : 256;
        ms.points = latin_hypercube(d, a, b, count, RngStream(seed, 7777));
        ms.gridKind = "latin-hypercube";
    }

    ms.values.resize(ms.points.size());
    if (d == 1 && !model.commonJump) {
        const LevyModel1D m1{std::sqrt(model.A(0, 0)), model.gamma[0], model.idioJumps[0]};
        std::vector<double> sGrid(ms.points.size());
        for (std::size_t i = 0; i < ms.points.size(); ++i) sGrid[i] = ms.points[i][0];
        const auto res = price_fourier_1d(m1, spec, tau, sGrid);
        for (std::size_t i = 0; i < res.size(); ++i) {
            ms.values[i] = res[i].value;
            ms.errorBound = std::max(ms.errorBound, res[i].errorBound);
        }
    } else {
        const auto res =
            price_mc_grid(model, spec, tau, ms.points, oracleSamples, seed + 101, threads);
        for (std::size_t i = 0; i < res.size(); ++i) {
            ms.values[i] = res[i].value;
            ms.errorBound = std::max(ms.errorBound, res[i].errorBound);
        }
    }
    return ms;
}

struct AttemptResult {
    double error = 0.0;
    Eigen::VectorXd argmax;
    std::vector<Eigen::VectorXd> scales;  // e^{X_k} (capped), one per sample
};

// Draws the samples and measures the grid error of the sample-average price.
// The averaged network realizes exactly mean_k R(phi)(s .* scale_k) with
// R(phi) the exact payoff net, so the measurement goes through the payoff
// directly; the network itself is assembled only for the winning attempt.
AttemptResult run_attempt(const IncrementSampler& sampler, const PayoffEvaluator& payoff,
                          long n, double cap, const OracleField& ms, RngStream stream,
                          int threads) {
    const int d = sampler.model().d;
    AttemptResult res;
    res.scales.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        Eigen::VectorXd x = sampler(stream);
        if (std::isfinite(cap)) x = x.cwiseMin(cap);
        res.scales.push_back(x.array().exp().matrix());
    }

    res.error = -1.0;
    const std::size_t G = ms.points.size();
    const int blocks = static_cast<int>(std::max<long>(1, std::min<long>(32, n)));
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(blocks),
                                             std::vector<double>(G, 0.0));
    parallel_blocks(blocks, threads, [&](int bl) {
        Eigen::VectorXd scaled(d);
        auto& acc = partial[static_cast<std::size_t>(bl)];
        for (long k = bl; k < n; k += blocks) {
            const auto& scale = res.scales[static_cast<std::size_t>(k)];
            for (std::size_t g = 0; g < G; ++g) {
                scaled.noalias() = ms.points[g].cwiseProduct(scale);
                acc[g] += payoff(scaled);
            }
        }
    });
    for (std::size_t g = 0; g < G; ++g) {
        double val = 0.0;
        for (int bl = 0; bl < blocks; ++bl) val += partial[static_cast<std::size_t>(bl)][g];
        const double err = std::abs(val / static_cast<double>(n) - ms.values[g]);
        if (err > res.error) {
            res.error = err;
            res.argmax = ms.points[g];
        }
    }
    return res;
}

ReluNetwork assemble_average(const ReluNetwork& payoffNet,
                             const std::vector<Eigen::VectorXd>& scales) {
    const long n = static_cast<long>(scales.size());
    const std::vector<ReluNetwork> nets(static_cast<std::size_t>(n), payoffNet);
    const std::vector<double> w(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
    return average_scaled(nets, w, scales);
}

Construction construct_impl(const LevyModelD& model, const PayoffSpec& spec,
                            const ConstructionConfig& cfg, bool enforceTarget,
                            const OracleField* field) {
    cfg.validate();
    if (!model.simulable()) throw NotSimulable("construction requires exact samples");
    const PayoffNet pn = payoff_net(spec, model.d);
    const StepConstants sc =
        constants_report(model, pn.constants, cfg.maturity, cfg.epsilon, cfg.a, cfg.b);

    long n = 0;
    double cap = std::numeric_limits<double>::infinity();
    if (cfg.mode == ConstructionMode::Practical) {
        n = cfg.nOverride;
        if (model.d >= 2)
            cap = cfg.DOverride ? *cfg.DOverride : std::log(static_cast<double>(n));
    } else {
        if (sc.n > 1e7)
            throw InfeasibleConstruction(
                "paper-mode n = " + format_double(sc.n) +
                " exceeds the executable budget; use Practical mode");
        n = static_cast<long>(sc.n);
        if (model.d >= 2) cap = sc.D;
    }

    const OracleField msOwned =
        field ? OracleField{} : build_oracle_field_impl(model, spec, cfg.maturity, cfg.a,
                                                        cfg.b, cfg.gridPointsPerDim,
                                                        cfg.oracleSamples, cfg.seed,
                                                        cfg.threads);
    const OracleField& ms = field ? *field : msOwned;

    RngStream root(cfg.seed);
    const PayoffEvaluator payoff(spec, model.d);
    const IncrementSampler sampler(model, cfg.maturity);
    Construction best;
    best.report.measuredError = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> bestScales;
    int used = 0;
    for (int attempt = 0; attempt < cfg.attempts; ++attempt) {
        ++used;
        AttemptResult res = run_attempt(sampler, payoff, n, cap, ms,
                                        root.child(static_cast<std::uint64_t>(attempt)),
                                        cfg.threads);
        if (res.error < best.report.measuredError) {
            best.report.measuredError = res.error;
            best.report.argmaxPoint = res.argmax;
            bestScales = std::move(res.scales);
        }
        if (best.report.measuredError <= cfg.epsilon) break;
    }
    best.net = assemble_average(pn.net, bestScales);

    best.report.constants = sc;
    best.report.nUsed = n;
    best.report.DUsed = std::isfinite(cap) ? cap : std::numeric_limits<double>::quiet_NaN();
    const auto m = metrics(best.net);
    best.report.M = m.M;
    best.report.L = m.L;
    best.report.oracleErrorBound = ms.errorBound;
    best.report.attemptsUsed = used;
    best.report.seed = cfg.seed;
    best.report.gridKind = ms.gridKind;

    if (enforceTarget && best.report.measuredError > cfg.epsilon)
        throw AttemptsExhausted("construction missed epsilon = " + format_double(cfg.epsilon) +
                                    " after " + std::to_string(used) + " attempts (best " +
                                    format_double(best.report.measuredError) + ")",
                                best.report.measuredError);
    return best;
}

}  // namespace

Construction construct(const LevyModelD& model, const PayoffSpec& spec,
                       const ConstructionConfig& cfg) {
    return construct_impl(model, spec, cfg, true, nullptr);
}

Construction construct_best_effort(const LevyModelD& model, const PayoffSpec& spec,
                                   const ConstructionConfig& cfg) {
    return construct_impl(model, spec, cfg, false, nullptr);
}

Construction construct_with_oracle(const LevyModelD& model, const PayoffSpec& spec,
                                   const ConstructionConfig& cfg,
                                   const OracleField& field) {
    return construct_impl(model, spec, cfg, false, &field);
}

OracleField build_oracle_field(const LevyModelD& model, const PayoffSpec& spec,
                               double tau, double a, double b, int gridPointsPerDim,
                               long oracleSamples, std::uint64_t seed, int threads) {
    return build_oracle_field_impl(model, spec, tau, a, b, gridPointsPerDim,
                                   oracleSamples, seed, threads);
}

SupErrorReport measure_sup_error(const ReluNetwork& net, const LevyModelD& model,
                                 const PayoffSpec& spec, double tau, double a, double b,
                                 int gridPointsPerDim, long oracleSamples,
                                 std::uint64_t seed, int threads) {
    const OracleField ms = build_oracle_field_impl(model, spec, tau, a, b,
                                                   gridPointsPerDim, oracleSamples, seed,
                                                   threads);
    SupErrorReport rep;
    rep.oracleErrorBound = ms.errorBound;
    rep.gridKind = ms.gridKind;
    for (std::size_t g = 0; g < ms.points.size(); ++g) {
        const double err = std::abs(realize(net, ms.points[g])[0] - ms.values[g]);
        if (err > rep.supError) {
            rep.supError = err;
            rep.argmaxPoint = ms.points[g];
        }
    }
    return rep;
}

RateStudy rate_study(const LevyModelD& model, const PayoffSpec& spec,
                     const ConstructionConfig& cfg, const std::vector<long>& nList,
                     int trials) {
    for (std::size_t i = 1; i < nList.size(); ++i)
        if (nList[i] <= nList[i - 1]) throw Error("nList must be increasing");
    const PayoffNet pn = payoff_net(spec, model.d);
    const long phiM = metrics(pn.net).M;
    const OracleField ms =
        build_oracle_field_impl(model, spec, cfg.maturity, cfg.a, cfg.b,
                                cfg.gridPointsPerDim, cfg.oracleSamples, cfg.seed,
                                cfg.threads);

    RateStudy out;
    RngStream root(cfg.seed);
    const PayoffEvaluator payoff(spec, model.d);
    const IncrementSampler sampler(model, cfg.maturity);
    std::uint64_t task = 1;
    for (long n : nList) {
        double sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            double cap = std::numeric_limits<double>::infinity();
            if (model.d >= 2)
                cap = cfg.DOverride ? *cfg.DOverride : std::log(static_cast<double>(n));
            const AttemptResult res = run_attempt(sampler, payoff, n, cap, ms,
                                                  root.child(task++), cfg.threads);
            sum += res.error;
        }
        RateRow row;
        row.n = n;
        row.meanError = sum / trials;
        row.M = n * phiM;
        out.rows.push_back(row);
    }

    std::vector<double> lx, ly;
    for (const auto& r : out.rows) {
        lx.push_back(std::log(static_cast<double>(r.n)));
        ly.push_back(std::log(std::max(r.meanError, 1e-300)));
    }
    const LineFit fit = fit_line(lx, ly);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.r2 = fit.r2;
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("fit_line needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    LineFit f;
    const double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ssRes = 0.0, ssTot = 0.0;
    const double meanY = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = f.intercept + f.slope * x[i];
        ssRes += (y[i] - pred) * (y[i] - pred);
        ssTot += (y[i] - meanY) * (y[i] - meanY);
    }
    f.r2 = ssTot > 0.0 ? 1.0 - ssRes / ssTot : 1.0;
    return f;
}

}  // namespace levynet
