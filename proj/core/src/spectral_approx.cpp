#include "levynet/spectral_approx.hpp"

#include <algorithm>
#include <cmath>

#include "levynet/constructive_approx.hpp"
#include "levynet/quadrature.hpp"

namespace levynet {

double max_exp_opt(double m, double kappa, double mu) {
    if (m < 0.0 || kappa <= 0.0 || mu <= 0.0)
        throw Error("max_exp_opt needs m >= 0, kappa > 0, mu > 0");
    if (m == 0.0) return 1.0;
    return std::pow(m / (kappa * mu * 2.718281828459045), m / mu);
}

double gevrey_bound(int k, double tau, const SymbolSector& sector, double v0L2) {
    if (tau <= 0.0) throw Error("gevrey_bound needs tau > 0");
    if (sector.C1 <= 0.0) throw Error("gevrey_bound needs a positive sector lower bound");
    if (k == 0) return v0L2;
    const double rho = sector.rho;
    const double A = std::pow(1.0 / (2.0 * tau * sector.C1 * rho), 1.0 / (2.0 * rho));
    const double factorialPart = std::exp(std::lgamma(k + 1.0) / (2.0 * rho));
    return std::pow(A, k) * factorialPart * v0L2;
}

GevreyProfile gevrey_profile(int kMax, double tau, const SymbolSector& sector, double v0L2) {
    GevreyProfile gp;
    gp.delta = 1.0 / std::min(1.0, 2.0 * sector.rho);
    gp.aTauRho = std::pow(2.0 * tau * sector.C1 * sector.rho, -1.0 / (2.0 * sector.rho));
    gp.v0L2Norm = v0L2;
    for (int k = 0; k <= kMax; ++k) gp.bounds.push_back(gevrey_bound(k, tau, sector, v0L2));
    return gp;
}

SmoothingConstants smoothing_constants(int d, double tau, const SymbolSector& sector) {
    sector.validate();
    if (d < 1 || tau <= 0.0) throw Error("smoothing_constants needs d >= 1, tau > 0");
    const double rho = sector.rho, C1 = sector.C1;
    const double pi = 3.14159265358979323846;
    SmoothingConstants sc;
    // Gamma closed form of the radial reduction of
    // (2 pi)^{-d/2} (int exp(-2 tau C1 |xi|^{2 rho}) dxi)^{1/2}.
    const double inner = (pi / (rho * d)) * std::pow(2.0 * tau * C1, -d / (2.0 * rho)) *
                         std::pow(pi, 0.5 * d) *
                         std::exp(std::lgamma(d / (2.0 * rho)) - std::lgamma(0.5 * d + 1.0));
    sc.Cdtau = std::pow(2.0 * pi, -0.5 * d) * std::sqrt(inner);
    sc.tauThreshold = std::pow(static_cast<double>(d), 2.0 * rho) / (2.0 * rho * C1);
    sc.dAProduct = d * std::pow(2.0 * rho * tau * C1, -1.0 / (2.0 * rho));
    return sc;
}

std::vector<double> chebyshev_coeffs_from_values(const std::vector<double>& values) {
    const int p = static_cast<int>(values.size()) - 1;
    if (p < 0) throw Error("need at least one sample");
    std::vector<double> c(static_cast<std::size_t>(p) + 1, 0.0);
    if (p == 0) {
        c[0] = values[0];
        return c;
    }
    const double pi = 3.14159265358979323846;
    for (int k = 0; k <= p; ++k) {
        double acc = 0.5 * (values[0] + (k % 2 == 0 ? 1.0 : -1.0) * values[static_cast<std::size_t>(p)]);
        for (int j = 1; j < p; ++j)
            acc += values[static_cast<std::size_t>(j)] * std::cos(pi * k * j / p);
        c[static_cast<std::size_t>(k)] = 2.0 * acc / p;
    }
    c[0] *= 0.5;
    c[static_cast<std::size_t>(p)] *= 0.5;
    return c;
}

double derivative_l2_norm(const LevyModel1D& model, const LogPayoff& v0, double tau,
                          int k) {
    // Truncation: the damped integrand xi^{2k} e^{-2 tau Re psi} |v0hat|^2
    // must vanish; grow R geometrically until it does.
    double R = 8.0;
    auto envelope = [&](double xi) {
        return std::pow(std::abs(xi), 2.0 * k) *
               std::exp(-2.0 * tau * symbol(model, xi).real());
    };
    for (int it = 0; it < 60 && envelope(R) > 1e-18; ++it) R *= 1.3;
    if (envelope(R) > 1e-18)
        throw SectorViolation("derivative_l2_norm: integrand does not decay");

    // |v0hat| is smooth; sample-and-integrate on panels.
    const int panels = std::max(32, static_cast<int>(R));
    auto integrand = [&](double xi) {
        const double mag = std::abs(payoff_transform(v0, xi));
        return std::pow(std::abs(xi), 2.0 * k) *
               std::exp(-2.0 * tau * symbol(model, xi).real()) * mag * mag;
    };
    const double val = integrate_panels(integrand, -R, R, {0.0}, panels, 32);
    return std::sqrt(std::max(0.0, val));
}

double payoff_l2_norm(const LogPayoff& v0) {
    auto sq = [&](double x) {
        const double v = v0.f(x);
        return v * v;
    };
    return std::sqrt(std::max(0.0, integrate_panels(sq, v0.lo, v0.hi, v0.kinks, 16, 32)));
}

namespace {

std::vector<double> oracle_field(const LevyModel1D& model, const PayoffSpec& spec,
                                 double tau, const std::vector<double>& sGrid,
                                 double* errBound) {
    const auto res = price_fourier_1d(model, spec, tau, sGrid);
    std::vector<double> out(res.size());
    double eb = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        out[i] = res[i].value;
        eb = std::max(eb, res[i].errorBound);
    }
    if (errBound) *errBound = eb;
    return out;
}

}  // namespace

ChebStudy cheb_approx(const LevyModel1D& model, const PayoffSpec& spec, double tau,
                      double a, double b, const std::vector<int>& pList,
                      const SymbolSector& sector, int gridPoints) {
    if (tau <= 0.0) throw Error("cheb_approx needs tau > 0");
    if (!(0.0 < a && a < b)) throw Error("cheb_approx needs 0 < a < b");

    // The smoothing argument requires the sector lower bound; verify it on a
    // representative grid before trusting the exponential-rate regime.
    {
        std::vector<double> grid;
        for (double xi = 0.25; xi <= 64.0; xi *= 1.5) {
            grid.push_back(xi);
            grid.push_back(-xi);
        }
        const SectorReport rep = check_sector(model, sector, grid);
        if (!rep.holds)
            throw SectorViolation("declared sector fails on the check grid (margin " +
                                  format_double(std::min(rep.worstLowerMargin,
                                                         rep.worstUpperMargin)) +
                                  ")");
    }

    ChebStudy study;
    study.a = a;
    study.b = b;
    study.tau = tau;
    study.delta = 1.0 / std::min(1.0, 2.0 * sector.rho);
    study.gridS = linspace(a, b, gridPoints);
    study.oracle = oracle_field(model, spec, tau, study.gridS, &study.oracleErrorBound);

    const double pi = 3.14159265358979323846;
    for (int p : pList) {
        if (p < 0) throw Error("degrees must be nonnegative");
        std::vector<double> nodesS(static_cast<std::size_t>(p) + 1);
        for (int j = 0; j <= p; ++j) {
            const double x = (p == 0) ? 0.0 : std::cos(pi * j / p);
            nodesS[static_cast<std::size_t>(j)] = 0.5 * (a + b) + 0.5 * (b - a) * x;
        }
        const auto nodeVals = oracle_field(model, spec, tau, nodesS, nullptr);
        ChebRow row;
        row.p = p;
        row.coeffs = chebyshev_coeffs_from_values(nodeVals);
        row.supError = 0.0;
        for (std::size_t g = 0; g < study.gridS.size(); ++g) {
            const double x = (2.0 * study.gridS[g] - (a + b)) / (b - a);
            const double err = std::abs(chebyshev_eval(row.coeffs, x) - study.oracle[g]);
            row.supError = std::max(row.supError, err);
        }
        study.rows.push_back(std::move(row));
    }

    // Fit log(err) = decay * p^{1/delta} + const over rows clear of the
    // oracle noise floor.
    std::vector<double> xs, ys;
    for (const auto& row : study.rows) {
        if (row.supError > std::max(1e-13, 4.0 * study.oracleErrorBound) && row.p > 0) {
            xs.push_back(std::pow(static_cast<double>(row.p), 1.0 / study.delta));
            ys.push_back(std::log(row.supError));
        }
    }
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        study.decayCoefficient = fit.slope;
        study.decayR2 = fit.r2;
    }
    return study;
}

SpectralNet spectral_emulate(const ChebStudy& study, int p, double deltaNet) {
    const ChebRow* row = nullptr;
    for (const auto& r : study.rows)
        if (r.p == p) row = &r;
    if (!row) throw Error("degree " + std::to_string(p) + " not present in the study");

    SpectralNet out;
    out.chebError = row->supError;
    ReluNetwork poly =
        polynomial_emulator(row->coeffs, row->coeffs.size() <= 2 ? 0.5 : deltaNet);

    // Compose with the affine map [a,b] -> [-1,1] by rescaling the first layer.
    const double scale = 2.0 / (study.b - study.a);
    const double shift = -(study.a + study.b) / (study.b - study.a);
    ReluNetwork net = poly;
    net.layers[0].b += net.layers[0].A.col(0) * shift;
    net.layers[0].A *= scale;

    const auto m = metrics(net);
    out.net = std::move(net);
    out.M = m.M;
    out.L = m.L;
    out.measuredError = 0.0;
    for (std::size_t g = 0; g < study.gridS.size(); ++g) {
        const double err = std::abs(realize1(out.net, study.gridS[g]) - study.oracle[g]);
        out.measuredError = std::max(out.measuredError, err);
    }
    return out;
}

}  // namespace levynet
