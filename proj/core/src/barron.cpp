#include "levynet/barron.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "levynet/quadrature.hpp"

namespace levynet {

BarronFunction BarronFunction::gaussian_1d() {
    BarronFunction f;
    f.d = 1;
    f.fhatAbs = [](double xi) { return std::exp(-0.5 * xi * xi); };
    f.analyticNorm = 2.0;
    f.f = [](double x) { return std::exp(-0.5 * x * x); };
    return f;
}

namespace {

double weighted_norm(const BarronFunction& f,
                     const std::function<double(double)>& weight) {
    // Integral over R (d = 1) or radial reduction (d > 1) with geometric
    // panel growth until the increments vanish.
    const double pi = 3.14159265358979323846;
    double surface = 2.0;  // two half-lines in 1d
    if (f.d > 1) {
        if (!f.radial) throw Error("barron_norm in d > 1 needs a radial modulus");
        surface = 2.0 * std::pow(pi, 0.5 * f.d) / std::tgamma(0.5 * f.d);
    }
    const double power = static_cast<double>(f.d);  // |xi| * r^{d-1}
    auto integrand = [&](double r) {
        return std::pow(r, power) * f.fhatAbs(r) * weight(r);
    };

    double total = 0.0, lo = 0.0, hi = 1.0;
    for (int block = 0; block < 80; ++block) {
        const double inc = integrate_panels(integrand, lo, hi, {}, 8, 32);
        total += inc;
        if (block > 2 && std::abs(inc) < 1e-13 * std::max(total, 1e-300)) {
            return surface * total;
        }
        lo = hi;
        hi *= 2.0;
    }
    throw Diverges("Barron integrand did not converge by radius 2^80");
}

}  // namespace

double barron_norm(const BarronFunction& f) {
    return weighted_norm(f, [](double) { return 1.0; });
}

double evolved_norm(const BarronFunction& f, const LevyModel1D& model, double tau) {
    if (f.d != 1) throw Error("evolved_norm implemented for d = 1");
    const double base = barron_norm(f);
    const double evolved = weighted_norm(f, [&](double r) {
        // Modulus bound handles both half-lines: Re psi(-r) = Re psi(r).
        return std::exp(-tau * symbol(model, r).real());
    });
    return std::min(evolved, base);
}

// ---- two-layer fits -------------------------------------------------------------

namespace {

struct Unit {
    double w = 1.0;
    double b = 0.0;
};

Eigen::VectorXd unit_column(const Unit& u, const Eigen::VectorXd& xs) {
    return (u.w * xs.array() + u.b).max(0.0).matrix();
}

// Correlation of the (normalized) candidate with the residual.
double unit_score(const Unit& u, const Eigen::VectorXd& xs, const Eigen::VectorXd& res) {
    const Eigen::VectorXd col = unit_column(u, xs);
    const double nn = col.norm();
    if (nn < 1e-12) return 0.0;
    return std::abs(col.dot(res)) / nn;
}

ReluNetwork assemble_two_layer(const std::vector<Unit>& units,
                               const Eigen::VectorXd& coeffs, int m) {
    ReluNetwork net;
    net.inputDim = 1;
    const int k = static_cast<int>(units.size());
    Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(std::max(k, 1), 1);
    Eigen::VectorXd b1 = Eigen::VectorXd::Zero(std::max(k, 1));
    Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(1, std::max(k, 1));
    for (int i = 0; i < k; ++i) {
        A1(i, 0) = units[static_cast<std::size_t>(i)].w;
        b1[i] = units[static_cast<std::size_t>(i)].b;
        A2(0, i) = coeffs[i];
    }
    (void)m;
    net.layers.push_back({A1, b1});
    net.layers.push_back({A2, Eigen::VectorXd::Zero(1)});
    return net;
}

double l2_error_qmc(const ReluNetwork& net, const std::function<double(double)>& f,
                    double R, long points) {
    // Golden-ratio low-discrepancy sequence on [-R, R].
    const double phi = 0.6180339887498949;
    double acc = 0.0, u = 0.5;
    for (long i = 0; i < points; ++i) {
        u += phi;
        u -= std::floor(u);
        const double x = -R + 2.0 * R * u;
        const double diff = realize1(net, x) - f(x);
        acc += diff * diff;
    }
    return std::sqrt(acc / static_cast<double>(points));
}

}  // namespace

TwoLayerFit fit_two_layer(const std::function<double(double)>& f, double R, int m,
                          FitMethod method, std::uint64_t seed) {
    if (m < 1) throw Error("fit_two_layer needs m >= 1");
    const long nFit = 4096;
    Eigen::VectorXd xs(nFit), ys(nFit);
    for (long i = 0; i < nFit; ++i) {
        xs[i] = -R + 2.0 * R * static_cast<double>(i) / (nFit - 1);
        ys[i] = f(xs[i]);
    }

    TwoLayerFit fit;
    std::vector<Unit> units;
    Eigen::VectorXd coeffs;

    if (method == FitMethod::RandomFeatures) {
        RngStream rng(seed);
        units.resize(static_cast<std::size_t>(m));
        Eigen::MatrixXd X(nFit, m);
        for (int i = 0; i < m; ++i) {
            Unit u;
            u.w = rng.uniform() < 0.5 ? 1.0 : -1.0;
            u.b = -(u.w) * (-R - 0.5 + (2.0 * R + 1.0) * rng.uniform());
            units[static_cast<std::size_t>(i)] = u;
            X.col(i) = unit_column(u, xs);
        }
        Eigen::MatrixXd gram = X.transpose() * X;
        Eigen::VectorXd rhs = X.transpose() * ys;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        coeffs = ldlt.solve(rhs);
        const double resid = (X * coeffs - ys).norm();
        if (!coeffs.allFinite() || ldlt.info() != Eigen::Success ||
            resid > ys.norm() + 1.0) {
            gram.diagonal().array() += 1e-8 * gram.diagonal().maxCoeff();
            coeffs = gram.ldlt().solve(rhs);
            fit.regularized = true;
        }
        fit.unitsUsed = m;
    } else {
        // Orthogonal matching pursuit: breakpoint grid + golden-section
        // refinement, orthonormal basis updates, final coefficient solve.
        const int gridN = 1024;
        std::vector<double> breakGrid(gridN);
        for (int i = 0; i < gridN; ++i)
            breakGrid[static_cast<std::size_t>(i)] =
                -R - 0.5 + (2.0 * R + 1.0) * i / (gridN - 1);

        Eigen::MatrixXd Q(nFit, m);
        Eigen::MatrixXd Rfac = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd residual = ys;
        int k = 0;
        for (; k < m; ++k) {
            Unit best;
            double bestScore = -1.0;
            for (double sgn : {1.0, -1.0}) {
                for (double c : breakGrid) {
                    const Unit u{sgn, -sgn * c};
                    const double sc = unit_score(u, xs, residual);
                    if (sc > bestScore) {
                        bestScore = sc;
                        best = u;
                    }
                }
            }
            // Golden-section refinement of the breakpoint around the winner.
            {
                const double step = (2.0 * R + 1.0) / (gridN - 1);
                double lo = -best.b / best.w - step, hi = -best.b / best.w + step;
                const double gr = 0.6180339887498949;
                double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
                for (int it = 0; it < 40; ++it) {
                    const double s1 = unit_score({best.w, -best.w * x1}, xs, residual);
                    const double s2 = unit_score({best.w, -best.w * x2}, xs, residual);
                    if (s1 > s2) {
                        hi = x2;
                        x2 = x1;
                        x1 = hi - gr * (hi - lo);
                    } else {
                        lo = x1;
                        x1 = x2;
                        x2 = lo + gr * (hi - lo);
                    }
                }
                const double c = 0.5 * (lo + hi);
                const Unit refined{best.w, -best.w * c};
                if (unit_score(refined, xs, residual) >= bestScore) best = refined;
            }

            Eigen::VectorXd col = unit_column(best, xs);
            Eigen::VectorXd v = col;
            for (int j = 0; j < k; ++j) {
                const double proj = Q.col(j).dot(col);
                Rfac(j, k) = proj;
                v -= proj * Q.col(j);
            }
            const double nv = v.norm();
            if (nv < 1e-10 * std::max(1.0, col.norm())) break;  // dictionary exhausted
            Rfac(k, k) = nv;
            Q.col(k) = v / nv;
            units.push_back(best);
            residual -= Q.col(k).dot(residual) * Q.col(k);
            if (residual.norm() / std::sqrt(static_cast<double>(nFit)) < 1e-13) {
                ++k;
                break;
            }
        }
        fit.unitsUsed = static_cast<int>(units.size());
        const int used = fit.unitsUsed;
        if (used > 0) {
            Eigen::VectorXd qy = Q.leftCols(used).transpose() * ys;
            coeffs = Rfac.topLeftCorner(used, used)
                         .triangularView<Eigen::Upper>()
                         .solve(qy);
        } else {
            coeffs = Eigen::VectorXd::Zero(1);
            units.push_back({1.0, 0.0});
            coeffs[0] = 0.0;
        }
    }

    fit.net = assemble_two_layer(units, coeffs, m);
    fit.l2piError = l2_error_qmc(fit.net, f, R, 100000);
    return fit;
}

}  // namespace levynet
