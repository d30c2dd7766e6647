#include "levynet/chaos_sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "levynet/pricing_oracle.hpp"
#include "levynet/quadrature.hpp"

namespace levynet {

ChaosFactor gaussian_factor(double width) {
    if (width <= 0.0) throw Error("gaussian factor needs width > 0");
    ChaosFactor fac;
    fac.f = [width](double x) { return std::exp(-0.5 * x * x / (width * width)); };
    fac.fhat = [width](double xi) {
        return Complex(width * std::exp(-0.5 * width * width * xi * xi), 0.0);
    };
    fac.fhatL1 = std::sqrt(2.0 * 3.14159265358979323846);
    return fac;
}

ChaosFactor butterfly_factor(const PayoffSpec& spec) {
    const LogPayoff lp = log_payoff(spec);
    ChaosFactor fac;
    fac.f = lp.f;
    fac.fhat = [lp](double xi) { return payoff_transform(lp, xi); };
    // L1 norm of the transform: quadrature out to R plus a certified tail
    // padding from the O(1/xi^2) kink decay.
    const double R = 4000.0;
    double acc = 0.0;
    const int panels = 800;
    for (int p = 0; p < panels; ++p) {
        const double lo = p * R / panels, hi = (p + 1) * R / panels;
        acc += integrate_gl([&](double xi) { return std::abs(fac.fhat(xi)); }, lo, hi, 32);
    }
    double tailAmp = 0.0;
    for (double xi = 0.7 * R; xi <= R; xi += R / 64.0)
        tailAmp = std::max(tailAmp, xi * xi * std::abs(fac.fhat(xi)));
    const double tail = 2.0 * tailAmp / R;  // int_R^inf amp/xi^2
    fac.fhatL1 = 2.0 * acc + 2.0 * tail;    // symmetric in xi
    return fac;
}

namespace {

std::vector<double> sector_rhos(const SymbolSector& sector, int d) {
    std::vector<double> rhos;
    if (sector.rhoVec) {
        rhos = *sector.rhoVec;
        if (static_cast<int>(rhos.size()) != d)
            throw Error("sector rhoVec must have length d");
    } else {
        rhos.assign(static_cast<std::size_t>(d), sector.rho);
    }
    for (double r : rhos)
        if (r <= 0.5) throw RhoTooSmall("chaos bounds need rho_j > 1/2");
    return rhos;
}

double inf_rho(const std::vector<double>& rhos) {
    return *std::min_element(rhos.begin(), rhos.end());
}

std::vector<double> b_sequence(const std::vector<double>& rhos, double tau, double C1) {
    const double rho = inf_rho(rhos);
    const double rhoPrime = 1.0 - 1.0 / (2.0 * rho);
    std::vector<double> b(rhos.size());
    for (std::size_t j = 0; j < rhos.size(); ++j)
        b[j] = std::pow(2.0 * rhos[j] * tau * C1, -1.0 / (2.0 * rhos[j] * rhoPrime));
    return b;
}

double bound_from_b(const MultiIndex& nu, const std::vector<double>& b, double rhoPrime,
                    double v0hatL1, int d) {
    double logProd = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j)
        logProd += nu[j] * std::log(b[j]) - std::lgamma(nu[j] + 1.0);
    return std::pow(2.0 * 3.14159265358979323846, -0.5 * d) * v0hatL1 *
           std::exp(rhoPrime * logProd);
}

}  // namespace

double coeff_bound(const MultiIndex& nu, double tau, const SymbolSector& sector,
                   double v0hatL1, int d) {
    if (static_cast<int>(nu.size()) != d) throw DimensionMismatch("nu must have length d");
    const auto rhos = sector_rhos(sector, d);
    const double rho = inf_rho(rhos);
    const double rhoPrime = 1.0 - 1.0 / (2.0 * rho);
    const auto b = b_sequence(rhos, tau, sector.C1);
    return bound_from_b(nu, b, rhoPrime, v0hatL1, d);
}

double tau0(int d, double rho, double q, double C1) {
    if (d < 1 || rho <= 0.0 || C1 <= 0.0) throw Error("tau0 needs positive inputs");
    if (!(q > 0.0 && q <= 1.0)) throw Error("tau0 needs q in (0,1]");
    return std::pow(static_cast<double>(d), 2.0 * rho / q) / (2.0 * rho * C1);
}

SummabilityCertificate summability_certificate(int d, double tau,
                                               const SymbolSector& sector, double q,
                                               double v0hatL1) {
    if (!(q > 0.0 && q <= 1.0)) throw Error("q must lie in (0,1]");
    const auto rhos = sector_rhos(sector, d);
    const double rho = inf_rho(rhos);
    SummabilityCertificate cert;
    cert.ratio = d * std::pow(2.0 * rho * tau * sector.C1, -q / (2.0 * rho));
    cert.finite = cert.ratio < 1.0;
    if (cert.finite) {
        cert.lqNormBound = std::pow(v0hatL1, q) *
                           std::pow(2.0 * 3.14159265358979323846, -0.5 * d * q) /
                           (1.0 - cert.ratio);
    } else {
        cert.lqNormBound = std::numeric_limits<double>::infinity();
    }
    return cert;
}

namespace {

// Greedy bound-descending enumeration producing a downward-closed order: an
// index is eligible once all its parents are listed. Deterministic
// lexicographic tie-break.
std::vector<MultiIndex> greedy_order(int d, int count,
                                     const std::function<double(const MultiIndex&)>& boundFn,
                                     int maxTotalOrder) {
    std::map<MultiIndex, double> pool;
    std::map<MultiIndex, int> missingParents;
    std::vector<MultiIndex> order;
    const MultiIndex zero(static_cast<std::size_t>(d), 0);
    pool[zero] = boundFn(zero);

    std::map<MultiIndex, bool> listed;
    auto parents_listed = [&](const MultiIndex& nu) {
        for (int j = 0; j < d; ++j) {
            if (nu[static_cast<std::size_t>(j)] == 0) continue;
            MultiIndex parent = nu;
            --parent[static_cast<std::size_t>(j)];
            if (!listed.count(parent)) return false;
        }
        return true;
    };

    while (static_cast<int>(order.size()) < count && !pool.empty()) {
        auto bestIt = pool.end();
        for (auto it = pool.begin(); it != pool.end(); ++it) {
            if (!parents_listed(it->first)) continue;
            if (bestIt == pool.end() || it->second > bestIt->second ||
                (it->second == bestIt->second && it->first < bestIt->first))
                bestIt = it;
        }
        if (bestIt == pool.end()) break;
        const MultiIndex nu = bestIt->first;
        pool.erase(bestIt);
        listed[nu] = true;
        order.push_back(nu);
        int total = 0;
        for (int v : nu) total += v;
        if (total >= maxTotalOrder) continue;
        for (int j = 0; j < d; ++j) {
            MultiIndex child = nu;
            ++child[static_cast<std::size_t>(j)];
            if (!pool.count(child) && !listed.count(child)) pool[child] = boundFn(child);
        }
    }
    return order;
}

struct TensorNodes {
    std::vector<std::vector<double>> nodes;    // per dimension
    std::vector<std::vector<double>> weights;  // per dimension
    std::vector<std::vector<Complex>> fhat;    // factor transform at nodes
};

TensorNodes make_tensor_nodes(const LevyModelD& model,
                              const std::vector<ChaosFactor>& factors, double tau,
                              const SymbolSector& sector, int pointsPerPanel,
                              double panelWidth) {
    const auto rhos = sector_rhos(sector, model.d);
    TensorNodes tn;
    tn.nodes.resize(static_cast<std::size_t>(model.d));
    tn.weights.resize(static_cast<std::size_t>(model.d));
    tn.fhat.resize(static_cast<std::size_t>(model.d));
    const double logTol = std::log(1e14);
    for (int j = 0; j < model.d; ++j) {
        const double R =
            std::pow(logTol / (tau * sector.C1), 1.0 / (2.0 * rhos[static_cast<std::size_t>(j)]));
        const int panels = std::max(4, static_cast<int>(std::ceil(2.0 * R / panelWidth)));
        const auto& rule = gl_rule(pointsPerPanel);
        const double h = 2.0 * R / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = -R + p * h;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double xi = lo + 0.5 * h * (rule.nodes[i] + 1.0);
                tn.nodes[static_cast<std::size_t>(j)].push_back(xi);
                tn.weights[static_cast<std::size_t>(j)].push_back(0.5 * h * rule.weights[i]);
                tn.fhat[static_cast<std::size_t>(j)].push_back(
                    factors[static_cast<std::size_t>(j)].fhat(xi));
            }
        }
    }
    return tn;
}

// Applies fn(xi, weight * prod fhat_j) over the tensor grid.
void tensor_sweep(const LevyModelD& model, const TensorNodes& tn,
                  const std::function<void(const Eigen::VectorXd&, Complex)>& fn) {
    const int d = model.d;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd xi(d);
    while (true) {
        Complex wf(1.0, 0.0);
        for (int j = 0; j < d; ++j) {
            const std::size_t i = idx[static_cast<std::size_t>(j)];
            xi[j] = tn.nodes[static_cast<std::size_t>(j)][i];
            wf *= tn.weights[static_cast<std::size_t>(j)][i] *
                  tn.fhat[static_cast<std::size_t>(j)][i];
        }
        fn(xi, wf);
        int j = 0;
        for (; j < d; ++j) {
            if (++idx[static_cast<std::size_t>(j)] <
                tn.nodes[static_cast<std::size_t>(j)].size())
                break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
        if (j == d) break;
    }
}

std::vector<double> coeffs_on_set(const LevyModelD& model,
                                  const std::vector<ChaosFactor>& factors, double tau,
                                  const SymbolSector& sector,
                                  const std::vector<MultiIndex>& indices,
                                  int pointsPerPanel, double panelWidth) {
    const int d = model.d;
    const TensorNodes tn =
        make_tensor_nodes(model, factors, tau, sector, pointsPerPanel, panelWidth);
    int maxOrder = 0;
    for (const auto& nu : indices)
        for (int v : nu) maxOrder = std::max(maxOrder, v);

    std::vector<Complex> acc(indices.size(), Complex(0.0, 0.0));
    std::vector<double> powBuf(static_cast<std::size_t>(d) * (maxOrder + 1));
    tensor_sweep(model, tn, [&](const Eigen::VectorXd& xi, Complex wf) {
        const Complex damp = std::exp(-tau * symbol(model, xi)) * wf;
        for (int j = 0; j < d; ++j) {
            double pw = 1.0;
            for (int k = 0; k <= maxOrder; ++k) {
                powBuf[static_cast<std::size_t>(j * (maxOrder + 1) + k)] = pw;
                pw *= xi[j];
            }
        }
        for (std::size_t q = 0; q < indices.size(); ++q) {
            double mono = 1.0;
            int total = 0;
            for (int j = 0; j < d; ++j) {
                const int e = indices[q][static_cast<std::size_t>(j)];
                mono *= powBuf[static_cast<std::size_t>(j * (maxOrder + 1) + e)];
                total += e;
            }
            // (i xi)^nu = i^{|nu|} xi^nu
            static const Complex iPow[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                            Complex(0, -1)};
            acc[q] += damp * mono * iPow[total % 4];
        }
    });

    std::vector<double> out(indices.size());
    const double norm = std::pow(2.0 * 3.14159265358979323846, -0.5 * d);
    for (std::size_t q = 0; q < indices.size(); ++q) {
        double logFact = 0.0;
        for (int v : indices[q]) logFact += std::lgamma(v + 1.0);
        out[q] = norm * acc[q].real() * std::exp(-logFact);
    }
    return out;
}

}  // namespace

ChaosExpansion taylor_coeffs(const LevyModelD& model,
                             const std::vector<ChaosFactor>& factors, double tau,
                             const SymbolSector& sector, int candidateCount,
                             int maxTotalOrder) {
    if (model.d > 3) throw DimensionTooLarge("taylor_coeffs supports d <= 3");
    if (static_cast<int>(factors.size()) != model.d)
        throw Error("need one payoff factor per dimension");
    const auto rhos = sector_rhos(sector, model.d);
    {
        // Warn-level precondition tau > tau0(d): callers may proceed below the
        // threshold, where only the bounds (not summability) are certified.
        std::vector<Eigen::VectorXd> grid;
        RngStream rng(12345);
        for (int i = 0; i < 64; ++i) {
            Eigen::VectorXd xi(model.d);
            for (int j = 0; j < model.d; ++j) xi[j] = 16.0 * (rng.uniform() - 0.5);
            grid.push_back(xi);
        }
        const auto rep = check_sector(model, sector, grid);
        if (!rep.holds) throw SectorViolation("anisotropic sector fails on a sample grid");
    }

    ChaosExpansion exp;
    exp.d = model.d;
    exp.tau = tau;
    const double rho = inf_rho(rhos);
    exp.rhoPrime = 1.0 - 1.0 / (2.0 * rho);
    exp.bSeq = b_sequence(rhos, tau, sector.C1);
    exp.v0hatL1 = 1.0;
    for (const auto& f : factors) exp.v0hatL1 *= f.fhatL1;

    auto boundFn = [&](const MultiIndex& nu) {
        return bound_from_b(nu, exp.bSeq, exp.rhoPrime, exp.v0hatL1, exp.d);
    };
    exp.indices = greedy_order(exp.d, candidateCount, boundFn, maxTotalOrder);
    exp.bound.resize(exp.indices.size());
    for (std::size_t i = 0; i < exp.indices.size(); ++i)
        exp.bound[i] = boundFn(exp.indices[i]);

    exp.t = coeffs_on_set(model, factors, tau, sector, exp.indices, 32, 1.0);
    const auto coarse = coeffs_on_set(model, factors, tau, sector, exp.indices, 16, 2.0);
    exp.quadError = 0.0;
    for (std::size_t i = 0; i < exp.t.size(); ++i)
        exp.quadError = std::max(exp.quadError, std::abs(exp.t[i] - coarse[i]));

    // Total of the bound over every multi-index: product over dimensions of
    // sum_k (b_j^k / k!)^{rho'}.
    double logTotal = 0.0;
    for (int j = 0; j < exp.d; ++j) {
        double sum = 0.0;
        for (int k = 0; k < 400; ++k) {
            const double term = std::exp(
                exp.rhoPrime * (k * std::log(exp.bSeq[static_cast<std::size_t>(j)]) -
                                std::lgamma(k + 1.0)));
            sum += term;
            if (k > 4 && term < 1e-18 * sum) break;
        }
        logTotal += std::log(sum);
    }
    exp.analyticL1Total = std::pow(2.0 * 3.14159265358979323846, -0.5 * exp.d) *
                          exp.v0hatL1 * std::exp(logTotal);
    return exp;
}

std::vector<MultiIndex> build_index_set(const ChaosExpansion& expansion, int n) {
    if (n < 1) throw Error("index set size must be >= 1");
    const int count = std::min<int>(n, static_cast<int>(expansion.indices.size()));
    return {expansion.indices.begin(), expansion.indices.begin() + count};
}

bool is_downward_closed(const std::vector<MultiIndex>& set) {
    std::map<MultiIndex, bool> present;
    for (const auto& nu : set) present[nu] = true;
    for (const auto& nu : set) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
            if (nu[j] == 0) continue;
            MultiIndex parent = nu;
            --parent[j];
            if (!present.count(parent)) return false;
        }
    }
    return true;
}

std::vector<double> chaos_reference_field(const LevyModelD& model,
                                          const std::vector<ChaosFactor>& factors,
                                          double tau, const SymbolSector& sector,
                                          const std::vector<Eigen::VectorXd>& xGrid) {
    const TensorNodes tn = make_tensor_nodes(model, factors, tau, sector, 32, 1.0);
    std::vector<Complex> acc(xGrid.size(), Complex(0.0, 0.0));
    tensor_sweep(model, tn, [&](const Eigen::VectorXd& xi, Complex wf) {
        const Complex damp = std::exp(-tau * symbol(model, xi)) * wf;
        for (std::size_t g = 0; g < xGrid.size(); ++g)
            acc[g] += damp * std::exp(Complex(0.0, xGrid[g].dot(xi)));
    });
    std::vector<double> out(xGrid.size());
    const double norm = std::pow(2.0 * 3.14159265358979323846, -0.5 * model.d);
    for (std::size_t g = 0; g < xGrid.size(); ++g) out[g] = norm * acc[g].real();
    return out;
}

double sparse_partial_sum(const ChaosExpansion& expansion,
                          const std::vector<MultiIndex>& lambda,
                          const Eigen::VectorXd& x) {
    std::map<MultiIndex, double> coeff;
    for (std::size_t i = 0; i < expansion.indices.size(); ++i)
        coeff[expansion.indices[i]] = expansion.t[i];
    double acc = 0.0;
    for (const auto& nu : lambda) {
        auto it = coeff.find(nu);
        if (it == coeff.end()) throw Error("lambda contains an index outside the expansion");
        double mono = 1.0;
        for (std::size_t j = 0; j < nu.size(); ++j) mono *= std::pow(x[static_cast<long>(j)], nu[j]);
        acc += it->second * mono;
    }
    return acc;
}

SparseErrorStudy sparse_eval_and_error(const ChaosExpansion& expansion,
                                       const LevyModelD& model,
                                       const std::vector<ChaosFactor>& factors,
                                       const SymbolSector& sector,
                                       const std::vector<int>& nList,
                                       const std::vector<Eigen::VectorXd>& xGrid) {
    SparseErrorStudy study;
    const auto reference =
        chaos_reference_field(model, factors, expansion.tau, sector, xGrid);
    study.oracleError = expansion.quadError;

    for (int n : nList) {
        const auto lambda = build_index_set(expansion, n);
        double inLambda = 0.0;
        for (const auto& nu : lambda) {
            for (std::size_t i = 0; i < expansion.indices.size(); ++i)
                if (expansion.indices[i] == nu) {
                    inLambda += expansion.bound[i];
                    break;
                }
        }
        SparseErrorRow row;
        row.n = static_cast<int>(lambda.size());
        row.tailBound = std::max(0.0, expansion.analyticL1Total - inLambda);
        for (std::size_t g = 0; g < xGrid.size(); ++g) {
            const double err =
                std::abs(sparse_partial_sum(expansion, lambda, xGrid[g]) - reference[g]);
            row.supError = std::max(row.supError, err);
        }
        study.rows.push_back(row);
    }
    return study;
}

SparseNet sparse_to_relu(const ChaosExpansion& expansion,
                         const std::vector<MultiIndex>& lambda, double deltaNet) {
    if (expansion.d > 3) throw DimensionTooLarge("sparse_to_relu supports d <= 3");
    if (lambda.empty()) throw Error("lambda must be nonempty");

    std::map<MultiIndex, double> coeff;
    for (std::size_t i = 0; i < expansion.indices.size(); ++i)
        coeff[expansion.indices[i]] = expansion.t[i];

    // Check-grid for the verify loop.
    std::vector<Eigen::VectorXd> grid;
    {
        const int per = expansion.d == 1 ? 201 : (expansion.d == 2 ? 17 : 9);
        const auto axis = linspace(-1.0, 1.0, per);
        std::vector<std::size_t> idx(static_cast<std::size_t>(expansion.d), 0);
        while (true) {
            Eigen::VectorXd x(expansion.d);
            for (int j = 0; j < expansion.d; ++j) x[j] = axis[idx[static_cast<std::size_t>(j)]];
            grid.push_back(x);
            int j = 0;
            for (; j < expansion.d; ++j) {
                if (++idx[static_cast<std::size_t>(j)] < axis.size()) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
            if (j == expansion.d) break;
        }
    }

    int m = 6;
    SparseNet out;
    for (int attempt = 0; attempt < 10; ++attempt, ++m) {
        std::vector<ReluNetwork> monomials;
        std::vector<double> weights;
        int maxL = 0;
        for (const auto& nu : lambda) {
            auto it = coeff.find(nu);
            if (it == coeff.end())
                throw Error("lambda contains an index outside the expansion");
            monomials.push_back(monomial_emulator(expansion.d, nu, m));
            weights.push_back(it->second);
            maxL = std::max(maxL, monomials.back().depth());
        }
        for (auto& net : monomials) net = pad_depth(net, maxL);
        std::vector<Eigen::VectorXd> scales(
            monomials.size(), Eigen::VectorXd::Ones(expansion.d));
        ReluNetwork combined = average_scaled(monomials, weights, scales);

        double worst = 0.0;
        for (const auto& x : grid) {
            const double exact = sparse_partial_sum(expansion, lambda, x);
            worst = std::max(worst, std::abs(realize(combined, x)[0] - exact));
        }
        if (worst <= 0.98 * deltaNet || lambda.size() == 1) {
            const auto met = metrics(combined);
            out.net = std::move(combined);
            out.M = met.M;
            out.L = met.L;
            out.emulationError = worst;
            return out;
        }
    }
    throw Error("sparse_to_relu failed to reach deltaNet");
}

}  // namespace levynet
