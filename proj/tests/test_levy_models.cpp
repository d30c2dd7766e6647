#include <doctest.h>

#include <cmath>
#include <levynet/levy_models.hpp>
#include <levynet/quadrature.hpp>

using namespace levynet;

namespace {

// e^z - 1 - z without cancellation: the CGMY weight y^{-1-Y} amplifies any
// rounding noise near the origin, so small arguments go through the series.
Complex compensated_exp(Complex z) {
    if (std::abs(z) > 1e-3) return std::exp(z) - 1.0 - z;
    Complex term = z * z / 2.0, acc = term;
    for (int k = 3; k <= 8; ++k) {
        term *= z / static_cast<double>(k);
        acc += term;
    }
    return acc;
}

// Quadrature oracle for the jump part of the symbol: integrates the
// Levy-Khintchine integrand against the model's jump density. Graded panels
// absorb the CGMY singularity at the origin.
Complex jump_symbol_quadrature(const JumpLaw& law, double xi) {
    auto density = [&](double y) -> double {
        if (const auto* m = std::get_if<MertonJumps>(&law)) {
            const double z = (y - m->muJ) / m->sigmaJ;
            return m->lambda * std::exp(-0.5 * z * z) /
                   (m->sigmaJ * 2.5066282746310002);
        }
        if (const auto* k = std::get_if<KouJumps>(&law)) {
            return y > 0 ? k->lambda * k->pUp * k->etaPlus * std::exp(-k->etaPlus * y)
                         : k->lambda * (1.0 - k->pUp) * k->etaMinus *
                               std::exp(k->etaMinus * y);
        }
        if (const auto* ts = std::get_if<TemperedStableJumps>(&law)) {
            const double a = std::abs(y);
            return y > 0 ? ts->C * std::exp(-ts->M * a) / std::pow(a, 1.0 + ts->Y)
                         : ts->C * std::exp(-ts->G * a) / std::pow(a, 1.0 + ts->Y);
        }
        return 0.0;
    };
    auto inner = [&](double y) {  // |y| <= 1: fully compensated integrand
        return compensated_exp(Complex(0.0, xi * y)) * density(y);
    };
    auto outer = [&](double y) {  // |y| > 1
        return (std::exp(Complex(0.0, xi * y)) - 1.0) * density(y);
    };
    Complex acc(0.0, 0.0);
    // graded dyadic panels into the origin
    double hi = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double lo = hi * 0.5;
        acc += integrate_gl(inner, lo, hi, 32);
        acc += integrate_gl(inner, -hi, -lo, 32);
        hi = lo;
    }
    const double R = 60.0;
    acc += integrate_panels(outer, 1.0, R, {}, 30, 32);
    acc += integrate_panels(outer, -R, -1.0, {}, 30, 32);
    return acc;
}

LevyModel1D merton_fixture() {
    return LevyModel1D::merton(0.15, -0.05, {0.8, -0.1, 0.2});
}
LevyModel1D kou_fixture() {
    return LevyModel1D::kou(0.1, 0.02, {1.2, 0.4, 8.0, 5.0});
}
LevyModel1D cgmy_fixture() {
    return LevyModel1D::tempered_stable(0.05, 0.0, {0.4, 4.0, 6.0, 0.7});
}

}  // namespace

TEST_CASE("symbol closed forms match hand values and reductions") {
    const auto bs = LevyModel1D::black_scholes(0.2, -0.02);
    const Complex s = symbol(bs, 1.0);
    CHECK(s.real() == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(s.imag() == doctest::Approx(0.02).epsilon(1e-14));

    for (const auto& m : {bs, merton_fixture(), kou_fixture(), cgmy_fixture()}) {
        const Complex zero = symbol(m, 0.0);
        CHECK(zero == Complex(0.0, 0.0));
    }

    // Merton with lambda = 0 reduces to Black-Scholes.
    const auto degenerate = LevyModel1D::merton(0.2, -0.02, {0.0, 0.3, 0.1});
    for (double xi : {0.3, 1.0, 7.5}) {
        CHECK(std::abs(symbol(degenerate, xi) - symbol(bs, xi)) < 1e-14);
    }
}

TEST_CASE("symbol jump integrals agree with quadrature of the LK integrand") {
    for (const auto& m : {merton_fixture(), kou_fixture(), cgmy_fixture()}) {
        for (double xi : {0.5, 1.0, 3.0, -2.0}) {
            const Complex viaSymbol =
                Complex(0.5 * m.sigma * m.sigma * xi * xi, -m.gamma * xi) - symbol(m, xi);
            const Complex viaQuad = jump_symbol_quadrature(m.jumps, xi);
            CHECK(std::abs(viaSymbol - viaQuad) < 1e-9 * (1.0 + std::abs(viaQuad)));
        }
    }
}

TEST_CASE("martingale drift zeros psi(-i) and normalizes the first moment") {
    const auto bs = LevyModel1D::black_scholes(0.2, 0.0);
    CHECK(martingale_drift(bs) == doctest::Approx(-0.02).epsilon(1e-14));

    // Degenerate zero-size jumps contribute no compensator.
    const auto tiny = LevyModel1D::merton(0.0, 0.3, {1.0, 0.0, 1e-14});
    CHECK(std::abs(martingale_drift(tiny)) < 1e-12);

    for (auto m : {bs, merton_fixture(), kou_fixture(), cgmy_fixture()}) {
        m = with_martingale_drift(m);
        CHECK(std::abs(symbol_at_minus_ip(m, 1.0)) < 1e-12);
        for (double T : {0.5, 2.0})
            CHECK(std::abs(exp_moment(m, 1.0, T) - 1.0) < 1e-10);
    }
}

TEST_CASE("exponential moments: closed forms, quadrature oracle, bound part") {
    const auto bs = LevyModel1D::black_scholes(0.2, -0.02);
    CHECK(exp_moment(bs, 2.0, 1.0) == doctest::Approx(std::exp(0.04)).epsilon(1e-12));

    // Independent oracle: psi(-ip) assembled from the quadrature of the jump
    // integrand continued to the real axis.
    for (const auto& m : {merton_fixture(), kou_fixture(), cgmy_fixture()}) {
        for (double p : {1.0, 2.0}) {
            auto density = [&](double y) {
                // reuse the imaginary-axis the slow way: e^{p y} kernels
                return std::exp(p * y);
            };
            (void)density;
            // E[e^{p X_T}] via symbol continuation must agree with the direct
            // LK evaluation at xi = -ip obtained by quadrature.
            const Complex quadJump = [&] {
                // evaluate the compensated integrals with e^{py} weights
                auto inner = [&](double y) -> Complex {
                    const auto* mm = std::get_if<MertonJumps>(&m.jumps);
                    const auto* kk = std::get_if<KouJumps>(&m.jumps);
                    const auto* tt = std::get_if<TemperedStableJumps>(&m.jumps);
                    double dens = 0.0;
                    if (mm) {
                        const double z = (y - mm->muJ) / mm->sigmaJ;
                        dens = mm->lambda * std::exp(-0.5 * z * z) /
                               (mm->sigmaJ * 2.5066282746310002);
                    } else if (kk) {
                        dens = y > 0 ? kk->lambda * kk->pUp * kk->etaPlus *
                                           std::exp(-kk->etaPlus * y)
                                     : kk->lambda * (1.0 - kk->pUp) * kk->etaMinus *
                                           std::exp(kk->etaMinus * y);
                    } else if (tt) {
                        const double a = std::abs(y);
                        dens = y > 0 ? tt->C * std::exp(-tt->M * a) / std::pow(a, 1.0 + tt->Y)
                                     : tt->C * std::exp(-tt->G * a) / std::pow(a, 1.0 + tt->Y);
                    }
                    const double compensated =
                        std::abs(y) <= 1.0 ? compensated_exp(Complex(p * y, 0.0)).real()
                                           : std::exp(p * y) - 1.0;
                    return Complex(compensated * dens, 0.0);
                };
                Complex acc(0.0, 0.0);
                double hi = 1.0;
                for (int k = 0; k < 60; ++k) {
                    const double lo = hi * 0.5;
                    acc += integrate_gl(inner, lo, hi, 32);
                    acc += integrate_gl(inner, -hi, -lo, 32);
                    hi = lo;
                }
                acc += integrate_panels(inner, 1.0, 60.0, {}, 30, 32);
                acc += integrate_panels(inner, -60.0, -1.0, {}, 30, 32);
                return acc;
            }();
            const double psiQuad =
                -0.5 * m.sigma * m.sigma * p * p - m.gamma * p - quadJump.real();
            const double viaQuad = std::exp(-1.0 * psiQuad);
            CHECK(exp_moment(m, p, 1.0) ==
                  doctest::Approx(viaQuad).epsilon(1e-9));
        }
    }

    // Generic bound part: direct arithmetic on the printed formula.
    CHECK(exp_moment_bound(0.04, 2.0, 1.0) ==
          doctest::Approx(std::exp(0.4 + 0.16 * std::exp(2.0))).epsilon(1e-14));

    CHECK_THROWS_AS(exp_moment(kou_fixture(), 8.0, 1.0), MomentDiverges);
    CHECK_THROWS_AS(exp_moment(cgmy_fixture(), 6.0, 1.0), MomentDiverges);
}

TEST_CASE("sector checks") {
    const auto bs = LevyModel1D::black_scholes(0.2, -0.02);
    std::vector<double> grid;
    for (double xi = 0.5; xi <= 100.0; xi *= 1.3) {
        grid.push_back(xi);
        grid.push_back(-xi);
    }

    SymbolSector exact{1.0, std::nullopt, 0.02, 0.03, 0.1};
    const auto rep = check_sector(bs, exact, grid);
    CHECK(rep.holds);
    CHECK(std::abs(rep.worstLowerMargin) < 1e-9);  // Re psi = 0.02 xi^2 exactly

    SymbolSector trivial{1.0, std::nullopt, 0.0, 1.0, 10.0};
    CHECK(check_sector(merton_fixture(), trivial, grid).worstLowerMargin >= 0.0);

    // Pure-jump Merton has a bounded real part, so any C1 > 0 fails by xi=100.
    const auto pureJump = LevyModel1D::merton(0.0, 0.0, {1.5, 0.0, 0.3});
    SymbolSector tooStrong{1.0, std::nullopt, 0.01, 10.0, 10.0};
    CHECK_FALSE(check_sector(pureJump, tooStrong, grid).holds);
}

TEST_CASE("triplet bounds") {
    const auto bs = LevyModel1D::black_scholes(0.2, -0.02);
    const auto d3 = LevyModelD::independent_copies(bs, 3);
    const auto rep = triplet_bounds(d3, 2.0);
    CHECK(rep.B == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(rep.maxExpTail == 0.0);
    CHECK(rep.maxSmallSq == 0.0);

    LevyModelD zero;
    zero.d = 2;
    zero.A = Eigen::MatrixXd::Zero(2, 2);
    zero.gamma = Eigen::VectorXd::Zero(2);
    zero.idioJumps = {std::monostate{}, std::monostate{}};
    CHECK(triplet_bounds(zero, 2.0).B == 0.0);

    // Common-factor Merton: marginal tail integral checked against 1d
    // quadrature of the loaded jump density.
    LevyModelD cf = LevyModelD::independent_copies(LevyModel1D::black_scholes(0.1, 0.0), 2);
    CommonJump cj;
    cj.lambdaC = 0.7;
    cj.beta = Eigen::VectorXd(2);
    cj.beta << 1.0, 0.5;
    cj.muC = -0.05;
    cj.sigmaC = 0.3;
    cf.commonJump = cj;
    cf.validate();
    const double p = 2.0;
    const auto repCf = triplet_bounds(cf, p);
    // coordinate 0 dominates the tail: lambdaC E[e^{p beta_0 J} 1_{|J| > 1/||beta||}]
    const double radius = 1.0 / cj.beta.norm();
    auto tailIntegrand = [&](double j) {
        const double z = (j - cj.muC) / cj.sigmaC;
        const double dens = std::exp(-0.5 * z * z) / (cj.sigmaC * 2.5066282746310002);
        return std::exp(p * cj.beta[0] * j) * dens;
    };
    const double quadTail =
        cj.lambdaC * (integrate_panels(tailIntegrand, radius, 12.0, {}, 64, 32) +
                      integrate_panels(tailIntegrand, -12.0, -radius, {}, 64, 32));
    CHECK(repCf.maxExpTail == doctest::Approx(quadTail).epsilon(1e-9));
}

TEST_CASE("sampling: deterministic drift, martingale mean, jump counts, ECF") {
    // Pure drift.
    LevyModelD drift;
    drift.d = 2;
    drift.A = Eigen::MatrixXd::Zero(2, 2);
    drift.gamma = Eigen::VectorXd(2);
    drift.gamma << 0.1, -0.1;
    drift.idioJumps = {std::monostate{}, std::monostate{}};
    RngStream rng(7);
    for (int i = 0; i < 3; ++i) {
        const auto x = sample_increment(drift, 2.0, rng);
        CHECK(x[0] == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(x[1] == doctest::Approx(-0.2).epsilon(1e-15));
    }

    // Martingale mean of e^{X_T} over 10^6 draws within 4 standard errors.
    {
        const auto m = with_martingale_drift(LevyModel1D::black_scholes(0.2, 0.0));
        const auto md = LevyModelD::from_1d(m);
        RngStream stream(11);
        const long N = 1000000;
        double sum = 0.0, sq = 0.0;
        for (long i = 0; i < N; ++i) {
            const double g = std::exp(sample_increment(md, 1.0, stream)[0]);
            sum += g;
            sq += g * g;
        }
        const double mean = sum / N;
        const double se = std::sqrt((sq / N - mean * mean) / N);
        CHECK(std::abs(mean - 1.0) < 4.0 * se);
    }

    // Merton jump counts are Poisson(lambda T): chi-square at the 1% level.
    {
        const auto m = LevyModel1D::merton(0.1, 0.0, {2.0, 0.0, 0.1});
        const auto md = LevyModelD::from_1d(m);
        RngStream stream(13);
        const long N = 100000;
        const double lt = 2.0 * 0.5;
        std::vector<long> hist(9, 0);  // bins 0..7 and >= 8
        JumpCounts counts;
        for (long i = 0; i < N; ++i) {
            sample_increment(md, 0.5, stream, &counts);
            hist[static_cast<std::size_t>(std::min<long>(counts.idio[0], 8))]++;
        }
        double chi2 = 0.0, pmf = std::exp(-lt), cum = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double expect = N * pmf;
            cum += pmf;
            chi2 += (hist[static_cast<std::size_t>(k)] - expect) *
                    (hist[static_cast<std::size_t>(k)] - expect) / expect;
            pmf *= lt / (k + 1);
        }
        const double expectTail = N * (1.0 - cum);
        chi2 += (hist[8] - expectTail) * (hist[8] - expectTail) / expectTail;
        CHECK(chi2 < 20.09);  // chi-square 99% quantile, 8 degrees of freedom
    }

    // Empirical characteristic function vs exp(-T psi) at 20 points, 1e5 draws.
    {
        const auto m = with_martingale_drift(merton_fixture());
        const auto md = LevyModelD::from_1d(m);
        RngStream stream(17);
        const long N = 100000;
        std::vector<double> xs(static_cast<std::size_t>(N));
        for (long i = 0; i < N; ++i) xs[static_cast<std::size_t>(i)] =
            sample_increment(md, 1.0, stream)[0];
        for (int g = 1; g <= 20; ++g) {
            const double xi = -5.0 + 10.0 * g / 21.0;
            Complex acc(0, 0);
            double varRe = 0.0, varIm = 0.0;
            for (long i = 0; i < N; ++i) {
                const Complex e = std::exp(Complex(0.0, xi * xs[static_cast<std::size_t>(i)]));
                acc += e;
                varRe += e.real() * e.real();
                varIm += e.imag() * e.imag();
            }
            const Complex mean = acc / static_cast<double>(N);
            const Complex target = std::exp(-symbol(m, xi));
            const double seRe =
                std::sqrt(std::max(1e-30, varRe / N - mean.real() * mean.real()) / N);
            const double seIm =
                std::sqrt(std::max(1e-30, varIm / N - mean.imag() * mean.imag()) / N);
            CHECK(std::abs(mean.real() - target.real()) < 4.0 * seRe + 1e-12);
            CHECK(std::abs(mean.imag() - target.imag()) < 4.0 * seIm + 1e-12);
        }
    }

    RngStream r2(3);
    CHECK_THROWS_AS(sample_increment(LevyModelD::from_1d(cgmy_fixture()), 1.0, r2),
                    NotSimulable);
}

TEST_CASE("symbol invariants: conjugate symmetry, nonnegative real part") {
    RngStream rng(23);
    for (const auto& m : {LevyModel1D::black_scholes(0.2, -0.02), merton_fixture(),
                          kou_fixture(), cgmy_fixture()}) {
        for (int i = 0; i < 50; ++i) {
            const double xi = 40.0 * (rng.uniform() - 0.5);
            const Complex a = symbol(m, xi), b = symbol(m, -xi);
            CHECK(std::abs(a - std::conj(b)) <= 1e-12 * (1.0 + std::abs(a)));
            CHECK(a.real() >= -1e-12);
        }
    }

    // Multivariate with common jumps.
    LevyModelD cf = LevyModelD::independent_copies(merton_fixture(), 3);
    CommonJump cj;
    cj.lambdaC = 0.4;
    cj.beta = Eigen::VectorXd(3);
    cj.beta << 0.8, 1.1, -0.5;
    cj.muC = 0.02;
    cj.sigmaC = 0.25;
    cf.commonJump = cj;
    cf.validate();
    for (int i = 0; i < 40; ++i) {
        Eigen::VectorXd xi(3);
        for (int j = 0; j < 3; ++j) xi[j] = 30.0 * (rng.uniform() - 0.5);
        const Complex a = symbol(cf, xi), b = symbol(cf, -xi);
        CHECK(std::abs(a - std::conj(b)) <= 1e-12 * (1.0 + std::abs(a)));
        CHECK(a.real() >= -1e-12);
    }
}

TEST_CASE("model validation rejects bad parameters") {
    CHECK_THROWS_AS(LevyModel1D::kou(0.1, 0.0, {1.0, 0.5, 0.9, 5.0}), Error);
    CHECK_THROWS_AS(LevyModel1D::tempered_stable(0.0, 0.0, {1.0, 2.0, 0.8, 0.5}), Error);
    CHECK_THROWS_AS(LevyModel1D::black_scholes(-0.1, 0.0), Error);

    LevyModelD bad;
    bad.d = 2;
    bad.A = Eigen::MatrixXd::Zero(2, 2);
    bad.A(0, 1) = 0.5;  // asymmetric
    bad.gamma = Eigen::VectorXd::Zero(2);
    bad.idioJumps = {std::monostate{}, std::monostate{}};
    CHECK_THROWS_AS(bad.validate(), Error);
}
