#include "levynet/levy_models.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace levynet {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }
double norm_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

// int_lo^hi y dN(mu, sig^2)(y)
double trunc_normal_mean(double mu, double sig, double lo, double hi) {
    const double a = (lo - mu) / sig, b = (hi - mu) / sig;
    return mu * (norm_cdf(b) - norm_cdf(a)) - sig * (norm_pdf(b) - norm_pdf(a));
}

// int_lo^hi y^2 dN(mu, sig^2)(y)
double trunc_normal_sq(double mu, double sig, double lo, double hi) {
    const double a = (lo - mu) / sig, b = (hi - mu) / sig;
    const double dPhi = norm_cdf(b) - norm_cdf(a);
    return mu * mu * dPhi + 2.0 * mu * sig * (norm_pdf(a) - norm_pdf(b)) +
           sig * sig * (dPhi + a * norm_pdf(a) - b * norm_pdf(b));
}

// E[e^{c J} 1_{|J| > r}] for J ~ N(mu, sig^2)
double normal_exp_tail(double c, double mu, double sig, double r) {
    const double shift = mu + c * sig * sig;
    const double scale = std::exp(c * mu + 0.5 * c * c * sig * sig);
    return scale * (norm_cdf((shift - r) / sig) + norm_cdf((-r - shift) / sig));
}

// Upper incomplete gamma for a in (-2, 2], x > 0, via downward recurrence
// Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a.
double upper_inc_gamma(double a, double x) {
    if (a > 0.0) return boost::math::tgamma(a, x);
    if (a == 0.0) return boost::math::expint(1, x);
    return (upper_inc_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

// ---- per-law quantities ---------------------------------------------------

struct LawTraits {
    // int (e^{i xi y} - 1 - i xi y 1_{|y|<=1}) nu(dy)
    Complex symbol_term(double xi) const;
    // same integral at xi = -i p (real branch); throws MomentDiverges
    double symbol_term_ip(double p) const;
    // int_{|y|>1} e^{p y} nu(dy)
    double exp_tail(double p) const;
    // int_{|y|<=1} y^2 nu(dy)
    double small_sq() const;
    // int_{|y|>1} y nu(dy)
    double tail_mean() const;
    double moment2() const;  // int y^2 nu(dy)
    double moment4() const;  // int y^4 nu(dy)
    double max_order() const;

    const JumpLaw& law;
};

Complex merton_cf(const MertonJumps& j, double xi) {
    return std::exp(Complex(-0.5 * j.sigmaJ * j.sigmaJ * xi * xi, j.muJ * xi));
}

Complex kou_cf(const KouJumps& j, double xi) {
    const Complex iXi(0.0, xi);
    return j.pUp * j.etaPlus / (j.etaPlus - iXi) +
           (1.0 - j.pUp) * j.etaMinus / (j.etaMinus + iXi);
}

double kou_trunc_mean(const KouJumps& j) {
    auto one_side = [](double eta) {
        return (1.0 - std::exp(-eta) * (1.0 + eta)) / eta;
    };
    return j.pUp * one_side(j.etaPlus) - (1.0 - j.pUp) * one_side(j.etaMinus);
}

// Fully compensated CGMY integral int (e^{i xi y} - 1 - i xi y) nu(dy),
// valid for Y in (0,2) \ {1}; accepts complex xi for the -ip branch.
Complex cgmy_compensated(const TemperedStableJumps& j, Complex iXi) {
    const double gY = std::tgamma(-j.Y);
    const Complex mPart = std::pow(j.M - iXi, j.Y) - std::pow(j.M, j.Y) +
                          iXi * j.Y * std::pow(j.M, j.Y - 1.0);
    const Complex gPart = std::pow(j.G + iXi, j.Y) - std::pow(j.G, j.Y) -
                          iXi * j.Y * std::pow(j.G, j.Y - 1.0);
    return j.C * gY * (mPart + gPart);
}

double cgmy_tail_mean(const TemperedStableJumps& j) {
    return j.C * (std::pow(j.M, j.Y - 1.0) * upper_inc_gamma(1.0 - j.Y, j.M) -
                  std::pow(j.G, j.Y - 1.0) * upper_inc_gamma(1.0 - j.Y, j.G));
}

Complex LawTraits::symbol_term(double xi) const {
    const Complex iXi(0.0, xi);
    if (std::holds_alternative<std::monostate>(law)) return {0.0, 0.0};
    if (const auto* m = std::get_if<MertonJumps>(&law)) {
        const double m1 = trunc_normal_mean(m->muJ, m->sigmaJ, -1.0, 1.0);
        return m->lambda * (merton_cf(*m, xi) - 1.0) - iXi * (m->lambda * m1);
    }
    if (const auto* k = std::get_if<KouJumps>(&law)) {
        return k->lambda * (kou_cf(*k, xi) - 1.0) - iXi * (k->lambda * kou_trunc_mean(*k));
    }
    const auto& ts = std::get<TemperedStableJumps>(law);
    return cgmy_compensated(ts, iXi) + iXi * cgmy_tail_mean(ts);
}

double LawTraits::max_order() const {
    if (const auto* k = std::get_if<KouJumps>(&law)) return k->etaPlus;
    if (const auto* ts = std::get_if<TemperedStableJumps>(&law)) return ts->M;
    return std::numeric_limits<double>::infinity();
}

double LawTraits::symbol_term_ip(double p) const {
    if (std::holds_alternative<std::monostate>(law)) return 0.0;
    if (p >= max_order())
        throw MomentDiverges("exponential moment of order " + format_double(p) +
                             " diverges (bound " + format_double(max_order()) + ")");
    if (const auto* m = std::get_if<MertonJumps>(&law)) {
        const double mgf = std::exp(p * m->muJ + 0.5 * p * p * m->sigmaJ * m->sigmaJ);
        const double m1 = trunc_normal_mean(m->muJ, m->sigmaJ, -1.0, 1.0);
        return m->lambda * (mgf - 1.0) - p * m->lambda * m1;
    }
    if (const auto* k = std::get_if<KouJumps>(&law)) {
        if (p <= -k->etaMinus) throw MomentDiverges("order below -etaMinus");
        const double mgf = k->pUp * k->etaPlus / (k->etaPlus - p) +
                           (1.0 - k->pUp) * k->etaMinus / (k->etaMinus + p);
        return k->lambda * (mgf - 1.0) - p * k->lambda * kou_trunc_mean(*k);
    }
    const auto& ts = std::get<TemperedStableJumps>(law);
    if (p <= -ts.G) throw MomentDiverges("order below -G");
    return cgmy_compensated(ts, Complex(p, 0.0)).real() + p * cgmy_tail_mean(ts);
}

double LawTraits::exp_tail(double p) const {
    if (std::holds_alternative<std::monostate>(law)) return 0.0;
    if (p >= max_order())
        throw MomentDiverges("exp tail of order " + format_double(p) + " diverges");
    if (const auto* m = std::get_if<MertonJumps>(&law))
        return m->lambda * normal_exp_tail(p, m->muJ, m->sigmaJ, 1.0);
    if (const auto* k = std::get_if<KouJumps>(&law)) {
        const double up = k->etaPlus * std::exp(-(k->etaPlus - p)) / (k->etaPlus - p);
        const double dn = k->etaMinus * std::exp(-(k->etaMinus + p)) / (k->etaMinus + p);
        return k->lambda * (k->pUp * up + (1.0 - k->pUp) * dn);
    }
    const auto& ts = std::get<TemperedStableJumps>(law);
    return ts.C * (std::pow(ts.M - p, ts.Y) * upper_inc_gamma(-ts.Y, ts.M - p) +
                   std::pow(ts.G + p, ts.Y) * upper_inc_gamma(-ts.Y, ts.G + p));
}

double LawTraits::small_sq() const {
    if (std::holds_alternative<std::monostate>(law)) return 0.0;
    if (const auto* m = std::get_if<MertonJumps>(&law))
        return m->lambda * trunc_normal_sq(m->muJ, m->sigmaJ, -1.0, 1.0);
    if (const auto* k = std::get_if<KouJumps>(&law)) {
        auto one_side = [](double eta) {
            return (2.0 - std::exp(-eta) * (eta * eta + 2.0 * eta + 2.0)) / (eta * eta);
        };
        return k->lambda * (k->pUp * one_side(k->etaPlus) +
                            (1.0 - k->pUp) * one_side(k->etaMinus));
    }
    const auto& ts = std::get<TemperedStableJumps>(law);
    return ts.C *
           (boost::math::tgamma_lower(2.0 - ts.Y, ts.M) * std::pow(ts.M, ts.Y - 2.0) +
            boost::math::tgamma_lower(2.0 - ts.Y, ts.G) * std::pow(ts.G, ts.Y - 2.0));
}

double LawTraits::tail_mean() const {
    if (std::holds_alternative<std::monostate>(law)) return 0.0;
    if (const auto* m = std::get_if<MertonJumps>(&law))
        return m->lambda * (m->muJ - trunc_normal_mean(m->muJ, m->sigmaJ, -1.0, 1.0));
    if (const auto* k = std::get_if<KouJumps>(&law)) {
        auto one_side = [](double eta) { return std::exp(-eta) * (1.0 + eta) / eta; };
        return k->lambda * (k->pUp * one_side(k->etaPlus) -
                            (1.0 - k->pUp) * one_side(k->etaMinus));
    }
    return cgmy_tail_mean(std::get<TemperedStableJumps>(law));
}

double LawTraits::moment2() const {
    if (std::holds_alternative<std::monostate>(law)) return 0.0;
    if (const auto* m = std::get_if<MertonJumps>(&law))
        return m->lambda * (m->muJ * m->muJ + m->sigmaJ * m->sigmaJ);
    if (const auto* k = std::get_if<KouJumps>(&law))
        return k->lambda * 2.0 * (k->pUp / (k->etaPlus * k->etaPlus) +
                                  (1.0 - k->pUp) / (k->etaMinus * k->etaMinus));
    const auto& ts = std::get<TemperedStableJumps>(law);
    return ts.C * std::tgamma(2.0 - ts.Y) *
           (std::pow(ts.M, ts.Y - 2.0) + std::pow(ts.G, ts.Y - 2.0));
}

double LawTraits::moment4() const {
    if (std::holds_alternative<std::monostate>(law)) return 0.0;
    if (const auto* m = std::get_if<MertonJumps>(&law)) {
        const double mu2 = m->muJ * m->muJ, s2 = m->sigmaJ * m->sigmaJ;
        return m->lambda * (mu2 * mu2 + 6.0 * mu2 * s2 + 3.0 * s2 * s2);
    }
    if (const auto* k = std::get_if<KouJumps>(&law))
        return k->lambda * 24.0 * (k->pUp / std::pow(k->etaPlus, 4.0) +
                                   (1.0 - k->pUp) / std::pow(k->etaMinus, 4.0));
    const auto& ts = std::get<TemperedStableJumps>(law);
    return ts.C * std::tgamma(4.0 - ts.Y) *
           (std::pow(ts.M, ts.Y - 4.0) + std::pow(ts.G, ts.Y - 4.0));
}

// Common-factor pieces. Truncation ||y|| <= 1 with y = beta J means |J| <= 1/||beta||.
struct CommonTraits {
    const CommonJump& c;
    double radius() const { return 1.0 / c.beta.norm(); }
    double trunc_mean() const { return trunc_normal_mean(c.muC, c.sigmaC, -radius(), radius()); }

    Complex symbol_term(const Eigen::VectorXd& xi) const {
        const double proj = c.beta.dot(xi);
        const Complex cf =
            std::exp(Complex(-0.5 * c.sigmaC * c.sigmaC * proj * proj, c.muC * proj));
        return c.lambdaC * (cf - 1.0) - Complex(0.0, proj) * (c.lambdaC * trunc_mean());
    }
    // int (e^{p y_i} - 1 - p y_i 1) nu_C(dy)
    double symbol_term_ip(int i, double p) const {
        const double load = p * c.beta[i];
        const double mgf = std::exp(load * c.muC + 0.5 * load * load * c.sigmaC * c.sigmaC);
        return c.lambdaC * (mgf - 1.0) - load * c.lambdaC * trunc_mean();
    }
    double exp_tail(int i, double p) const {
        return c.lambdaC * normal_exp_tail(p * c.beta[i], c.muC, c.sigmaC, radius());
    }
    double small_sq(int i) const {
        return c.lambdaC * c.beta[i] * c.beta[i] *
               trunc_normal_sq(c.muC, c.sigmaC, -radius(), radius());
    }
};

}  // namespace

// ---- validation -----------------------------------------------------------

Variant LevyModel1D::variant() const {
    if (std::holds_alternative<MertonJumps>(jumps)) return Variant::Merton;
    if (std::holds_alternative<KouJumps>(jumps)) return Variant::Kou;
    if (std::holds_alternative<TemperedStableJumps>(jumps)) return Variant::TemperedStable;
    return Variant::BlackScholes;
}

bool LevyModel1D::simulable() const {
    return !std::holds_alternative<TemperedStableJumps>(jumps);
}

void LevyModel1D::validate() const {
    if (sigma < 0.0) throw Error("sigma must be >= 0");
    if (const auto* m = std::get_if<MertonJumps>(&jumps)) {
        if (m->lambda < 0.0) throw Error("Merton lambda must be >= 0");
        if (m->sigmaJ <= 0.0) throw Error("Merton sigmaJ must be > 0");
    } else if (const auto* k = std::get_if<KouJumps>(&jumps)) {
        if (k->lambda < 0.0) throw Error("Kou lambda must be >= 0");
        if (k->pUp < 0.0 || k->pUp > 1.0) throw Error("Kou pUp must lie in [0,1]");
        if (k->etaPlus <= 1.0) throw Error("Kou etaPlus must be > 1");
        if (k->etaMinus <= 0.0) throw Error("Kou etaMinus must be > 0");
    } else if (const auto* ts = std::get_if<TemperedStableJumps>(&jumps)) {
        if (ts->C <= 0.0 || ts->G <= 0.0) throw Error("TemperedStable C, G must be > 0");
        if (ts->M <= 1.0) throw Error("TemperedStable M must be > 1");
        if (ts->Y <= 0.0 || ts->Y >= 2.0 || ts->Y == 1.0)
            throw Error("TemperedStable Y must lie in (0,2) with Y != 1");
    }
}

LevyModel1D LevyModel1D::black_scholes(double sigma, double gamma) {
    LevyModel1D m{sigma, gamma, std::monostate{}};
    m.validate();
    return m;
}
LevyModel1D LevyModel1D::merton(double sigma, double gamma, MertonJumps j) {
    LevyModel1D m{sigma, gamma, j};
    m.validate();
    return m;
}
LevyModel1D LevyModel1D::kou(double sigma, double gamma, KouJumps j) {
    LevyModel1D m{sigma, gamma, j};
    m.validate();
    return m;
}
LevyModel1D LevyModel1D::tempered_stable(double sigma, double gamma, TemperedStableJumps j) {
    LevyModel1D m{sigma, gamma, j};
    m.validate();
    return m;
}

bool LevyModelD::simulable() const {
    for (const auto& j : idioJumps)
        if (std::holds_alternative<TemperedStableJumps>(j)) return false;
    return true;
}

void LevyModelD::validate() const {
    if (d < 1) throw Error("dimension must be >= 1");
    if (A.rows() != d || A.cols() != d) throw Error("A must be d x d");
    if (gamma.size() != d) throw Error("gamma must have length d");
    if (static_cast<int>(idioJumps.size()) != d)
        throw Error("idioJumps must have one entry per component");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw Error("A must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw Error("A must be nonnegative definite");
    for (const auto& j : idioJumps) {
        LevyModel1D probe{0.0, 0.0, j};
        probe.validate();
    }
    if (commonJump) {
        if (commonJump->beta.size() != d) throw Error("common jump beta must have length d");
        if (commonJump->lambdaC < 0.0) throw Error("lambdaC must be >= 0");
        if (commonJump->sigmaC <= 0.0) throw Error("sigmaC must be > 0");
        if (commonJump->beta.norm() == 0.0) throw Error("common jump beta must be nonzero");
    }
}

LevyModelD LevyModelD::from_1d(const LevyModel1D& m) {
    LevyModelD out;
    out.d = 1;
    out.A = Eigen::MatrixXd::Constant(1, 1, m.sigma * m.sigma);
    out.gamma = Eigen::VectorXd::Constant(1, m.gamma);
    out.idioJumps = {m.jumps};
    out.validate();
    return out;
}

LevyModelD LevyModelD::independent_copies(const LevyModel1D& m, int d) {
    LevyModelD out;
    out.d = d;
    out.A = Eigen::MatrixXd::Identity(d, d) * (m.sigma * m.sigma);
    out.gamma = Eigen::VectorXd::Constant(d, m.gamma);
    out.idioJumps.assign(static_cast<std::size_t>(d), m.jumps);
    out.validate();
    return out;
}

void SymbolSector::validate() const {
    if (rho <= 0.0 || rho > 1.0) throw Error("sector rho must lie in (0,1]");
    if (C1 > C2) throw Error("sector requires C1 <= C2");
    if (rhoVec)
        for (double r : *rhoVec)
            if (r <= 0.5 || r > 1.0) throw RhoTooSmall("sector rho_j must lie in (1/2,1]");
}

// ---- symbols ----------------------------------------------------------------

Complex symbol(const LevyModel1D& model, double xi) {
    const Complex diffusion(0.5 * model.sigma * model.sigma * xi * xi, -model.gamma * xi);
    return diffusion - LawTraits{model.jumps}.symbol_term(xi);
}

Complex symbol(const LevyModelD& model, const Eigen::VectorXd& xi) {
    if (xi.size() != model.d) throw DimensionMismatch("xi has wrong length");
    Complex acc(0.5 * xi.dot(model.A * xi), -model.gamma.dot(xi));
    for (int i = 0; i < model.d; ++i)
        acc -= LawTraits{model.idioJumps[static_cast<std::size_t>(i)]}.symbol_term(xi[i]);
    if (model.commonJump) acc -= CommonTraits{*model.commonJump}.symbol_term(xi);
    return acc;
}

double symbol_at_minus_ip(const LevyModel1D& model, double p) {
    return -0.5 * model.sigma * model.sigma * p * p - model.gamma * p -
           LawTraits{model.jumps}.symbol_term_ip(p);
}

double symbol_at_minus_ip(const LevyModelD& model, int i, double p) {
    double v = -0.5 * model.A(i, i) * p * p - model.gamma[i] * p -
               LawTraits{model.idioJumps[static_cast<std::size_t>(i)]}.symbol_term_ip(p);
    if (model.commonJump) v -= CommonTraits{*model.commonJump}.symbol_term_ip(i, p);
    return v;
}

// ---- martingale drifts and moments -----------------------------------------

double martingale_drift(const LevyModel1D& model) {
    return -0.5 * model.sigma * model.sigma - LawTraits{model.jumps}.symbol_term_ip(1.0);
}

Eigen::VectorXd martingale_drift(const LevyModelD& model) {
    Eigen::VectorXd out(model.d);
    for (int i = 0; i < model.d; ++i) {
        double v = -0.5 * model.A(i, i) -
                   LawTraits{model.idioJumps[static_cast<std::size_t>(i)]}.symbol_term_ip(1.0);
        if (model.commonJump) v -= CommonTraits{*model.commonJump}.symbol_term_ip(i, 1.0);
        out[i] = v;
    }
    return out;
}

LevyModel1D with_martingale_drift(LevyModel1D model) {
    model.gamma = martingale_drift(model);
    return model;
}

LevyModelD with_martingale_drift(LevyModelD model) {
    model.gamma = martingale_drift(model);
    return model;
}

double exp_moment(const LevyModel1D& model, double p, double T) {
    return std::exp(-T * symbol_at_minus_ip(model, p));
}

Eigen::VectorXd exp_moment(const LevyModelD& model, double p, double T) {
    Eigen::VectorXd out(model.d);
    for (int i = 0; i < model.d; ++i)
        out[i] = std::exp(-T * symbol_at_minus_ip(model, i, p));
    return out;
}

double exp_moment_bound(double B, double p, double T) {
    return std::exp(T * (2.5 * p * p * B + p * p * std::exp(p) * B));
}

// ---- sector checks ----------------------------------------------------------

namespace {

SectorReport sector_from_samples(const std::vector<double>& reVals,
                                 const std::vector<double>& absVals,
                                 const std::vector<double>& lowerRefs,
                                 const std::vector<double>& upperRefs) {
    SectorReport rep;
    rep.worstLowerMargin = std::numeric_limits<double>::infinity();
    rep.worstUpperMargin = std::numeric_limits<double>::infinity();
    rep.worstRatio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < reVals.size(); ++i) {
        rep.worstLowerMargin = std::min(rep.worstLowerMargin, reVals[i] - lowerRefs[i]);
        rep.worstUpperMargin = std::min(rep.worstUpperMargin, upperRefs[i] - absVals[i]);
        if (lowerRefs[i] > 0.0)
            rep.worstRatio = std::min(rep.worstRatio, reVals[i] / lowerRefs[i]);
    }
    const double tol = 1e-12;
    rep.holds = rep.worstLowerMargin >= -tol && rep.worstUpperMargin >= -tol;
    return rep;
}

}  // namespace

SectorReport check_sector(const LevyModel1D& model, const SymbolSector& sector,
                          const std::vector<double>& xiGrid) {
    sector.validate();
    if (xiGrid.empty()) throw Error("sector grid must be nonempty");
    std::vector<double> re, mag, lo, up;
    for (double xi : xiGrid) {
        const Complex s = symbol(model, xi);
        const double pw = std::pow(std::abs(xi), 2.0 * sector.rho);
        re.push_back(s.real());
        mag.push_back(std::abs(s));
        lo.push_back(sector.C1 * pw);
        up.push_back(sector.C2 * pw + sector.C3);
    }
    return sector_from_samples(re, mag, lo, up);
}

SectorReport check_sector(const LevyModelD& model, const SymbolSector& sector,
                          const std::vector<Eigen::VectorXd>& xiGrid) {
    sector.validate();
    if (xiGrid.empty()) throw Error("sector grid must be nonempty");
    std::vector<double> re, mag, lo, up;
    for (const auto& xi : xiGrid) {
        const Complex s = symbol(model, xi);
        double lower;
        if (sector.rhoVec) {
            lower = 0.0;
            for (int j = 0; j < model.d; ++j)
                lower += std::pow(std::abs(xi[j]),
                                  2.0 * (*sector.rhoVec)[static_cast<std::size_t>(j)]);
            lower *= sector.C1;
        } else {
            lower = sector.C1 * std::pow(xi.norm(), 2.0 * sector.rho);
        }
        re.push_back(s.real());
        mag.push_back(std::abs(s));
        lo.push_back(lower);
        up.push_back(sector.C2 * std::pow(xi.norm(), 2.0 * sector.rho) + sector.C3);
    }
    return sector_from_samples(re, mag, lo, up);
}

// ---- triplet bounds ----------------------------------------------------------

TripletBoundReport triplet_bounds(const LevyModelD& model, double p) {
    TripletBoundReport rep;
    rep.maxA = model.A.cwiseAbs().maxCoeff();
    rep.maxGamma = model.gamma.cwiseAbs().maxCoeff();
    for (int i = 0; i < model.d; ++i) {
        LawTraits t{model.idioJumps[static_cast<std::size_t>(i)]};
        double tail = t.exp_tail(p);
        double sq = t.small_sq();
        if (model.commonJump) {
            CommonTraits c{*model.commonJump};
            tail += c.exp_tail(i, p);
            sq += c.small_sq(i);
        }
        rep.maxExpTail = std::max(rep.maxExpTail, tail);
        rep.maxSmallSq = std::max(rep.maxSmallSq, sq);
    }
    rep.B = std::max({rep.maxA, rep.maxGamma, rep.maxExpTail, rep.maxSmallSq});
    return rep;
}

// ---- simulation ---------------------------------------------------------------

IncrementSampler::IncrementSampler(const LevyModelD& model, double T)
    : model_(model), T_(T) {
    if (!model.simulable())
        throw NotSimulable("tempered stable components have no exact sampler");
    const int d = model.d;

    // Drift: gamma minus the small-jump compensator (Levy-Ito decomposition).
    driftTerm_.resize(d);
    for (int i = 0; i < d; ++i) {
        double m1 = 0.0;
        const auto& law = model.idioJumps[static_cast<std::size_t>(i)];
        if (const auto* m = std::get_if<MertonJumps>(&law))
            m1 += m->lambda * trunc_normal_mean(m->muJ, m->sigmaJ, -1.0, 1.0);
        else if (const auto* k = std::get_if<KouJumps>(&law))
            m1 += k->lambda * kou_trunc_mean(*k);
        if (model.commonJump) {
            CommonTraits c{*model.commonJump};
            m1 += model.commonJump->lambdaC * model.commonJump->beta[i] * c.trunc_mean();
        }
        driftTerm_[i] = (model.gamma[i] - m1) * T;
    }

    // Cholesky of T*A with a diagonal jitter retry for semidefinite A.
    if (model.A.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::MatrixXd scaled = T * model.A;
        Eigen::LLT<Eigen::MatrixXd> llt(scaled);
        if (llt.info() != Eigen::Success) {
            scaled.diagonal().array() += 1e-12 * std::max(1.0, scaled.diagonal().maxCoeff());
            llt.compute(scaled);
            if (llt.info() != Eigen::Success)
                throw Error("Cholesky factorization of T*A failed");
        }
        diffusionL_ = llt.matrixL();
    }
}

Eigen::VectorXd IncrementSampler::operator()(RngStream& rng, JumpCounts* counts) const {
    const int d = model_.d;
    Eigen::VectorXd x = driftTerm_;

    if (diffusionL_.size() > 0) {
        Eigen::VectorXd z(d);
        for (int i = 0; i < d; ++i) z[i] = rng.normal();
        x.noalias() += diffusionL_ * z;
    }

    if (counts) {
        counts->idio.assign(static_cast<std::size_t>(d), 0);
        counts->common = 0;
    }

    // Idiosyncratic compound-Poisson jumps.
    for (int i = 0; i < d; ++i) {
        const auto& law = model_.idioJumps[static_cast<std::size_t>(i)];
        if (const auto* m = std::get_if<MertonJumps>(&law)) {
            const long n = rng.poisson(m->lambda * T_);
            if (counts) counts->idio[static_cast<std::size_t>(i)] = n;
            for (long j = 0; j < n; ++j) x[i] += m->muJ + m->sigmaJ * rng.normal();
        } else if (const auto* k = std::get_if<KouJumps>(&law)) {
            const long n = rng.poisson(k->lambda * T_);
            if (counts) counts->idio[static_cast<std::size_t>(i)] = n;
            for (long j = 0; j < n; ++j) {
                const double u = rng.uniform();
                const double e = -std::log(1.0 - rng.uniform());
                x[i] += (u < k->pUp) ? e / k->etaPlus : -e / k->etaMinus;
            }
        }
    }

    // Common factor: all components move by beta * J simultaneously.
    if (model_.commonJump) {
        const auto& c = *model_.commonJump;
        const long n = rng.poisson(c.lambdaC * T_);
        if (counts) counts->common = n;
        for (long j = 0; j < n; ++j) {
            const double jump = c.muC + c.sigmaC * rng.normal();
            x += c.beta * jump;
        }
    }
    return x;
}

Eigen::VectorXd sample_increment(const LevyModelD& model, double T, RngStream& rng,
                                 JumpCounts* counts) {
    return IncrementSampler(model, T)(rng, counts);
}

double sample_increment(const LevyModel1D& model, double T, RngStream& rng,
                        JumpCounts* counts) {
    return IncrementSampler(LevyModelD::from_1d(model), T)(rng, counts)[0];
}

// ---- cumulants ------------------------------------------------------------------

Cumulants cumulants(const LevyModel1D& model, double T) {
    LawTraits t{model.jumps};
    Cumulants c;
    c.c1 = T * (model.gamma + t.tail_mean());
    c.c2 = T * (model.sigma * model.sigma + t.moment2());
    c.c4 = T * t.moment4();
    return c;
}

double max_exp_moment_order(const LevyModel1D& model) {
    return LawTraits{model.jumps}.max_order();
}

}  // namespace levynet
