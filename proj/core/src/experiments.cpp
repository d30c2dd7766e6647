#include "levynet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "levynet/barron.hpp"
#include "levynet/chaos_sparse.hpp"
#include "levynet/pricing_oracle.hpp"
#include "levynet/spectral_approx.hpp"

namespace levynet {

using nlohmann::json;

// ---- schema helpers ----------------------------------------------------------

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + " must be a table");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key " + path + "." + it.key());
}

const json& need(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing key " + path + "." + key);
    return *it;
}

double dnum(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number()) throw ConfigError(path + "." + key + " must be a number");
    return v.get<double>();
}

double dnum_or(const json& j, const char* key, double def, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_number()) throw ConfigError(path + "." + key + " must be a number");
    return it->get<double>();
}

long lnum_or(const json& j, const char* key, long def, const std::string& path) {
    return static_cast<long>(dnum_or(j, key, static_cast<double>(def), path));
}

std::vector<double> dvec(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(path + " must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

JumpLaw jumplaw_from_json(const json& j, const std::string& path) {
    if (j.is_null()) return std::monostate{};
    const std::string type = need(j, "type", path).get<std::string>();
    if (type == "merton") {
        check_keys(j, {"type", "lambda", "muJ", "sigmaJ"}, path);
        return MertonJumps{dnum(j, "lambda", path), dnum(j, "muJ", path),
                           dnum(j, "sigmaJ", path)};
    }
    if (type == "kou") {
        check_keys(j, {"type", "lambda", "pUp", "etaPlus", "etaMinus"}, path);
        return KouJumps{dnum(j, "lambda", path), dnum(j, "pUp", path),
                        dnum(j, "etaPlus", path), dnum(j, "etaMinus", path)};
    }
    if (type == "temperedStable") {
        check_keys(j, {"type", "C", "G", "M", "Y"}, path);
        return TemperedStableJumps{dnum(j, "C", path), dnum(j, "G", path),
                                   dnum(j, "M", path), dnum(j, "Y", path)};
    }
    throw ConfigError(path + ".type: unknown jump law '" + type + "'");
}

bool wants_martingale(const json& j) {
    auto it = j.find("gamma");
    if (it == j.end()) return true;
    return it->is_string() && it->get<std::string>() == "martingale";
}

double gamma_or_zero(const json& j, const std::string& path) {
    auto it = j.find("gamma");
    if (it == j.end() || it->is_string()) return 0.0;
    if (!it->is_number()) throw ConfigError(path + ".gamma must be a number");
    return it->get<double>();
}

}  // namespace

LevyModel1D model1d_from_json(const json& j, const std::string& path) {
    const std::string variant = need(j, "variant", path).get<std::string>();
    LevyModel1D m;
    if (variant == "BlackScholes") {
        check_keys(j, {"variant", "sigma", "gamma"}, path);
        m = LevyModel1D::black_scholes(dnum(j, "sigma", path), gamma_or_zero(j, path));
    } else if (variant == "Merton") {
        check_keys(j, {"variant", "sigma", "gamma", "lambda", "muJ", "sigmaJ"}, path);
        m = LevyModel1D::merton(dnum(j, "sigma", path), gamma_or_zero(j, path),
                                {dnum(j, "lambda", path), dnum(j, "muJ", path),
                                 dnum(j, "sigmaJ", path)});
    } else if (variant == "Kou") {
        check_keys(j, {"variant", "sigma", "gamma", "lambda", "pUp", "etaPlus", "etaMinus"},
                   path);
        m = LevyModel1D::kou(dnum(j, "sigma", path), gamma_or_zero(j, path),
                             {dnum(j, "lambda", path), dnum(j, "pUp", path),
                              dnum(j, "etaPlus", path), dnum(j, "etaMinus", path)});
    } else if (variant == "TemperedStable") {
        check_keys(j, {"variant", "sigma", "gamma", "C", "G", "M", "Y"}, path);
        m = LevyModel1D::tempered_stable(dnum(j, "sigma", path), gamma_or_zero(j, path),
                                         {dnum(j, "C", path), dnum(j, "G", path),
                                          dnum(j, "M", path), dnum(j, "Y", path)});
    } else {
        throw ConfigError(path + ".variant: unknown model '" + variant + "'");
    }
    if (wants_martingale(j)) m = with_martingale_drift(m);
    return m;
}

LevyModelD modelD_from_json(const json& j, const std::string& path) {
    const std::string variant = need(j, "variant", path).get<std::string>();
    if (variant == "IndependentCopies") {
        check_keys(j, {"variant", "d", "base"}, path);
        const int d = static_cast<int>(dnum(j, "d", path));
        return LevyModelD::independent_copies(
            model1d_from_json(need(j, "base", path), path + ".base"), d);
    }
    if (variant != "MultiD") return LevyModelD::from_1d(model1d_from_json(j, path));

    check_keys(j, {"variant", "d", "A", "gamma", "idioJumps", "commonJump"}, path);
    LevyModelD m;
    m.d = static_cast<int>(dnum(j, "d", path));
    const json& A = need(j, "A", path);
    if (!A.is_array() || static_cast<int>(A.size()) != m.d)
        throw ConfigError(path + ".A must be a d x d row-major array of arrays");
    m.A.resize(m.d, m.d);
    for (int r = 0; r < m.d; ++r) {
        const auto row = dvec(A.at(static_cast<std::size_t>(r)),
                              path + ".A[" + std::to_string(r) + "]");
        if (static_cast<int>(row.size()) != m.d)
            throw ConfigError(path + ".A row " + std::to_string(r) + " has wrong length");
        for (int c = 0; c < m.d; ++c) m.A(r, c) = row[static_cast<std::size_t>(c)];
    }
    m.gamma = Eigen::VectorXd::Zero(m.d);
    if (j.contains("gamma") && j["gamma"].is_array()) {
        const auto g = dvec(j["gamma"], path + ".gamma");
        if (static_cast<int>(g.size()) != m.d)
            throw ConfigError(path + ".gamma must have length d");
        for (int i = 0; i < m.d; ++i) m.gamma[i] = g[static_cast<std::size_t>(i)];
    }
    m.idioJumps.assign(static_cast<std::size_t>(m.d), std::monostate{});
    if (j.contains("idioJumps")) {
        const json& laws = j["idioJumps"];
        if (!laws.is_array() || static_cast<int>(laws.size()) != m.d)
            throw ConfigError(path + ".idioJumps must have one entry per component");
        for (int i = 0; i < m.d; ++i)
            m.idioJumps[static_cast<std::size_t>(i)] =
                jumplaw_from_json(laws.at(static_cast<std::size_t>(i)),
                                  path + ".idioJumps[" + std::to_string(i) + "]");
    }
    if (j.contains("commonJump") && !j["commonJump"].is_null()) {
        const json& cj = j["commonJump"];
        check_keys(cj, {"lambdaC", "beta", "muC", "sigmaC"}, path + ".commonJump");
        CommonJump c;
        c.lambdaC = dnum(cj, "lambdaC", path + ".commonJump");
        const auto beta = dvec(need(cj, "beta", path + ".commonJump"), path + ".commonJump.beta");
        c.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<long>(beta.size()));
        c.muC = dnum(cj, "muC", path + ".commonJump");
        c.sigmaC = dnum(cj, "sigmaC", path + ".commonJump");
        m.commonJump = c;
    }
    m.validate();
    if (wants_martingale(j)) m = with_martingale_drift(m);
    return m;
}

PayoffSpec payoff_from_json(const json& j, const std::string& path) {
    const std::string kind = need(j, "kind", path).get<std::string>();
    if (kind == "Call") {
        check_keys(j, {"kind", "K"}, path);
        return PayoffSpec::call(dnum(j, "K", path));
    }
    if (kind == "Put") {
        check_keys(j, {"kind", "K"}, path);
        return PayoffSpec::put(dnum(j, "K", path));
    }
    if (kind == "Butterfly") {
        check_keys(j, {"kind", "K1", "K", "K2"}, path);
        return PayoffSpec::butterfly(dnum(j, "K1", path), dnum(j, "K", path),
                                     dnum(j, "K2", path));
    }
    if (kind == "BasketCall" || kind == "SumOfCalls") {
        check_keys(j, {"kind", "K", "weights"}, path);
        std::vector<double> w;
        if (j.contains("weights")) w = dvec(j["weights"], path + ".weights");
        return kind == "BasketCall" ? PayoffSpec::basket_call(w, dnum(j, "K", path))
                                    : PayoffSpec::sum_of_calls(w, dnum(j, "K", path));
    }
    if (kind == "CallOnMax") {
        check_keys(j, {"kind", "K"}, path);
        return PayoffSpec::call_on_max(dnum(j, "K", path));
    }
    if (kind == "Constant") {
        check_keys(j, {"kind", "c"}, path);
        return PayoffSpec::constant_payoff(dnum(j, "c", path));
    }
    throw ConfigError(path + ".kind: unknown payoff '" + kind + "'");
}

SymbolSector sector_from_json(const json& j, const std::string& path) {
    check_keys(j, {"rho", "rhoVec", "C1", "C2", "C3"}, path);
    SymbolSector s;
    s.rho = dnum_or(j, "rho", 1.0, path);
    s.C1 = dnum(j, "C1", path);
    s.C2 = dnum_or(j, "C2", std::max(s.C1, 1.0), path);
    s.C3 = dnum_or(j, "C3", 1.0, path);
    if (j.contains("rhoVec")) s.rhoVec = dvec(j["rhoVec"], path + ".rhoVec");
    s.validate();
    return s;
}

// ---- artifact writers ------------------------------------------------------------

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << content;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
    write_text(path, os.str());
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series, bool logX, bool logY) {
    const double W = 640, H = 440, mL = 60, mR = 20, mT = 40, mB = 40;
    auto tx = [&](double v) { return logX ? std::log10(std::max(v, 1e-300)) : v; };
    auto ty = [&](double v) { return logY ? std::log10(std::max(v, 1e-300)) : v; };
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto px = [&](double v) { return mL + (tx(v) - xmin) / (xmax - xmin) * (W - mL - mR); };
    auto py = [&](double v) { return H - mB - (ty(v) - ymin) / (ymax - ymin) * (H - mT - mB); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";
    os << "<line x1=\"" << mL << "\" y1=\"" << H - mB << "\" x2=\"" << W - mR << "\" y2=\""
       << H - mB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << mL << "\" y1=\"" << mT << "\" x2=\"" << mL << "\" y2=\""
       << H - mB << "\" stroke=\"black\"/>\n";
    int ci = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4]
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << px(s.x[i]) << "," << py(s.y[i]) << " ";
        os << "\"/>\n";
        os << "<text x=\"" << W - mR - 6 << "\" y=\"" << mT + 16 * (ci + 1)
           << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[ci % 4] << "\">"
           << s.label << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    write_text(path, os.str());
}

// ---- experiment drivers -------------------------------------------------------------

CalibResult calib_experiment(const LevyModel1D& trueModel,
                             const std::vector<double>& strikes, double S0, double T,
                             double epsilon, std::uint64_t seed, int threads) {
    if (strikes.empty()) throw Error("calibration needs at least one strike");
    for (double K : strikes)
        if (K <= 0.0) throw Error("strikes must be positive");
    double a = 1e300, b = -1e300;
    std::vector<double> moneyness;
    for (double K : strikes) {
        moneyness.push_back(S0 / K);
        a = std::min(a, S0 / K);
        b = std::max(b, S0 / K);
    }
    if (b - a < 1e-9) {
        a *= 0.99;
        b *= 1.01;
    }

    // Generated chain: C(T, K_i) / K_i = u(T, S0/K_i) with unit strike.
    const auto chain = price_fourier_1d(trueModel, PayoffSpec::call(1.0), T, moneyness);

    const double delta = std::sqrt(epsilon);
    const LevyModelD model = LevyModelD::from_1d(trueModel);
    const PayoffSpec unitCall = PayoffSpec::call(1.0);

    ConstructionConfig cfg;
    cfg.epsilon = std::min(1.0, delta);
    cfg.a = a;
    cfg.b = b;
    cfg.maturity = T;
    cfg.attempts = 6;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.gridPointsPerDim = 600;

    Construction best;
    long n = 512;
    for (; n <= (1L << 20); n *= 2) {
        cfg.nOverride = n;
        best = construct_best_effort(model, unitCall, cfg);
        if (best.report.measuredError <= cfg.epsilon) break;
    }

    CalibResult res;
    res.deltaTarget = delta;
    res.measuredSup = best.report.measuredError;
    res.nUsed = best.report.nUsed;
    res.M = best.report.M;
    res.strikes = static_cast<int>(strikes.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double fitted = realize1(best.net, moneyness[i]);
        const double diff = chain[i].value - fitted;
        acc += diff * diff;
    }
    res.mse = acc / static_cast<double>(strikes.size());
    return res;
}

namespace {

double sweep_probe(const LevyModelD& model, const PayoffSpec& spec,
                   const ConstructionConfig& cfg, const OracleField& field, long n) {
    ConstructionConfig probe = cfg;
    probe.nOverride = n;
    probe.attempts = 2;
    return construct_with_oracle(model, spec, probe, field).report.measuredError;
}

}  // namespace

DimSweepResult dimension_sweep(const LevyModel1D& margin, const PayoffSpec& payoffTemplate,
                               const std::vector<int>& dList, double targetError,
                               double maturity, double a, double b, long oracleSamples,
                               std::uint64_t seed, int threads) {
    DimSweepResult out;
    for (int d : dList) {
        const LevyModelD model = LevyModelD::independent_copies(margin, d);
        PayoffSpec spec = payoffTemplate;
        spec.weights = payoffTemplate.effective_weights(d);
        const long phiM = metrics(payoff_net(spec, d).net).M;

        ConstructionConfig cfg;
        cfg.epsilon = targetError;
        cfg.a = a;
        cfg.b = b;
        cfg.maturity = maturity;
        cfg.seed = seed + static_cast<std::uint64_t>(d) * 131;
        cfg.threads = threads;
        cfg.oracleSamples = oracleSamples;
        const OracleField field =
            build_oracle_field(model, spec, maturity, a, b, /*perDim=*/0, oracleSamples,
                               cfg.seed, threads);

        // 20% headroom below the requested error, geometric search then one
        // midpoint refinement.
        const double target = 0.8 * targetError;
        long n = 256;
        double err = sweep_probe(model, spec, cfg, field, n);
        while (err > target && n < (1L << 18)) {
            n *= 2;
            err = sweep_probe(model, spec, cfg, field, n);
        }
        if (n > 256) {
            const long mid = (n / 2 + n) / 2;
            const double errMid = sweep_probe(model, spec, cfg, field, mid);
            if (errMid <= target) {
                n = mid;
                err = errMid;
            }
        }
        DimSweepRow row;
        row.d = d;
        row.n = n;
        row.M = n * phiM;
        row.error = err;
        out.rows.push_back(row);
    }

    std::vector<double> logD, logM, dPlain;
    for (const auto& r : out.rows) {
        logD.push_back(std::log(static_cast<double>(r.d)));
        dPlain.push_back(static_cast<double>(r.d));
        logM.push_back(std::log(static_cast<double>(r.M)));
    }
    out.polyFit = fit_line(logD, logM);
    out.expFit = fit_line(dPlain, logM);
    return out;
}

// ---- subcommand handlers -------------------------------------------------------------

namespace {

struct Context {
    json config;
    std::string outDir;
    std::uint64_t seed = 1;
    int threads = 0;
    ConstructionMode mode = ConstructionMode::Practical;
    json report;  // accumulated into report.json

    std::string path(const std::string& file) const { return outDir + "/" + file; }
};

std::vector<double> grid_from_config(const json& cfg, const std::string& path) {
    if (cfg.contains("s")) return dvec(cfg["s"], path + ".s");
    const json& g = need(cfg, "grid", path);
    check_keys(g, {"from", "to", "points"}, path + ".grid");
    return linspace(dnum(g, "from", path), dnum(g, "to", path),
                    static_cast<int>(dnum(g, "points", path)));
}

ConstructionConfig construction_from_config(const json& j, const Context& ctx,
                                            const std::string& path) {
    check_keys(j, {"epsilon", "a", "b", "maturity", "n", "D", "attempts",
                   "gridPointsPerDim", "oracleSamples"},
               path);
    ConstructionConfig cfg;
    cfg.epsilon = dnum_or(j, "epsilon", 0.01, path);
    cfg.a = dnum_or(j, "a", 0.5, path);
    cfg.b = dnum_or(j, "b", 1.5, path);
    cfg.maturity = dnum_or(j, "maturity", 1.0, path);
    cfg.nOverride = lnum_or(j, "n", 4096, path);
    if (j.contains("D")) cfg.DOverride = dnum(j, "D", path);
    cfg.attempts = static_cast<int>(dnum_or(j, "attempts", 10, path));
    cfg.gridPointsPerDim = static_cast<int>(dnum_or(j, "gridPointsPerDim", 0, path));
    cfg.oracleSamples = lnum_or(j, "oracleSamples", 400000, path);
    cfg.seed = ctx.seed;
    cfg.threads = ctx.threads;
    cfg.mode = ctx.mode;
    return cfg;
}

json report_of_constants(const StepConstants& sc) {
    json j;
    j["d"] = sc.d;
    j["B"] = sc.B;
    j["c"] = sc.c;
    j["q"] = sc.q;
    j["qTilde"] = sc.qTilde;
    j["p"] = sc.p;
    j["c1"] = sc.c1;
    j["cTilde1"] = sc.cTilde1;
    j["c2"] = sc.c2;
    j["epsBar"] = sc.epsBar;
    j["n"] = sc.n;
    j["D"] = sc.D;
    j["kappa"] = sc.kappa;
    j["sizeBound"] = sc.sizeBound;
    return j;
}

json report_of_construction(const ConstructionReport& rep) {
    json j;
    j["constants"] = report_of_constants(rep.constants);
    j["n"] = rep.nUsed;
    j["D"] = rep.DUsed;
    j["M"] = rep.M;
    j["L"] = rep.L;
    j["measuredError"] = rep.measuredError;
    j["oracleErrorBound"] = rep.oracleErrorBound;
    j["attemptsUsed"] = rep.attemptsUsed;
    j["seed"] = rep.seed;
    j["gridKind"] = rep.gridKind;
    if (rep.argmaxPoint.size() > 0) {
        json pt = json::array();
        for (long i = 0; i < rep.argmaxPoint.size(); ++i) pt.push_back(rep.argmaxPoint[i]);
        j["argmaxPoint"] = pt;
    }
    return j;
}

int handle_price(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg, {"model", "payoff", "tau", "grid", "s", "seed"}, "config");
    const LevyModel1D model = model1d_from_json(need(cfg, "model", "config"), "config.model");
    const PayoffSpec payoff = payoff_from_json(need(cfg, "payoff", "config"), "config.payoff");
    const double tau = dnum(cfg, "tau", "config");
    const auto grid = grid_from_config(cfg, "config");

    const auto res = price_fourier_1d(model, payoff, tau, grid);
    std::ostringstream os;
    os << "s,value,errorBound,kind\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const char* kind = res[i].kind == OracleKind::Analytic
                               ? "analytic"
                               : (res[i].kind == OracleKind::Fourier ? "fourier" : "mc");
        os << format_double(grid[i]) << "," << format_double(res[i].value) << ","
           << format_double(res[i].errorBound) << "," << kind << "\n";
    }
    write_text(ctx.path("price.csv"), os.str());
    ctx.report["rows"] = grid.size();
    ctx.report["firstValue"] = res.empty() ? 0.0 : res[0].value;
    std::cout << "price: wrote " << grid.size() << " rows to price.csv\n";
    return 0;
}

int handle_construct(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg, {"model", "payoff", "construction", "seed"}, "config");
    const LevyModelD model = modelD_from_json(need(cfg, "model", "config"), "config.model");
    const PayoffSpec payoff = payoff_from_json(need(cfg, "payoff", "config"), "config.payoff");
    const ConstructionConfig ccfg =
        construction_from_config(need(cfg, "construction", "config"), ctx,
                                 "config.construction");

    const Construction result = construct_best_effort(model, payoff, ccfg);
    save_network(result.net, ctx.path("network.json"));
    ctx.report["construction"] = report_of_construction(result.report);
    ctx.report["networkPath"] = "network.json";
    const bool met = result.report.measuredError <= ccfg.epsilon;
    ctx.report["metTarget"] = met;
    std::cout << "construct: measured error " << result.report.measuredError << " (target "
              << ccfg.epsilon << "), M = " << result.report.M << "\n";
    return met ? 0 : 1;
}

int handle_rate_study(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg, {"model", "payoff", "construction", "nList", "trials", "seed"},
               "config");
    const LevyModelD model = modelD_from_json(need(cfg, "model", "config"), "config.model");
    const PayoffSpec payoff = payoff_from_json(need(cfg, "payoff", "config"), "config.payoff");
    const ConstructionConfig ccfg =
        construction_from_config(need(cfg, "construction", "config"), ctx,
                                 "config.construction");
    std::vector<long> nList;
    for (double v : dvec(need(cfg, "nList", "config"), "config.nList"))
        nList.push_back(static_cast<long>(v));
    const int trials = static_cast<int>(dnum_or(cfg, "trials", 4, "config"));

    const RateStudy study = rate_study(model, payoff, ccfg, nList, trials);
    std::vector<std::vector<double>> rows;
    SvgSeries series{"mean sup error", {}, {}};
    for (const auto& r : study.rows) {
        rows.push_back({static_cast<double>(r.n), r.meanError, static_cast<double>(r.M)});
        series.x.push_back(static_cast<double>(r.n));
        series.y.push_back(r.meanError);
    }
    write_csv(ctx.path("rate.csv"), {"n", "meanError", "M"}, rows);
    write_svg_chart(ctx.path("rate.svg"), "sup error vs n (log-log)", {series}, true, true);
    ctx.report["slope"] = study.slope;
    ctx.report["intercept"] = study.intercept;
    ctx.report["r2"] = study.r2;
    std::cout << "rate-study: slope " << study.slope << " over " << study.rows.size()
              << " sizes\n";
    return 0;
}

int handle_dim_sweep(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg,
               {"margin", "payoff", "dList", "targetError", "maturity", "box",
                "oracleSamples", "seed"},
               "config");
    const LevyModel1D margin =
        model1d_from_json(need(cfg, "margin", "config"), "config.margin");
    const PayoffSpec payoff = payoff_from_json(need(cfg, "payoff", "config"), "config.payoff");
    std::vector<int> dList;
    for (double v : dvec(need(cfg, "dList", "config"), "config.dList"))
        dList.push_back(static_cast<int>(v));
    const double target = dnum_or(cfg, "targetError", 0.02, "config");
    const double maturity = dnum_or(cfg, "maturity", 1.0, "config");
    const json& box = need(cfg, "box", "config");
    check_keys(box, {"a", "b"}, "config.box");
    const long oracleSamples = lnum_or(cfg, "oracleSamples", 400000, "config");

    const DimSweepResult res =
        dimension_sweep(margin, payoff, dList, target, maturity, dnum(box, "a", "config.box"),
                        dnum(box, "b", "config.box"), oracleSamples, ctx.seed, ctx.threads);
    std::vector<std::vector<double>> rows;
    SvgSeries series{"M(d)", {}, {}};
    for (const auto& r : res.rows) {
        rows.push_back({static_cast<double>(r.d), static_cast<double>(r.n),
                        static_cast<double>(r.M), r.error});
        series.x.push_back(static_cast<double>(r.d));
        series.y.push_back(static_cast<double>(r.M));
    }
    write_csv(ctx.path("dimsweep.csv"), {"d", "n", "M", "error"}, rows);
    write_svg_chart(ctx.path("dimsweep.svg"), "network size vs dimension", {series}, true,
                    true);
    ctx.report["polyFit"] = {{"slope", res.polyFit.slope}, {"r2", res.polyFit.r2}};
    ctx.report["expFit"] = {{"slope", res.expFit.slope}, {"r2", res.expFit.r2}};
    std::cout << "dim-sweep: poly r2 " << res.polyFit.r2 << " vs exp r2 " << res.expFit.r2
              << "\n";
    return 0;
}

int handle_spectral(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg,
               {"model", "payoff", "tau", "box", "pList", "sector", "deltaNet", "kMax",
                "seed"},
               "config");
    const LevyModel1D model = model1d_from_json(need(cfg, "model", "config"), "config.model");
    const PayoffSpec payoff = payoff_from_json(need(cfg, "payoff", "config"), "config.payoff");
    const double tau = dnum(cfg, "tau", "config");
    const json& box = need(cfg, "box", "config");
    check_keys(box, {"a", "b"}, "config.box");
    const SymbolSector sector =
        sector_from_json(need(cfg, "sector", "config"), "config.sector");
    std::vector<int> pList;
    for (double v : dvec(need(cfg, "pList", "config"), "config.pList"))
        pList.push_back(static_cast<int>(v));
    const double deltaNet = dnum_or(cfg, "deltaNet", 1e-6, "config");
    const int kMax = static_cast<int>(dnum_or(cfg, "kMax", 10, "config"));

    const ChebStudy study = cheb_approx(model, payoff, tau, dnum(box, "a", "config.box"),
                                        dnum(box, "b", "config.box"), pList, sector);
    std::vector<std::vector<double>> rows;
    SvgSeries series{"sup error", {}, {}};
    for (const auto& r : study.rows) {
        const SpectralNet sn = spectral_emulate(study, r.p, deltaNet);
        rows.push_back({static_cast<double>(r.p), r.supError, static_cast<double>(sn.M),
                        static_cast<double>(sn.L)});
        series.x.push_back(static_cast<double>(r.p));
        series.y.push_back(std::max(r.supError, 1e-16));
    }
    write_csv(ctx.path("spectral.csv"), {"p", "supError", "M", "L"}, rows);
    write_svg_chart(ctx.path("spectral.svg"), "Chebyshev error vs degree", {series}, false,
                    true);

    const LogPayoff v0 = log_payoff(payoff);
    const double v0L2 = payoff_l2_norm(v0);
    std::vector<std::vector<double>> gevRows;
    for (int k = 0; k <= kMax; ++k)
        gevRows.push_back({static_cast<double>(k), gevrey_bound(k, tau, sector, v0L2),
                           derivative_l2_norm(model, v0, tau, k)});
    write_csv(ctx.path("gevrey.csv"), {"k", "bound", "numericNorm"}, gevRows);

    ctx.report["delta"] = study.delta;
    ctx.report["decayCoefficient"] = study.decayCoefficient;
    ctx.report["decayR2"] = study.decayR2;
    ctx.report["v0L2"] = v0L2;
    std::cout << "spectral: decay coefficient " << study.decayCoefficient << "\n";
    return 0;
}

ChaosFactor factor_from_json(const json& j, const std::string& path) {
    const std::string type = need(j, "type", path).get<std::string>();
    if (type == "gaussian") {
        check_keys(j, {"type", "width"}, path);
        return gaussian_factor(dnum(j, "width", path));
    }
    if (type == "butterfly") {
        check_keys(j, {"type", "K1", "K", "K2"}, path);
        return butterfly_factor(PayoffSpec::butterfly(dnum(j, "K1", path), dnum(j, "K", path),
                                                      dnum(j, "K2", path)));
    }
    throw ConfigError(path + ".type: unknown factor '" + type + "'");
}

int handle_chaos(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg,
               {"model", "factors", "tau", "tauFactor", "sector", "q", "nList",
                "candidates", "deltaNet", "gridPerDim", "seed"},
               "config");
    const LevyModelD model = modelD_from_json(need(cfg, "model", "config"), "config.model");
    const SymbolSector sector =
        sector_from_json(need(cfg, "sector", "config"), "config.sector");
    const double q = dnum_or(cfg, "q", 1.0, "config");
    double tau;
    if (cfg.contains("tau")) {
        tau = dnum(cfg, "tau", "config");
    } else {
        const double factor = dnum_or(cfg, "tauFactor", 2.0, "config");
        tau = factor * tau0(model.d, sector.rho, q, sector.C1);
    }

    std::vector<ChaosFactor> factors;
    const json& fs = need(cfg, "factors", "config");
    if (!fs.is_array() || static_cast<int>(fs.size()) != model.d)
        throw ConfigError("config.factors must list one payoff factor per dimension");
    for (std::size_t i = 0; i < fs.size(); ++i)
        factors.push_back(
            factor_from_json(fs.at(i), "config.factors[" + std::to_string(i) + "]"));

    std::vector<int> nList;
    for (double v : dvec(need(cfg, "nList", "config"), "config.nList"))
        nList.push_back(static_cast<int>(v));
    const int nMax = *std::max_element(nList.begin(), nList.end());
    const int candidates =
        static_cast<int>(dnum_or(cfg, "candidates", 10.0 * nMax, "config"));
    const double deltaNet = dnum_or(cfg, "deltaNet", 1e-8, "config");
    const int gridPerDim = static_cast<int>(dnum_or(cfg, "gridPerDim", 9, "config"));

    const ChaosExpansion expansion =
        taylor_coeffs(model, factors, tau, sector, candidates);

    // Expansion dump.
    json dump = json::array();
    for (std::size_t i = 0; i < expansion.indices.size(); ++i) {
        json row;
        row["nu"] = expansion.indices[i];
        row["t"] = expansion.t[i];
        row["bound"] = expansion.bound[i];
        dump.push_back(std::move(row));
    }
    write_text(ctx.path("expansion.json"), dump.dump(1) + "\n");

    std::vector<Eigen::VectorXd> grid;
    {
        const auto axis = linspace(-1.0, 1.0, gridPerDim);
        std::vector<std::size_t> idx(static_cast<std::size_t>(model.d), 0);
        while (true) {
            Eigen::VectorXd x(model.d);
            for (int j = 0; j < model.d; ++j) x[j] = axis[idx[static_cast<std::size_t>(j)]];
            grid.push_back(x);
            int j = 0;
            for (; j < model.d; ++j) {
                if (++idx[static_cast<std::size_t>(j)] < axis.size()) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
            if (j == model.d) break;
        }
    }
    const SparseErrorStudy study =
        sparse_eval_and_error(expansion, model, factors, sector, nList, grid);
    std::vector<std::vector<double>> rows;
    SvgSeries errSeries{"sup error", {}, {}}, tailSeries{"tail bound", {}, {}};
    for (const auto& r : study.rows) {
        rows.push_back({static_cast<double>(r.n), r.supError, r.tailBound});
        errSeries.x.push_back(r.n);
        errSeries.y.push_back(std::max(r.supError, 1e-18));
        tailSeries.x.push_back(r.n);
        tailSeries.y.push_back(std::max(r.tailBound, 1e-18));
    }
    write_csv(ctx.path("chaos.csv"), {"n", "supError", "tailBound"}, rows);
    write_svg_chart(ctx.path("chaos.svg"), "sparse truncation error", {errSeries, tailSeries},
                    true, true);

    const auto cert = summability_certificate(model.d, tau, sector, q, expansion.v0hatL1);
    ctx.report["tau"] = tau;
    ctx.report["tau0"] = tau0(model.d, sector.rho, q, sector.C1);
    ctx.report["q"] = q;
    ctx.report["finite"] = cert.finite;
    ctx.report["lqNormBound"] = cert.lqNormBound;
    ctx.report["quadError"] = expansion.quadError;

    if (model.d <= 3) {
        const auto lambda = build_index_set(expansion, nMax);
        const SparseNet sn = sparse_to_relu(expansion, lambda, deltaNet);
        save_network(sn.net, ctx.path("network.json"));
        ctx.report["net"] = {{"M", sn.M}, {"L", sn.L}, {"emulationError", sn.emulationError}};
    }
    std::cout << "chaos: " << expansion.indices.size() << " candidates, finite="
              << cert.finite << "\n";
    return 0;
}

int handle_barron(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg, {"model", "R", "tauList", "mList", "method", "seed"}, "config");
    const LevyModel1D model = model1d_from_json(need(cfg, "model", "config"), "config.model");
    const double R = dnum_or(cfg, "R", 2.0, "config");
    std::vector<double> tauList = {0.0, 0.5, 1.0};
    if (cfg.contains("tauList")) tauList = dvec(cfg["tauList"], "config.tauList");
    std::vector<int> mList;
    for (double v : dvec(need(cfg, "mList", "config"), "config.mList"))
        mList.push_back(static_cast<int>(v));
    const std::string methodName =
        cfg.contains("method") ? cfg["method"].get<std::string>() : "Greedy";
    const FitMethod method =
        methodName == "RandomFeatures" ? FitMethod::RandomFeatures : FitMethod::Greedy;

    const BarronFunction fixture = BarronFunction::gaussian_1d();
    const double norm = barron_norm(fixture);
    json evolved = json::array();
    for (double tau : tauList)
        evolved.push_back({{"tau", tau}, {"norm", evolved_norm(fixture, model, tau)}});

    std::vector<std::vector<double>> rows;
    SvgSeries errSeries{"L2 error", {}, {}}, boundSeries{"bound", {}, {}};
    ReluNetwork lastNet;
    for (int m : mList) {
        const TwoLayerFit fit = fit_two_layer(fixture.f, R, m, method, ctx.seed);
        const double bound = std::max(1.0, R) * norm / std::sqrt(static_cast<double>(m));
        rows.push_back({static_cast<double>(m), fit.l2piError, bound});
        errSeries.x.push_back(m);
        errSeries.y.push_back(std::max(fit.l2piError, 1e-18));
        boundSeries.x.push_back(m);
        boundSeries.y.push_back(bound);
        lastNet = fit.net;
    }
    write_csv(ctx.path("barron.csv"), {"m", "error", "bound"}, rows);
    write_svg_chart(ctx.path("barron.svg"), "two-layer fit vs Barron bound",
                    {errSeries, boundSeries}, true, true);
    save_network(lastNet, ctx.path("network.json"));
    ctx.report["barronNorm"] = norm;
    ctx.report["evolvedNorms"] = evolved;
    ctx.report["method"] = methodName;
    std::cout << "barron: norm " << norm << ", " << mList.size() << " fits\n";
    return 0;
}

int handle_calib(Context& ctx) {
    const json& cfg = ctx.config;
    check_keys(cfg, {"model", "strikes", "S0", "maturity", "epsilon", "seed"}, "config");
    const LevyModel1D model = model1d_from_json(need(cfg, "model", "config"), "config.model");
    const double S0 = dnum_or(cfg, "S0", 1.0, "config");
    const double T = dnum_or(cfg, "maturity", 1.0, "config");
    const double epsilon = dnum_or(cfg, "epsilon", 1e-3, "config");
    std::vector<double> strikes;
    const json& ks = need(cfg, "strikes", "config");
    if (ks.is_array()) {
        strikes = dvec(ks, "config.strikes");
    } else {
        check_keys(ks, {"count", "from", "to"}, "config.strikes");
        strikes = linspace(dnum(ks, "from", "config.strikes"), dnum(ks, "to", "config.strikes"),
                           static_cast<int>(dnum(ks, "count", "config.strikes")));
    }

    const CalibResult res = calib_experiment(model, strikes, S0, T, epsilon, ctx.seed,
                                             ctx.threads);
    ctx.report["mse"] = res.mse;
    ctx.report["epsilon"] = epsilon;
    ctx.report["M"] = res.M;
    ctx.report["n"] = res.nUsed;
    ctx.report["deltaTarget"] = res.deltaTarget;
    ctx.report["measuredSup"] = res.measuredSup;
    ctx.report["strikes"] = res.strikes;
    ctx.report["networkPath"] = "network.json";
    std::cout << "calib: mse " << res.mse << " (target " << epsilon << ") with M = " << res.M
              << "\n";
    return res.mse <= epsilon ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentRequest& req) {
    Context ctx;
    {
        std::ifstream in(req.configPath);
        if (!in) throw ConfigError("cannot open config " + req.configPath);
        try {
            in >> ctx.config;
        } catch (const json::exception& e) {
            throw ConfigError("invalid JSON in " + req.configPath + ": " + e.what());
        }
    }
    ctx.outDir = req.outDir;
    std::filesystem::create_directories(ctx.outDir);
    ctx.seed = req.seedOverride
                   ? *req.seedOverride
                   : static_cast<std::uint64_t>(
                         dnum_or(ctx.config, "seed", 1.0, "config"));
    ctx.threads = req.threadsOverride ? *req.threadsOverride : 0;
    if (req.modeOverride) {
        if (*req.modeOverride == "paper")
            ctx.mode = ConstructionMode::PaperConstants;
        else if (*req.modeOverride == "practical")
            ctx.mode = ConstructionMode::Practical;
        else
            throw ConfigError("mode must be 'paper' or 'practical'");
    }

    int status = 0;
    if (req.subcommand == "price")
        status = handle_price(ctx);
    else if (req.subcommand == "construct")
        status = handle_construct(ctx);
    else if (req.subcommand == "rate-study")
        status = handle_rate_study(ctx);
    else if (req.subcommand == "dim-sweep")
        status = handle_dim_sweep(ctx);
    else if (req.subcommand == "spectral")
        status = handle_spectral(ctx);
    else if (req.subcommand == "chaos")
        status = handle_chaos(ctx);
    else if (req.subcommand == "barron")
        status = handle_barron(ctx);
    else if (req.subcommand == "calib")
        status = handle_calib(ctx);
    else
        throw ConfigError("unknown subcommand '" + req.subcommand + "'");

    json report;
    report["subcommand"] = req.subcommand;
    report["seed"] = ctx.seed;
    report["threads"] = ctx.threads;
    report["mode"] = ctx.mode == ConstructionMode::PaperConstants ? "paper" : "practical";
    report["config"] = ctx.config;
    report["results"] = ctx.report;
    write_text(ctx.path("report.json"), report.dump(1) + "\n");
    return status;
}

}  // namespace levynet
