// Experiment configs, the CLI dispatcher, calibration and dimension sweeps,
// and artifact (CSV/JSON/SVG) emission.
#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "levynet/constructive_approx.hpp"
#include "levynet/levy_models.hpp"
#include "levynet/relu_net.hpp"

namespace levynet {

// --- config parsing -----------------------------------------------------------

// Throws ConfigError naming the offending key path.
LevyModel1D model1d_from_json(const nlohmann::json& j, const std::string& path);
LevyModelD modelD_from_json(const nlohmann::json& j, const std::string& path);
PayoffSpec payoff_from_json(const nlohmann::json& j, const std::string& path);
SymbolSector sector_from_json(const nlohmann::json& j, const std::string& path);

struct ExperimentRequest {
    std::string subcommand;
    std::string configPath;
    std::string outDir = ".";
    std::optional<std::uint64_t> seedOverride;
    std::optional<int> threadsOverride;
    std::optional<std::string> modeOverride;  // "paper" | "practical"
};

// Dispatches to the subcommand handler; returns the process exit status.
int run_experiment(const ExperimentRequest& req);

// --- standalone experiment drivers -----------------------------------------------

struct CalibResult {
    double mse = 0.0;
    long M = 0;
    long nUsed = 0;
    double deltaTarget = 0.0;  // sup-accuracy target sqrt(epsilon)
    double measuredSup = 0.0;
    int strikes = 0;
};

// Nonparametric call-pricing experiment: fit the constructive network to a
// generated call-price chain and report the mean squared error.
CalibResult calib_experiment(const LevyModel1D& trueModel,
                             const std::vector<double>& strikes, double S0, double T,
                             double epsilon, std::uint64_t seed, int threads = 0);

struct DimSweepRow {
    int d = 0;
    long n = 0;
    long M = 0;
    double error = 0.0;
};

struct DimSweepResult {
    std::vector<DimSweepRow> rows;
    LineFit polyFit;  // log M vs log d
    LineFit expFit;   // log M vs d
};

// For each d: independent copies of the margin, bisection on n until the
// measured sup error clears targetError with 20% headroom.
DimSweepResult dimension_sweep(const LevyModel1D& margin, const PayoffSpec& payoffTemplate,
                               const std::vector<int>& dList, double targetError,
                               double maturity, double a, double b, long oracleSamples,
                               std::uint64_t seed, int threads = 0);

// --- artifact writers ----------------------------------------------------------

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_text(const std::string& path, const std::string& content);

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};
// Minimal line chart; log-log axes when requested.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series, bool logX, bool logY);

}  // namespace levynet
