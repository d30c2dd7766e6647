// levynet: reference prices, constructive ReLU approximations and rate
// experiments for exponential Levy models. See README.md for config formats.
#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "levynet/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ReLU network approximation of option prices in exponential Levy models"};
    app.require_subcommand(1);

    levynet::ExperimentRequest req;
    std::uint64_t seed = 0;
    int threads = -1;
    std::string mode;

    const std::vector<std::string> names = {"price",    "construct", "rate-study",
                                            "dim-sweep", "spectral",  "chaos",
                                            "barron",   "calib"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", req.configPath, "JSON experiment config")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", req.outDir, "output directory (default .)");
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
        sub->add_option("--mode", mode, "constants mode: paper|practical");
    }

    CLI11_PARSE(app, argc, argv);
    const auto* sub = app.get_subcommands().front();
    req.subcommand = sub->get_name();
    if (sub->count("--seed")) req.seedOverride = seed;
    if (sub->count("--threads")) {
        req.threadsOverride = threads;
    } else if (const char* env = std::getenv("LEVYNET_THREADS")) {
        req.threadsOverride = std::atoi(env);
    }
    if (sub->count("--mode")) req.modeOverride = mode;

    try {
        return levynet::run_experiment(req);
    } catch (const levynet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
