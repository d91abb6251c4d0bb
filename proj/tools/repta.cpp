#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "repta/errors.hpp"
#include "repta/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kInfeasible = 2, kLimit = 3, kConfig = 4 };

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> gap;
    std::optional<double> time_limit;
    std::optional<std::string> scenario;
    std::vector<double> betas;
    std::vector<double> dtas;
    std::optional<std::size_t> horizon;
    std::optional<std::string> backend;
    std::optional<int> workers;
    bool verbose = false;
};

repta::RunConfig resolve(const Flags& f, bool dtas_is_list) {
    repta::RunConfig c = f.config.empty() ? repta::RunConfig::from_yaml("") : repta::RunConfig::load(f.config);
    if (f.out) c.out_dir = *f.out;
    if (f.seed) c.profiles.seed = *f.seed;
    if (f.gap) c.solve.relative_gap = *f.gap;
    if (f.time_limit) c.solve.time_limit_s = *f.time_limit;
    if (f.scenario) c.scenario.scenario = repta::parse_scenario(*f.scenario);
    if (!f.betas.empty()) c.betas = f.betas;
    if (!f.dtas.empty()) {
        if (dtas_is_list) {
            c.sweep_delta_T_AS = f.dtas;
        } else if (f.dtas.size() == 1) {
            c.tech.ammonia.delta_T_AS = f.dtas.front();
        } else {
            throw repta::ConfigError("--dtas takes a single value outside 'sweep'");
        }
    }
    if (f.horizon) c.tech.horizon = *f.horizon;
    if (f.backend) c.solve.backend = *f.backend;
    if (f.workers) c.workers = *f.workers;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sizing and pricing of a renewable power-to-ammonia system"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "YAML run configuration (defaults when omitted)");
    app.add_option("--out", f.out, "Output directory");
    app.add_option("--seed", f.seed, "Seed of the synthetic profiles");
    app.add_option("--gap", f.gap, "Relative MIP gap");
    app.add_option("--time-limit", f.time_limit, "Time limit per solve, seconds");
    app.add_option("--scenario", f.scenario, "proposed, bs1, bs2, bs3 or bs4");
    app.add_option("--beta", f.betas, "Revenue deviation factor(s) for the robust stage")->delimiter(',');
    app.add_option("--dtas", f.dtas, "Ammonia scheduling period(s) in hours")->delimiter(',');
    app.add_option("--horizon", f.horizon, "Number of time steps");
    app.add_option("--backend", f.backend, "MILP backend: auto, highs or bundled");
    app.add_option("--workers", f.workers, "Worker threads for scenario, sweep and beta fan-out");
    app.add_flag("-v,--verbose", f.verbose, "Log progress");

    auto* size = app.add_subcommand("size", "Stage I sizing");
    auto* robust = app.add_subcommand("robust", "Stage I sizing followed by robust evaluation per beta");
    auto* price = app.add_subcommand("price", "Stage I sizing followed by Stage II pricing");
    auto* run = app.add_subcommand("run", "Full pipeline: size, robust, price, assess");
    auto* bench = app.add_subcommand("bench", "Benchmark scenarios BS1-BS4 against the proposed system");
    auto* sweep = app.add_subcommand("sweep", "Sensitivity of the sizing to the ammonia scheduling period");
    auto* fit = app.add_subcommand("fit", "Fit the transition time constant to measured load data");
    for (auto* sub : {size, robust, price, run, bench, sweep, fit}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }
    spdlog::set_level(f.verbose ? spdlog::level::info : spdlog::level::warn);

    try {
        const repta::RunConfig cfg = resolve(f, sweep->parsed());
        bool optimal = true;
        if (size->parsed()) optimal = repta::cmd_size(cfg);
        if (robust->parsed()) optimal = repta::cmd_robust(cfg);
        if (price->parsed()) optimal = repta::cmd_price(cfg);
        if (run->parsed()) optimal = repta::cmd_run(cfg);
        if (bench->parsed()) optimal = repta::cmd_bench(cfg);
        if (sweep->parsed()) optimal = repta::cmd_sweep(cfg);
        if (fit->parsed()) repta::cmd_fit(cfg);
        if (!optimal) {
            std::cerr << "solver limit reached; results hold the best incumbent found\n";
            return kLimit;
        }
        return kOk;
    } catch (const repta::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const repta::SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kConfig;
    } catch (const repta::HorizonMismatchError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kConfig;
    } catch (const repta::InfeasibleError& e) {
        std::cerr << "infeasible (" << e.family() << "): " << e.what() << "\n";
        return kInfeasible;
    } catch (const repta::SolverLimitError& e) {
        std::cerr << "solver limit: " << e.what() << "\n";
        return kLimit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
}
