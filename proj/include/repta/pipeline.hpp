#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "repta/pricing.hpp"
#include "repta/robust.hpp"
#include "repta/sizing.hpp"

namespace repta {

struct ProfileSource {
    std::optional<std::filesystem::path> path;  // CSV; synthetic profiles when unset
    double wind_flh = 3500.0;                   // annual FLH of the synthetic pair
    double solar_flh = 1800.0;
    std::uint64_t seed = 1;
};

struct FitSpec {
    std::optional<std::filesystem::path> data;  // CSV `hour,flow`
    std::string unit = "nm3_per_h";             // or "kg_per_h"
    double q_k = 0.0;                           // same unit as the data
    double q_k1 = 0.0;
    double dt = 1.0;
};

struct ScenarioSpec {
    Scenario scenario = Scenario::proposed;
    std::optional<double> C_W, C_S, C_HS;
    std::optional<int> N_AE;
    bool no_storage = false;
};

struct RunConfig {
    ProfileSource profiles;
    std::filesystem::path out_dir = "out";
    TechnoEconomicConfig tech;
    ScenarioSpec scenario;
    std::vector<double> betas;  // robust stage runs when non-empty
    double alpha_tol = 1e-3;
    std::vector<double> sweep_delta_T_AS;  // empty: 4 h and 24 h when they divide the horizon, then the horizon
    PriceGrid price_grid;
    double p_h2_max = 5.0;
    milp::SolveOptions solve;
    int workers = 0;  // 0: hardware concurrency
    FitSpec fit;

    // Reads a YAML file. Missing sections keep their defaults; unknown
    // keys and malformed values raise ConfigError.
    static RunConfig load(const std::filesystem::path& path);
    static RunConfig from_yaml(const std::string& text);

    // Cross-field checks: referenced files exist, every ΔT_AS divides the
    // horizon, β values lie in [0, 1]. Throws ConfigError.
    void validate() const;
    SizingOverrides overrides() const;
    std::vector<double> sweep_points() const;
    int worker_count() const;
};

std::pair<Profile, Profile> obtain_profiles(const RunConfig& cfg);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results keep input
// order; the first failure (by index) is rethrown after all workers finish.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (count <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < count; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// Benchmark report row plus what the pricing stage returned for the scenario.
struct BenchmarkRow {
    Scenario scenario = Scenario::proposed;
    SizingResult sizing;
    GridRates rates;
    double flh_ae = 0.0;
    std::optional<PricingResult> pricing;
    std::array<double, 3> er{};  // RG, AEHS, AS
    double system_er = 0.0;
    PriceSet prices;
    bool er_min_met = false;
    std::string pricing_note;
    double wall_time_s = 0.0;
};

BenchmarkRow run_benchmark(Scenario scenario, const RunConfig& cfg, const Profile& wind, const Profile& solar);

struct SweepRow {
    double delta_T_AS = 0.0;
    SizingResult sizing;
    GridRates rates;
};

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const Profile& wind, const Profile& solar);

std::vector<IgdtResult> run_robust(const SizingResult& deterministic, const RunConfig& cfg, const Profile& wind,
                                   const Profile& solar);

// Self-validation before anything is written: schedule audit and ledger
// recomputation against the solver objective. Throws InconsistencyError.
void validate_sizing(const SizingResult& r, const TechnoEconomicConfig& cfg);

// Output writers.
std::string bench_report(const std::vector<BenchmarkRow>& rows, const RunConfig& cfg);  // JSON
std::string bench_csv(const std::vector<BenchmarkRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string robust_csv(const std::vector<IgdtResult>& rows);
std::string schedule_csv(const Schedule& s);

// Subcommands. Each returns true when every solve reached optimality and
// false when a limit left a feasible but unproven incumbent.
bool cmd_size(const RunConfig& cfg);
bool cmd_robust(const RunConfig& cfg);
bool cmd_price(const RunConfig& cfg);
bool cmd_run(const RunConfig& cfg);
bool cmd_bench(const RunConfig& cfg);
bool cmd_sweep(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);

}  // namespace repta
