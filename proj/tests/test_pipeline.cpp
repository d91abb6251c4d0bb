#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "repta/errors.hpp"
#include "repta/pipeline.hpp"

using namespace repta;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("repta_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const int rc = std::system((std::string(REPTA_BIN) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("YAML config sections map onto the run config") {
    const auto c = RunConfig::from_yaml(R"(
profiles:
  wind_flh: 3000
  seed: 9
  horizon: 48
investment:
  wt: {unit_cost: 5500, lifetime_years: 25}
  interest_rate: 0.07
prices:
  p_nh3: 3000
operation:
  eta_ae_max: 1.1
  ammonia:
    delta_t_as: 4
scenario:
  name: BS4
robust:
  betas: [0.0, 0.5]
pricing:
  n_p: 16
  p_hi: 0.6
solver:
  backend: bundled
  gap: 0.001
workers: 2
)");
    CHECK(c.profiles.wind_flh == 3000.0);
    CHECK(c.profiles.seed == 9);
    CHECK(c.tech.horizon == 48);
    CHECK(c.tech.wt.unit_cost == 5500.0);
    CHECK(c.tech.wt.lifetime_years == 25);
    CHECK(c.tech.wt.om_fraction == 0.02);
    CHECK(c.tech.interest_rate == 0.07);
    CHECK(c.tech.p_nh3 == 3000.0);
    CHECK(c.tech.eta_ae_max == 1.1);
    CHECK(c.tech.ammonia.delta_T_AS == 4.0);
    CHECK(c.scenario.scenario == Scenario::bs4);
    CHECK(c.betas == std::vector<double>{0.0, 0.5});
    CHECK(c.price_grid.N_p == 16);
    CHECK(c.price_grid.p_hi == 0.6);
    CHECK(c.solve.backend == "bundled");
    CHECK(c.solve.relative_gap == 0.001);
    CHECK(c.worker_count() == 2);
    CHECK(c.sweep_points() == std::vector<double>{4.0, 24.0, 48.0});
    CHECK(*c.overrides().C_W == 200.0);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(RunConfig::from_yaml("prices:\n  p_fitt: 0.3\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_yaml("bogus: 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_yaml("prices:\n  p_fit: abc\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_yaml("scenario:\n  name: BS7\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_yaml("prices: [\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/repta.yaml"), ConfigError);

    CHECK_THROWS_AS(RunConfig::from_yaml("profiles:\n  path: /nonexistent/profiles.csv\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_yaml("profiles:\n  horizon: 48\nsweep:\n  delta_t_as: [4, 7]\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_yaml("robust:\n  betas: [1.5]\n"), ConfigError);

    RunConfig c;
    c.fit.unit = "t_per_h";
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("relative profile paths resolve against the config file") {
    const auto dir = scratch("relpath");
    {
        std::ofstream(dir / "p.csv") << "hour,wind_cf,solar_cf\n0,0.5,0\n1,0.5,0.2\n2,0.5,0.1\n3,0.5,0\n";
        std::ofstream(dir / "c.yaml") << "profiles:\n  path: p.csv\n  horizon: 4\noperation:\n  ammonia:\n    delta_t_as: 4\n";
    }
    const auto c = RunConfig::load(dir / "c.yaml");
    CHECK(*c.profiles.path == dir / "p.csv");
    CHECK_NOTHROW(c.validate());
    const auto [w, s] = obtain_profiles(c);
    CHECK(w.values[0] == 0.5);
    CHECK(s.values[1] == 0.2);
}

TEST_CASE("synthetic profiles scale their FLH to the horizon") {
    auto c = RunConfig::from_yaml("profiles:\n  horizon: 168\n");
    const auto [w, s] = obtain_profiles(c);
    CHECK(w.size() == 168);
    CHECK(w.flh() == doctest::Approx(3500.0 * 168 / 8760).epsilon(1e-3));
    CHECK(s.flh() == doctest::Approx(1800.0 * 168 / 8760).epsilon(1e-3));
}

TEST_CASE("parallel_map keeps order and rethrows the first failure") {
    for (int workers : {1, 3, 8}) {
        const auto out = parallel_map<int>(20, workers, [](std::size_t i) {
            std::this_thread::sleep_for(std::chrono::microseconds((20 - i) * 50));
            return static_cast<int>(i * i);
        });
        REQUIRE(out.size() == 20);
        for (std::size_t i = 0; i < 20; ++i) CHECK(out[i] == static_cast<int>(i * i));
    }
    auto failing = [](std::size_t i) -> int {
        if (i == 4) throw DomainError("four");
        if (i == 9) throw ValidationError("nine");
        return 0;
    };
    CHECK_THROWS_AS(parallel_map<int>(12, 4, failing), DomainError);
    CHECK(parallel_map<int>(0, 4, failing).empty());
}

TEST_CASE("schedule CSV layout") {
    Schedule s;
    s.P_W = {1.0};
    s.P_S = {2.0};
    s.P_sell = {0.5};
    s.P_purch = {0.0};
    s.P_curt = {0.0};
    s.P_AE = {2.0};
    s.P_AS = {0.5};
    s.q_in = {400.0};
    s.q_out = {300.0};
    s.n_sto = {1000.0, 1100.0};
    const std::string csv = schedule_csv(s);
    CHECK(csv.rfind("hour,P_W,P_S,P_sell,P_purch,P_curt,P_AE,P_AS,q_in,q_out,n_sto\n", 0) == 0);
    CHECK(csv.find("\n0,1,2,0.5,0,0,2,0.5,400,300,1100\n") != std::string::npos);
    s.n_sto.clear();
    CHECK(schedule_csv(s).find("\n0,1,2,0.5,0,0,2,0.5,400,300,\n") != std::string::npos);
}

TEST_CASE("size command writes validated artifacts") {
    const auto dir = scratch("size");
    auto c = RunConfig::from_yaml("profiles:\n  horizon: 24\n");
    c.out_dir = dir / "out";
    CHECK(cmd_size(c));
    REQUIRE(fs::exists(dir / "out" / "size.json"));
    std::ifstream in(dir / "out" / "size.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j.contains("sizing"));
    CHECK(j["sizing"]["solver"]["status"] == "optimal");
}

TEST_CASE("CLI exit codes") {
    const auto dir = scratch("cli");
    std::ofstream(dir / "bad.yaml") << "prices:\n  nope: 1\n";
    std::ofstream(dir / "infeasible.yaml") << "profiles:\n  horizon: 24\nscenario:\n  N_AE: 0\n";
    std::ofstream(dir / "ok.yaml") << "profiles:\n  horizon: 24\n";
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("frobnicate") == 4);
    CHECK(run_cli("size --config " + (dir / "bad.yaml").string()) == 4);
    CHECK(run_cli("size --config " + (dir / "missing.yaml").string()) == 4);
    CHECK(run_cli("size --config " + (dir / "infeasible.yaml").string() + " --out " + (dir / "o1").string()) == 2);
    CHECK(run_cli("size --config " + (dir / "ok.yaml").string() + " --out " + (dir / "o2").string()) == 0);
    CHECK(fs::exists(dir / "o2" / "size.json"));
    CHECK_FALSE(fs::exists(dir / "o1"));
}
