#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "repta/economics.hpp"
#include "repta/milp.hpp"
#include "repta/profiles.hpp"

namespace repta {

enum class Scenario { proposed, bs1, bs2, bs3, bs4 };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);  // ConfigError on unknown names

// Constraint groups of the operation model. Used to name the culprit when a
// model turns out infeasible.
enum class Family { power_balance, electrolyzer, storage, grid_exchange, net_on_grid, ammonia_output, ammonia_flex };

std::string_view to_string(Family f);

// Search box for free capacities. A solution on the box edge raises a warning.
struct CapacityBox {
    double C_W_max = 2000.0;
    double C_S_max = 2000.0;
    int N_AE_max = 100;
    double C_HS_max = 5e6;
};

// Restricts capacities to integer multiples of a step, 0..steps.
struct CapacityGrid {
    double w_step = 0.0;
    int w_steps = 0;
    double s_step = 0.0;
    int s_steps = 0;
    int n_ae_max = 0;
    double hs_step = 0.0;
    int hs_steps = 0;
};

struct SizingOverrides {
    std::optional<double> C_W;
    std::optional<double> C_S;
    std::optional<int> N_AE;
    std::optional<double> C_HS;
    bool no_storage = false;
    std::optional<CapacityGrid> grid;
    CapacityBox box;
    std::set<Family> disabled;

    static SizingOverrides for_scenario(Scenario s, const TechnoEconomicConfig& cfg);
};

// A built Stage-I model plus what is needed to read a schedule back.
struct SizingModel {
    milp::Model model{"sizing"};
    TechnoEconomicConfig cfg;
    Profile wind, solar;
    SizingOverrides overrides;
    bool storage = true;

    milp::LinExpr C_W, C_S, N_AE, C_HS;
    std::vector<milp::Var> sell, purch, curt, p_ae, b_grid, n_sto, setpoint;
    std::vector<milp::Var> capacity_vars;  // free capacity variables, for box checks
};

SizingModel build_sizing_model(const TechnoEconomicConfig& cfg, const Profile& wind, const Profile& solar,
                               const SizingOverrides& overrides = {});

struct SolverInfo {
    std::string status;
    std::string backend;
    double objective = 0.0;
    double bound = 0.0;
    double gap = 0.0;
    double wall_time_s = 0.0;
    std::size_t num_vars = 0, num_rows = 0, num_binary = 0, num_integer = 0;
};

struct SizingResult {
    Capacities caps;
    Schedule schedule;
    double dtr = 0.0;  // RMB/yr
    AnnualInvestments invest_star;
    SolverInfo solver;
    bool optimal = false;
    std::vector<std::string> warnings;
};

// Solves, reconstructs and verifies the schedule. Throws InfeasibleError
// naming the constraint family whose removal restores feasibility, and
// SolverLimitError when a limit is hit with no incumbent.
SizingResult solve_sizing(SizingModel& m, const milp::SolveOptions& options = {});

SizingResult size_system(const TechnoEconomicConfig& cfg, const Profile& wind, const Profile& solar,
                         const SizingOverrides& overrides = {}, const milp::SolveOptions& options = {});

struct AuditIssue {
    std::string check;
    std::size_t index = 0;
    double amount = 0.0;
};

struct AuditReport {
    std::vector<AuditIssue> issues;
    bool clean() const { return issues.empty(); }
    std::string summary() const;
};

// Independent re-check of a schedule against the operation constraints
// (AE band, tank recursion/bounds/boundary, buy-xor-sell, net on-grid cap,
// power balance, ammonia cap, setpoint band, hourly ramp).
AuditReport audit_schedule(const Schedule& s, const Capacities& caps, const TechnoEconomicConfig& cfg,
                           double tol = 1e-6);

struct GridRates {
    double on_grid = 0.0;
    double off_grid = 0.0;
    double net_on_grid = 0.0;
    double curtailment = 0.0;
};

GridRates grid_rates(const Schedule& s);
double electrolyzer_flh(const Schedule& s, const Capacities& caps);

}  // namespace repta
