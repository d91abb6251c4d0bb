#pragma once

#include <map>
#include <utility>

#include "repta/sizing.hpp"

namespace repta {

// Lower edge of the uncertainty set: both profiles scaled by (1 - alpha).
std::pair<Profile, Profile> worst_case_profiles(const Profile& wind, const Profile& solar, double alpha);

struct IgdtResult {
    double beta = 0.0;
    double alpha_star = 0.0;
    double C_HS_robust = 0.0;  // Nm³
    double r_AS = 0.0;         // m_NH3 / nominal output
    double rtr = 0.0;          // RMB/yr, revenue at alpha_star
    double dtr = 0.0;          // RMB/yr, the reference
    bool alpha_saturated = false;  // even alpha = 1 keeps the revenue target
    int evaluations = 0;
    SizingResult at_alpha;     // operation re-optimized at alpha_star
};

struct RobustOptions {
    double alpha_tol = 1e-3;
    milp::SolveOptions solve;
};

// Revenue evaluator at fixed WT/PV/AE capacities; results are cached by
// alpha so repeated queries (across beta values too) agree exactly. Not
// thread-safe: give each worker its own instance.
class RobustEvaluator {
public:
    RobustEvaluator(const SizingResult& deterministic, const TechnoEconomicConfig& cfg, const Profile& wind,
                    const Profile& solar, milp::SolveOptions options = {});

    // Best revenue at uncertainty horizon alpha (operations and tank
    // re-optimized). Infeasible operation yields nullptr.
    const SizingResult* evaluate(double alpha);
    double dtr() const { return dtr_; }
    const TechnoEconomicConfig& config() const { return cfg_; }
    int solves() const { return solves_; }

private:
    SizingOverrides pins_;
    TechnoEconomicConfig cfg_;
    Profile wind_, solar_;
    milp::SolveOptions options_;
    double dtr_;
    std::map<double, std::optional<SizingResult>> cache_;
    int solves_ = 0;
};

// Largest alpha in [0, 1] (to alpha_tol) whose worst-case revenue is at
// least (1 - beta) * DTR.
IgdtResult solve_robust(RobustEvaluator& evaluator, double beta, const RobustOptions& options = {});

IgdtResult solve_robust(const SizingResult& deterministic, double beta, const TechnoEconomicConfig& cfg,
                        const Profile& wind, const Profile& solar, const RobustOptions& options = {});

}  // namespace repta
