#pragma once

#include <array>
#include <vector>

#include "repta/errors.hpp"
#include "repta/sizing.hpp"

namespace repta {

// p_inner = p_lo + (p_hi - p_lo) / N_p * sum(b_j). p_lo == p_hi pins the
// price and collapses the grid to a single binary.
struct PriceGrid {
    double p_lo = 0.0;
    double p_hi = 0.5;
    int N_p = 128;

    bool degenerate() const { return p_lo == p_hi; }
    double step() const { return degenerate() ? 0.0 : (p_hi - p_lo) / N_p; }
};

struct PricingModel {
    milp::Model model{"pricing"};
    PriceGrid grid;
    double step = 0.0;
    std::vector<milp::Var> b;
    std::vector<milp::Var> z_ae, z_as;  // b_j * E_AE,inner and b_j * E_AS,inner
    milp::Var p_h2, e_ae, e_as, w1, w2;
    std::vector<milp::Var> ae_inner, ae_purch, as_inner, as_purch;
    milp::LinExpr er_rg, er_aehs, er_as;
};

// Stage II on a frozen Stage-I solution. Throws DomainError for an invalid
// grid or an investor part with zero investment (its ER is undefined).
PricingModel build_pricing_model(const SizingResult& stage1, const TechnoEconomicConfig& cfg,
                                 const PriceGrid& grid = {}, double p_h2_max = 5.0);

struct PricingResult {
    PriceSet prices;
    Distribution dist;
    InvestorLedger ledger;
    ErReport er;
    double objective = 0.0;  // w1 + w2
    SolverInfo solver;
};

// Raised when no grid price satisfies the minimum earnings ratios.
// `best_er` holds the (RG, AEHS, AS) triple that maximizes the smallest
// margin over ER_min, reached at `best_prices`.
class ErUnreachableError : public InfeasibleError {
public:
    ErUnreachableError(const std::string& what, std::array<double, 3> best_er, PriceSet best_prices)
        : InfeasibleError(what, "earnings_ratio"), best_er_(best_er), best_prices_(best_prices) {}
    const std::array<double, 3>& best_er() const { return best_er_; }
    const PriceSet& best_prices() const { return best_prices_; }

private:
    std::array<double, 3> best_er_;
    PriceSet best_prices_;
};

PricingResult solve_pricing(PricingModel& m, const SizingResult& stage1, const TechnoEconomicConfig& cfg,
                            const milp::SolveOptions& options = {});

PricingResult price_system(const SizingResult& stage1, const TechnoEconomicConfig& cfg, const PriceGrid& grid = {},
                           const milp::SolveOptions& options = {});

}  // namespace repta
