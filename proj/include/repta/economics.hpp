#pragma once

#include <span>
#include <string>
#include <vector>

#include "repta/config.hpp"

namespace repta {

double crf(double r, int years);

struct Capacities {
    double C_W = 0.0;   // MW
    double C_S = 0.0;   // MW
    int N_AE = 0;
    double C_AE = 0.0;  // MW, N_AE * unit size
    double C_HS = 0.0;  // Nm³
};

// Hourly operation. n_sto has N+1 entries, or none when there is no tank.
struct Schedule {
    double dt = 1.0;
    std::vector<double> P_W, P_S, P_sell, P_purch, P_curt, P_AE, P_AS;
    std::vector<double> b_grid;
    std::vector<double> q_in, q_out;
    std::vector<double> n_sto;
    std::vector<double> setpoints;
    double delta_T_AS = 24.0;
    double m_nh3 = 0.0;  // t over the horizon

    std::size_t size() const { return P_AE.size(); }
    bool has_storage() const { return !n_sto.empty(); }
    // P_W + P_S - P_sell - P_curt: renewable power kept inside the system.
    double P_inner(std::size_t t) const { return P_W[t] + P_S[t] - P_sell[t] - P_curt[t]; }
};

struct PriceSet {
    double p_inner = 0.0;     // RMB/kWh
    double p_h2_inner = 0.0;  // RMB/Nm³
    double p_fit = 0.0;
    double p_purch = 0.0;
    double p_nh3 = 0.0;

    static PriceSet market(const TechnoEconomicConfig& cfg, double p_inner = 0.0, double p_h2_inner = 0.0);
};

// Split of the AE and AS loads between renewable (inner) and grid power.
struct Distribution {
    std::vector<double> P_AE_inner, P_AE_purch, P_AS_inner, P_AS_purch;
    double E_AE_inner = 0.0;  // MWh over the horizon
    double E_AS_inner = 0.0;

    // Any valid split: AE takes inner power first, the rest goes to AS.
    static Distribution ae_first(const Schedule& schedule);
};

// Annualized investment per investor part, RMB/yr.
struct AnnualInvestments {
    double rg = 0.0;
    double aehs = 0.0;
    double as = 0.0;
    double total() const { return rg + aehs + as; }
};

AnnualInvestments annual_investments(const Capacities& caps, const TechnoEconomicConfig& cfg);

struct InvestorAccount {
    double profit = 0.0;  // RMB/yr
    double invest = 0.0;  // RMB/yr
    double net = 0.0;     // profit - invest
    double er = 0.0;      // NaN when invest == 0
};

struct InvestorLedger {
    InvestorAccount rg, aehs, as;
    double total = 0.0;      // J, RMB/yr
    double system_er = 0.0;  // J / total investment
    double m_nh3 = 0.0;      // t over the horizon
};

// Throws InconsistencyError if the split breaks the distribution identities
// by more than 1e-6 (relative to the power level).
InvestorLedger ledger(const Schedule& schedule, const Capacities& caps, const PriceSet& prices,
                      const Distribution& dist, const TechnoEconomicConfig& cfg);

// The part of J that carries the inner prices, annualized. Zero whenever
// the split identities hold and the tank ends where it started.
double inner_price_term(const Schedule& schedule, const Distribution& dist, const PriceSet& prices,
                        const TechnoEconomicConfig& cfg);

// Largest pairwise |J(p) - J(p')| across `samples`. Throws PreconditionError
// when the tank does not close its cycle.
double price_invariance_gap(const Schedule& schedule, const Capacities& caps, const Distribution& dist,
                          const TechnoEconomicConfig& cfg, std::span<const PriceSet> samples);

// Constraint ER_i,min * invest_i <= J_i per investor.
struct ErCheck {
    bool rg = true;
    bool aehs = true;
    bool as = true;
    bool all() const { return rg && aehs && as; }
};
ErCheck check_min_er(const InvestorLedger& l, const TechnoEconomicConfig& cfg, double tol = 1e-9);

struct ErReport {
    double er_rg = 0.0, er_aehs = 0.0, er_as = 0.0;
    double dev_rg_aehs = 0.0, dev_aehs_as = 0.0;
    double deviation_sum = 0.0;
};

// Throws DomainError naming the investor whose ER is undefined.
ErReport er_report(const InvestorLedger& l);

inline constexpr double kRmbPerReportUnit = 1e4;  // totals reported in 10^4 RMB/yr

}  // namespace repta
