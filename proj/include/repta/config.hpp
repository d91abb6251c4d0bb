#pragma once

#include <cstddef>

#include "repta/ammonia.hpp"

namespace repta {

struct FacilityCost {
    double unit_cost = 0.0;    // RMB/kW (WT, PV, AE), RMB/Nm³ (HS), RMB per block (AS)
    double om_fraction = 0.0;  // O&M as a fraction of the unit cost
    int lifetime_years = 1;
};

// Techno-economic and operating parameters. Defaults reproduce the
// reference case (Inner Mongolia, 1e5 t/yr ammonia).
struct TechnoEconomicConfig {
    FacilityCost wt{6000.0, 0.02, 20};
    FacilityCost pv{4000.0, 0.02, 20};
    FacilityCost ae{3000.0, 0.03, 15};
    FacilityCost hs{250.0, 0.02, 15};
    FacilityCost as{0.33e9, 0.03, 15};
    double as_block_output_t = 1e5;  // annual output the AS block cost refers to

    double interest_rate = 0.08;
    double p_fit = 0.2829;    // RMB/kWh
    double p_purch = 0.4572;  // RMB/kWh
    double p_nh3 = 3200.0;    // RMB/t
    double r_net = 0.20;
    double annual_nh3_t = 1e5;
    double er_min_rg = 0.0;
    double er_min_aehs = 0.0;
    double er_min_as = 0.0;

    double c_ae_single_mw = 5.0;
    double kappa_h2_kwh_per_nm3 = 5.0;
    double eta_ae_min = 0.05;
    double eta_ae_max = 1.20;
    double eta_hs_min = 0.10;
    double eta_hs_max = 0.90;
    double hs_initial_fraction = 0.50;

    AmmoniaParams ammonia;  // q_H2_rated is derived, see ammonia_params()

    std::size_t horizon = 8760;
    double dt = 1.0;

    // Throws ConfigError on inconsistent values.
    void validate() const;

    double kappa_h2() const { return kappa_h2_kwh_per_nm3 * 1e-3; }  // MWh/Nm³
    AmmoniaParams ammonia_params() const;
    double horizon_hours() const { return static_cast<double>(horizon) * dt; }
    // Multiplier turning horizon cash flows into annual ones.
    double annualization() const { return 8760.0 / horizon_hours(); }
    // Ammonia cap for the modelled horizon.
    double horizon_nh3_cap_t() const { return annual_nh3_t / annualization(); }
    std::size_t steps_per_as_period() const;
};

}  // namespace repta
