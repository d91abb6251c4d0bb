#include "repta/config.hpp"

#include <cmath>
#include <string>

#include "repta/errors.hpp"

namespace repta {

namespace {

void check(bool ok, const std::string& what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

void check_cost(const FacilityCost& c, const char* name) {
    check(std::isfinite(c.unit_cost) && c.unit_cost >= 0.0, std::string(name) + ": unit cost must be >= 0");
    check(std::isfinite(c.om_fraction) && c.om_fraction >= 0.0, std::string(name) + ": O&M fraction must be >= 0");
    check(c.lifetime_years >= 1, std::string(name) + ": lifetime must be >= 1 year");
}

}  // namespace

void TechnoEconomicConfig::validate() const {
    check_cost(wt, "WT");
    check_cost(pv, "PV");
    check_cost(ae, "AE");
    check_cost(hs, "HS");
    check_cost(as, "AS");
    check(as_block_output_t > 0.0, "AS block output must be positive");
    check(interest_rate > 0.0, "interest rate must be positive");
    check(p_fit >= 0.0 && p_purch >= 0.0 && p_nh3 >= 0.0, "market prices must be >= 0");
    check(r_net >= 0.0, "r_net must be >= 0");
    check(annual_nh3_t > 0.0, "nominal ammonia output must be positive");
    check(c_ae_single_mw > 0.0, "electrolyzer unit size must be positive");
    check(kappa_h2_kwh_per_nm3 > 0.0, "kappa_H2 must be positive");
    check(eta_ae_min >= 0.0 && eta_ae_min <= eta_ae_max, "need 0 <= eta_AE_min <= eta_AE_max");
    check(eta_hs_min >= 0.0 && eta_hs_min <= hs_initial_fraction && hs_initial_fraction <= eta_hs_max &&
              eta_hs_max <= 1.0,
          "need 0 <= eta_HS_min <= initial fraction <= eta_HS_max <= 1");
    check(horizon > 0 && dt > 0.0, "horizon and step must be positive");
    try {
        ammonia_params().validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    steps_per_as_period();
}

AmmoniaParams TechnoEconomicConfig::ammonia_params() const {
    AmmoniaParams p = ammonia;
    p.q_H2_rated = rated_h2_flow(annual_nh3_t, p.C_H2mA);
    return p;
}

std::size_t TechnoEconomicConfig::steps_per_as_period() const {
    const double s = ammonia.delta_T_AS / dt;
    const auto steps = static_cast<std::size_t>(std::llround(s));
    if (steps == 0 || std::abs(s - static_cast<double>(steps)) > 1e-9 || horizon % steps != 0) {
        throw ConfigError("delta_T_AS = " + std::to_string(ammonia.delta_T_AS) + " h does not divide the " +
                          std::to_string(horizon) + "-step horizon");
    }
    return steps;
}

}  // namespace repta
