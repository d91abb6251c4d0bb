#pragma once

#include <span>
#include <vector>

namespace repta {

inline constexpr double kNm3PerKgH2 = 11.126;

// Ammonia synthesis (PSA + Haber-Bosch) parameters. Flows in Nm³/h.
struct AmmoniaParams {
    double kappa_N2 = 0.24;    // MWh per tonne N2
    double kappa_NH3 = 0.64;   // MWh per tonne NH3
    double q_H2_rated = 0.0;   // Nm³/h
    double eta_AS_min = 0.30;
    double eta_AS_max = 1.10;
    double r_plus = 0.20;      // per-unit of rated flow per hour
    double r_minus = 0.20;
    double delta_T_AS = 24.0;  // h
    double T_trans = 2.0;      // h
    double C_H2mA = 5.060e-4;  // t NH3 per Nm³ H2

    double kappa_AS() const;
    void validate() const;
};

// Tonnes of N2 needed per Nm³ of H2 at the 3:1 H2:N2 molar ratio.
double n2_tonnes_per_nm3_h2();

// MWh per Nm³ H2 consumed by nitrogen separation plus synthesis.
double derive_kappa_AS(const AmmoniaParams& params);

// Rated H2 flow of a plant producing `annual_nh3_t` at full load all year.
double rated_h2_flow(double annual_nh3_t, double C_H2mA, double hours_per_year = 8760.0);

double as_power(double q_H2_out, const AmmoniaParams& params);

// First-order relaxation from q_k towards q_k1 after tau hours.
double transition(double q_k, double q_k1, double T_trans, double tau);

struct QssPlan {
    std::vector<double> setpoints;  // one per scheduling period, Nm³/h
};

// Hourly trajectory of a QSS plan. Period k relaxes from setpoint k towards
// setpoint k+1 (the last period wraps to the first) and is sampled at the
// right end of every step. Throws ValidationError for setpoints outside the
// load band or a trajectory step beyond the ramp limits.
std::vector<double> discretize_plan(const QssPlan& plan, const AmmoniaParams& params, double dt = 1.0);

struct TransitionFit {
    double T_trans = 0.0;
    double rmse = 0.0;
};

// Least-squares time constant for observations taken at tau = 0, dt, 2dt...
TransitionFit fit_T_trans(std::span<const double> observed, double q_k, double q_k1, double dt = 1.0,
                          double T_lo = 0.05, double T_hi = 50.0, double tol = 1e-4);

}  // namespace repta
