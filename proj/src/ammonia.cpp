#include "repta/ammonia.hpp"

#include <cmath>
#include <string>

#include "repta/errors.hpp"

namespace repta {

namespace {

constexpr double kMolarVolumeL = 22.414;  // L/mol at 0 °C, 1 atm
constexpr double kMolarMassN2 = 28.0134;  // g/mol

void require(bool ok, const char* what) {
    if (!ok) {
        throw ValidationError(what);
    }
}

}  // namespace

double n2_tonnes_per_nm3_h2() {
    const double mol_h2 = 1000.0 / kMolarVolumeL;
    return mol_h2 / 3.0 * kMolarMassN2 * 1e-6;
}

double derive_kappa_AS(const AmmoniaParams& params) {
    return params.kappa_N2 * n2_tonnes_per_nm3_h2() + params.kappa_NH3 * params.C_H2mA;
}

double AmmoniaParams::kappa_AS() const { return derive_kappa_AS(*this); }

void AmmoniaParams::validate() const {
    require(kappa_N2 >= 0.0 && kappa_NH3 >= 0.0, "ammonia energy coefficients must be >= 0");
    require(q_H2_rated >= 0.0 && std::isfinite(q_H2_rated), "rated H2 flow must be finite and >= 0");
    require(eta_AS_min > 0.0 && eta_AS_min < eta_AS_max, "need 0 < eta_AS_min < eta_AS_max");
    require(r_plus > 0.0 && r_minus > 0.0, "ramp limits must be positive");
    require(delta_T_AS > 0.0, "delta_T_AS must be positive");
    require(T_trans > 0.0, "T_trans must be positive");
    require(C_H2mA > 0.0, "C_H2mA must be positive");
}

double rated_h2_flow(double annual_nh3_t, double C_H2mA, double hours_per_year) {
    if (!(annual_nh3_t >= 0.0) || !(C_H2mA > 0.0) || !(hours_per_year > 0.0)) {
        throw DomainError("rated_h2_flow: invalid arguments");
    }
    return annual_nh3_t / (C_H2mA * hours_per_year);
}

double as_power(double q_H2_out, const AmmoniaParams& params) {
    if (!(q_H2_out >= 0.0)) {
        throw DomainError("hydrogen flow must be >= 0");
    }
    return params.kappa_AS() * q_H2_out;
}

double transition(double q_k, double q_k1, double T_trans, double tau) {
    if (!(T_trans > 0.0)) {
        throw DomainError("T_trans must be positive");
    }
    if (!(tau >= 0.0)) {
        throw DomainError("tau must be >= 0");
    }
    return q_k1 + (q_k - q_k1) * std::exp(-tau / T_trans);
}

std::vector<double> discretize_plan(const QssPlan& plan, const AmmoniaParams& params, double dt) {
    params.validate();
    if (!(dt > 0.0)) {
        throw DomainError("step length must be positive");
    }
    const double steps_real = params.delta_T_AS / dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (steps == 0 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9) {
        throw ValidationError("delta_T_AS must be a positive multiple of the step length");
    }
    const auto& s = plan.setpoints;
    if (s.empty()) {
        throw ValidationError("QSS plan has no setpoints");
    }
    const double q_r = params.q_H2_rated;
    const double tol = 1e-9 * std::max(1.0, q_r);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] < params.eta_AS_min * q_r - tol || s[k] > params.eta_AS_max * q_r + tol) {
            throw ValidationError("setpoint " + std::to_string(k) + " outside the ammonia load band");
        }
    }

    std::vector<double> q;
    q.reserve(s.size() * steps);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double next = s[(k + 1) % s.size()];
        for (std::size_t tau = 1; tau <= steps; ++tau) {
            q.push_back(transition(s[k], next, params.T_trans, static_cast<double>(tau) * dt));
        }
    }

    const double up = params.r_plus * q_r * dt + tol;
    const double down = params.r_minus * q_r * dt + tol;
    for (std::size_t t = 0; t < q.size(); ++t) {
        const double prev = q[(t + q.size() - 1) % q.size()];
        const double step = q[t] - prev;
        if (step > up || -step > down) {
            throw ValidationError("trajectory step at hour " + std::to_string(t) + " exceeds the ramp limit");
        }
    }
    return q;
}

TransitionFit fit_T_trans(std::span<const double> observed, double q_k, double q_k1, double dt, double T_lo,
                          double T_hi, double tol) {
    if (observed.size() < 3) {
        throw ValidationError("need at least three observations to fit T_trans");
    }
    if (q_k == q_k1) {
        throw DomainError("fit undefined: start and target setpoints coincide");
    }
    if (!(dt > 0.0) || !(T_lo > 0.0) || !(T_hi > T_lo) || !(tol > 0.0)) {
        throw DomainError("fit_T_trans: invalid search settings");
    }
    for (double v : observed) {
        if (!std::isfinite(v)) {
            throw ValidationError("observations must be finite");
        }
    }
    auto sse = [&](double T) {
        double s = 0.0;
        for (std::size_t i = 0; i < observed.size(); ++i) {
            const double r = observed[i] - transition(q_k, q_k1, T, static_cast<double>(i) * dt);
            s += r * r;
        }
        return s;
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = T_lo;
    double b = T_hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = sse(c);
    double fd = sse(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sse(d);
        }
    }
    // The bracket ends are candidates too (limiting cases sit on the bounds).
    double best = 0.5 * (a + b);
    double best_sse = sse(best);
    for (double cand : {T_lo, T_hi}) {
        const double v = sse(cand);
        if (v < best_sse) {
            best = cand;
            best_sse = v;
        }
    }
    return {best, std::sqrt(best_sse / static_cast<double>(observed.size()))};
}

}  // namespace repta
