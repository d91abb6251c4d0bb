#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <array>
#include <limits>
#include <vector>

#include "repta/economics.hpp"
#include "repta/pricing.hpp"
#include "repta/profiles.hpp"

namespace repta::testing {

struct RandomCase {
    Capacities caps;
    Schedule schedule;
};

// A schedule that satisfies every operation constraint by construction:
// setpoints inside a band narrower than one ramp step, a zero-sum tank
// excursion that stays inside 10-90 %, an electrolyzer sized for the peak
// inflow, and grid exchange that closes the power balance.
inline RandomCase random_feasible_schedule(std::mt19937_64& rng, const TechnoEconomicConfig& cfg,
                                           const Profile& wind, const Profile& solar) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const AmmoniaParams am = cfg.ammonia_params();
    const std::size_t N = cfg.horizon;
    const std::size_t S = cfg.steps_per_as_period();
    const std::size_t K = N / S;
    const double q_r = am.q_H2_rated;
    const double dt = cfg.dt;

    RandomCase rc;
    Capacities& c = rc.caps;
    Schedule& s = rc.schedule;
    s.dt = dt;
    s.delta_T_AS = am.delta_T_AS;

    // Setpoints within [0.55, 0.75] q_r: any two differ by less than 20 %/h.
    s.setpoints.resize(K);
    for (auto& v : s.setpoints) v = q_r * (0.55 + 0.2 * U(rng));
    s.q_out.resize(N);
    for (std::size_t t = 0; t < N; ++t) s.q_out[t] = s.setpoints[t / S];

    // Tank excursion: a random walk shifted to sum to zero, scaled into the
    // 10-90 % band around the 50 % start.
    std::vector<double> delta(N);
    double mean = 0.0;
    for (auto& d : delta) {
        d = U(rng) - 0.5;
        mean += d;
    }
    mean /= static_cast<double>(N);
    for (auto& d : delta) d -= mean;
    double level = 0.0, peak = 0.0;
    for (double d : delta) {
        level += d * dt;
        peak = std::max(peak, std::abs(level));
    }
    c.C_HS = 1e4 + 2e5 * U(rng);
    const double room = 0.35 * c.C_HS;  // below the 40 % margin to either bound
    const double k = peak > 0.0 ? std::min(room / peak, 0.3 * q_r) : 0.0;
    s.q_in.resize(N);
    s.n_sto.assign(N + 1, 0.5 * c.C_HS);
    for (std::size_t t = 0; t < N; ++t) {
        s.q_in[t] = s.q_out[t] + k * delta[t];
        s.n_sto[t + 1] = s.n_sto[t] + (s.q_in[t] - s.q_out[t]) * dt;
    }
    s.n_sto[N] = s.n_sto[0];

    s.P_AE.resize(N);
    double peak_ae = 0.0, low_ae = 1e300;
    for (std::size_t t = 0; t < N; ++t) {
        s.P_AE[t] = cfg.kappa_h2() * s.q_in[t];
        peak_ae = std::max(peak_ae, s.P_AE[t]);
        low_ae = std::min(low_ae, s.P_AE[t]);
    }
    c.N_AE = static_cast<int>(std::ceil(peak_ae / (cfg.eta_ae_max * cfg.c_ae_single_mw)));
    c.C_AE = c.N_AE * cfg.c_ae_single_mw;
    if (low_ae < cfg.eta_ae_min * c.C_AE) {
        // Keep the minimum load feasible by trimming the excursion.
        throw std::logic_error("random schedule: electrolyzer minimum load not met");
    }

    c.C_W = 50.0 + 300.0 * U(rng);
    c.C_S = 300.0 * U(rng);
    const double sell_share = 0.15 * U(rng);
    s.P_W.resize(N);
    s.P_S.resize(N);
    s.P_AS.resize(N);
    s.P_sell.assign(N, 0.0);
    s.P_purch.assign(N, 0.0);
    s.P_curt.assign(N, 0.0);
    s.b_grid.assign(N, 1.0);
    double h2 = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        s.P_W[t] = c.C_W * wind.values[t];
        s.P_S[t] = c.C_S * solar.values[t];
        s.P_AS[t] = am.kappa_AS() * s.q_out[t];
        const double surplus = s.P_W[t] + s.P_S[t] - s.P_AE[t] - s.P_AS[t];
        if (surplus >= 0.0) {
            s.P_sell[t] = sell_share * surplus;
            s.P_curt[t] = surplus - s.P_sell[t];
        } else {
            s.P_purch[t] = -surplus;
            s.b_grid[t] = 0.0;
        }
        h2 += s.q_out[t];
    }
    s.m_nh3 = am.C_H2mA * dt * h2;
    return rc;
}

// Uniformly random split satisfying the three hourly identities.
inline Distribution random_distribution(std::mt19937_64& rng, const Schedule& s) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Distribution d;
    const std::size_t N = s.size();
    d.P_AE_inner.resize(N);
    d.P_AE_purch.resize(N);
    d.P_AS_inner.resize(N);
    d.P_AS_purch.resize(N);
    for (std::size_t t = 0; t < N; ++t) {
        const double inner = s.P_inner(t);
        const double lo = std::max(0.0, inner - s.P_AS[t]);
        const double hi = std::min(s.P_AE[t], inner);
        const double a = lo + (hi - lo) * U(rng);
        d.P_AE_inner[t] = a;
        d.P_AS_inner[t] = inner - a;
        d.P_AE_purch[t] = s.P_AE[t] - a;
        d.P_AS_purch[t] = s.P_AS[t] - d.P_AS_inner[t];
        d.E_AE_inner += s.dt * d.P_AE_inner[t];
        d.E_AS_inner += s.dt * d.P_AS_inner[t];
    }
    return d;
}

struct PricingOptimum {
    double objective = std::numeric_limits<double>::quiet_NaN();  // NaN: ER minimums unreachable
    double p_inner = 0.0;
    double p_h2 = 0.0;
};

// Closed-form Stage II: for each grid price the ERs are affine in the
// hydrogen price x and the horizon inner energy y sent to the electrolyzers,
// so |ER_RG - ER_AEHS| + |ER_AEHS - ER_AS| is minimized at a vertex of the
// line arrangement formed by the box edges, the kinks and the ER floors.
inline PricingOptimum pricing_oracle(const SizingResult& st, const TechnoEconomicConfig& cfg, const PriceGrid& grid,
                                     double p_h2_max) {
    const Schedule& s = st.schedule;
    const AnnualInvestments& I = st.invest_star;
    const double w = cfg.annualization();
    const double C = cfg.ammonia.C_H2mA;
    double Q_in = 0.0, Q_out = 0.0, A = 0.0, B = 0.0, E = 0.0, sold = 0.0, y_lo = 0.0, y_hi = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
        const double inner = std::max(0.0, s.P_inner(t));
        Q_in += s.dt * s.q_in[t];
        Q_out += s.dt * s.q_out[t];
        A += s.dt * s.P_AE[t];
        B += s.dt * s.P_AS[t];
        E += s.dt * inner;
        sold += s.dt * s.P_sell[t];
        y_lo += s.dt * std::max(0.0, inner - s.P_AS[t]);
        y_hi += s.dt * std::min(s.P_AE[t], inner);
    }
    struct Line {
        double a, b, c;  // a x + b y + c
        double at(double x, double y) const { return a * x + b * y + c; }
    };
    PricingOptimum best;
    const int n = grid.degenerate() ? 0 : grid.N_p;
    for (int k = 0; k <= n; ++k) {
        const double P = grid.p_lo + grid.step() * k;
        const double er_rg = w * 1000.0 * (cfg.p_fit * sold + P * E) / I.rg - 1.0;
        if (er_rg < cfg.er_min_rg - 1e-12) continue;
        const Line aehs{w * Q_in / I.aehs, w * 1000.0 * (cfg.p_purch - P) / I.aehs,
                        -w * 1000.0 * cfg.p_purch * A / I.aehs - 1.0};
        const Line as{-w * Q_out / I.as, w * 1000.0 * (P - cfg.p_purch) / I.as,
                      w * (cfg.p_nh3 * C * Q_out - 1000.0 * (P * E + cfg.p_purch * (B - E))) / I.as - 1.0};
        const std::vector<Line> lines{{1.0, 0.0, 0.0},
                                      {1.0, 0.0, -p_h2_max},
                                      {0.0, 1.0, -y_lo},
                                      {0.0, 1.0, -y_hi},
                                      {aehs.a, aehs.b, aehs.c - er_rg},
                                      {aehs.a - as.a, aehs.b - as.b, aehs.c - as.c},
                                      {aehs.a, aehs.b, aehs.c - cfg.er_min_aehs},
                                      {as.a, as.b, as.c - cfg.er_min_as}};
        for (std::size_t i = 0; i < lines.size(); ++i) {
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                const Line& l1 = lines[i];
                const Line& l2 = lines[j];
                const double det = l1.a * l2.b - l2.a * l1.b;
                if (std::abs(det) < 1e-300) continue;
                const double x = (-l1.c * l2.b + l2.c * l1.b) / det;
                const double y = (-l1.a * l2.c + l2.a * l1.c) / det;
                const double ey = 1e-9 * std::max(1.0, y_hi);
                if (x < -1e-12 || x > p_h2_max + 1e-12 || y < y_lo - ey || y > y_hi + ey) continue;
                const double e1 = aehs.at(x, y), e2 = as.at(x, y);
                if (e1 < cfg.er_min_aehs - 1e-9 || e2 < cfg.er_min_as - 1e-9) continue;
                const double obj = std::abs(er_rg - e1) + std::abs(e1 - e2);
                if (std::isnan(best.objective) || obj < best.objective) best = {obj, P, x};
            }
        }
    }
    return best;
}

}  // namespace repta::testing
