// Acceptance run: one PASS/FAIL line per criterion.

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "repta/pipeline.hpp"
#include "support.hpp"

using namespace repta;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Every optimal schedule produced during the run, audited for criterion 8.
struct AuditLog {
    int schedules = 0;
    int violations = 0;
    std::string first;

    void add(const SizingResult& r, const TechnoEconomicConfig& cfg) {
        if (!r.optimal) return;
        ++schedules;
        const auto rep = audit_schedule(r.schedule, r.caps, cfg, 1e-6);
        violations += static_cast<int>(rep.issues.size());
        if (!rep.clean() && first.empty()) first = rep.summary();
    }
};

AuditLog g_audit;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Instance {
    TechnoEconomicConfig cfg;
    Profile wind, solar;
};

Instance instance(std::size_t hours, std::uint64_t seed = 1) {
    Instance in;
    in.cfg.horizon = hours;
    const double share = static_cast<double>(hours) / 8760.0;
    in.wind = synthesize_profile(ProfileKind::wind, 3500.0 * share, seed, hours);
    in.solar = synthesize_profile(ProfileKind::solar, 1800.0 * share, seed + 1, hours);
    return in;
}

milp::SolveOptions tight() {
    milp::SolveOptions o;
    o.relative_gap = 1e-9;
    return o;
}

// ------------------------------------------------------------------ 1

Outcome price_invariance() {
    const auto in = instance(168, 11);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    int bad_schedules = 0;
    for (int k = 0; k < 20; ++k) {
        const auto rc = testing::random_feasible_schedule(rng, in.cfg, in.wind, in.solar);
        if (!audit_schedule(rc.schedule, rc.caps, in.cfg).clean()) ++bad_schedules;
        const auto d = testing::random_distribution(rng, rc.schedule);
        std::vector<PriceSet> prices;
        for (int j = 0; j < 10; ++j) prices.push_back(PriceSet::market(in.cfg, U(rng), 5.0 * U(rng)));
        const double J = ledger(rc.schedule, rc.caps, prices[0], d, in.cfg).total;
        worst = std::max(worst, price_invariance_gap(rc.schedule, rc.caps, d, in.cfg, prices) / std::abs(J));
    }
    return {worst <= 1e-6 && bad_schedules == 0,
            "max relative deviation " + num(worst) + " over 20 schedules x 10 price pairs, " +
                std::to_string(bad_schedules) + " infeasible generated schedules"};
}

// ------------------------------------------------------------------ 2

// Operation LP at fixed capacities, written from the model equations
// without the sizing builder. The grid-mode binary is left out: with
// p_purch > p_fit, buying and selling in the same hour can always be netted
// to a strictly better point, so the relaxation is exact.
std::optional<SizingResult> operation_lp(const Instance& in, const Capacities& c) {
    const auto& cfg = in.cfg;
    const AmmoniaParams am = cfg.ammonia_params();
    const std::size_t N = cfg.horizon;
    const std::size_t S = cfg.steps_per_as_period();
    const std::size_t K = N / S;
    const double dt = cfg.dt;
    const double w = cfg.annualization();
    const double q_r = am.q_H2_rated;
    using milp::LinExpr;

    milp::Model m("operation");
    std::vector<milp::Var> sell, buy, curt, ae, n, q;
    for (std::size_t k = 0; k < K; ++k) q.push_back(m.add_continuous(am.eta_AS_min * q_r, am.eta_AS_max * q_r));
    for (std::size_t t = 0; t <= N; ++t) {
        n.push_back(m.add_continuous(cfg.eta_hs_min * c.C_HS, cfg.eta_hs_max * c.C_HS));
    }
    m.add_constraint(LinExpr(n.front()) == LinExpr(cfg.hs_initial_fraction * c.C_HS));
    m.add_constraint(LinExpr(n.back()) == LinExpr(cfg.hs_initial_fraction * c.C_HS));
    LinExpr net, out, obj;
    double gen_total = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        const double gen = c.C_W * in.wind.values[t] + c.C_S * in.solar.values[t];
        sell.push_back(m.add_continuous(0.0, milp::kInf));
        buy.push_back(m.add_continuous(0.0, milp::kInf));
        curt.push_back(m.add_continuous(0.0, milp::kInf));
        ae.push_back(m.add_continuous(cfg.eta_ae_min * c.C_AE, cfg.eta_ae_max * c.C_AE));
        const milp::Var qk = q[t / S];
        m.add_constraint(LinExpr(sell[t]) + curt[t] + ae[t] + am.kappa_AS() * LinExpr(qk) - buy[t] == LinExpr(gen));
        m.add_constraint(LinExpr(sell[t]) + curt[t] <= LinExpr(gen));
        m.add_constraint(LinExpr(n[t + 1]) == LinExpr(n[t]) + (dt / cfg.kappa_h2()) * LinExpr(ae[t]) - dt * LinExpr(qk));
        net += dt * (LinExpr(sell[t]) - buy[t]);
        gen_total += dt * gen;
        out += dt * LinExpr(qk);
        obj += w * dt * 1000.0 * (cfg.p_fit * LinExpr(sell[t]) - cfg.p_purch * LinExpr(buy[t]));
    }
    m.add_constraint(net <= LinExpr(cfg.r_net * gen_total));
    m.add_constraint(am.C_H2mA * out <= LinExpr(cfg.horizon_nh3_cap_t()));
    for (std::size_t k = 0; K > 1 && k < K; ++k) {
        const LinExpr step = LinExpr(q[k]) - q[(k + K - 1) % K];
        m.add_constraint(step <= LinExpr(am.r_plus * q_r * dt));
        m.add_constraint(step >= LinExpr(-am.r_minus * q_r * dt));
    }
    obj += (w * cfg.p_nh3 * am.C_H2mA) * out;
    m.set_objective(obj, milp::ObjectiveSense::maximize);
    const auto r = milp::solve(m, tight());
    if (r.status != milp::SolveStatus::optimal) return std::nullopt;

    SizingResult res;
    res.caps = c;
    res.invest_star = annual_investments(c, cfg);
    res.dtr = r.objective - res.invest_star.total();
    res.optimal = true;
    Schedule& s = res.schedule;
    s.dt = dt;
    s.delta_T_AS = am.delta_T_AS;
    for (std::size_t k = 0; k < K; ++k) s.setpoints.push_back(r.value(q[k]));
    double h2 = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        s.P_W.push_back(c.C_W * in.wind.values[t]);
        s.P_S.push_back(c.C_S * in.solar.values[t]);
        s.P_sell.push_back(r.value(sell[t]));
        s.P_purch.push_back(r.value(buy[t]));
        s.P_curt.push_back(r.value(curt[t]));
        s.P_AE.push_back(r.value(ae[t]));
        s.q_out.push_back(s.setpoints[t / S]);
        s.P_AS.push_back(am.kappa_AS() * s.q_out[t]);
        s.q_in.push_back(s.P_AE[t] / cfg.kappa_h2());
        s.b_grid.push_back(s.P_purch[t] > 0.0 ? 0.0 : 1.0);
        h2 += s.q_out[t];
    }
    if (c.C_HS > 0.0) {
        for (auto v : n) s.n_sto.push_back(r.value(v));
    }
    s.m_nh3 = am.C_H2mA * dt * h2;
    return res;
}

Instance toy() { return instance(24, 1); }

CapacityGrid toy_grid() {
    CapacityGrid g;
    g.w_step = 50.0;
    g.w_steps = 7;
    g.s_step = 50.0;
    g.s_steps = 7;
    g.n_ae_max = 19;
    g.hs_step = 2e4;
    g.hs_steps = 5;
    return g;
}

Outcome two_stage_vs_joint() {
    const Instance in = toy();
    const CapacityGrid g = toy_grid();
    const PriceGrid pg{0.0, 0.5, 8};
    const double p_h2_max = 5.0;

    // Decomposed pipeline.
    SizingOverrides o;
    o.grid = g;
    const SizingResult st = size_system(in.cfg, in.wind, in.solar, o, tight());
    validate_sizing(st, in.cfg);
    g_audit.add(st, in.cfg);
    PricingModel pm = build_pricing_model(st, in.cfg, pg, p_h2_max);
    const PricingResult pr = solve_pricing(pm, st, in.cfg, tight());

    // Joint enumeration.
    std::optional<SizingResult> best;
    int tuples = 0;
    for (int i = 0; i <= g.w_steps; ++i) {
        for (int j = 0; j <= g.s_steps; ++j) {
            for (int a = 0; a <= g.n_ae_max; ++a) {
                for (int h = 0; h <= g.hs_steps; ++h) {
                    ++tuples;
                    Capacities c{i * g.w_step, j * g.s_step, a, a * in.cfg.c_ae_single_mw, h * g.hs_step};
                    auto r = operation_lp(in, c);
                    if (r && (!best || r->dtr > best->dtr)) best = std::move(r);
                }
            }
        }
    }
    if (!best) return {false, "enumeration found no feasible tuple"};
    g_audit.add(*best, in.cfg);
    const auto oracle = testing::pricing_oracle(*best, in.cfg, pg, p_h2_max);
    const double dtr_dev = std::abs(st.dtr - best->dtr) / std::abs(best->dtr);
    const double price_dev = std::abs(pr.objective - oracle.objective) / std::max(1.0, std::abs(oracle.objective));
    return {dtr_dev <= 1e-6 && price_dev <= 1e-6,
            std::to_string(tuples) + " tuples; DTR " + num(st.dtr / kRmbPerReportUnit) + " vs " +
                num(best->dtr / kRmbPerReportUnit) + " (rel " + num(dtr_dev) + "); pricing objective " +
                num(pr.objective) + " vs " + num(oracle.objective) + " (rel " + num(price_dev) + ")"};
}

// ------------------------------------------------------------------ 3

Outcome igdt() {
    const auto in = instance(336, 1);
    const SizingResult det = size_system(in.cfg, in.wind, in.solar);
    g_audit.add(det, in.cfg);
    RobustEvaluator ev(det, in.cfg, in.wind, in.solar);
    RobustOptions opt;
    opt.alpha_tol = 1e-3;
    bool ok = true;
    std::string why;
    double prev_alpha = -1.0, prev_ras = 2.0;
    std::ostringstream curve;
    for (int i = 0; i <= 5; ++i) {
        const double beta = 0.2 * i;
        const auto r = solve_robust(ev, beta, opt);
        g_audit.add(r.at_alpha, in.cfg);
        curve << (i ? ", " : "") << num(r.alpha_star);
        const double target = (1.0 - beta) * det.dtr - 1e-6 * std::abs(det.dtr);
        if (r.alpha_star < prev_alpha) ok = false, why += " alpha* decreased at beta=" + num(beta) + ";";
        if (r.r_AS > prev_ras + 1e-9) ok = false, why += " r_AS increased at beta=" + num(beta) + ";";
        if (r.rtr < target) ok = false, why += " RTR below target at beta=" + num(beta) + ";";
        if (i == 0 && r.alpha_star > 1e-3) ok = false, why += " alpha*(0) above tolerance;";
        prev_alpha = r.alpha_star;
        prev_ras = r.r_AS;
    }
    // The bisection relies on worst-case revenue falling with alpha.
    double prev = INFINITY;
    for (double a : {0.0, 0.02, 0.05, 0.1, 0.2}) {
        const SizingResult* r = ev.evaluate(a);
        if (r == nullptr || r->dtr > prev + 1e-6 * std::abs(prev)) ok = false, why += " inner revenue not monotone;";
        if (r != nullptr) prev = r->dtr;
    }
    return {ok, "alpha*(beta = 0, 0.2, ..., 1) = " + curve.str() + "; " + std::to_string(ev.solves()) + " solves" + why};
}

// ------------------------------------------------------------------ 4

Outcome benchmark() {
    RunConfig cfg;
    cfg.tech.horizon = 720;
    cfg.solve.relative_gap = 1e-4;
    const auto [wind, solar] = obtain_profiles(cfg);
    const std::vector<Scenario> order{Scenario::bs1, Scenario::bs2, Scenario::bs3, Scenario::bs4, Scenario::proposed};
    const auto rows = parallel_map<BenchmarkRow>(order.size(), cfg.worker_count(),
                                                 [&](std::size_t i) { return run_benchmark(order[i], cfg, wind, solar); });
    for (const auto& r : rows) g_audit.add(r.sizing, cfg.tech);
    const double proposed = rows.back().sizing.dtr;
    const double tol = 1e-4 * std::abs(proposed);
    bool ok = true;
    std::ostringstream d;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const double v = rows[k].sizing.dtr;
        ok = ok && proposed >= v - tol;
        if (rows[k].scenario == Scenario::bs4) ok = ok && proposed > v + tol;
        d << to_string(rows[k].scenario) << " " << num(v / kRmbPerReportUnit) << ", ";
    }
    d << "Proposed " << num(proposed / kRmbPerReportUnit) << " (1e4 RMB/yr)";

    const auto rep = nlohmann::json::parse(bench_report(rows, cfg));
    const std::vector<std::string> columns{"/capacities/C_W_MW", "/capacities/C_S_MW", "/capacities/C_AE_MW",
                                           "/capacities/C_HS_Nm3", "/rates/on_grid", "/rates/off_grid",
                                           "/rates/net_on_grid", "/rates/curtailment", "/flh_ae_h", "/dtr_1e4_rmb",
                                           "/er/system", "/wall_time_s"};
    int missing = 0;
    for (const auto& row : rep["rows"]) {
        for (const auto& c : columns) missing += !row.contains(nlohmann::json::json_pointer(c));
    }
    ok = ok && missing == 0 && rep["rows"].size() == 5;
    d << "; " << missing << " missing report columns";
    return {ok, d.str()};
}

// ------------------------------------------------------------------ 5

Outcome flexibility() {
    RunConfig cfg;
    cfg.tech.horizon = 336;
    cfg.sweep_delta_T_AS = {4.0, 24.0, 168.0};
    cfg.solve = tight();
    const auto [wind, solar] = obtain_profiles(cfg);
    const auto rows = run_sweep(cfg, wind, solar);
    bool ok = true;
    std::ostringstream d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        TechnoEconomicConfig t = cfg.tech;
        t.ammonia.delta_T_AS = rows[i].delta_T_AS;
        g_audit.add(rows[i].sizing, t);
        if (i > 0) ok = ok && rows[i].sizing.dtr <= rows[i - 1].sizing.dtr + 1e-6 * std::abs(rows[i - 1].sizing.dtr);
        d << (i ? ", " : "") << num(rows[i].delta_T_AS) << " h: " << num(rows[i].sizing.dtr / kRmbPerReportUnit);
    }
    return {ok, "DTR " + d.str() + " (1e4 RMB/yr)"};
}

// ------------------------------------------------------------------ 6

Outcome transition_fit() {
    AmmoniaParams p;
    p.q_H2_rated = rated_h2_flow(1e5, p.C_H2mA);
    const double rated = p.q_H2_rated;
    const double q_k = 0.4 * rated, q_k1 = 1.0 * rated;
    std::vector<double> clean;
    for (int i = 0; i < 24; ++i) clean.push_back(transition(q_k, q_k1, 2.0, i));
    const auto f0 = fit_T_trans(clean, q_k, q_k1);
    bool ok = std::abs(f0.T_trans - 2.0) <= 1e-3;

    // Pass/fail uses one noisy record, as the criterion states; the spread
    // over further draws is reported alongside. With hourly samples the
    // least-squares estimate has a standard deviation near 4 % of T here.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.02);
    double first_T = 0.0, first_rmse = 0.0, worst_T = 0.0, worst_rmse = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> obs;
        for (double v : clean) obs.push_back(v * (1.0 + noise(rng)));
        const auto f = fit_T_trans(obs, q_k, q_k1);
        const double err = std::abs(f.T_trans - 2.0) / 2.0;
        if (trial == 0) first_T = err, first_rmse = f.rmse / rated;
        worst_T = std::max(worst_T, err);
        worst_rmse = std::max(worst_rmse, f.rmse / rated);
    }
    ok = ok && first_T <= 0.05 && first_rmse <= 0.03;
    return {ok, "noiseless T = " + num(f0.T_trans) + " h; 2% noise: |dT|/T " + num(first_T) + ", rmse " +
                    num(100.0 * first_rmse) + "% of rated (over 20 draws: worst |dT|/T " + num(worst_T) +
                    ", worst rmse " + num(100.0 * worst_rmse) + "%)"};
}

// ------------------------------------------------------------------ 7

Outcome linearization() {
    // Exhaustive check of z = b * w over the operand bounds of the tiny
    // pricing model plus a spread of magnitudes.
    const Instance in = toy();
    SizingOverrides o;
    o.grid = toy_grid();
    const SizingResult st = size_system(in.cfg, in.wind, in.solar, o, tight());
    g_audit.add(st, in.cfg);
    double e_inner = 0.0;
    for (std::size_t t = 0; t < st.schedule.size(); ++t) e_inner += st.schedule.dt * std::max(0.0, st.schedule.P_inner(t));

    double worst = 0.0;
    int cases = 0;
    for (const double W : {1.0, 10.0, 2.5e6, e_inner}) {
        for (const int bv : {0, 1}) {
            for (int k = 0; k <= 10; ++k) {
                for (const std::string backend : {"bundled", "highs"}) {
                    milp::Model m;
                    const auto b = m.add_binary("b");
                    const auto w = m.add_continuous(0.0, W, "w");
                    const auto z = milp::big_m_product(m, b, w);
                    m.set_bounds(b, bv, bv);
                    m.set_bounds(w, 0.1 * k * W, 0.1 * k * W);
                    for (const auto sense : {milp::ObjectiveSense::maximize, milp::ObjectiveSense::minimize}) {
                        milp::Model copy = m;
                        copy.set_objective(milp::LinExpr(z), sense);
                        milp::SolveOptions so;
                        so.backend = backend;
                        const auto r = milp::solve(copy, so);
                        ++cases;
                        worst = r.status == milp::SolveStatus::optimal
                                    ? std::max(worst, std::abs(r.value(z) - bv * 0.1 * k * W) / W)
                                    : INFINITY;
                    }
                }
            }
        }
    }

    std::ostringstream d;
    double prev = INFINITY;
    bool mono = true;
    for (int n : {8, 16, 32}) {
        PricingModel pm = build_pricing_model(st, in.cfg, PriceGrid{0.0, 0.5, n});
        const auto pr = solve_pricing(pm, st, in.cfg, tight());
        mono = mono && pr.objective <= prev + 1e-9;
        d << (n > 8 ? ", " : "") << num(pr.objective);
        prev = pr.objective;
    }
    return {worst <= 1e-9 && mono, std::to_string(cases) + " big-M solves, worst |z - b w|/W " + num(worst) +
                                       "; pricing objective at N_p = 8, 16, 32: " + d.str()};
}

// ------------------------------------------------------------------ 8

Outcome audit_all() {
    return {g_audit.schedules > 0 && g_audit.violations == 0,
            std::to_string(g_audit.schedules) + " optimal schedules, " + std::to_string(g_audit.violations) +
                " violations" + (g_audit.first.empty() ? "" : " (" + g_audit.first + ")")};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"inner-price invariance", price_invariance},
        {"two-stage equals joint enumeration", two_stage_vs_joint},
        {"IGDT behaviour", igdt},
        {"benchmark dominance", benchmark},
        {"flexibility monotonicity", flexibility},
        {"transition model fit", transition_fit},
        {"linearization exactness", linearization},
        {"schedule feasibility audit", audit_all},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::printf("[%s] %zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
