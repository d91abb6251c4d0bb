#include "repta/sizing.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "repta/errors.hpp"

namespace repta {

using milp::LinExpr;
using milp::Var;

namespace {

constexpr double kKwPerMw = 1000.0;

struct CapacityTerm {
    LinExpr expr;
    double upper = 0.0;
    std::optional<Var> var;
};

// Pinned -> constant; gridded -> step * integer; otherwise a free variable.
CapacityTerm capacity_term(milp::Model& model, const std::string& name, std::optional<double> pinned, double box_max,
                           double grid_step, int grid_steps, bool gridded, bool integer) {
    if (pinned) {
        if (*pinned < 0.0 || !std::isfinite(*pinned)) {
            throw ValidationError("pinned capacity " + name + " must be finite and >= 0");
        }
        return {LinExpr(*pinned), *pinned, std::nullopt};
    }
    if (gridded) {
        if (grid_steps < 0 || grid_step < 0.0) {
            throw ValidationError("capacity grid for " + name + " must be non-negative");
        }
        const Var k = model.add_integer(0.0, grid_steps, name + "_steps");
        return {grid_step * LinExpr(k), grid_step * grid_steps, k};
    }
    const Var v = integer ? model.add_integer(0.0, box_max, name) : model.add_continuous(0.0, box_max, name);
    return {LinExpr(v), box_max, v};
}

double round_if_integral(const milp::Model& model, Var v, double x) {
    return model.var(v).domain == milp::VarDomain::continuous ? x : std::round(x);
}

std::vector<double> values_of(const milp::SolveResult& r, const std::vector<Var>& vars) {
    std::vector<double> out;
    out.reserve(vars.size());
    for (Var v : vars) out.push_back(r.value(v));
    return out;
}

}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::proposed: return "Proposed";
        case Scenario::bs1: return "BS1";
        case Scenario::bs2: return "BS2";
        case Scenario::bs3: return "BS3";
        case Scenario::bs4: return "BS4";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "proposed") return Scenario::proposed;
    if (lower == "bs1") return Scenario::bs1;
    if (lower == "bs2") return Scenario::bs2;
    if (lower == "bs3") return Scenario::bs3;
    if (lower == "bs4") return Scenario::bs4;
    throw ConfigError("unknown scenario '" + std::string(name) + "' (expected Proposed, BS1..BS4)");
}

std::string_view to_string(Family f) {
    switch (f) {
        case Family::power_balance: return "power_balance";
        case Family::electrolyzer: return "electrolyzer";
        case Family::storage: return "storage";
        case Family::grid_exchange: return "grid_exchange";
        case Family::net_on_grid: return "net_on_grid";
        case Family::ammonia_output: return "ammonia_output";
        case Family::ammonia_flex: return "ammonia_flex";
    }
    return "?";
}

SizingOverrides SizingOverrides::for_scenario(Scenario s, const TechnoEconomicConfig& cfg) {
    SizingOverrides o;
    switch (s) {
        case Scenario::proposed: break;
        case Scenario::bs1: o.C_S = 0.0; break;
        case Scenario::bs2: o.C_W = 0.0; break;
        case Scenario::bs3:
            o.no_storage = true;
            o.C_HS = 0.0;
            break;
        case Scenario::bs4: {
            o.C_W = 200.0;
            o.C_S = 260.0;
            const double units = 125.0 / cfg.c_ae_single_mw;
            if (std::abs(units - std::round(units)) > 1e-9) {
                throw ConfigError("BS4 electrolyzer capacity of 125 MW is not a multiple of the unit size");
            }
            o.N_AE = static_cast<int>(std::lround(units));
            break;
        }
    }
    return o;
}

SizingModel build_sizing_model(const TechnoEconomicConfig& cfg, const Profile& wind, const Profile& solar,
                               const SizingOverrides& overrides) {
    cfg.validate();
    const std::size_t N = cfg.horizon;
    if (wind.size() != N || solar.size() != N) {
        throw HorizonMismatchError("profiles must have " + std::to_string(N) + " steps");
    }
    const std::size_t S = cfg.steps_per_as_period();
    const std::size_t K = N / S;

    SizingModel m;
    m.cfg = cfg;
    m.wind = wind;
    m.solar = solar;
    m.overrides = overrides;
    auto& model = m.model;
    auto enabled = [&](Family f) { return !overrides.disabled.contains(f); };

    const AmmoniaParams am = cfg.ammonia_params();
    const double q_r = am.q_H2_rated;
    const double kappa_as = am.kappa_AS();
    const double kappa_h2 = cfg.kappa_h2();
    const double dt = cfg.dt;
    const double w = cfg.annualization();
    const auto& grid = overrides.grid;
    const auto& box = overrides.box;

    // A pinned zero tank means no tank: drop the inventory instead of
    // emitting an all-zero storage block.
    m.storage = !overrides.no_storage && !(overrides.C_HS && *overrides.C_HS == 0.0);

    auto cw = capacity_term(model, "C_W", overrides.C_W, box.C_W_max, grid ? grid->w_step : 0.0,
                            grid ? grid->w_steps : 0, grid.has_value(), false);
    auto cs = capacity_term(model, "C_S", overrides.C_S, box.C_S_max, grid ? grid->s_step : 0.0,
                            grid ? grid->s_steps : 0, grid.has_value(), false);
    std::optional<double> n_ae_pin;
    if (overrides.N_AE) n_ae_pin = static_cast<double>(*overrides.N_AE);
    auto nae = capacity_term(model, "N_AE", n_ae_pin, box.N_AE_max, 1.0, grid ? grid->n_ae_max : 0, grid.has_value(),
                             true);
    CapacityTerm chs{LinExpr(0.0), 0.0, std::nullopt};
    if (m.storage) {
        chs = capacity_term(model, "C_HS", overrides.C_HS, box.C_HS_max, grid ? grid->hs_step : 0.0,
                            grid ? grid->hs_steps : 0, grid.has_value(), false);
    }
    for (const auto* c : {&cw, &cs, &nae, &chs}) {
        if (c->var) m.capacity_vars.push_back(*c->var);
    }
    m.C_W = cw.expr;
    m.C_S = cs.expr;
    m.N_AE = nae.expr;
    m.C_HS = chs.expr;
    const LinExpr C_AE = cfg.c_ae_single_mw * nae.expr;
    const double C_AE_max = cfg.c_ae_single_mw * nae.upper;

    // QSS setpoints, one per scheduling period.
    const bool flex = enabled(Family::ammonia_flex);
    m.setpoint.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double lo = flex ? am.eta_AS_min * q_r : 0.0;
        const double hi = flex ? am.eta_AS_max * q_r : milp::kInf;
        m.setpoint.push_back(model.add_continuous(lo, hi, "qss_" + std::to_string(k)));
    }
    const double p_as_max = kappa_as * am.eta_AS_max * q_r;
    const double m_purch = std::max(1.0, cfg.eta_ae_max * C_AE_max + p_as_max);

    m.sell.reserve(N);
    m.purch.reserve(N);
    m.curt.reserve(N);
    m.p_ae.reserve(N);
    m.b_grid.reserve(N);
    for (std::size_t t = 0; t < N; ++t) {
        const auto ts = std::to_string(t);
        const double m_sell = std::max(1.0, cw.upper * wind.values[t] + cs.upper * solar.values[t]);
        m.sell.push_back(model.add_continuous(0.0, m_sell, "P_sell_" + ts));
        m.purch.push_back(model.add_continuous(0.0, m_purch, "P_purch_" + ts));
        m.curt.push_back(model.add_continuous(0.0, milp::kInf, "P_curt_" + ts));
        m.p_ae.push_back(model.add_continuous(0.0, milp::kInf, "P_AE_" + ts));
        m.b_grid.push_back(model.add_binary("b_grid_" + ts));
    }
    if (m.storage) {
        const double n_max = chs.upper;
        for (std::size_t t = 0; t <= N; ++t) {
            m.n_sto.push_back(model.add_continuous(0.0, std::isfinite(n_max) ? n_max : milp::kInf,
                                                   "n_sto_" + std::to_string(t)));
        }
    }

    LinExpr net_sold, generation, objective, h2_out;
    for (std::size_t t = 0; t < N; ++t) {
        const auto ts = std::to_string(t);
        const Var q = m.setpoint[t / S];
        const LinExpr P_W = wind.values[t] * cw.expr;
        const LinExpr P_S = solar.values[t] * cs.expr;
        const LinExpr q_in = (1.0 / kappa_h2) * LinExpr(m.p_ae[t]);

        if (enabled(Family::power_balance)) {
            model.add_constraint(P_W + P_S + m.purch[t] == LinExpr(m.sell[t]) + m.curt[t] + m.p_ae[t] + kappa_as * LinExpr(q),
                                 "balance_" + ts);
            model.add_constraint(LinExpr(m.sell[t]) + m.curt[t] <= P_W + P_S, "inner_nonneg_" + ts);
        }
        if (enabled(Family::electrolyzer)) {
            model.add_constraint(LinExpr(m.p_ae[t]) >= cfg.eta_ae_min * C_AE, "ae_min_" + ts);
            model.add_constraint(LinExpr(m.p_ae[t]) <= cfg.eta_ae_max * C_AE, "ae_max_" + ts);
        }
        if (enabled(Family::grid_exchange)) {
            const double m_sell = model.var(m.sell[t]).upper;
            model.add_constraint(LinExpr(m.sell[t]) <= m_sell * LinExpr(m.b_grid[t]), "sell_mode_" + ts);
            model.add_constraint(LinExpr(m.purch[t]) <= m_purch * (1.0 - LinExpr(m.b_grid[t])), "purch_mode_" + ts);
        }
        if (enabled(Family::storage)) {
            if (m.storage) {
                model.add_constraint(LinExpr(m.n_sto[t + 1]) == LinExpr(m.n_sto[t]) + dt * (q_in - q),
                                     "tank_balance_" + ts);
                model.add_constraint(LinExpr(m.n_sto[t]) >= cfg.eta_hs_min * chs.expr, "tank_min_" + ts);
                model.add_constraint(LinExpr(m.n_sto[t]) <= cfg.eta_hs_max * chs.expr, "tank_max_" + ts);
            } else {
                model.add_constraint(q_in == LinExpr(q), "no_tank_" + ts);
            }
        }
        net_sold += dt * (LinExpr(m.sell[t]) - m.purch[t]);
        generation += dt * (P_W + P_S);
        objective += (w * dt * kKwPerMw) * (cfg.p_fit * LinExpr(m.sell[t]) - cfg.p_purch * LinExpr(m.purch[t]));
        h2_out += dt * LinExpr(q);
    }
    if (m.storage && enabled(Family::storage)) {
        model.add_constraint(LinExpr(m.n_sto.front()) == cfg.hs_initial_fraction * chs.expr, "tank_start");
        model.add_constraint(LinExpr(m.n_sto.back()) == cfg.hs_initial_fraction * chs.expr, "tank_end");
    }
    if (enabled(Family::net_on_grid)) {
        model.add_constraint(net_sold <= cfg.r_net * generation, "net_on_grid");
    }
    if (enabled(Family::ammonia_output)) {
        model.add_constraint(am.C_H2mA * h2_out <= cfg.horizon_nh3_cap_t(), "ammonia_cap");
    }
    if (flex && K > 1) {
        for (std::size_t k = 0; k < K; ++k) {
            const Var prev = m.setpoint[(k + K - 1) % K];
            const LinExpr step = LinExpr(m.setpoint[k]) - prev;
            model.add_constraint(step <= am.r_plus * q_r * dt, "ramp_up_" + std::to_string(k));
            model.add_constraint(step >= -am.r_minus * q_r * dt, "ramp_down_" + std::to_string(k));
        }
    }

    const AnnualInvestments unit = annual_investments(Capacities{1.0, 0.0, 0, 0.0, 0.0}, cfg);
    const double a_w = unit.rg;
    const double a_s = annual_investments(Capacities{0.0, 1.0, 0, 0.0, 0.0}, cfg).rg;
    const double a_ae = annual_investments(Capacities{0.0, 0.0, 0, 1.0, 0.0}, cfg).aehs;
    const double a_hs = annual_investments(Capacities{0.0, 0.0, 0, 0.0, 1.0}, cfg).aehs;
    objective += (w * cfg.p_nh3 * am.C_H2mA) * h2_out;
    objective -= a_w * cw.expr + a_s * cs.expr + a_ae * C_AE + a_hs * chs.expr;
    objective -= LinExpr(unit.as);
    model.set_objective(objective, milp::ObjectiveSense::maximize);
    return m;
}

namespace {

SizingResult reconstruct(const SizingModel& m, const milp::SolveResult& r) {
    const auto& cfg = m.cfg;
    const AmmoniaParams am = cfg.ammonia_params();
    const std::size_t N = cfg.horizon;
    const std::size_t S = cfg.steps_per_as_period();

    SizingResult out;
    auto cap_value = [&](const LinExpr& e) {
        double v = e.constant();
        for (const auto& [var, c] : e.terms()) {
            v += c * round_if_integral(m.model, var, r.value(var));
        }
        return v;
    };
    out.caps.C_W = cap_value(m.C_W);
    out.caps.C_S = cap_value(m.C_S);
    out.caps.N_AE = static_cast<int>(std::lround(cap_value(m.N_AE)));
    out.caps.C_AE = cfg.c_ae_single_mw * out.caps.N_AE;
    out.caps.C_HS = cap_value(m.C_HS);

    Schedule& s = out.schedule;
    s.dt = cfg.dt;
    s.delta_T_AS = am.delta_T_AS;
    s.P_sell = values_of(r, m.sell);
    s.P_purch = values_of(r, m.purch);
    s.P_curt = values_of(r, m.curt);
    s.P_AE = values_of(r, m.p_ae);
    s.b_grid = values_of(r, m.b_grid);
    for (double& b : s.b_grid) b = std::round(b);
    s.setpoints = values_of(r, m.setpoint);
    if (m.storage) {
        s.n_sto = values_of(r, m.n_sto);
    }
    s.P_W.resize(N);
    s.P_S.resize(N);
    s.P_AS.resize(N);
    s.q_in.resize(N);
    s.q_out.resize(N);
    double h2 = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        s.P_W[t] = out.caps.C_W * m.wind.values[t];
        s.P_S[t] = out.caps.C_S * m.solar.values[t];
        s.q_out[t] = s.setpoints[t / S];
        s.P_AS[t] = am.kappa_AS() * s.q_out[t];
        s.q_in[t] = s.P_AE[t] / cfg.kappa_h2();
        h2 += s.q_out[t];
    }
    s.m_nh3 = am.C_H2mA * cfg.dt * h2;

    out.invest_star = annual_investments(out.caps, cfg);
    out.dtr = r.objective;
    out.solver.status = std::string(milp::to_string(r.status));
    out.solver.backend = r.backend;
    out.solver.objective = r.objective;
    out.solver.bound = r.bound;
    out.solver.gap = r.gap;
    out.solver.wall_time_s = r.wall_time_s;
    out.solver.num_vars = m.model.num_vars();
    out.solver.num_rows = m.model.num_rows();
    out.solver.num_binary = m.model.count_vars(milp::VarDomain::binary);
    out.solver.num_integer = m.model.count_vars(milp::VarDomain::integer);
    out.optimal = r.status == milp::SolveStatus::optimal;
    return out;
}

std::string diagnose_infeasibility(const SizingModel& m, const milp::SolveOptions& options) {
    // Try the narrowest families first so the report points at the most
    // specific cause.
    const Family order[] = {Family::ammonia_flex, Family::ammonia_output, Family::net_on_grid, Family::electrolyzer,
                            Family::storage, Family::grid_exchange, Family::power_balance};
    for (Family f : order) {
        if (m.overrides.disabled.contains(f)) continue;
        SizingOverrides o = m.overrides;
        o.disabled.insert(f);
        SizingModel relaxed = build_sizing_model(m.cfg, m.wind, m.solar, o);
        const auto r = milp::solve(relaxed.model, options);
        if (r.status == milp::SolveStatus::optimal || r.status == milp::SolveStatus::limit) {
            return std::string(to_string(f));
        }
    }
    return {};
}

// With p_purch > p_fit, buying and selling in the same hour only loses
// money, so the grid-mode binaries can be relaxed: any hour that still does
// both is netted out, which keeps every constraint and never lowers the
// objective. The relaxed bound stays valid for the binary model.
milp::SolveResult solve_with_relaxed_grid_mode(SizingModel& m, const milp::SolveOptions& options) {
    milp::Model relaxed = m.model;
    for (Var b : m.b_grid) relaxed.set_domain(b, milp::VarDomain::continuous);
    milp::SolveResult r = milp::solve(relaxed, options);
    m.model.freeze();
    if (!r.has_solution()) return r;
    for (std::size_t t = 0; t < m.b_grid.size(); ++t) {
        auto idx = [&](Var v) { return static_cast<std::size_t>(v.index); };
        double& sell = r.values[idx(m.sell[t])];
        double& purch = r.values[idx(m.purch[t])];
        const double both = std::min(sell, purch);
        if (both > 0.0) {
            sell -= both;
            purch -= both;
        }
        r.values[idx(m.b_grid[t])] = purch > 0.0 ? 0.0 : 1.0;
    }
    r.objective = m.model.objective().evaluate(r.values);
    r.gap = std::abs(r.bound - r.objective) / std::max(1.0, std::abs(r.objective));
    return r;
}

}  // namespace

SizingResult solve_sizing(SizingModel& m, const milp::SolveOptions& options) {
    const bool relax = m.cfg.p_purch > m.cfg.p_fit && !m.b_grid.empty();
    const milp::SolveResult r = relax ? solve_with_relaxed_grid_mode(m, options) : milp::solve(m.model, options);
    switch (r.status) {
        case milp::SolveStatus::infeasible: {
            const std::string family = diagnose_infeasibility(m, options);
            throw InfeasibleError("sizing model is infeasible" +
                                      (family.empty() ? std::string{} : "; relaxing '" + family + "' restores feasibility"),
                                  family);
        }
        case milp::SolveStatus::unbounded:
            throw InconsistencyError("sizing model is unbounded; capacity box missing?");
        case milp::SolveStatus::limit:
            if (!r.has_solution()) {
                throw SolverLimitError("sizing solve hit its limit without a feasible schedule");
            }
            break;
        case milp::SolveStatus::optimal: break;
    }

    const auto report = milp::verify_solution(m.model, r.values);
    if (!report.feasible()) {
        const auto& v = report.violations.front();
        throw InconsistencyError("solver assignment violates '" + v.name + "' by " + std::to_string(v.amount));
    }
    SizingResult out = reconstruct(m, r);
    if (!out.optimal) {
        out.warnings.push_back("solver stopped at a limit; gap " + std::to_string(r.gap));
    }

    for (Var v : m.capacity_vars) {
        const auto& info = m.model.var(v);
        const double x = r.value(v);
        if (!m.overrides.grid && x >= info.upper * (1.0 - 1e-9) && info.upper > 0.0) {
            out.warnings.push_back("capacity " + info.name + " sits on its search-box bound " +
                                   std::to_string(info.upper));
            spdlog::warn("sizing: {} is at its search-box bound {}", info.name, info.upper);
        }
    }

    const InvestorLedger l =
        ledger(out.schedule, out.caps, PriceSet::market(m.cfg), Distribution::ae_first(out.schedule), m.cfg);
    if (std::abs(l.total - out.dtr) > 1e-6 * std::max(1.0, std::abs(out.dtr))) {
        throw InconsistencyError("ledger total " + std::to_string(l.total) + " disagrees with solver objective " +
                                 std::to_string(out.dtr));
    }
    return out;
}

SizingResult size_system(const TechnoEconomicConfig& cfg, const Profile& wind, const Profile& solar,
                         const SizingOverrides& overrides, const milp::SolveOptions& options) {
    SizingModel m = build_sizing_model(cfg, wind, solar, overrides);
    return solve_sizing(m, options);
}

std::string AuditReport::summary() const {
    if (issues.empty()) return "clean";
    std::ostringstream os;
    os << issues.size() << " issue(s); first: " << issues.front().check << " at " << issues.front().index << " by "
       << issues.front().amount;
    return os.str();
}

AuditReport audit_schedule(const Schedule& s, const Capacities& caps, const TechnoEconomicConfig& cfg, double tol) {
    AuditReport rep;
    const std::size_t N = s.size();
    const AmmoniaParams am = cfg.ammonia_params();
    const double q_r = am.q_H2_rated;
    const double dt = s.dt;
    auto flag = [&](const char* check, std::size_t i, double excess, double scale) {
        if (excess > tol * (1.0 + std::abs(scale))) {
            rep.issues.push_back({check, i, excess});
        }
    };

    if (s.P_W.size() != N || s.P_S.size() != N || s.P_sell.size() != N || s.P_purch.size() != N ||
        s.P_curt.size() != N || s.P_AS.size() != N || s.q_in.size() != N || s.q_out.size() != N) {
        rep.issues.push_back({"series_length", 0, 0.0});
        return rep;
    }

    double sold = 0.0, bought = 0.0, gen = 0.0, h2 = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
        // electrolyzer band and conversion
        flag("ae_min", t, cfg.eta_ae_min * caps.C_AE - s.P_AE[t], caps.C_AE);
        flag("ae_max", t, s.P_AE[t] - cfg.eta_ae_max * caps.C_AE, caps.C_AE);
        flag("ae_conversion", t, std::abs(s.P_AE[t] - cfg.kappa_h2() * s.q_in[t]), s.P_AE[t]);
        flag("as_power", t, std::abs(s.P_AS[t] - am.kappa_AS() * s.q_out[t]), s.P_AS[t]);
        // grid exchange: one direction per hour
        for (double v : {s.P_sell[t], s.P_purch[t], s.P_curt[t]}) flag("non_negative", t, -v, 0.0);
        flag("buy_xor_sell", t, std::min(s.P_sell[t], s.P_purch[t]), std::max(s.P_sell[t], s.P_purch[t]));
        // power balance
        const double supply = s.P_W[t] + s.P_S[t] + s.P_purch[t];
        const double demand = s.P_sell[t] + s.P_curt[t] + s.P_AE[t] + s.P_AS[t];
        flag("power_balance", t, std::abs(supply - demand), std::max(supply, demand));
        flag("inner_non_negative", t, -s.P_inner(t), s.P_W[t] + s.P_S[t]);
        // tank
        if (s.has_storage()) {
            const double next = s.n_sto[t] + (s.q_in[t] - s.q_out[t]) * dt;
            flag("tank_balance", t, std::abs(s.n_sto[t + 1] - next), std::max(s.n_sto[t + 1], next));
            flag("tank_min", t, cfg.eta_hs_min * caps.C_HS - s.n_sto[t], caps.C_HS);
            flag("tank_max", t, s.n_sto[t] - cfg.eta_hs_max * caps.C_HS, caps.C_HS);
        } else {
            flag("no_tank_flow", t, std::abs(s.q_in[t] - s.q_out[t]), s.q_in[t]);
        }
        // ammonia: hourly ramp on the executed flow (cyclic over the horizon)
        const double step = s.q_out[t] - s.q_out[(t + N - 1) % N];
        flag("ramp_up", t, step - am.r_plus * q_r * dt, q_r);
        flag("ramp_down", t, -step - am.r_minus * q_r * dt, q_r);
        sold += s.P_sell[t] * dt;
        bought += s.P_purch[t] * dt;
        gen += (s.P_W[t] + s.P_S[t]) * dt;
        h2 += s.q_out[t] * dt;
    }
    if (s.has_storage()) {
        flag("tank_start", 0, std::abs(s.n_sto.front() - cfg.hs_initial_fraction * caps.C_HS), caps.C_HS);
        flag("tank_end", N, std::abs(s.n_sto.back() - cfg.hs_initial_fraction * caps.C_HS), caps.C_HS);
    }
    flag("net_on_grid", 0, (sold - bought) - cfg.r_net * gen, gen);

    const double m_nh3 = am.C_H2mA * h2;
    flag("ammonia_cap", 0, m_nh3 - cfg.horizon_nh3_cap_t(), cfg.horizon_nh3_cap_t());
    flag("ammonia_tally", 0, std::abs(m_nh3 - s.m_nh3), m_nh3);

    // setpoint band and hourly flow tied to its period
    if (!s.setpoints.empty()) {
        const auto steps = static_cast<std::size_t>(std::llround(s.delta_T_AS / dt));
        if (steps == 0 || steps * s.setpoints.size() != N) {
            rep.issues.push_back({"setpoint_count", 0, static_cast<double>(s.setpoints.size())});
        } else {
            for (std::size_t k = 0; k < s.setpoints.size(); ++k) {
                flag("setpoint_min", k, am.eta_AS_min * q_r - s.setpoints[k], q_r);
                flag("setpoint_max", k, s.setpoints[k] - am.eta_AS_max * q_r, q_r);
                for (std::size_t i = 0; i < steps; ++i) {
                    flag("setpoint_hold", k * steps + i, std::abs(s.q_out[k * steps + i] - s.setpoints[k]), q_r);
                }
            }
        }
    }
    return rep;
}

GridRates grid_rates(const Schedule& s) {
    double sold = 0.0, bought = 0.0, curt = 0.0, gen = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
        sold += s.P_sell[t];
        bought += s.P_purch[t];
        curt += s.P_curt[t];
        gen += s.P_W[t] + s.P_S[t];
    }
    GridRates r;
    if (gen > 0.0) {
        r.on_grid = sold / gen;
        r.off_grid = bought / gen;
        r.net_on_grid = (sold - bought) / gen;
        r.curtailment = curt / gen;
    }
    return r;
}

double electrolyzer_flh(const Schedule& s, const Capacities& caps) {
    if (!(caps.C_AE > 0.0)) return 0.0;
    double e = 0.0;
    for (double p : s.P_AE) e += p * s.dt;
    return e / caps.C_AE;
}

}  // namespace repta
