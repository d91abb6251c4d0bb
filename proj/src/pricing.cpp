#include "repta/pricing.hpp"

#include <algorithm>
#include <cmath>

namespace repta {

using milp::LinExpr;
using milp::Var;

namespace {

constexpr double kKwPerMw = 1000.0;

enum class Goal { balance, max_min_margin };

void check_grid(const PriceGrid& g) {
    if (!std::isfinite(g.p_lo) || !std::isfinite(g.p_hi) || g.p_lo < 0.0) {
        throw DomainError("price grid bounds must be finite and >= 0");
    }
    if (g.p_hi < g.p_lo) {
        throw DomainError("price grid upper bound lies below the lower bound");
    }
    if (!g.degenerate() && g.N_p < 2) {
        throw DomainError("price grid needs N_p >= 2");
    }
}

PricingModel build(const SizingResult& stage1, const TechnoEconomicConfig& cfg, const PriceGrid& grid,
                   double p_h2_max, Goal goal, Var* margin = nullptr) {
    check_grid(grid);
    if (!(p_h2_max >= 0.0) || !std::isfinite(p_h2_max)) {
        throw DomainError("hydrogen price bound must be finite and >= 0");
    }
    const Schedule& s = stage1.schedule;
    const AnnualInvestments& inv = stage1.invest_star;
    const std::pair<double, const char*> parts[] = {{inv.rg, "RG"}, {inv.aehs, "AEHS"}, {inv.as, "AS"}};
    for (const auto& [value, name] : parts) {
        if (!(value > 0.0)) {
            throw DomainError(std::string("earnings ratio of ") + name + " is undefined: zero investment");
        }
    }

    PricingModel m;
    m.grid = grid;
    m.step = grid.step();
    auto& model = m.model;
    const std::size_t N = s.size();
    const double dt = s.dt;
    const double w = cfg.annualization();

    double e_inner = 0.0, sold = 0.0, q_in = 0.0, q_out = 0.0;
    m.ae_inner.reserve(N);
    m.ae_purch.reserve(N);
    m.as_inner.reserve(N);
    m.as_purch.reserve(N);
    LinExpr sum_ae_inner, sum_as_inner, sum_ae_purch, sum_as_purch;
    for (std::size_t t = 0; t < N; ++t) {
        const auto ts = std::to_string(t);
        const double inner = std::max(0.0, s.P_inner(t));
        const double p_ae = std::max(0.0, s.P_AE[t]);
        const double p_as = std::max(0.0, s.P_AS[t]);
        m.ae_inner.push_back(model.add_continuous(0.0, p_ae, "P_AE_inner_" + ts));
        m.ae_purch.push_back(model.add_continuous(0.0, p_ae, "P_AE_purch_" + ts));
        m.as_inner.push_back(model.add_continuous(0.0, p_as, "P_AS_inner_" + ts));
        m.as_purch.push_back(model.add_continuous(0.0, p_as, "P_AS_purch_" + ts));
        model.add_constraint(LinExpr(m.ae_inner[t]) + m.as_inner[t] == LinExpr(inner), "inner_split_" + ts);
        model.add_constraint(LinExpr(m.ae_inner[t]) + m.ae_purch[t] == LinExpr(p_ae), "ae_split_" + ts);
        model.add_constraint(LinExpr(m.as_inner[t]) + m.as_purch[t] == LinExpr(p_as), "as_split_" + ts);
        sum_ae_inner += dt * LinExpr(m.ae_inner[t]);
        sum_as_inner += dt * LinExpr(m.as_inner[t]);
        sum_ae_purch += dt * LinExpr(m.ae_purch[t]);
        sum_as_purch += dt * LinExpr(m.as_purch[t]);
        e_inner += dt * inner;
        sold += dt * s.P_sell[t];
        q_in += dt * s.q_in[t];
        q_out += dt * s.q_out[t];
    }

    m.e_ae = model.add_continuous(0.0, e_inner, "E_AE_inner");
    m.e_as = model.add_continuous(0.0, e_inner, "E_AS_inner");
    model.add_constraint(LinExpr(m.e_ae) == sum_ae_inner, "E_AE_inner_def");
    model.add_constraint(LinExpr(m.e_as) == sum_as_inner, "E_AS_inner_def");

    const int n_bin = grid.degenerate() ? 1 : grid.N_p;
    LinExpr sum_z_ae, sum_z_as;
    for (int j = 0; j < n_bin; ++j) {
        const auto js = std::to_string(j);
        m.b.push_back(model.add_binary("b_" + js));
        m.z_ae.push_back(milp::big_m_product(model, m.b.back(), m.e_ae, "zAE_" + js));
        m.z_as.push_back(milp::big_m_product(model, m.b.back(), m.e_as, "zAS_" + js));
        sum_z_ae += LinExpr(m.z_ae.back());
        sum_z_as += LinExpr(m.z_as.back());
        if (j > 0) {
            model.add_constraint(LinExpr(m.b[j - 1]) >= LinExpr(m.b[j]), "b_order_" + js);
        }
    }
    m.p_h2 = model.add_continuous(0.0, p_h2_max, "p_H2_inner");

    // p_inner * E = p_lo * E + step * sum_j b_j E
    const LinExpr pay_ae = grid.p_lo * LinExpr(m.e_ae) + m.step * sum_z_ae;
    const LinExpr pay_as = grid.p_lo * LinExpr(m.e_as) + m.step * sum_z_as;
    const double C = cfg.ammonia.C_H2mA;

    const LinExpr profit_rg = w * kKwPerMw * (cfg.p_fit * LinExpr(sold) + pay_ae + pay_as);
    const LinExpr profit_aehs =
        w * (q_in * LinExpr(m.p_h2) - kKwPerMw * (pay_ae + cfg.p_purch * sum_ae_purch));
    const LinExpr profit_as = w * (LinExpr(cfg.p_nh3 * C * q_out) - kKwPerMw * (pay_as + cfg.p_purch * sum_as_purch) -
                                   q_out * LinExpr(m.p_h2));
    m.er_rg = (1.0 / inv.rg) * (profit_rg - LinExpr(inv.rg));
    m.er_aehs = (1.0 / inv.aehs) * (profit_aehs - LinExpr(inv.aehs));
    m.er_as = (1.0 / inv.as) * (profit_as - LinExpr(inv.as));

    if (goal == Goal::balance) {
        model.add_constraint(m.er_rg >= LinExpr(cfg.er_min_rg), "er_min_rg");
        model.add_constraint(m.er_aehs >= LinExpr(cfg.er_min_aehs), "er_min_aehs");
        model.add_constraint(m.er_as >= LinExpr(cfg.er_min_as), "er_min_as");
        m.w1 = model.add_continuous(0.0, milp::kInf, "w1");
        m.w2 = model.add_continuous(0.0, milp::kInf, "w2");
        model.add_constraint(LinExpr(m.w1) >= m.er_rg - m.er_aehs, "w1_pos");
        model.add_constraint(LinExpr(m.w1) >= m.er_aehs - m.er_rg, "w1_neg");
        model.add_constraint(LinExpr(m.w2) >= m.er_aehs - m.er_as, "w2_pos");
        model.add_constraint(LinExpr(m.w2) >= m.er_as - m.er_aehs, "w2_neg");
        model.set_objective(LinExpr(m.w1) + m.w2, milp::ObjectiveSense::minimize);
    } else {
        const Var t = model.add_continuous(-milp::kInf, milp::kInf, "margin");
        model.add_constraint(m.er_rg - cfg.er_min_rg >= LinExpr(t), "margin_rg");
        model.add_constraint(m.er_aehs - cfg.er_min_aehs >= LinExpr(t), "margin_aehs");
        model.add_constraint(m.er_as - cfg.er_min_as >= LinExpr(t), "margin_as");
        model.set_objective(LinExpr(t), milp::ObjectiveSense::maximize);
        if (margin) *margin = t;
    }
    return m;
}

SolverInfo info_of(const milp::Model& model, const milp::SolveResult& r) {
    SolverInfo i;
    i.status = std::string(milp::to_string(r.status));
    i.backend = r.backend;
    i.objective = r.objective;
    i.bound = r.bound;
    i.gap = r.gap;
    i.wall_time_s = r.wall_time_s;
    i.num_vars = model.num_vars();
    i.num_rows = model.num_rows();
    i.num_binary = model.count_vars(milp::VarDomain::binary);
    i.num_integer = model.count_vars(milp::VarDomain::integer);
    return i;
}

}  // namespace

PricingModel build_pricing_model(const SizingResult& stage1, const TechnoEconomicConfig& cfg, const PriceGrid& grid,
                                 double p_h2_max) {
    return build(stage1, cfg, grid, p_h2_max, Goal::balance);
}

PricingResult solve_pricing(PricingModel& m, const SizingResult& stage1, const TechnoEconomicConfig& cfg,
                            const milp::SolveOptions& options) {
    const milp::SolveResult r = milp::solve(m.model, options);
    if (r.status == milp::SolveStatus::infeasible) {
        Var margin;
        PricingModel mm = build(stage1, cfg, m.grid, m.model.var(m.p_h2).upper, Goal::max_min_margin, &margin);
        const milp::SolveResult rm = milp::solve(mm.model, options);
        std::array<double, 3> best{std::nan(""), std::nan(""), std::nan("")};
        PriceSet best_prices = PriceSet::market(cfg, std::nan(""), std::nan(""));
        if (rm.has_solution()) {
            best = {rm.value(mm.er_rg), rm.value(mm.er_aehs), rm.value(mm.er_as)};
            double on = 0.0;
            for (Var b : mm.b) on += std::round(rm.value(b));
            best_prices = PriceSet::market(cfg, mm.grid.p_lo + mm.step * on, rm.value(mm.p_h2));
        }
        throw ErUnreachableError("no grid price meets the minimum earnings ratios; best attainable ER (RG, AEHS, AS) = (" +
                                     std::to_string(best[0]) + ", " + std::to_string(best[1]) + ", " +
                                     std::to_string(best[2]) + ")",
                                 best, best_prices);
    }
    if (r.status == milp::SolveStatus::unbounded) {
        throw InconsistencyError("pricing model is unbounded");
    }
    if (!r.has_solution()) {
        throw SolverLimitError("pricing solve hit its limit without a feasible price");
    }
    const auto report = milp::verify_solution(m.model, r.values);
    if (!report.feasible()) {
        const auto& v = report.violations.front();
        throw InconsistencyError("pricing assignment violates '" + v.name + "' by " + std::to_string(v.amount));
    }

    PricingResult out;
    double n_on = 0.0;
    for (Var b : m.b) n_on += std::round(r.value(b));
    out.prices = PriceSet::market(cfg, m.grid.p_lo + m.step * n_on, r.value(m.p_h2));

    const Schedule& s = stage1.schedule;
    Distribution& d = out.dist;
    const std::size_t N = s.size();
    d.P_AE_inner.resize(N);
    d.P_AE_purch.resize(N);
    d.P_AS_inner.resize(N);
    d.P_AS_purch.resize(N);
    for (std::size_t t = 0; t < N; ++t) {
        d.P_AE_inner[t] = r.value(m.ae_inner[t]);
        d.P_AE_purch[t] = r.value(m.ae_purch[t]);
        d.P_AS_inner[t] = r.value(m.as_inner[t]);
        d.P_AS_purch[t] = r.value(m.as_purch[t]);
        d.E_AE_inner += s.dt * d.P_AE_inner[t];
        d.E_AS_inner += s.dt * d.P_AS_inner[t];
    }
    out.ledger = ledger(s, stage1.caps, out.prices, d, cfg);
    if (std::abs(out.ledger.total - stage1.dtr) > 1e-6 * std::max(1.0, std::abs(stage1.dtr))) {
        throw InconsistencyError("Stage II moved total revenue: " + std::to_string(out.ledger.total) + " vs DTR " +
                                 std::to_string(stage1.dtr));
    }
    out.er = er_report(out.ledger);
    out.objective = r.objective;
    out.solver = info_of(m.model, r);
    return out;
}

PricingResult price_system(const SizingResult& stage1, const TechnoEconomicConfig& cfg, const PriceGrid& grid,
                           const milp::SolveOptions& options) {
    PricingModel m = build_pricing_model(stage1, cfg, grid);
    return solve_pricing(m, stage1, cfg, options);
}

}  // namespace repta
