#include <cmath>
#include <random>

#include "doctest.h"
#include "repta/errors.hpp"
#include "repta/sizing.hpp"

using namespace repta;

namespace {

struct Instance {
    TechnoEconomicConfig cfg;
    Profile wind, solar;
};

Instance instance(std::size_t hours, std::uint64_t seed = 1) {
    Instance in;
    in.cfg.horizon = hours;
    const double frac = static_cast<double>(hours) / 8760.0;
    in.wind = synthesize_profile(ProfileKind::wind, 3500.0 * frac, seed, hours);
    in.solar = synthesize_profile(ProfileKind::solar, 1800.0 * frac, seed + 1, hours);
    return in;
}

std::size_t count_prefix(const milp::Model& m, const std::string& prefix) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.num_vars(); ++i) {
        if (m.var(static_cast<std::int32_t>(i)).name.rfind(prefix, 0) == 0) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("scenario names") {
    for (auto s : {Scenario::proposed, Scenario::bs1, Scenario::bs2, Scenario::bs3, Scenario::bs4}) {
        CHECK(parse_scenario(to_string(s)) == s);
    }
    CHECK(parse_scenario("BS3") == Scenario::bs3);
    CHECK_THROWS_AS(parse_scenario("bs9"), ConfigError);
}

TEST_CASE("model dimensions") {
    const auto in = instance(48);
    const auto m = build_sizing_model(in.cfg, in.wind, in.solar);
    CHECK(m.b_grid.size() == 48);
    CHECK(m.n_sto.size() == 49);
    CHECK(m.setpoint.size() == 2);
    CHECK(m.model.count_vars(milp::VarDomain::binary) == 48);
    CHECK(m.model.count_vars(milp::VarDomain::integer) == 1);
    CHECK(count_prefix(m.model, "P_sell_") == 48);
}

TEST_CASE("benchmark overrides") {
    const auto in = instance(48);
    const TechnoEconomicConfig& cfg = in.cfg;

    auto bs3 = build_sizing_model(cfg, in.wind, in.solar, SizingOverrides::for_scenario(Scenario::bs3, cfg));
    CHECK(bs3.n_sto.empty());
    CHECK(count_prefix(bs3.model, "n_sto") == 0);
    const auto r3 = solve_sizing(bs3);
    CHECK_FALSE(r3.schedule.has_storage());
    for (std::size_t t = 0; t < 48; ++t) {
        CHECK(r3.schedule.q_in[t] == doctest::Approx(r3.schedule.q_out[t]).epsilon(1e-7));
    }

    const auto o4 = SizingOverrides::for_scenario(Scenario::bs4, cfg);
    CHECK(*o4.C_W == 200.0);
    CHECK(*o4.C_S == 260.0);
    CHECK(*o4.N_AE == 25);
    const auto r4 = size_system(cfg, in.wind, in.solar, o4);
    CHECK(r4.caps.C_W == 200.0);
    CHECK(r4.caps.C_S == 260.0);
    CHECK(r4.caps.C_AE == 125.0);

    const auto r1 = size_system(cfg, in.wind, in.solar, SizingOverrides::for_scenario(Scenario::bs1, cfg));
    CHECK(r1.caps.C_S == 0.0);
    const auto r2 = size_system(cfg, in.wind, in.solar, SizingOverrides::for_scenario(Scenario::bs2, cfg));
    CHECK(r2.caps.C_W == 0.0);

    const auto rp = size_system(cfg, in.wind, in.solar);
    for (const auto* r : {&r1, &r2, &r3, &r4}) CHECK(rp.dtr >= r->dtr - 1e-6 * std::abs(rp.dtr));
}

TEST_CASE("solved schedule is consistent with the ledger and the audit") {
    const auto in = instance(72, 3);
    const auto r = size_system(in.cfg, in.wind, in.solar);
    REQUIRE(r.optimal);
    const auto audit = audit_schedule(r.schedule, r.caps, in.cfg);
    CHECK_MESSAGE(audit.clean(), audit.summary());
    for (double pi : {0.0, 0.25, 0.9}) {
        for (double ph : {0.0, 1.5}) {
            const auto l = ledger(r.schedule, r.caps, PriceSet::market(in.cfg, pi, ph),
                                  Distribution::ae_first(r.schedule), in.cfg);
            CHECK(std::abs(l.total - r.dtr) <= 1e-6 * std::abs(r.dtr));
        }
    }
    const auto inv = annual_investments(r.caps, in.cfg);
    CHECK(r.invest_star.total() == doctest::Approx(inv.total()).epsilon(1e-12));

    double e = 0.0;
    for (double p : r.schedule.P_AE) e += p;
    CHECK(electrolyzer_flh(r.schedule, r.caps) == doctest::Approx(e / r.caps.C_AE).epsilon(1e-9));
    const auto rates = grid_rates(r.schedule);
    CHECK(rates.net_on_grid <= in.cfg.r_net + 1e-9);
    for (std::size_t t = 0; t < r.schedule.size(); ++t) {
        CHECK(std::min(r.schedule.P_sell[t], r.schedule.P_purch[t]) <= 1e-7);
    }
}

TEST_CASE("grid rates from hand-made totals") {
    Schedule s;
    s.P_W = {10.0, 0.0};
    s.P_S = {0.0, 10.0};
    s.P_sell = {4.0, 0.0};
    s.P_purch = {0.0, 1.0};
    s.P_curt = {1.0, 1.0};
    s.P_AE = {5.0, 10.0};
    const auto g = grid_rates(s);
    CHECK(g.on_grid == doctest::Approx(0.2));
    CHECK(g.off_grid == doctest::Approx(0.05));
    CHECK(g.net_on_grid == doctest::Approx(0.15));
    CHECK(g.curtailment == doctest::Approx(0.1));
}

TEST_CASE("zero market prices leave only the unavoidable investment") {
    auto in = instance(24);
    in.cfg.p_fit = in.cfg.p_purch = in.cfg.p_nh3 = 0.0;
    const auto r = size_system(in.cfg, in.wind, in.solar);
    CHECK(r.caps.C_W == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.caps.C_S == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.caps.C_HS == doctest::Approx(0.0).epsilon(1e-9));
    // The ammonia block cannot run below 30 %, so the smallest electrolyzer
    // fleet covering that load stays.
    const AmmoniaParams am = in.cfg.ammonia_params();
    const double need = in.cfg.kappa_h2() * am.eta_AS_min * am.q_H2_rated;
    const int n_min = static_cast<int>(std::ceil(need / (in.cfg.eta_ae_max * in.cfg.c_ae_single_mw)));
    CHECK(r.caps.N_AE == n_min);
    CHECK(r.dtr == doctest::Approx(-annual_investments(r.caps, in.cfg).total()).epsilon(1e-9));

    // With free facilities as well, nothing earns and nothing costs.
    for (auto* f : {&in.cfg.wt, &in.cfg.pv, &in.cfg.ae, &in.cfg.hs, &in.cfg.as}) f->unit_cost = 0.0;
    const auto z = size_system(in.cfg, in.wind, in.solar);
    CHECK(z.dtr == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("infeasible pins name the constraint family") {
    const auto in = instance(24);
    SizingOverrides o;
    o.N_AE = 0;
    try {
        size_system(in.cfg, in.wind, in.solar, o);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.family() == "ammonia_flex");
    }
}

TEST_CASE("bundled solver agrees with HiGHS on a small instance") {
    const auto in = instance(24, 5);
    milp::SolveOptions bundled;
    bundled.backend = "bundled";
    bundled.relative_gap = 1e-9;
    milp::SolveOptions highs;
    highs.backend = "highs";
    highs.relative_gap = 1e-9;
    const auto a = size_system(in.cfg, in.wind, in.solar, {}, bundled);
    const auto b = size_system(in.cfg, in.wind, in.solar, {}, highs);
    CHECK(a.solver.backend == "bundled");
    CHECK(b.solver.backend == "highs");
    CHECK(a.dtr == doctest::Approx(b.dtr).epsilon(1e-6));
}

TEST_CASE("a pinned tank of zero drops the inventory") {
    const auto in = instance(24);
    SizingOverrides o;
    o.C_HS = 0.0;
    const auto m = build_sizing_model(in.cfg, in.wind, in.solar, o);
    CHECK_FALSE(m.storage);
    CHECK(m.n_sto.empty());
}

TEST_CASE("audit flags broken schedules") {
    const auto in = instance(24, 2);
    auto r = size_system(in.cfg, in.wind, in.solar);
    REQUIRE(audit_schedule(r.schedule, r.caps, in.cfg).clean());

    auto s = r.schedule;
    s.P_sell[3] += 5.0;
    s.P_purch[3] += 5.0;
    CHECK_FALSE(audit_schedule(s, r.caps, in.cfg).clean());

    s = r.schedule;
    s.P_AE[5] = 1.3 * r.caps.C_AE;
    CHECK_FALSE(audit_schedule(s, r.caps, in.cfg).clean());

    s = r.schedule;
    for (double& q : s.setpoints) q = 1.2 * in.cfg.ammonia_params().q_H2_rated;
    CHECK_FALSE(audit_schedule(s, r.caps, in.cfg).clean());
}
