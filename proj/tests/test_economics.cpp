#include <cmath>
#include <random>

#include "doctest.h"
#include "repta/errors.hpp"
#include "repta/sizing.hpp"
#include "support.hpp"

using namespace repta;

namespace {

TechnoEconomicConfig week_config() {
    TechnoEconomicConfig cfg;
    cfg.horizon = 168;
    return cfg;
}

double crf_oracle(double r, int y) {
    const double g = std::pow(1.0 + r, y);
    return r * g / (g - 1.0);
}

Schedule zero_schedule(std::size_t n) {
    Schedule s;
    for (auto* v : {&s.P_W, &s.P_S, &s.P_sell, &s.P_purch, &s.P_curt, &s.P_AE, &s.P_AS, &s.b_grid, &s.q_in, &s.q_out}) {
        v->assign(n, 0.0);
    }
    return s;
}

Distribution zero_distribution(std::size_t n) {
    Distribution d;
    d.P_AE_inner.assign(n, 0.0);
    d.P_AE_purch.assign(n, 0.0);
    d.P_AS_inner.assign(n, 0.0);
    d.P_AS_purch.assign(n, 0.0);
    return d;
}

}  // namespace

TEST_CASE("capital recovery factor") {
    for (double r : {0.01, 0.08, 0.3}) CHECK(crf(r, 1) == doctest::Approx(1.0 + r).epsilon(1e-14));
    CHECK(crf(0.08, 20) == doctest::Approx(crf_oracle(0.08, 20)).epsilon(1e-14));
    CHECK(crf(0.08, 20) == doctest::Approx(0.10185).epsilon(1e-4));
    CHECK(crf(0.08, 15) == doctest::Approx(0.11683).epsilon(1e-4));
    CHECK_THROWS_AS(crf(0.0, 10), DomainError);
    CHECK_THROWS_AS(crf(-0.1, 10), DomainError);
    CHECK_THROWS_AS(crf(0.08, 0), DomainError);
}

TEST_CASE("default techno-economic parameters") {
    const TechnoEconomicConfig cfg;
    CHECK(cfg.wt.unit_cost == 6000.0);
    CHECK(cfg.pv.unit_cost == 4000.0);
    CHECK(cfg.ae.unit_cost == 3000.0);
    CHECK(cfg.hs.unit_cost == 250.0);
    CHECK(cfg.as.unit_cost == 0.33e9);
    CHECK(cfg.ae.om_fraction == 0.03);
    CHECK(cfg.wt.lifetime_years == 20);
    CHECK(cfg.as.lifetime_years == 15);
    CHECK(cfg.p_fit == 0.2829);
    CHECK(cfg.p_purch == 0.4572);
    CHECK(cfg.p_nh3 == 3200.0);
    CHECK(cfg.interest_rate == 0.08);
    CHECK(cfg.r_net == 0.20);
    CHECK(cfg.c_ae_single_mw == 5.0);
    CHECK(cfg.er_min_rg == 0.0);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("annualized investments") {
    const TechnoEconomicConfig cfg;
    Capacities c{100.0, 50.0, 10, 50.0, 1e5};
    const auto inv = annual_investments(c, cfg);
    const double rg = crf_oracle(0.08, 20) * 1.02 * (6000.0 * 1000.0 * 100.0 + 4000.0 * 1000.0 * 50.0);
    const double aehs = crf_oracle(0.08, 15) * (1.03 * 3000.0 * 1000.0 * 50.0 + 1.02 * 250.0 * 1e5);
    const double as = crf_oracle(0.08, 15) * 1.03 * 0.33e9;
    CHECK(inv.rg == doctest::Approx(rg).epsilon(1e-12));
    CHECK(inv.aehs == doctest::Approx(aehs).epsilon(1e-12));
    CHECK(inv.as == doctest::Approx(as).epsilon(1e-12));

    TechnoEconomicConfig half = cfg;
    half.annual_nh3_t = 5e4;
    CHECK(annual_investments(c, half).as == doctest::Approx(0.5 * as).epsilon(1e-12));
}

TEST_CASE("ledger of an idle plant carries only the AS block") {
    const TechnoEconomicConfig cfg = week_config();
    const Schedule s = zero_schedule(168);
    const auto l = ledger(s, Capacities{}, PriceSet::market(cfg, 0.2, 1.3), zero_distribution(168), cfg);
    CHECK(l.as.net == doctest::Approx(-crf_oracle(0.08, 15) * 0.33e9 * 1.03).epsilon(1e-12));
    CHECK(l.rg.net == 0.0);
    CHECK(l.aehs.net == 0.0);
    CHECK(std::isnan(l.rg.er));
    CHECK(l.total == doctest::Approx(l.as.net).epsilon(1e-15));
}

TEST_CASE("selling everything leaves AEHS and AS with their investments only") {
    const TechnoEconomicConfig cfg = week_config();
    Schedule s = zero_schedule(168);
    for (std::size_t t = 0; t < 168; ++t) {
        s.P_W[t] = 10.0 + (t % 7);
        s.P_sell[t] = s.P_W[t];
        s.b_grid[t] = 1.0;
    }
    Capacities c{30.0, 0.0, 4, 20.0, 5e4};
    const auto inv = annual_investments(c, cfg);
    const auto l = ledger(s, c, PriceSet::market(cfg, 0.3, 2.0), zero_distribution(168), cfg);
    CHECK(l.aehs.net == doctest::Approx(-inv.aehs).epsilon(1e-12));
    CHECK(l.as.net == doctest::Approx(-inv.as).epsilon(1e-12));
    double sold = 0.0;
    for (double v : s.P_sell) sold += v;
    CHECK(l.rg.profit == doctest::Approx(8760.0 / 168.0 * 1000.0 * cfg.p_fit * sold).epsilon(1e-12));
}

TEST_CASE("ledger total matches a naive cash-flow loop") {
    const TechnoEconomicConfig cfg = week_config();
    const Profile wind = synthesize_profile(ProfileKind::wind, 3500.0 * 168 / 8760, 5, 168);
    const Profile solar = synthesize_profile(ProfileKind::solar, 1800.0 * 168 / 8760, 6, 168);
    std::mt19937_64 rng(17);
    for (int k = 0; k < 10; ++k) {
        const auto rc = testing::random_feasible_schedule(rng, cfg, wind, solar);
        const auto d = testing::random_distribution(rng, rc.schedule);
        const PriceSet p = PriceSet::market(cfg, 0.5 * std::uniform_real_distribution<double>()(rng),
                                            3.0 * std::uniform_real_distribution<double>()(rng));
        const auto l = ledger(rc.schedule, rc.caps, p, d, cfg);
        const Schedule& s = rc.schedule;
        double cash = 0.0;
        for (std::size_t t = 0; t < s.size(); ++t) {
            cash += 1000.0 * cfg.p_fit * s.P_sell[t] - 1000.0 * cfg.p_purch * s.P_purch[t] +
                    cfg.p_nh3 * cfg.ammonia.C_H2mA * s.q_out[t];
        }
        const double naive = 8760.0 / 168.0 * cash - annual_investments(rc.caps, cfg).total();
        CHECK(std::abs(l.total - naive) <= 1e-9 * std::abs(naive));
        CHECK(l.m_nh3 == doctest::Approx(s.m_nh3).epsilon(1e-12));
    }
}

TEST_CASE("total revenue ignores inner prices") {
    const TechnoEconomicConfig cfg = week_config();
    const Profile wind = synthesize_profile(ProfileKind::wind, 70.0, 8, 168);
    const Profile solar = synthesize_profile(ProfileKind::solar, 35.0, 9, 168);
    std::mt19937_64 rng(23);
    const auto rc = testing::random_feasible_schedule(rng, cfg, wind, solar);
    const auto d = testing::random_distribution(rng, rc.schedule);
    std::vector<PriceSet> samples;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 10; ++i) samples.push_back(PriceSet::market(cfg, U(rng), 5.0 * U(rng)));
    const auto l = ledger(rc.schedule, rc.caps, samples[0], d, cfg);
    CHECK(price_invariance_gap(rc.schedule, rc.caps, d, cfg, samples) <= 1e-6 * std::abs(l.total));
    CHECK(price_invariance_gap(rc.schedule, rc.caps, d, cfg, std::span(samples.data(), 1)) == 0.0);
}

TEST_CASE("an open tank cycle moves revenue by the hydrogen price term") {
    const TechnoEconomicConfig cfg = week_config();
    const Profile wind = synthesize_profile(ProfileKind::wind, 70.0, 8, 168);
    const Profile solar = synthesize_profile(ProfileKind::solar, 35.0, 9, 168);
    std::mt19937_64 rng(29);
    auto rc = testing::random_feasible_schedule(rng, cfg, wind, solar);
    Schedule& s = rc.schedule;
    // Produce 500 Nm³/h more hydrogen in hour 10 and leave it in the tank.
    s.q_in[10] += 500.0;
    s.P_AE[10] += 500.0 * cfg.kappa_h2();
    s.P_purch[10] += 500.0 * cfg.kappa_h2();
    for (std::size_t t = 11; t <= 168; ++t) s.n_sto[t] += 500.0;
    const auto d = testing::random_distribution(rng, s);
    const std::vector<PriceSet> samples{PriceSet::market(cfg, 0.2, 1.0)};
    CHECK_THROWS_AS(price_invariance_gap(s, rc.caps, d, cfg, samples), PreconditionError);

    const double w = 8760.0 / 168.0;
    const PriceSet p = PriceSet::market(cfg, 0.2, 1.7);
    const double drift = s.n_sto[168] - s.n_sto[0];
    CHECK(inner_price_term(s, d, p, cfg) == doctest::Approx(w * 1.7 * drift).epsilon(1e-9));
    const double j1 = ledger(s, rc.caps, PriceSet::market(cfg, 0.2, 0.0), d, cfg).total;
    const double j2 = ledger(s, rc.caps, p, d, cfg).total;
    CHECK(j2 - j1 == doctest::Approx(w * 1.7 * drift).epsilon(1e-6));
}

TEST_CASE("broken distribution identities are rejected") {
    const TechnoEconomicConfig cfg = week_config();
    const Profile wind = synthesize_profile(ProfileKind::wind, 70.0, 8, 168);
    const Profile solar = synthesize_profile(ProfileKind::solar, 35.0, 9, 168);
    std::mt19937_64 rng(31);
    const auto rc = testing::random_feasible_schedule(rng, cfg, wind, solar);
    auto d = testing::random_distribution(rng, rc.schedule);
    d.P_AE_inner[3] += 1.0;
    CHECK_THROWS_AS(ledger(rc.schedule, rc.caps, PriceSet::market(cfg), d, cfg), InconsistencyError);
}

TEST_CASE("earnings ratio report and minimum-ER check") {
    InvestorLedger l;
    auto set = [](InvestorAccount& a, double invest, double er) {
        a.invest = invest;
        a.profit = invest * (1.0 + er);
        a.net = a.profit - a.invest;
        a.er = er;
    };
    set(l.rg, 100.0, 0.10);
    set(l.aehs, 50.0, 0.08);
    set(l.as, 20.0, 0.05);
    const auto r = er_report(l);
    CHECK(r.dev_rg_aehs == doctest::Approx(0.02));
    CHECK(r.dev_aehs_as == doctest::Approx(0.03));
    CHECK(r.deviation_sum == doctest::Approx(0.05));

    set(l.rg, 100.0, 0.08);
    set(l.aehs, 50.0, 0.08);
    set(l.as, 20.0, 0.08);
    CHECK(er_report(l).deviation_sum == doctest::Approx(0.0));

    TechnoEconomicConfig cfg;
    CHECK(check_min_er(l, cfg).all());
    set(l.aehs, 50.0, -0.01);
    const auto chk = check_min_er(l, cfg);
    CHECK(chk.rg);
    CHECK_FALSE(chk.aehs);
    // With ER_min = 0 the check is exactly J_i >= 0.
    CHECK(chk.aehs == (l.aehs.net >= 0.0));

    set(l.as, 0.0, 0.0);
    CHECK_THROWS_AS(er_report(l), DomainError);
}

TEST_CASE("config validation") {
    TechnoEconomicConfig cfg;
    cfg.interest_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TechnoEconomicConfig{};
    cfg.horizon = 100;
    CHECK_THROWS_AS(cfg.steps_per_as_period(), ConfigError);
    cfg.horizon = 96;
    CHECK(cfg.steps_per_as_period() == 24);
    CHECK(cfg.horizon_nh3_cap_t() == doctest::Approx(1e5 * 96.0 / 8760.0));
}
