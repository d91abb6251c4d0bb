#include <cmath>

#include "doctest.h"
#include "repta/errors.hpp"
#include "repta/pricing.hpp"
#include "support.hpp"

using namespace repta;

namespace {

struct Stage1 {
    TechnoEconomicConfig cfg;
    SizingResult result;
};

const Stage1& stage1() {
    static const Stage1 s = [] {
        Stage1 out;
        out.cfg.horizon = 72;
        out.cfg.er_min_rg = out.cfg.er_min_aehs = out.cfg.er_min_as = -10.0;
        const auto w = synthesize_profile(ProfileKind::wind, 3500.0 * 72 / 8760, 3, 72);
        const auto v = synthesize_profile(ProfileKind::solar, 1800.0 * 72 / 8760, 4, 72);
        out.result = size_system(out.cfg, w, v);
        return out;
    }();
    return s;
}

}  // namespace

TEST_CASE("price grid arithmetic") {
    PriceGrid g;
    CHECK(g.p_lo == 0.0);
    CHECK(g.p_hi == 0.5);
    CHECK(g.N_p == 128);
    CHECK(g.step() == doctest::Approx(0.5 / 128));
    PriceGrid d{0.3, 0.3, 128};
    CHECK(d.degenerate());
    CHECK(d.step() == 0.0);
}

TEST_CASE("pricing model size") {
    const auto& s = stage1();
    REQUIRE(s.result.caps.C_HS > 0.0);
    const auto m = build_pricing_model(s.result, s.cfg);
    CHECK(m.b.size() == 128);
    CHECK(m.z_ae.size() + m.z_as.size() == 256);
    CHECK(m.model.count_vars(milp::VarDomain::binary) == 128);

    const auto d = build_pricing_model(s.result, s.cfg, PriceGrid{0.3, 0.3, 128});
    CHECK(d.b.size() == 1);
}

TEST_CASE("invalid grids are rejected") {
    const auto& s = stage1();
    CHECK_THROWS_AS(build_pricing_model(s.result, s.cfg, PriceGrid{0.5, 0.2, 8}), DomainError);
    CHECK_THROWS_AS(build_pricing_model(s.result, s.cfg, PriceGrid{-0.1, 0.2, 8}), DomainError);
    CHECK_THROWS_AS(build_pricing_model(s.result, s.cfg, PriceGrid{0.0, 0.5, 1}), DomainError);
    CHECK_THROWS_AS(build_pricing_model(s.result, s.cfg, PriceGrid{0.0, INFINITY, 8}), DomainError);
    CHECK_THROWS_AS(build_pricing_model(s.result, s.cfg, PriceGrid{}, -1.0), DomainError);
}

TEST_CASE("zero investment leaves the earnings ratio undefined") {
    auto s = stage1();
    s.result.invest_star.rg = 0.0;
    CHECK_THROWS_AS(build_pricing_model(s.result, s.cfg), DomainError);
}

TEST_CASE("pricing matches the closed-form optimum and keeps the total") {
    const auto& s = stage1();
    for (const PriceGrid g : {PriceGrid{0.0, 0.5, 8}, PriceGrid{0.1, 0.4, 16}, PriceGrid{0.25, 0.25, 8}}) {
        const auto r = price_system(s.result, s.cfg, g);
        const auto o = testing::pricing_oracle(s.result, s.cfg, g, 5.0);
        REQUIRE_FALSE(std::isnan(o.objective));
        CHECK(r.objective == doctest::Approx(o.objective).epsilon(1e-6).scale(1.0));
        CHECK(std::abs(r.ledger.total - s.result.dtr) <= 1e-6 * std::abs(s.result.dtr));
        CHECK(r.er.deviation_sum == doctest::Approx(r.objective).epsilon(1e-6).scale(1.0));
        CHECK(r.prices.p_inner >= g.p_lo - 1e-12);
        CHECK(r.prices.p_inner <= g.p_hi + 1e-12);
    }
}

TEST_CASE("refining the grid never worsens the deviation") {
    const auto& s = stage1();
    double prev = INFINITY;
    for (int n : {8, 16, 32}) {
        const auto r = price_system(s.result, s.cfg, PriceGrid{0.0, 0.5, n});
        CHECK(r.objective <= prev + 1e-9);
        prev = r.objective;
    }
}

TEST_CASE("unreachable minimum earnings ratios report the best attainable point") {
    auto cfg = stage1().cfg;
    cfg.er_min_rg = cfg.er_min_aehs = cfg.er_min_as = 5.0;
    try {
        price_system(stage1().result, cfg, PriceGrid{0.0, 0.5, 8});
        FAIL("expected ErUnreachableError");
    } catch (const ErUnreachableError& e) {
        CHECK(e.family() == "earnings_ratio");
        const auto& er = e.best_er();
        CHECK(std::isfinite(er[0]));
        CHECK(std::min({er[0], er[1], er[2]}) < 5.0);
    }
}
