#include <cmath>

#include "doctest.h"
#include "repta/errors.hpp"
#include "repta/robust.hpp"

using namespace repta;

namespace {

struct Case {
    TechnoEconomicConfig cfg;
    Profile wind, solar;
    SizingResult det;
};

const Case& base() {
    static const Case c = [] {
        Case out;
        out.cfg.horizon = 48;
        out.wind = synthesize_profile(ProfileKind::wind, 3500.0 * 48 / 8760, 1, 48);
        out.solar = synthesize_profile(ProfileKind::solar, 1800.0 * 48 / 8760, 2, 48);
        out.det = size_system(out.cfg, out.wind, out.solar);
        return out;
    }();
    return c;
}

}  // namespace

TEST_CASE("worst-case profiles scale by 1 - alpha") {
    const Profile w{{0.8, 0.0, 1.1}, 1.0, ProfileKind::wind};
    const Profile s{{0.5, 0.2, 0.0}, 1.0, ProfileKind::solar};
    const auto [w0, s0] = worst_case_profiles(w, s, 0.0);
    CHECK(w0.values == w.values);
    CHECK(s0.values == s.values);
    const auto [w1, s1] = worst_case_profiles(w, s, 1.0);
    for (double v : w1.values) CHECK(v == 0.0);
    for (double v : s1.values) CHECK(v == 0.0);
    const auto [wa, sa] = worst_case_profiles(w, s, 0.05);
    CHECK(wa.values[0] == doctest::Approx(0.76).epsilon(1e-15));
    CHECK(sa.values[1] == doctest::Approx(0.19).epsilon(1e-15));
    CHECK(wa.kind == ProfileKind::wind);
    CHECK_THROWS_AS(worst_case_profiles(w, s, -0.01), DomainError);
    CHECK_THROWS_AS(worst_case_profiles(w, s, 1.01), DomainError);
}

TEST_CASE("robust sizing rejects bad arguments") {
    const auto& c = base();
    CHECK_THROWS_AS(solve_robust(c.det, -0.1, c.cfg, c.wind, c.solar), DomainError);
    CHECK_THROWS_AS(solve_robust(c.det, 1.5, c.cfg, c.wind, c.solar), DomainError);
    RobustEvaluator ev(c.det, c.cfg, c.wind, c.solar);
    CHECK_THROWS_AS(ev.evaluate(2.0), DomainError);
    RobustOptions bad;
    bad.alpha_tol = 0.0;
    CHECK_THROWS_AS(solve_robust(ev, 0.5, bad), DomainError);
}

TEST_CASE("beta = 0 leaves no room for uncertainty") {
    const auto& c = base();
    const auto r = solve_robust(c.det, 0.0, c.cfg, c.wind, c.solar);
    CHECK(r.alpha_star <= 1e-3);
    CHECK(r.rtr >= c.det.dtr - 1e-6 * std::abs(c.det.dtr));
    const double r_det = c.det.schedule.m_nh3 / c.cfg.horizon_nh3_cap_t();
    CHECK(r.r_AS == doctest::Approx(r_det).epsilon(1e-6));
}

TEST_CASE("alpha* and r_AS trend with beta; the revenue target holds") {
    const auto& c = base();
    REQUIRE(c.det.dtr > 0.0);
    RobustEvaluator ev(c.det, c.cfg, c.wind, c.solar);
    RobustOptions opt;
    opt.alpha_tol = 1e-2;
    double prev_alpha = -1.0, prev_ras = 2.0;
    for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto r = solve_robust(ev, beta, opt);
        CHECK(r.alpha_star >= prev_alpha);
        CHECK(r.r_AS <= prev_ras + 1e-9);
        CHECK(r.alpha_star >= 0.0);
        CHECK(r.alpha_star <= 1.0);
        CHECK(r.r_AS <= 1.0 + 1e-9);
        CHECK(r.rtr >= (1.0 - beta) * c.det.dtr - 1e-6 * std::abs(c.det.dtr));
        CHECK(r.at_alpha.caps.C_W == c.det.caps.C_W);
        CHECK(r.at_alpha.caps.N_AE == c.det.caps.N_AE);
        // Re-solve the operation model at alpha* from scratch.
        const auto [w, s] = worst_case_profiles(c.wind, c.solar, r.alpha_star);
        SizingOverrides pins;
        pins.C_W = c.det.caps.C_W;
        pins.C_S = c.det.caps.C_S;
        pins.N_AE = c.det.caps.N_AE;
        const auto fresh = size_system(c.cfg, w, s, pins);
        CHECK(fresh.dtr >= (1.0 - beta) * c.det.dtr - 1e-6 * std::abs(c.det.dtr));
        prev_alpha = r.alpha_star;
        prev_ras = r.r_AS;
    }
}

TEST_CASE("worst-case revenue falls as alpha grows") {
    const auto& c = base();
    RobustEvaluator ev(c.det, c.cfg, c.wind, c.solar);
    double prev = INFINITY;
    for (double a : {0.0, 0.1, 0.3, 0.6, 1.0}) {
        const auto* r = ev.evaluate(a);
        REQUIRE(r != nullptr);
        CHECK(r->dtr <= prev + 1e-6 * std::abs(prev));
        prev = r->dtr;
    }
    const int n = ev.solves();
    ev.evaluate(0.3);
    CHECK(ev.solves() == n);
}
