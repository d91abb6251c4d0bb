#include <cmath>
#include <random>

#include "doctest.h"
#include "repta/ammonia.hpp"
#include "repta/errors.hpp"

using namespace repta;

namespace {

AmmoniaParams rated_params() {
    AmmoniaParams p;
    p.q_H2_rated = rated_h2_flow(1e5, p.C_H2mA);
    return p;
}

}  // namespace

TEST_CASE("kappa_AS from stoichiometry") {
    // 1 Nm³ H2 = 1000/22.414 mol; N2 is a third of that at 28.0134 g/mol.
    const double n2_t = 1000.0 / 22.414 / 3.0 * 28.0134 * 1e-6;
    CHECK(n2_tonnes_per_nm3_h2() == doctest::Approx(n2_t).epsilon(1e-12));
    AmmoniaParams p;
    const double expected = 0.24 * n2_t + 0.64 * 5.060e-4;
    CHECK(derive_kappa_AS(p) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(derive_kappa_AS(p) == doctest::Approx(4.237e-4).epsilon(1e-3));
    CHECK(p.kappa_AS() == derive_kappa_AS(p));

    p.kappa_N2 = 0.0;
    p.kappa_NH3 = 0.0;
    CHECK(derive_kappa_AS(p) == 0.0);
}

TEST_CASE("ammonia per Nm³ H2 matches the 3:2 stoichiometry") {
    const double nh3_t = 2.0 / 3.0 * (1000.0 / 22.414) * 17.03 * 1e-6;
    CHECK(std::abs(nh3_t - 5.060e-4) / 5.060e-4 < 2e-3);
}

TEST_CASE("as_power at rated flow") {
    const AmmoniaParams p = rated_params();
    const double q_r = 1e5 / 5.060e-4 / 8760.0;
    CHECK(p.q_H2_rated == doctest::Approx(q_r).epsilon(1e-12));
    CHECK(q_r == doctest::Approx(22560.0).epsilon(1e-4));
    CHECK(as_power(q_r, p) == doctest::Approx(9.56).epsilon(1e-3));
    CHECK(as_power(0.0, p) == 0.0);
    CHECK(as_power(2.0 * 1234.5, p) == doctest::Approx(2.0 * as_power(1234.5, p)).epsilon(1e-15));
    CHECK_THROWS_AS(as_power(-1.0, p), DomainError);
}

TEST_CASE("transition follows the first-order response") {
    CHECK(transition(880.0, 1980.0, 2.0, 0.0) == 880.0);
    const double far = transition(880.0, 1980.0, 2.0, 40.0);
    CHECK(std::abs(far - 1980.0) <= 1e-8 * 1980.0);
    CHECK(transition(880.0, 1980.0, 2.066, 2.066) == doctest::Approx(1980.0 - 1100.0 / std::exp(1.0)).epsilon(1e-12));
    CHECK(transition(880.0, 1980.0, 2.066, 2.066) == doctest::Approx(1575.3).epsilon(1e-4));
    CHECK_THROWS_AS(transition(1.0, 2.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(transition(1.0, 2.0, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(transition(1.0, 2.0, 1.0, -0.5), DomainError);
}

TEST_CASE("transition stays between its endpoints") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> q(0.0, 3000.0), T(0.05, 10.0), tau(0.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = q(rng), b = q(rng);
        const double v = transition(a, b, T(rng), tau(rng));
        CHECK(v >= std::min(a, b) - 1e-9);
        CHECK(v <= std::max(a, b) + 1e-9);
    }
}

TEST_CASE("discretize_plan: constant plan is a fixed point") {
    const AmmoniaParams p = rated_params();
    const double q = 0.8 * p.q_H2_rated;
    const auto series = discretize_plan(QssPlan{{q, q, q}}, p);
    REQUIRE(series.size() == 72);
    for (double v : series) CHECK(v == doctest::Approx(q).epsilon(1e-15));
}

TEST_CASE("discretize_plan samples the transition at step ends") {
    const AmmoniaParams p = rated_params();
    const double lo = 0.4 * p.q_H2_rated, hi = 0.9 * p.q_H2_rated;
    const auto series = discretize_plan(QssPlan{{lo, hi}}, p);
    REQUIRE(series.size() == 48);
    for (int tau = 1; tau <= 24; ++tau) {
        CHECK(series[tau - 1] == doctest::Approx(transition(lo, hi, 2.0, tau)).epsilon(1e-15));
        CHECK(series[24 + tau - 1] == doctest::Approx(transition(hi, lo, 2.0, tau)).epsilon(1e-15));
    }
}

TEST_CASE("discretize_plan rejects out-of-band setpoints and steep transitions") {
    const AmmoniaParams p = rated_params();
    CHECK_THROWS_AS(discretize_plan(QssPlan{{1.2 * p.q_H2_rated}}, p), ValidationError);
    CHECK_THROWS_AS(discretize_plan(QssPlan{{0.2 * p.q_H2_rated}}, p), ValidationError);
    // 30% -> 110% moves 0.8 * (1 - e^-0.5) ≈ 0.31 q_r in the first hour, beyond the 20%/h ramp.
    CHECK_THROWS_AS(discretize_plan(QssPlan{{0.3 * p.q_H2_rated, 1.1 * p.q_H2_rated}}, p), ValidationError);
    CHECK_THROWS_AS(discretize_plan(QssPlan{}, p), ValidationError);
    AmmoniaParams odd = p;
    odd.delta_T_AS = 2.5;
    CHECK_THROWS_AS(discretize_plan(QssPlan{{p.q_H2_rated}}, odd), ValidationError);
}

TEST_CASE("fit_T_trans recovers a noiseless time constant") {
    std::vector<double> obs;
    for (int i = 0; i < 24; ++i) obs.push_back(transition(880.0, 1980.0, 2.0, i));
    const auto f = fit_T_trans(obs, 880.0, 1980.0);
    CHECK(std::abs(f.T_trans - 2.0) <= 1e-3);
    CHECK(f.rmse <= 1e-3);
}

TEST_CASE("fit_T_trans is scale invariant") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<double> obs, scaled;
    for (int i = 0; i < 24; ++i) {
        const double v = transition(880.0, 1980.0, 2.066, i) * (1.0 + noise(rng));
        obs.push_back(v);
        scaled.push_back(v * kNm3PerKgH2);
    }
    const auto a = fit_T_trans(obs, 880.0, 1980.0);
    const auto b = fit_T_trans(scaled, 880.0 * kNm3PerKgH2, 1980.0 * kNm3PerKgH2);
    CHECK(a.T_trans == doctest::Approx(b.T_trans).epsilon(1e-3));
    CHECK(b.rmse == doctest::Approx(a.rmse * kNm3PerKgH2).epsilon(1e-3));
}

TEST_CASE("fit_T_trans limiting and error cases") {
    const std::vector<double> flat(12, 1980.0);
    const auto f = fit_T_trans(flat, 880.0, 1980.0);
    CHECK(f.T_trans == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(f.rmse == doctest::Approx(1100.0 / std::sqrt(12.0)).epsilon(1e-6));

    CHECK_THROWS_AS(fit_T_trans(flat, 1000.0, 1000.0), DomainError);
    CHECK_THROWS_AS(fit_T_trans(std::vector<double>{1.0, 2.0}, 0.0, 3.0), ValidationError);

    // Diverging data never throws; the fit just gets poor.
    std::vector<double> wild;
    for (int i = 0; i < 12; ++i) wild.push_back(i % 2 ? 5000.0 : 0.0);
    const auto w = fit_T_trans(wild, 880.0, 1980.0);
    CHECK(std::isfinite(w.T_trans));
    CHECK(w.rmse > 1000.0);
}

TEST_CASE("parameter validation") {
    AmmoniaParams p = rated_params();
    CHECK_NOTHROW(p.validate());
    p.eta_AS_min = 1.2;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}
