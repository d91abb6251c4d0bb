#include <cmath>
#include <limits>

#include "doctest.h"
#include "repta/errors.hpp"
#include "repta/milp.hpp"

using namespace repta;
using namespace repta::milp;

namespace {

std::vector<std::string> backends() {
    std::vector<std::string> out{"bundled"};
    if (highs_available()) out.push_back("highs");
    return out;
}

SolveOptions with_backend(const std::string& name) {
    SolveOptions o;
    o.backend = name;
    o.relative_gap = 1e-9;
    return o;
}

}  // namespace

TEST_CASE("bound tightening and trivial constraints") {
    Model m;
    const Var x = m.add_continuous(0.0, kInf, "x");
    m.set_bounds(x, 0.0, 10.0);
    CHECK(m.var(x).lower == 0.0);
    CHECK(m.var(x).upper == 10.0);
    m.add_constraint(LinExpr(x) <= LinExpr(x), "self");
    CHECK(m.rows().back().terms.empty());
    m.set_objective(LinExpr(x), ObjectiveSense::maximize);
    for (const auto& b : backends()) {
        Model copy = m;
        const auto r = solve(copy, with_backend(b));
        CHECK(r.status == SolveStatus::optimal);
        CHECK(r.value(x) == doctest::Approx(10.0));
    }
}

TEST_CASE("invalid input is rejected") {
    Model m;
    const Var x = m.add_continuous(0.0, 1.0, "x");
    CHECK_THROWS_AS(LinExpr().add_term(x, std::nan("")), ValidationError);
    CHECK_THROWS_AS(LinExpr(x) * std::numeric_limits<double>::infinity(), ValidationError);
    Model other;
    const Var y = other.add_continuous(0.0, 1.0, "y");
    CHECK_THROWS_AS(m.add_constraint(LinExpr(y) <= 1.0), ModelMismatchError);
    CHECK_THROWS_AS(m.set_bounds(x, 2.0, 1.0), ValidationError);
    m.freeze();
    CHECK_THROWS_AS(m.add_continuous(0.0, 1.0), ValidationError);
    Model empty;
    CHECK_THROWS_AS(solve(empty), ValidationError);
    CHECK_THROWS_AS(make_backend("gurobi"), ConfigError);
}

TEST_CASE("max x with x <= 3") {
    for (const auto& b : backends()) {
        Model m;
        const Var x = m.add_continuous(0.0, kInf, "x");
        m.add_constraint(LinExpr(x) <= 3.0);
        m.set_objective(LinExpr(x), ObjectiveSense::maximize);
        const auto r = solve(m, with_backend(b));
        CHECK(r.status == SolveStatus::optimal);
        CHECK(r.objective == doctest::Approx(3.0));
        CHECK(verify_solution(m, r.values).feasible());
    }
}

TEST_CASE("x >= 1 and x <= 0 is infeasible") {
    for (const auto& b : backends()) {
        Model m;
        const Var x = m.add_continuous(-kInf, kInf, "x");
        m.add_constraint(LinExpr(x) >= 1.0);
        m.add_constraint(LinExpr(x) <= 0.0);
        m.set_objective(LinExpr(x), ObjectiveSense::maximize);
        CHECK(solve(m, with_backend(b)).status == SolveStatus::infeasible);
    }
}

TEST_CASE("unbounded objective is reported") {
    for (const auto& b : backends()) {
        Model m;
        const Var x = m.add_continuous(0.0, kInf, "x");
        const Var y = m.add_continuous(0.0, kInf, "y");
        m.add_constraint(LinExpr(x) - y <= 1.0);
        m.set_objective(LinExpr(x) + y, ObjectiveSense::maximize);
        CHECK(solve(m, with_backend(b)).status == SolveStatus::unbounded);
    }
}

TEST_CASE("three-item knapsack matches brute force") {
    const double weight[] = {2, 3, 4};
    const double value[] = {3, 4, 5};
    double best = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        double wsum = 0, vsum = 0;
        for (int i = 0; i < 3; ++i) {
            if (mask & (1 << i)) {
                wsum += weight[i];
                vsum += value[i];
            }
        }
        if (wsum <= 5) best = std::max(best, vsum);
    }
    REQUIRE(best == 7.0);

    for (const auto& b : backends()) {
        Model m("knapsack");
        LinExpr w, v;
        std::vector<Var> x;
        for (int i = 0; i < 3; ++i) {
            x.push_back(m.add_binary("x" + std::to_string(i)));
            w += weight[i] * LinExpr(x.back());
            v += value[i] * LinExpr(x.back());
        }
        m.add_constraint(w <= 5.0, "capacity");
        m.set_objective(v, ObjectiveSense::maximize);
        const auto r = solve(m, with_backend(b));
        CHECK(r.status == SolveStatus::optimal);
        CHECK(r.objective == doctest::Approx(best));
        CHECK(r.value(x[0]) == doctest::Approx(1.0));
        CHECK(r.value(x[1]) == doctest::Approx(1.0));
        CHECK(r.value(x[2]) == doctest::Approx(0.0));
        CHECK(verify_solution(m, r.values).feasible());
    }
}

TEST_CASE("general integers with equality rows") {
    // min 3a + 2b  s.t.  a + b = 7, a - b >= 1, a, b integer in [0, 10]  -> a = 4, b = 3
    for (const auto& b : backends()) {
        Model m;
        const Var a = m.add_integer(0, 10, "a");
        const Var c = m.add_integer(0, 10, "b");
        m.add_constraint(LinExpr(a) + c == 7.0);
        m.add_constraint(LinExpr(a) - c >= 1.0);
        m.set_objective(3.0 * LinExpr(a) + 2.0 * LinExpr(c) + 5.0, ObjectiveSense::minimize);
        const auto r = solve(m, with_backend(b));
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.value(a) == doctest::Approx(4.0));
        CHECK(r.value(c) == doctest::Approx(3.0));
        CHECK(r.objective == doctest::Approx(23.0));
    }
}

TEST_CASE("verify_solution reports what is broken") {
    Model m;
    const Var x = m.add_continuous(0.0, 5.0, "x");
    const Var y = m.add_integer(0.0, 5.0, "y");
    m.add_constraint(LinExpr(x) + y <= 4.0, "cap");
    m.add_constraint(LinExpr(x) >= 0.5, "floor");
    m.set_objective(LinExpr(x) + y, ObjectiveSense::maximize);

    std::vector<double> ok{1.0, 3.0};
    CHECK(verify_solution(m, ok).feasible());

    std::vector<double> over{1.5, 3.0};
    auto rep = verify_solution(m, over);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].name == "cap");
    CHECK(rep.violations[0].kind == Violation::Kind::row);
    CHECK(rep.violations[0].amount == doctest::Approx(0.5));

    std::vector<double> frac{1.0, 2.5};
    rep = verify_solution(m, frac);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == Violation::Kind::integrality);
    CHECK(rep.violations[0].name == "y");

    std::vector<double> short_assignment{1.0};
    CHECK_THROWS_AS(verify_solution(m, short_assignment), ValidationError);
}

TEST_CASE("big_m_product is exact on every corner") {
    for (const double W : {1.0, 10.0, 2.5e6}) {
        for (const int bv : {0, 1}) {
            for (const double frac : {0.0, 0.5, 1.0, 0.42}) {
                for (const auto& backend : backends()) {
                    Model m;
                    const Var b = m.add_binary("b");
                    const Var w = m.add_continuous(0.0, W, "w");
                    const Var z = big_m_product(m, b, w);
                    m.set_bounds(b, bv, bv);
                    m.set_bounds(w, frac * W, frac * W);
                    // Push z both ways; the envelope must pin it.
                    for (const auto sense : {ObjectiveSense::maximize, ObjectiveSense::minimize}) {
                        Model copy = m;
                        copy.set_objective(LinExpr(z), sense);
                        const auto r = solve(copy, with_backend(backend));
                        REQUIRE(r.status == SolveStatus::optimal);
                        CHECK(std::abs(r.value(z) - bv * frac * W) <= 1e-9 * W);
                    }
                }
            }
        }
    }
}

TEST_CASE("big_m_product rejects unusable operands") {
    Model m;
    const Var b = m.add_binary("b");
    const Var free_w = m.add_continuous(0.0, kInf, "w");
    const Var neg_w = m.add_continuous(-1.0, 1.0, "v");
    const Var not_binary = m.add_continuous(0.0, 1.0, "c");
    CHECK_THROWS_AS(big_m_product(m, b, free_w), DomainError);
    CHECK_THROWS_AS(big_m_product(m, b, neg_w), DomainError);
    CHECK_THROWS_AS(big_m_product(m, not_binary, neg_w), DomainError);
}

TEST_CASE("time limit yields limit status") {
    // A knapsack with many equal-ratio items keeps branch and bound busy.
    Model m;
    LinExpr w, v;
    for (int i = 0; i < 40; ++i) {
        const Var x = m.add_binary();
        w += (2.0 * i + 3.0) * LinExpr(x);
        v += (2.0 * i + 3.0) * LinExpr(x);
    }
    m.add_constraint(w <= 401.5);
    m.set_objective(v, ObjectiveSense::maximize);
    SolveOptions o;
    o.backend = "bundled";
    o.node_limit = 3;
    o.relative_gap = 0.0;
    const auto r = solve(m, o);
    CHECK((r.status == SolveStatus::limit || r.status == SolveStatus::optimal));
}

TEST_CASE("LP export names every row and bound") {
    Model m("tiny");
    const Var x = m.add_continuous(0.0, 4.0, "x");
    const Var y = m.add_binary("y");
    m.add_constraint(2.0 * LinExpr(x) - y <= 3.0, "row1");
    m.set_objective(LinExpr(x) + y, ObjectiveSense::maximize);
    const std::string lp = m.to_lp_string();
    CHECK(lp.find("Maximize") != std::string::npos);
    CHECK(lp.find("row1: 2 x - y <= 3") != std::string::npos);
    CHECK(lp.find("0 <= x <= 4") != std::string::npos);
    CHECK(lp.find("Binary\n y") != std::string::npos);
}
