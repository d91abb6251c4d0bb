#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace repta::milp::detail {

// min cost^T x  s.t.  row_lo <= A x <= row_hi,  col_lo <= x <= col_hi
struct LpProblem {
    std::vector<double> cost;
    std::vector<double> col_lo, col_hi;
    std::vector<double> row_lo, row_hi;
    std::vector<std::vector<std::pair<std::int32_t, double>>> rows;

    std::size_t num_cols() const { return cost.size(); }
    std::size_t num_rows() const { return rows.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::int64_t iterations = 0;
};

// Dense-tableau bounded-variable primal simplex (two phases, Dantzig pricing
// with a Bland fallback under stalling). Intended for small models only.
LpSolution solve_dense_lp(const LpProblem& problem);

}  // namespace repta::milp::detail
