#include "dense_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace repta::milp::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;

double pow2_round(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        return 1.0;
    }
    return std::exp2(std::round(std::log2(v)));
}

enum class NonbasicAt : std::uint8_t { lower, upper, free_zero };

class Tableau {
public:
    Tableau(std::size_t m, std::size_t ncol) : m_(m), ncol_(ncol), data_(m * ncol, 0.0) {}
    double* row(std::size_t i) { return data_.data() + i * ncol_; }
    const double* row(std::size_t i) const { return data_.data() + i * ncol_; }
    double& at(std::size_t i, std::size_t j) { return data_[i * ncol_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * ncol_ + j]; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return ncol_; }

private:
    std::size_t m_, ncol_;
    std::vector<double> data_;
};

struct SimplexState {
    Tableau tab;
    std::vector<double> lo, hi, value, cost, reduced;
    std::vector<std::int32_t> basic_row;  // per column, -1 when nonbasic
    std::vector<std::int32_t> basis;      // per row, basic column
    std::vector<NonbasicAt> at;
    std::int64_t iterations = 0;
    std::size_t first_artificial = 0;

    SimplexState(std::size_t m, std::size_t ncol)
        : tab(m, ncol), lo(ncol), hi(ncol), value(ncol, 0.0), cost(ncol, 0.0), reduced(ncol, 0.0),
          basic_row(ncol, -1), basis(m, -1), at(ncol, NonbasicAt::lower) {}

    void recompute_basic_values() {
        const std::size_t m = tab.rows(), n = tab.cols();
        for (std::size_t i = 0; i < m; ++i) {
            const double* r = tab.row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (basic_row[j] < 0 && value[j] != 0.0) {
                    s -= r[j] * value[j];
                }
            }
            value[static_cast<std::size_t>(basis[i])] = s;
        }
    }

    void recompute_reduced_costs() {
        const std::size_t m = tab.rows(), n = tab.cols();
        reduced = cost;
        for (std::size_t i = 0; i < m; ++i) {
            const double cb = cost[static_cast<std::size_t>(basis[i])];
            if (cb == 0.0) {
                continue;
            }
            const double* r = tab.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                reduced[j] -= cb * r[j];
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            reduced[static_cast<std::size_t>(basis[i])] = 0.0;
        }
    }

    void pivot(std::size_t r, std::size_t q) {
        const std::size_t m = tab.rows(), n = tab.cols();
        double* pr = tab.row(r);
        const double inv = 1.0 / pr[q];
        for (std::size_t j = 0; j < n; ++j) {
            pr[j] *= inv;
        }
        pr[q] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r) {
                continue;
            }
            double* ri = tab.row(i);
            const double f = ri[q];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                ri[j] -= f * pr[j];
            }
            ri[q] = 0.0;
        }
        const double fd = reduced[q];
        if (fd != 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                reduced[j] -= fd * pr[j];
            }
            reduced[q] = 0.0;
        }
        const auto leaving = static_cast<std::size_t>(basis[r]);
        basic_row[leaving] = -1;
        basis[r] = static_cast<std::int32_t>(q);
        basic_row[q] = static_cast<std::int32_t>(r);
    }

    // Returns false when unbounded, true on optimality. Throws nothing; the
    // iteration cap is reported through `hit_limit`.
    bool run(std::int64_t max_iterations, bool& hit_limit) {
        const std::size_t m = tab.rows(), n = tab.cols();
        int degenerate_run = 0;
        hit_limit = false;
        for (std::int64_t it = 0;; ++it) {
            if (it >= max_iterations) {
                hit_limit = true;
                return true;
            }
            if (it % 64 == 63) {
                recompute_basic_values();
            }
            const bool bland = degenerate_run > 50;

            // Pricing.
            std::int64_t q = -1;
            double best = 0.0;
            int dir = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (basic_row[j] >= 0 || lo[j] == hi[j]) {
                    continue;
                }
                const double d = reduced[j];
                int cand_dir = 0;
                switch (at[j]) {
                    case NonbasicAt::lower: cand_dir = d < -kDualTol ? 1 : 0; break;
                    case NonbasicAt::upper: cand_dir = d > kDualTol ? -1 : 0; break;
                    case NonbasicAt::free_zero: cand_dir = d < -kDualTol ? 1 : (d > kDualTol ? -1 : 0); break;
                }
                if (cand_dir == 0) {
                    continue;
                }
                if (bland) {
                    q = static_cast<std::int64_t>(j);
                    dir = cand_dir;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = static_cast<std::int64_t>(j);
                    dir = cand_dir;
                }
            }
            if (q < 0) {
                return true;
            }
            const auto qc = static_cast<std::size_t>(q);

            // Ratio test.
            const double flip_theta =
                std::isfinite(lo[qc]) && std::isfinite(hi[qc]) ? hi[qc] - lo[qc] : kInf;
            double theta = kInf;
            std::int64_t leave_row = -1;
            bool leave_to_upper = false;
            double leave_pivot = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double alpha = tab.at(i, qc);
                if (std::abs(alpha) <= kPivotTol) {
                    continue;
                }
                const auto b = static_cast<std::size_t>(basis[i]);
                const double rate = -dir * alpha;
                double limit = kInf;
                bool to_upper = false;
                if (rate < 0.0 && std::isfinite(lo[b])) {
                    limit = std::max(0.0, (value[b] - lo[b]) / (-rate));
                } else if (rate > 0.0 && std::isfinite(hi[b])) {
                    limit = std::max(0.0, (hi[b] - value[b]) / rate);
                    to_upper = true;
                }
                if (!std::isfinite(limit)) {
                    continue;
                }
                bool take = false;
                if (leave_row < 0 || limit < theta - 1e-12) {
                    take = true;
                } else if (limit <= theta + 1e-12) {
                    take = bland ? basis[i] < basis[static_cast<std::size_t>(leave_row)]
                                 : std::abs(alpha) > std::abs(leave_pivot);
                }
                if (take) {
                    theta = limit;
                    leave_row = static_cast<std::int64_t>(i);
                    leave_to_upper = to_upper;
                    leave_pivot = alpha;
                }
            }
            const bool bound_flip = flip_theta <= theta;
            if (bound_flip) {
                theta = flip_theta;
            }
            if (!std::isfinite(theta)) {
                return false;
            }
            ++iterations;
            degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

            // Apply step.
            if (theta > 0.0) {
                value[qc] += dir * theta;
                for (std::size_t i = 0; i < m; ++i) {
                    const double alpha = tab.at(i, qc);
                    if (alpha != 0.0) {
                        value[static_cast<std::size_t>(basis[i])] -= dir * theta * alpha;
                    }
                }
            }
            if (bound_flip) {
                at[qc] = dir > 0 ? NonbasicAt::upper : NonbasicAt::lower;
                value[qc] = dir > 0 ? hi[qc] : lo[qc];
                continue;
            }
            const auto r = static_cast<std::size_t>(leave_row);
            const auto leaving = static_cast<std::size_t>(basis[r]);
            pivot(r, qc);
            at[leaving] = leave_to_upper ? NonbasicAt::upper : NonbasicAt::lower;
            value[leaving] = leave_to_upper ? hi[leaving] : lo[leaving];
            if (leaving >= first_artificial) {
                // Artificials never re-enter once they have left the basis.
                lo[leaving] = hi[leaving] = value[leaving] = 0.0;
                at[leaving] = NonbasicAt::lower;
            }
        }
    }
};

}  // namespace

LpSolution solve_dense_lp(const LpProblem& p) {
    const std::size_t n = p.num_cols();
    const std::size_t m = p.num_rows();
    LpSolution out;

    // Equilibrate: column scale first, then rows, both rounded to powers of two.
    std::vector<double> col_scale(n, 1.0), row_scale(m, 1.0);
    {
        std::vector<double> cmax(n, 0.0), cmin(n, kInf);
        for (const auto& row : p.rows) {
            for (const auto& [j, a] : row) {
                const double v = std::abs(a);
                if (v > 0.0) {
                    cmax[static_cast<std::size_t>(j)] = std::max(cmax[static_cast<std::size_t>(j)], v);
                    cmin[static_cast<std::size_t>(j)] = std::min(cmin[static_cast<std::size_t>(j)], v);
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (cmax[j] > 0.0) {
                col_scale[j] = pow2_round(1.0 / std::sqrt(cmax[j] * cmin[j]));
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            double rmax = 0.0;
            for (const auto& [j, a] : p.rows[i]) {
                rmax = std::max(rmax, std::abs(a * col_scale[static_cast<std::size_t>(j)]));
            }
            if (rmax > 0.0) {
                row_scale[i] = pow2_round(1.0 / rmax);
            }
        }
    }
    double cost_scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cost_scale = std::max(cost_scale, std::abs(p.cost[j] * col_scale[j]));
    }
    cost_scale = cost_scale > 0.0 ? pow2_round(1.0 / cost_scale) : 1.0;

    // Columns: structural [0,n), slack [n,n+m), artificial [n+m, n+2m).
    const std::size_t ncol = n + 2 * m;
    SimplexState s(m, ncol);
    s.first_artificial = n + m;
    for (std::size_t j = 0; j < n; ++j) {
        s.lo[j] = p.col_lo[j] / col_scale[j];
        s.hi[j] = p.col_hi[j] / col_scale[j];
        if (s.lo[j] > s.hi[j]) {
            out.status = LpStatus::infeasible;
            return out;
        }
        if (std::isfinite(s.lo[j])) {
            s.at[j] = NonbasicAt::lower;
            s.value[j] = s.lo[j];
        } else if (std::isfinite(s.hi[j])) {
            s.at[j] = NonbasicAt::upper;
            s.value[j] = s.hi[j];
        } else {
            s.at[j] = NonbasicAt::free_zero;
            s.value[j] = 0.0;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t sl = n + i;
        const std::size_t ar = n + m + i;
        s.lo[sl] = p.row_lo[i] * row_scale[i];
        s.hi[sl] = p.row_hi[i] * row_scale[i];
        if (s.lo[sl] > s.hi[sl]) {
            out.status = LpStatus::infeasible;
            return out;
        }
        s.lo[ar] = 0.0;
        s.hi[ar] = 0.0;
        double activity = 0.0;
        double* row = s.tab.row(i);
        for (const auto& [j, a] : p.rows[i]) {
            const auto jc = static_cast<std::size_t>(j);
            const double v = a * col_scale[jc] * row_scale[i];
            row[jc] += v;
            activity += v * s.value[jc];
        }
        // a x - s = 0, written with the chosen basic column at coefficient 1.
        if (activity >= s.lo[sl] - kPrimalTol && activity <= s.hi[sl] + kPrimalTol) {
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = -row[j];
            }
            row[sl] = 1.0;
            s.basis[i] = static_cast<std::int32_t>(sl);
            s.basic_row[sl] = static_cast<std::int32_t>(i);
            s.value[sl] = activity;
        } else {
            const double target = activity < s.lo[sl] ? s.lo[sl] : s.hi[sl];
            s.at[sl] = activity < s.lo[sl] ? NonbasicAt::lower : NonbasicAt::upper;
            s.value[sl] = target;
            // a x - s + sigma * art = 0, art = (s - a x) / sigma >= 0
            const double sigma = target > activity ? 1.0 : -1.0;
            row[sl] = -1.0;
            row[ar] = sigma;
            for (std::size_t j = 0; j < n + m; ++j) {
                row[j] /= sigma;
            }
            row[ar] = 1.0;
            s.hi[ar] = kInf;
            s.basis[i] = static_cast<std::int32_t>(ar);
            s.basic_row[ar] = static_cast<std::int32_t>(i);
            s.value[ar] = std::abs(target - activity);
        }
    }

    const std::int64_t max_iter = 200 * static_cast<std::int64_t>(m + n) + 20000;
    bool hit_limit = false;

    // Phase I
    bool need_phase1 = false;
    for (std::size_t i = 0; i < m; ++i) {
        if (static_cast<std::size_t>(s.basis[i]) >= n + m) {
            s.cost[static_cast<std::size_t>(s.basis[i])] = 1.0;
            need_phase1 = true;
        }
    }
    if (need_phase1) {
        s.recompute_reduced_costs();
        s.run(max_iter, hit_limit);
        s.recompute_basic_values();
        out.iterations = s.iterations;
        if (hit_limit) {
            out.status = LpStatus::iteration_limit;
            return out;
        }
        double infeas = 0.0;
        for (std::size_t j = n + m; j < ncol; ++j) {
            infeas += std::abs(s.value[j]);
        }
        if (infeas > 1e-7) {
            out.status = LpStatus::infeasible;
            return out;
        }
    }
    for (std::size_t j = n + m; j < ncol; ++j) {
        s.hi[j] = 0.0;
        s.lo[j] = 0.0;
        s.value[j] = 0.0;
        s.cost[j] = 0.0;
    }
    s.recompute_basic_values();

    // Phase II
    for (std::size_t j = 0; j < n; ++j) {
        s.cost[j] = p.cost[j] * col_scale[j] * cost_scale;
    }
    s.recompute_reduced_costs();
    const bool bounded = s.run(max_iter, hit_limit);
    s.recompute_basic_values();
    out.iterations = s.iterations;
    if (hit_limit) {
        out.status = LpStatus::iteration_limit;
        return out;
    }
    if (!bounded) {
        out.status = LpStatus::unbounded;
        return out;
    }
    out.status = LpStatus::optimal;
    out.x.resize(n);
    out.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double v = s.value[j];
        // Snap to bounds where the drift is only roundoff.
        if (std::isfinite(s.lo[j]) && v < s.lo[j]) v = s.lo[j];
        if (std::isfinite(s.hi[j]) && v > s.hi[j]) v = s.hi[j];
        out.x[j] = v * col_scale[j];
        out.objective += p.cost[j] * out.x[j];
    }
    return out;
}

}  // namespace repta::milp::detail
