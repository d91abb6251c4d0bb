// Small self-contained branch-and-bound over the dense simplex. Good for the
// toy models used in unit tests; full-year models need HiGHS.
#include <chrono>
#include <cmath>
#include <queue>

#include "backends.hpp"
#include "dense_simplex.hpp"
#include "repta/errors.hpp"

namespace repta::milp::detail {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
    std::vector<double> lo, hi;
    double bound;
    int depth;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) {
            return a.bound > b.bound;
        }
        return a.depth < b.depth;
    }
};

}  // namespace

class BundledBackend final : public Backend {
public:
    std::string name() const override { return "bundled"; }

    SolveResult solve(const Model& model, const SolveOptions& options) override {
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

        // Internally always minimize.
        const double sign = model.objective_sense() == ObjectiveSense::maximize ? -1.0 : 1.0;
        LpProblem lp;
        const std::size_t n = model.num_vars();
        lp.cost.assign(n, 0.0);
        for (const auto& [v, c] : model.objective().terms()) {
            lp.cost[static_cast<std::size_t>(v.index)] = sign * c;
        }
        const double offset = sign * model.objective().constant();
        lp.col_lo.resize(n);
        lp.col_hi.resize(n);
        std::vector<std::size_t> integer_cols;
        for (std::size_t j = 0; j < n; ++j) {
            const auto& info = model.vars()[j];
            lp.col_lo[j] = info.lower;
            lp.col_hi[j] = info.upper;
            if (info.domain != VarDomain::continuous) {
                lp.col_lo[j] = std::ceil(info.lower - kIntTol);
                lp.col_hi[j] = std::floor(info.upper + kIntTol);
                integer_cols.push_back(j);
            }
        }
        for (const auto& r : model.rows()) {
            lp.rows.push_back(r.terms);
            lp.row_lo.push_back(r.lower);
            lp.row_hi.push_back(r.upper);
        }

        SolveResult result;
        result.backend = name();
        double incumbent = kInf;
        std::vector<double> best_x;
        bool unbounded = false;
        bool limited = false;

        std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
        open.push(Node{lp.col_lo, lp.col_hi, -kInf, 0});
        std::int64_t nodes = 0;
        double global_bound = -kInf;

        while (!open.empty()) {
            Node node = open.top();
            global_bound = node.bound;
            if (std::isfinite(incumbent) && gap_closed(incumbent, node.bound, options.relative_gap, offset)) {
                break;
            }
            if (nodes >= options.node_limit || elapsed() > options.time_limit_s) {
                limited = true;
                break;
            }
            open.pop();
            ++nodes;

            lp.col_lo = node.lo;
            lp.col_hi = node.hi;
            const LpSolution sol = solve_dense_lp(lp);
            if (sol.status == LpStatus::infeasible) {
                continue;
            }
            if (sol.status == LpStatus::unbounded) {
                unbounded = true;
                break;
            }
            if (sol.status == LpStatus::iteration_limit) {
                limited = true;
                continue;
            }
            if (std::isfinite(incumbent) && sol.objective >= incumbent - 1e-9 * std::max(1.0, std::abs(incumbent))) {
                continue;
            }

            std::int64_t branch_col = -1;
            double best_frac = kIntTol;
            for (const std::size_t j : integer_cols) {
                const double x = sol.x[j];
                const double frac = std::abs(x - std::round(x));
                if (frac > best_frac) {
                    best_frac = frac;
                    branch_col = static_cast<std::int64_t>(j);
                }
            }
            if (branch_col < 0) {
                incumbent = sol.objective;
                best_x = sol.x;
                for (const std::size_t j : integer_cols) {
                    best_x[j] = std::round(best_x[j]);
                }
                continue;
            }
            const auto bc = static_cast<std::size_t>(branch_col);
            const double x = sol.x[bc];
            Node down{node.lo, node.hi, sol.objective, node.depth + 1};
            down.hi[bc] = std::floor(x);
            Node up{node.lo, node.hi, sol.objective, node.depth + 1};
            up.lo[bc] = std::ceil(x);
            open.push(std::move(down));
            open.push(std::move(up));
        }
        if (open.empty()) {
            global_bound = incumbent;
        }

        result.wall_time_s = elapsed();
        if (unbounded) {
            result.status = SolveStatus::unbounded;
            return result;
        }
        if (!std::isfinite(incumbent)) {
            result.status = limited ? SolveStatus::limit : SolveStatus::infeasible;
            return result;
        }
        result.values = std::move(best_x);
        result.objective = sign * (incumbent + offset);
        result.bound = sign * (global_bound + offset);
        result.gap = std::abs(incumbent - global_bound) / std::max(1e-10, std::abs(incumbent + offset));
        result.status = limited ? SolveStatus::limit : SolveStatus::optimal;
        return result;
    }

private:
    static bool gap_closed(double incumbent, double bound, double rel_gap, double offset) {
        const double diff = incumbent - bound;
        return diff <= 1e-9 || diff <= rel_gap * std::max(1e-10, std::abs(incumbent + offset));
    }
};

std::unique_ptr<Backend> make_bundled_backend() { return std::make_unique<BundledBackend>(); }

}  // namespace repta::milp::detail
