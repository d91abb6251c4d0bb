#include <cmath>
#include <cstdlib>

#include "Highs.h"
#include "backends.hpp"
#include "repta/errors.hpp"

namespace repta::milp::detail {

namespace {

double to_highs(double v) {
    if (v == kInf) return kHighsInf;
    if (v == -kInf) return -kHighsInf;
    return v;
}

}  // namespace

class HighsBackend final : public Backend {
public:
    std::string name() const override { return "highs"; }

    SolveResult solve(const Model& model, const SolveOptions& options) override {
        const auto n = static_cast<HighsInt>(model.num_vars());
        const auto m = static_cast<HighsInt>(model.num_rows());

        HighsLp lp;
        lp.num_col_ = n;
        lp.num_row_ = m;
        lp.sense_ = model.objective_sense() == ObjectiveSense::maximize ? ObjSense::kMaximize : ObjSense::kMinimize;
        lp.offset_ = model.objective().constant();
        lp.col_cost_.assign(static_cast<std::size_t>(n), 0.0);
        for (const auto& [v, c] : model.objective().terms()) {
            lp.col_cost_[static_cast<std::size_t>(v.index)] = c;
        }
        lp.col_lower_.resize(static_cast<std::size_t>(n));
        lp.col_upper_.resize(static_cast<std::size_t>(n));
        lp.integrality_.assign(static_cast<std::size_t>(n), HighsVarType::kContinuous);
        bool has_integers = false;
        for (HighsInt j = 0; j < n; ++j) {
            const auto& info = model.vars()[static_cast<std::size_t>(j)];
            lp.col_lower_[static_cast<std::size_t>(j)] = to_highs(info.lower);
            lp.col_upper_[static_cast<std::size_t>(j)] = to_highs(info.upper);
            if (info.domain != VarDomain::continuous) {
                lp.integrality_[static_cast<std::size_t>(j)] = HighsVarType::kInteger;
                has_integers = true;
            }
        }
        if (!has_integers) {
            lp.integrality_.clear();
        }

        // Row-wise storage.
        auto& a = lp.a_matrix_;
        a.format_ = MatrixFormat::kRowwise;
        a.num_col_ = n;
        a.num_row_ = m;
        a.start_.clear();
        a.start_.reserve(static_cast<std::size_t>(m) + 1);
        a.start_.push_back(0);
        lp.row_lower_.reserve(static_cast<std::size_t>(m));
        lp.row_upper_.reserve(static_cast<std::size_t>(m));
        for (const auto& r : model.rows()) {
            for (const auto& [j, c] : r.terms) {
                a.index_.push_back(static_cast<HighsInt>(j));
                a.value_.push_back(c);
            }
            a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
            lp.row_lower_.push_back(to_highs(r.lower));
            lp.row_upper_.push_back(to_highs(r.upper));
        }

        Highs highs;
        highs.setOptionValue("output_flag", std::getenv("REPTA_SOLVER_LOG") != nullptr);
        highs.setOptionValue("mip_rel_gap", options.relative_gap);
        highs.setOptionValue("mip_abs_gap", 1e-9);
        highs.setOptionValue("time_limit", options.time_limit_s);
        highs.setOptionValue("threads", 1);
        highs.setOptionValue("random_seed", 0);
        if (highs.passModel(std::move(lp)) == HighsStatus::kError) {
            throw ValidationError("HiGHS rejected model '" + model.name() + "'");
        }
        highs.run();

        SolveResult result;
        result.backend = name();
        const HighsModelStatus status = highs.getModelStatus();
        const HighsInfo& info = highs.getInfo();
        const bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;
        switch (status) {
            case HighsModelStatus::kOptimal: result.status = SolveStatus::optimal; break;
            case HighsModelStatus::kInfeasible: result.status = SolveStatus::infeasible; break;
            case HighsModelStatus::kUnbounded: result.status = SolveStatus::unbounded; break;
            case HighsModelStatus::kUnboundedOrInfeasible:
                result.status = has_primal ? SolveStatus::unbounded : SolveStatus::infeasible;
                break;
            case HighsModelStatus::kModelEmpty: result.status = SolveStatus::optimal; break;
            default: result.status = SolveStatus::limit; break;
        }
        if (has_primal && (result.status == SolveStatus::optimal || result.status == SolveStatus::limit)) {
            result.values = highs.getSolution().col_value;
            result.objective = info.objective_function_value;
            result.bound = has_integers ? info.mip_dual_bound : info.objective_function_value;
            result.gap = has_integers ? info.mip_gap : 0.0;
        } else if (result.status == SolveStatus::optimal && n > 0) {
            // LP optimum without a flagged primal status should not happen.
            result.status = SolveStatus::limit;
        }
        return result;
    }
};

std::unique_ptr<Backend> make_highs_backend() { return std::make_unique<HighsBackend>(); }

}  // namespace repta::milp::detail
