#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace repta::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarDomain { continuous, binary, integer };

// Opaque handle to a model column. `model` identifies the owning Model so that
// handles cannot silently cross models.
struct Var {
    std::uint64_t model = 0;
    std::int32_t index = -1;

    bool valid() const { return index >= 0; }
    friend auto operator<=>(const Var&, const Var&) = default;
};

class LinExpr;

enum class Sense { less_equal, equal, greater_equal };

// `expr sense 0`, produced by comparing two expressions.
struct LinearConstraint {
    std::map<Var, double> terms;
    double constant = 0.0;
    Sense sense = Sense::less_equal;
};

// Sparse affine expression. Terms with zero coefficient are never stored.
class LinExpr {
public:
    LinExpr() = default;
    LinExpr(double constant) : constant_(constant) {}  // NOLINT implicit
    LinExpr(Var v) { add_term(v, 1.0); }               // NOLINT implicit

    LinExpr& add_term(Var v, double coef);
    LinExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    const std::map<Var, double>& terms() const { return terms_; }
    double constant() const { return constant_; }
    double coefficient(Var v) const;
    // Evaluate against a dense assignment indexed by Var::index.
    double evaluate(std::span<const double> values) const;

    LinExpr& operator+=(const LinExpr& rhs);
    LinExpr& operator-=(const LinExpr& rhs);
    LinExpr& operator*=(double k);

    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator-(LinExpr a) { return a *= -1.0; }
    friend LinExpr operator*(LinExpr a, double k) { return a *= k; }
    friend LinExpr operator*(double k, LinExpr a) { return a *= k; }

    friend LinearConstraint operator<=(const LinExpr& a, const LinExpr& b);
    friend LinearConstraint operator>=(const LinExpr& a, const LinExpr& b);
    friend LinearConstraint operator==(const LinExpr& a, const LinExpr& b);

private:
    std::map<Var, double> terms_;
    double constant_ = 0.0;
};

enum class ObjectiveSense { minimize, maximize };

struct VarInfo {
    VarDomain domain = VarDomain::continuous;
    double lower = 0.0;
    double upper = kInf;
    std::string name;
};

// Row stored as `lower <= sum(coef * x) <= upper`.
struct Row {
    std::vector<std::pair<std::int32_t, double>> terms;
    double lower = -kInf;
    double upper = kInf;
    std::string name;
};

class Model {
public:
    explicit Model(std::string name = "model");

    Var add_var(VarDomain domain, double lower, double upper, std::string name = {});
    Var add_continuous(double lower, double upper, std::string name = {}) {
        return add_var(VarDomain::continuous, lower, upper, std::move(name));
    }
    Var add_binary(std::string name = {}) { return add_var(VarDomain::binary, 0.0, 1.0, std::move(name)); }
    Var add_integer(double lower, double upper, std::string name = {}) {
        return add_var(VarDomain::integer, lower, upper, std::move(name));
    }
    void set_bounds(Var v, double lower, double upper);
    // Changes the domain of an existing column; bounds are kept.
    void set_domain(Var v, VarDomain domain);

    std::int32_t add_constraint(const LinearConstraint& c, std::string name = {});
    void set_objective(const LinExpr& objective, ObjectiveSense sense);

    // After freezing, any mutation throws. solve() freezes implicitly.
    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    const std::string& name() const { return name_; }
    std::uint64_t id() const { return id_; }
    std::size_t num_vars() const { return vars_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    std::size_t count_vars(VarDomain domain) const;
    const VarInfo& var(Var v) const;
    const VarInfo& var(std::int32_t index) const { return vars_.at(static_cast<std::size_t>(index)); }
    const std::vector<VarInfo>& vars() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const LinExpr& objective() const { return objective_; }
    ObjectiveSense objective_sense() const { return sense_; }

    // Human-readable LP text format: one named constraint per line.
    std::string to_lp_string() const;

private:
    void check_owned(Var v) const;
    void check_mutable() const;

    std::string name_;
    std::uint64_t id_;
    std::vector<VarInfo> vars_;
    std::vector<Row> rows_;
    LinExpr objective_;
    ObjectiveSense sense_ = ObjectiveSense::minimize;
    bool frozen_ = false;
};

enum class SolveStatus { optimal, infeasible, unbounded, limit };

std::string_view to_string(SolveStatus status);

struct SolveOptions {
    double relative_gap = 1e-4;
    double time_limit_s = 600.0;
    // "auto" prefers HiGHS when it was compiled in.
    std::string backend = "auto";
    // Node cap for the bundled branch-and-bound.
    std::int64_t node_limit = 200000;
};

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    double bound = 0.0;
    // Indexed by Var::index. Empty when no incumbent exists.
    std::vector<double> values;
    double gap = 0.0;
    double wall_time_s = 0.0;
    std::string backend;

    bool has_solution() const { return !values.empty(); }
    double value(Var v) const { return values.at(static_cast<std::size_t>(v.index)); }
    double value(const LinExpr& e) const { return e.evaluate(values); }
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual SolveResult solve(const Model& model, const SolveOptions& options) = 0;
};

std::unique_ptr<Backend> make_backend(std::string_view name);
bool highs_available();

// Freezes the model and dispatches to the backend named in options.
SolveResult solve(Model& model, const SolveOptions& options = {});

struct Violation {
    enum class Kind { row, bound, integrality };
    Kind kind;
    std::string name;
    double amount;
};

struct VerificationReport {
    std::vector<Violation> violations;
    bool feasible() const { return violations.empty(); }
};

// Lists every row, bound and integrality requirement violated by more than
// abs_tol + rel_tol * scale.
VerificationReport verify_solution(const Model& model, std::span<const double> values, double abs_tol = 1e-6,
                                   double rel_tol = 1e-6);

// Exact linearization of z = b * w for binary b and w in [0, W]. Adds z and the
// four standard inequalities to `model`.
Var big_m_product(Model& model, Var binary, Var bounded, std::string name = {});

}  // namespace repta::milp
