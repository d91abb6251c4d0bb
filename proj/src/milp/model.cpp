#include "repta/milp.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "repta/errors.hpp"

namespace repta::milp {

namespace {

std::atomic<std::uint64_t> g_next_model_id{1};

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string("non-finite ") + what);
    }
}

LinearConstraint make_constraint(const LinExpr& a, const LinExpr& b, Sense sense) {
    LinExpr diff = a - b;
    return LinearConstraint{diff.terms(), diff.constant(), sense};
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

LinExpr& LinExpr::add_term(Var v, double coef) {
    require_finite(coef, "coefficient");
    if (!v.valid()) {
        throw ValidationError("invalid variable handle");
    }
    if (coef == 0.0) {
        return *this;
    }
    auto [it, inserted] = terms_.try_emplace(v, coef);
    if (!inserted) {
        it->second += coef;
        if (it->second == 0.0) {
            terms_.erase(it);
        }
    }
    return *this;
}

double LinExpr::coefficient(Var v) const {
    auto it = terms_.find(v);
    return it == terms_.end() ? 0.0 : it->second;
}

double LinExpr::evaluate(std::span<const double> values) const {
    double s = constant_;
    for (const auto& [v, c] : terms_) {
        s += c * values[static_cast<std::size_t>(v.index)];
    }
    return s;
}

LinExpr& LinExpr::operator+=(const LinExpr& rhs) {
    for (const auto& [v, c] : rhs.terms_) {
        add_term(v, c);
    }
    constant_ += rhs.constant_;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& rhs) {
    for (const auto& [v, c] : rhs.terms_) {
        add_term(v, -c);
    }
    constant_ -= rhs.constant_;
    return *this;
}

LinExpr& LinExpr::operator*=(double k) {
    require_finite(k, "scale factor");
    if (k == 0.0) {
        terms_.clear();
        constant_ = 0.0;
        return *this;
    }
    for (auto& [v, c] : terms_) {
        c *= k;
    }
    constant_ *= k;
    return *this;
}

LinearConstraint operator<=(const LinExpr& a, const LinExpr& b) { return make_constraint(a, b, Sense::less_equal); }
LinearConstraint operator>=(const LinExpr& a, const LinExpr& b) { return make_constraint(a, b, Sense::greater_equal); }
LinearConstraint operator==(const LinExpr& a, const LinExpr& b) { return make_constraint(a, b, Sense::equal); }

Model::Model(std::string name) : name_(std::move(name)), id_(g_next_model_id.fetch_add(1)) {}

void Model::check_owned(Var v) const {
    if (v.model != id_ || v.index < 0 || static_cast<std::size_t>(v.index) >= vars_.size()) {
        throw ModelMismatchError("variable does not belong to model '" + name_ + "'");
    }
}

void Model::check_mutable() const {
    if (frozen_) {
        throw ValidationError("model '" + name_ + "' is frozen");
    }
}

Var Model::add_var(VarDomain domain, double lower, double upper, std::string name) {
    check_mutable();
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
        throw ValidationError("invalid bounds for variable '" + name + "'");
    }
    if (domain == VarDomain::binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    if (name.empty()) {
        name = "x" + std::to_string(vars_.size());
    }
    vars_.push_back(VarInfo{domain, lower, upper, std::move(name)});
    return Var{id_, static_cast<std::int32_t>(vars_.size() - 1)};
}

void Model::set_bounds(Var v, double lower, double upper) {
    check_mutable();
    check_owned(v);
    auto& info = vars_[static_cast<std::size_t>(v.index)];
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
        throw ValidationError("invalid bounds for variable '" + info.name + "'");
    }
    if (info.domain == VarDomain::binary && (lower < 0.0 || upper > 1.0)) {
        throw ValidationError("binary variable '" + info.name + "' bounds must lie in [0,1]");
    }
    info.lower = lower;
    info.upper = upper;
}

void Model::set_domain(Var v, VarDomain domain) {
    check_mutable();
    check_owned(v);
    auto& info = vars_[static_cast<std::size_t>(v.index)];
    if (domain == VarDomain::binary && (info.lower < 0.0 || info.upper > 1.0)) {
        throw ValidationError("variable '" + info.name + "' has bounds outside [0,1]");
    }
    info.domain = domain;
}

std::int32_t Model::add_constraint(const LinearConstraint& c, std::string name) {
    check_mutable();
    require_finite(c.constant, "constraint constant");
    Row row;
    row.terms.reserve(c.terms.size());
    for (const auto& [v, coef] : c.terms) {
        check_owned(v);
        require_finite(coef, "coefficient");
        row.terms.emplace_back(v.index, coef);
    }
    const double rhs = -c.constant;
    switch (c.sense) {
        case Sense::less_equal: row.upper = rhs; break;
        case Sense::greater_equal: row.lower = rhs; break;
        case Sense::equal: row.lower = row.upper = rhs; break;
    }
    if (name.empty()) {
        name = "c" + std::to_string(rows_.size());
    }
    row.name = std::move(name);
    rows_.push_back(std::move(row));
    return static_cast<std::int32_t>(rows_.size() - 1);
}

void Model::set_objective(const LinExpr& objective, ObjectiveSense sense) {
    check_mutable();
    for (const auto& [v, c] : objective.terms()) {
        check_owned(v);
    }
    require_finite(objective.constant(), "objective constant");
    objective_ = objective;
    sense_ = sense;
}

std::size_t Model::count_vars(VarDomain domain) const {
    std::size_t n = 0;
    for (const auto& v : vars_) {
        n += v.domain == domain ? 1 : 0;
    }
    return n;
}

const VarInfo& Model::var(Var v) const {
    check_owned(v);
    return vars_[static_cast<std::size_t>(v.index)];
}

std::string Model::to_lp_string() const {
    std::ostringstream os;
    auto write_terms = [&](const auto& terms, auto name_of) {
        bool first = true;
        for (const auto& [idx, c] : terms) {
            if (!first || c < 0.0) {
                os << (c < 0.0 ? " - " : " + ");
            }
            const double a = std::abs(c);
            if (a != 1.0) {
                os << format_number(a) << ' ';
            }
            os << name_of(idx);
            first = false;
        }
        if (first) {
            os << "0";
        }
    };
    auto var_name = [&](std::int32_t idx) -> const std::string& { return vars_[static_cast<std::size_t>(idx)].name; };

    os << "\\ Model " << name_ << '\n';
    os << (sense_ == ObjectiveSense::maximize ? "Maximize\n" : "Minimize\n") << " obj: ";
    std::vector<std::pair<std::int32_t, double>> obj;
    for (const auto& [v, c] : objective_.terms()) {
        obj.emplace_back(v.index, c);
    }
    write_terms(obj, var_name);
    if (objective_.constant() != 0.0) {
        os << (objective_.constant() < 0 ? " - " : " + ") << format_number(std::abs(objective_.constant()));
    }
    os << "\nSubject To\n";
    for (const auto& r : rows_) {
        if (r.lower == r.upper) {
            os << ' ' << r.name << ": ";
            write_terms(r.terms, var_name);
            os << " = " << format_number(r.upper) << '\n';
            continue;
        }
        if (std::isfinite(r.lower)) {
            os << ' ' << r.name << (std::isfinite(r.upper) ? "_lo" : "") << ": ";
            write_terms(r.terms, var_name);
            os << " >= " << format_number(r.lower) << '\n';
        }
        if (std::isfinite(r.upper)) {
            os << ' ' << r.name << (std::isfinite(r.lower) ? "_hi" : "") << ": ";
            write_terms(r.terms, var_name);
            os << " <= " << format_number(r.upper) << '\n';
        }
    }
    os << "Bounds\n";
    for (const auto& v : vars_) {
        if (v.domain == VarDomain::binary) {
            continue;
        }
        os << ' ';
        if (std::isfinite(v.lower)) {
            os << format_number(v.lower);
        } else {
            os << "-inf";
        }
        os << " <= " << v.name << " <= ";
        if (std::isfinite(v.upper)) {
            os << format_number(v.upper);
        } else {
            os << "+inf";
        }
        os << '\n';
    }
    os << "General\n";
    for (const auto& v : vars_) {
        if (v.domain == VarDomain::integer) {
            os << ' ' << v.name << '\n';
        }
    }
    os << "Binary\n";
    for (const auto& v : vars_) {
        if (v.domain == VarDomain::binary) {
            os << ' ' << v.name << '\n';
        }
    }
    os << "End\n";
    return os.str();
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::limit: return "limit";
    }
    return "unknown";
}

VerificationReport verify_solution(const Model& model, std::span<const double> values, double abs_tol,
                                   double rel_tol) {
    if (values.size() != model.num_vars()) {
        throw ValidationError("assignment covers " + std::to_string(values.size()) + " of " +
                              std::to_string(model.num_vars()) + " variables");
    }
    VerificationReport report;
    for (std::size_t j = 0; j < model.num_vars(); ++j) {
        const auto& v = model.vars()[j];
        const double x = values[j];
        if (!std::isfinite(x)) {
            report.violations.push_back({Violation::Kind::bound, v.name, kInf});
            continue;
        }
        const double tol = abs_tol + rel_tol * std::abs(x);
        if (x < v.lower - tol) {
            report.violations.push_back({Violation::Kind::bound, v.name, v.lower - x});
        } else if (x > v.upper + tol) {
            report.violations.push_back({Violation::Kind::bound, v.name, x - v.upper});
        }
        if (v.domain != VarDomain::continuous) {
            const double frac = std::abs(x - std::round(x));
            if (frac > abs_tol + rel_tol * std::abs(x)) {
                report.violations.push_back({Violation::Kind::integrality, v.name, frac});
            }
        }
    }
    for (const auto& r : model.rows()) {
        double activity = 0.0;
        double scale = 0.0;
        for (const auto& [idx, c] : r.terms) {
            const double t = c * values[static_cast<std::size_t>(idx)];
            activity += t;
            scale = std::max(scale, std::abs(t));
        }
        const double tol = abs_tol + rel_tol * std::max({scale, std::abs(r.lower == -kInf ? 0.0 : r.lower),
                                                         std::abs(r.upper == kInf ? 0.0 : r.upper)});
        if (activity < r.lower - tol) {
            report.violations.push_back({Violation::Kind::row, r.name, r.lower - activity});
        } else if (activity > r.upper + tol) {
            report.violations.push_back({Violation::Kind::row, r.name, activity - r.upper});
        }
    }
    return report;
}

Var big_m_product(Model& model, Var binary, Var bounded, std::string name) {
    const auto& b = model.var(binary);
    const auto& w = model.var(bounded);
    if (b.domain != VarDomain::binary) {
        throw DomainError("big_m_product: '" + b.name + "' is not binary");
    }
    if (!std::isfinite(w.upper)) {
        throw DomainError("big_m_product: '" + w.name + "' has no finite upper bound");
    }
    if (w.lower < 0.0) {
        throw DomainError("big_m_product: '" + w.name + "' must be non-negative");
    }
    const double big_m = w.upper;
    if (name.empty()) {
        name = b.name + "_x_" + w.name;
    }
    const Var z = model.add_continuous(0.0, big_m, name);
    model.add_constraint(LinExpr(z) <= big_m * LinExpr(binary), name + "_ub_b");
    model.add_constraint(LinExpr(z) <= LinExpr(bounded), name + "_ub_w");
    model.add_constraint(LinExpr(z) >= LinExpr(bounded) - big_m * (1.0 - LinExpr(binary)), name + "_lb");
    return z;
}

}  // namespace repta::milp
