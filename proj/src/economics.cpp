#include "repta/economics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repta/errors.hpp"

namespace repta {

namespace {

constexpr double kKwPerMw = 1000.0;

double annual_cost(const FacilityCost& c, double r) { return crf(r, c.lifetime_years) * c.unit_cost * (1.0 + c.om_fraction); }

void require_length(const std::vector<double>& v, std::size_t n, const char* name) {
    if (v.size() != n) {
        throw ValidationError(std::string("series '") + name + "' has length " + std::to_string(v.size()) +
                              ", expected " + std::to_string(n));
    }
}

void check_schedule_shape(const Schedule& s) {
    const std::size_t n = s.size();
    require_length(s.P_W, n, "P_W");
    require_length(s.P_S, n, "P_S");
    require_length(s.P_sell, n, "P_sell");
    require_length(s.P_purch, n, "P_purch");
    require_length(s.P_curt, n, "P_curt");
    require_length(s.P_AS, n, "P_AS");
    require_length(s.q_in, n, "q_in");
    require_length(s.q_out, n, "q_out");
    if (s.has_storage()) {
        require_length(s.n_sto, n + 1, "n_sto");
    }
}

double account_er(double profit, double invest) {
    return invest > 0.0 ? (profit - invest) / invest : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double crf(double r, int years) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw DomainError("CRF needs a positive interest rate");
    }
    if (years < 1) {
        throw DomainError("CRF needs a lifetime of at least one year");
    }
    const double g = std::pow(1.0 + r, years);
    return r * g / (g - 1.0);
}

PriceSet PriceSet::market(const TechnoEconomicConfig& cfg, double p_inner, double p_h2_inner) {
    return PriceSet{p_inner, p_h2_inner, cfg.p_fit, cfg.p_purch, cfg.p_nh3};
}

Distribution Distribution::ae_first(const Schedule& s) {
    Distribution d;
    const std::size_t n = s.size();
    d.P_AE_inner.resize(n);
    d.P_AE_purch.resize(n);
    d.P_AS_inner.resize(n);
    d.P_AS_purch.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double inner = std::max(0.0, s.P_inner(t));
        d.P_AE_inner[t] = std::min(s.P_AE[t], inner);
        d.P_AS_inner[t] = inner - d.P_AE_inner[t];
        d.P_AE_purch[t] = s.P_AE[t] - d.P_AE_inner[t];
        d.P_AS_purch[t] = s.P_AS[t] - d.P_AS_inner[t];
        d.E_AE_inner += s.dt * d.P_AE_inner[t];
        d.E_AS_inner += s.dt * d.P_AS_inner[t];
    }
    return d;
}

AnnualInvestments annual_investments(const Capacities& caps, const TechnoEconomicConfig& cfg) {
    const double r = cfg.interest_rate;
    AnnualInvestments inv;
    inv.rg = annual_cost(cfg.wt, r) * kKwPerMw * caps.C_W + annual_cost(cfg.pv, r) * kKwPerMw * caps.C_S;
    inv.aehs = annual_cost(cfg.ae, r) * kKwPerMw * caps.C_AE + annual_cost(cfg.hs, r) * caps.C_HS;
    inv.as = annual_cost(cfg.as, r) * cfg.annual_nh3_t / cfg.as_block_output_t;
    return inv;
}

InvestorLedger ledger(const Schedule& s, const Capacities& caps, const PriceSet& prices, const Distribution& d,
                      const TechnoEconomicConfig& cfg) {
    check_schedule_shape(s);
    const std::size_t n = s.size();
    require_length(d.P_AE_inner, n, "P_AE_inner");
    require_length(d.P_AE_purch, n, "P_AE_purch");
    require_length(d.P_AS_inner, n, "P_AS_inner");
    require_length(d.P_AS_purch, n, "P_AS_purch");

    auto identity = [](double lhs, double rhs, std::size_t t, const char* what) {
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (std::abs(lhs - rhs) > 1e-6 * scale) {
            throw InconsistencyError(std::string("distribution identity '") + what + "' broken at hour " +
                                     std::to_string(t));
        }
    };

    double sell = 0.0, inner = 0.0, q_in = 0.0, q_out = 0.0;
    double ae_inner = 0.0, ae_purch = 0.0, as_inner = 0.0, as_purch = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        identity(s.P_inner(t), d.P_AE_inner[t] + d.P_AS_inner[t], t, "P_inner = P_AE,inner + P_AS,inner");
        identity(s.P_purch[t], d.P_AE_purch[t] + d.P_AS_purch[t], t, "P_purch = P_AE,purch + P_AS,purch");
        identity(s.P_AE[t], d.P_AE_inner[t] + d.P_AE_purch[t], t, "P_AE = P_AE,inner + P_AE,purch");
        identity(s.P_AS[t], d.P_AS_inner[t] + d.P_AS_purch[t], t, "P_AS = P_AS,inner + P_AS,purch");
        sell += s.P_sell[t];
        inner += s.P_inner(t);
        q_in += s.q_in[t];
        q_out += s.q_out[t];
        ae_inner += d.P_AE_inner[t];
        ae_purch += d.P_AE_purch[t];
        as_inner += d.P_AS_inner[t];
        as_purch += d.P_AS_purch[t];
    }
    const double dt = s.dt;
    const double w = cfg.annualization();
    const double e_scale = std::max(1.0, dt * inner);
    if (std::abs(d.E_AE_inner - dt * ae_inner) > 1e-6 * e_scale ||
        std::abs(d.E_AS_inner - dt * as_inner) > 1e-6 * e_scale) {
        throw InconsistencyError("inner energy aggregates do not match their hourly series");
    }

    const AnnualInvestments inv = annual_investments(caps, cfg);
    const double C = cfg.ammonia.C_H2mA;
    InvestorLedger l;
    l.rg.profit = w * dt * kKwPerMw * (prices.p_fit * sell + prices.p_inner * inner);
    l.aehs.profit =
        w * dt * (prices.p_h2_inner * q_in - kKwPerMw * (prices.p_inner * ae_inner + prices.p_purch * ae_purch));
    l.as.profit = w * dt *
                  (prices.p_nh3 * C * q_out - kKwPerMw * (prices.p_inner * as_inner + prices.p_purch * as_purch) -
                   prices.p_h2_inner * q_out);
    l.rg.invest = inv.rg;
    l.aehs.invest = inv.aehs;
    l.as.invest = inv.as;
    for (InvestorAccount* a : {&l.rg, &l.aehs, &l.as}) {
        a->net = a->profit - a->invest;
        a->er = account_er(a->profit, a->invest);
    }
    l.total = l.rg.net + l.aehs.net + l.as.net;
    l.system_er = inv.total() > 0.0 ? l.total / inv.total() : std::numeric_limits<double>::quiet_NaN();
    l.m_nh3 = C * dt * q_out;
    return l;
}

double inner_price_term(const Schedule& s, const Distribution& d, const PriceSet& prices,
                        const TechnoEconomicConfig& cfg) {
    check_schedule_shape(s);
    double elec = 0.0;
    double h2 = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
        elec += s.P_inner(t) - d.P_AE_inner.at(t) - d.P_AS_inner.at(t);
        h2 += s.q_in[t] - s.q_out[t];
    }
    return cfg.annualization() * s.dt * (kKwPerMw * prices.p_inner * elec + prices.p_h2_inner * h2);
}

double price_invariance_gap(const Schedule& s, const Capacities& caps, const Distribution& d,
                          const TechnoEconomicConfig& cfg, std::span<const PriceSet> samples) {
    check_schedule_shape(s);
    if (s.has_storage()) {
        const double drift = s.n_sto.back() - s.n_sto.front();
        if (std::abs(drift) > 1e-6 * std::max(1.0, caps.C_HS)) {
            throw PreconditionError("tank inventory does not close its cycle (n(N) != n(0))");
        }
    } else {
        double drift = 0.0;
        double scale = 1.0;
        for (std::size_t t = 0; t < s.size(); ++t) {
            drift += s.q_in[t] - s.q_out[t];
            scale = std::max(scale, std::abs(s.q_in[t]));
        }
        if (std::abs(drift) > 1e-6 * scale) {
            throw PreconditionError("hydrogen produced and consumed differ without a tank");
        }
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const PriceSet& p : samples) {
        const double j = ledger(s, caps, p, d, cfg).total;
        lo = std::min(lo, j);
        hi = std::max(hi, j);
    }
    return samples.empty() ? 0.0 : hi - lo;
}

ErCheck check_min_er(const InvestorLedger& l, const TechnoEconomicConfig& cfg, double tol) {
    auto ok = [tol](const InvestorAccount& a, double er_min) {
        return a.net >= er_min * a.invest - tol * std::max(1.0, std::abs(a.invest));
    };
    return ErCheck{ok(l.rg, cfg.er_min_rg), ok(l.aehs, cfg.er_min_aehs), ok(l.as, cfg.er_min_as)};
}

ErReport er_report(const InvestorLedger& l) {
    const std::pair<const InvestorAccount*, const char*> parts[] = {{&l.rg, "RG"}, {&l.aehs, "AEHS"}, {&l.as, "AS"}};
    for (const auto& [a, name] : parts) {
        if (!(a->invest > 0.0)) {
            throw DomainError(std::string("earnings ratio of ") + name + " is undefined: zero investment");
        }
    }
    ErReport r;
    r.er_rg = l.rg.er;
    r.er_aehs = l.aehs.er;
    r.er_as = l.as.er;
    r.dev_rg_aehs = std::abs(r.er_rg - r.er_aehs);
    r.dev_aehs_as = std::abs(r.er_aehs - r.er_as);
    r.deviation_sum = r.dev_rg_aehs + r.dev_aehs_as;
    return r;
}

}  // namespace repta
