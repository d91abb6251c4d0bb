#include "repta/robust.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "repta/errors.hpp"

namespace repta {

std::pair<Profile, Profile> worst_case_profiles(const Profile& wind, const Profile& solar, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError("uncertainty horizon alpha must lie in [0, 1]");
    }
    Profile w = wind;
    Profile s = solar;
    for (double& v : w.values) v *= 1.0 - alpha;
    for (double& v : s.values) v *= 1.0 - alpha;
    return {std::move(w), std::move(s)};
}

RobustEvaluator::RobustEvaluator(const SizingResult& deterministic, const TechnoEconomicConfig& cfg,
                                 const Profile& wind, const Profile& solar, milp::SolveOptions options)
    : cfg_(cfg), wind_(wind), solar_(solar), options_(std::move(options)), dtr_(deterministic.dtr) {
    pins_.C_W = deterministic.caps.C_W;
    pins_.C_S = deterministic.caps.C_S;
    pins_.N_AE = deterministic.caps.N_AE;
    pins_.no_storage = !deterministic.schedule.has_storage();
    if (pins_.no_storage) {
        pins_.C_HS = 0.0;
    }
    // The deterministic schedule is feasible for the alpha = 0 model, so it
    // bounds that evaluation from below.
    cache_.emplace(0.0, std::nullopt);
    try {
        SizingModel m = build_sizing_model(cfg_, wind_, solar_, pins_);
        ++solves_;
        SizingResult r = solve_sizing(m, options_);
        cache_[0.0] = r.dtr >= deterministic.dtr ? std::move(r) : deterministic;
    } catch (const InfeasibleError&) {
        throw InconsistencyError("operation model at alpha = 0 is infeasible; the deterministic sizing is not attainable");
    }
}

const SizingResult* RobustEvaluator::evaluate(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError("uncertainty horizon alpha must lie in [0, 1]");
    }
    auto it = cache_.find(alpha);
    if (it == cache_.end()) {
        const auto [w, s] = worst_case_profiles(wind_, solar_, alpha);
        std::optional<SizingResult> r;
        try {
            SizingModel m = build_sizing_model(cfg_, w, s, pins_);
            ++solves_;
            r = solve_sizing(m, options_);
        } catch (const InfeasibleError& e) {
            spdlog::info("robust: operation infeasible at alpha={} ({})", alpha, e.family());
        }
        it = cache_.emplace(alpha, std::move(r)).first;
    }
    return it->second ? &*it->second : nullptr;
}

IgdtResult solve_robust(RobustEvaluator& ev, double beta, const RobustOptions& options) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw DomainError("revenue deviation factor beta must lie in [0, 1]");
    }
    if (!(options.alpha_tol > 0.0)) {
        throw DomainError("alpha tolerance must be positive");
    }
    const double dtr = ev.dtr();
    const double target = (1.0 - beta) * dtr - 1e-6 * std::abs(dtr);
    auto meets = [&](double alpha) {
        const SizingResult* r = ev.evaluate(alpha);
        return r != nullptr && r->dtr >= target;
    };

    IgdtResult out;
    out.beta = beta;
    out.dtr = dtr;
    const int before = ev.solves();
    double lo = 0.0;
    if (meets(1.0)) {
        lo = 1.0;
        out.alpha_saturated = true;
    } else {
        double hi = 1.0;
        if (meets(0.0)) {
            while (hi - lo > options.alpha_tol) {
                const double mid = 0.5 * (lo + hi);
                (meets(mid) ? lo : hi) = mid;
            }
        } else {
            spdlog::warn("robust: revenue target missed already at alpha = 0 (beta = {})", beta);
        }
    }
    const SizingResult* at = ev.evaluate(lo);
    if (at == nullptr) {
        throw InconsistencyError("robust: no feasible operation at the returned alpha");
    }
    out.alpha_star = lo;
    out.C_HS_robust = at->caps.C_HS;
    out.rtr = at->dtr;
    const TechnoEconomicConfig& cfg_ref = ev.config();
    out.r_AS = at->schedule.m_nh3 / cfg_ref.horizon_nh3_cap_t();
    out.evaluations = ev.solves() - before;
    out.at_alpha = *at;
    return out;
}

IgdtResult solve_robust(const SizingResult& deterministic, double beta, const TechnoEconomicConfig& cfg,
                        const Profile& wind, const Profile& solar, const RobustOptions& options) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw DomainError("revenue deviation factor beta must lie in [0, 1]");
    }
    RobustEvaluator ev(deterministic, cfg, wind, solar, options.solve);
    return solve_robust(ev, beta, options);
}

}  // namespace repta
