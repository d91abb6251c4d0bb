#include "repta/pipeline.hpp"

#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "repta/errors.hpp"

namespace repta {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config

void check_keys(const YAML::Node& n, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!n || n.IsNull()) return;
    if (!n.IsMap()) throw ConfigError("section '" + where + "' must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) {
            throw ConfigError("unknown key '" + key + "' in " + (where.empty() ? std::string("config") : where));
        }
    }
}

template <class T>
void read(const YAML::Node& n, const char* key, T& out, const std::string& where) {
    if (!n || n.IsNull() || !n[key]) return;
    try {
        out = n[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("bad value for '" + where + "." + key + "'");
    }
}

template <class T>
void read_opt(const YAML::Node& n, const char* key, std::optional<T>& out, const std::string& where) {
    if (!n || n.IsNull() || !n[key]) return;
    T v{};
    read(n, key, v, where);
    out = v;
}

void read_cost(const YAML::Node& n, const char* key, FacilityCost& c) {
    const YAML::Node s = n ? n[key] : YAML::Node();
    const std::string where = std::string("investment.") + key;
    check_keys(s, {"unit_cost", "om_fraction", "lifetime_years"}, where);
    read(s, "unit_cost", c.unit_cost, where);
    read(s, "om_fraction", c.om_fraction, where);
    read(s, "lifetime_years", c.lifetime_years, where);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    spdlog::info("wrote {}", path.string());
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InfeasibleError& e) {
        spdlog::error("stage '{}' failed ({}): {}", name, e.family(), e.what());
        throw;
    } catch (const Error& e) {
        spdlog::error("stage '{}' failed: {}", name, e.what());
        throw;
    }
}

// ---------------------------------------------------------------- reports

json solver_json(const SolverInfo& s) {
    return {{"status", s.status},       {"backend", s.backend},   {"objective", s.objective},
            {"bound", s.bound},         {"gap", s.gap},           {"wall_time_s", s.wall_time_s},
            {"num_vars", s.num_vars},   {"num_rows", s.num_rows}, {"num_binary", s.num_binary},
            {"num_integer", s.num_integer}};
}

json caps_json(const Capacities& c) {
    return {{"C_W_MW", c.C_W}, {"C_S_MW", c.C_S}, {"N_AE", c.N_AE}, {"C_AE_MW", c.C_AE}, {"C_HS_Nm3", c.C_HS}};
}

json rates_json(const GridRates& r) {
    return {{"on_grid", r.on_grid},
            {"off_grid", r.off_grid},
            {"net_on_grid", r.net_on_grid},
            {"curtailment", r.curtailment}};
}

json sizing_json(const SizingResult& r, const TechnoEconomicConfig& cfg) {
    return {{"capacities", caps_json(r.caps)},
            {"dtr_rmb", r.dtr},
            {"dtr_1e4_rmb", r.dtr / kRmbPerReportUnit},
            {"invest_star_rmb", {{"rg", r.invest_star.rg}, {"aehs", r.invest_star.aehs}, {"as", r.invest_star.as}}},
            {"rates", rates_json(grid_rates(r.schedule))},
            {"flh_ae_h", electrolyzer_flh(r.schedule, r.caps)},
            {"m_nh3_t", r.schedule.m_nh3},
            {"r_AS", r.schedule.m_nh3 / cfg.horizon_nh3_cap_t()},
            {"delta_T_AS_h", r.schedule.delta_T_AS},
            {"setpoints", r.schedule.setpoints.size()},
            {"optimal", r.optimal},
            {"warnings", r.warnings},
            {"solver", solver_json(r.solver)}};
}

json account_json(const InvestorAccount& a) {
    return {{"profit_rmb", a.profit}, {"invest_rmb", a.invest}, {"net_rmb", a.net}, {"er", a.er}};
}

json prices_json(const PriceSet& p) {
    return {{"p_inner_rmb_per_kwh", p.p_inner},
            {"p_h2_inner_rmb_per_nm3", p.p_h2_inner},
            {"p_fit", p.p_fit},
            {"p_purch", p.p_purch},
            {"p_nh3", p.p_nh3}};
}

json pricing_json(const PricingResult& p) {
    return {{"prices", prices_json(p.prices)},
            {"E_AE_inner_mwh", p.dist.E_AE_inner},
            {"E_AS_inner_mwh", p.dist.E_AS_inner},
            {"ledger",
             {{"rg", account_json(p.ledger.rg)},
              {"aehs", account_json(p.ledger.aehs)},
              {"as", account_json(p.ledger.as)},
              {"total_rmb", p.ledger.total},
              {"system_er", p.ledger.system_er}}},
            {"er",
             {{"rg", p.er.er_rg},
              {"aehs", p.er.er_aehs},
              {"as", p.er.er_as},
              {"dev_rg_aehs", p.er.dev_rg_aehs},
              {"dev_aehs_as", p.er.dev_aehs_as},
              {"deviation_sum", p.er.deviation_sum}}},
            {"objective", p.objective},
            {"solver", solver_json(p.solver)}};
}

json igdt_json(const IgdtResult& r) {
    return {{"beta", r.beta},
            {"alpha_star", r.alpha_star},
            {"C_HS_robust_Nm3", r.C_HS_robust},
            {"r_AS", r.r_AS},
            {"rtr_rmb", r.rtr},
            {"dtr_rmb", r.dtr},
            {"alpha_saturated", r.alpha_saturated},
            {"evaluations", r.evaluations}};
}

json bench_json(const BenchmarkRow& b, const TechnoEconomicConfig& cfg) {
    json j = sizing_json(b.sizing, cfg);
    j["scenario"] = std::string(to_string(b.scenario));
    j["prices"] = prices_json(b.prices);
    j["er"] = {{"rg", b.er[0]}, {"aehs", b.er[1]}, {"as", b.er[2]}, {"system", b.system_er}};
    j["er_min_met"] = b.er_min_met;
    j["pricing_note"] = b.pricing_note;
    j["wall_time_s"] = b.wall_time_s;
    return j;
}

json config_json(const RunConfig& c) {
    const auto& t = c.tech;
    return {{"horizon_h", t.horizon_hours()},
            {"dt_h", t.dt},
            {"delta_T_AS_h", t.ammonia.delta_T_AS},
            {"annual_nh3_t", t.annual_nh3_t},
            {"profiles", c.profiles.path ? c.profiles.path->string() : std::string("synthetic")},
            {"seed", c.profiles.seed},
            {"gap", c.solve.relative_gap},
            {"backend", c.solve.backend}};
}

std::filesystem::path prepare_out(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    return cfg.out_dir;
}

SizingResult do_size(const RunConfig& cfg, const Profile& wind, const Profile& solar) {
    return stage("size", [&] {
        SizingResult r = size_system(cfg.tech, wind, solar, cfg.overrides(), cfg.solve);
        validate_sizing(r, cfg.tech);
        return r;
    });
}

PricingResult do_price(const SizingResult& s, const RunConfig& cfg) {
    return stage("price", [&] {
        PricingModel m = build_pricing_model(s, cfg.tech, cfg.price_grid, cfg.p_h2_max);
        return solve_pricing(m, s, cfg.tech, cfg.solve);
    });
}

}  // namespace

// ---------------------------------------------------------------- RunConfig

namespace {

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    RunConfig c;
    if (!root || root.IsNull()) return c;
    check_keys(root,
               {"profiles", "output", "investment", "prices", "economics", "operation", "scenario", "robust", "sweep",
                "pricing", "solver", "workers", "fit"},
               "");
    TechnoEconomicConfig& t = c.tech;

    const YAML::Node pr = root["profiles"];
    check_keys(pr, {"path", "wind_flh", "solar_flh", "seed", "horizon", "dt"}, "profiles");
    std::optional<std::string> ppath;
    read_opt(pr, "path", ppath, "profiles");
    if (ppath) c.profiles.path = *ppath;
    read(pr, "wind_flh", c.profiles.wind_flh, "profiles");
    read(pr, "solar_flh", c.profiles.solar_flh, "profiles");
    read(pr, "seed", c.profiles.seed, "profiles");
    read(pr, "horizon", t.horizon, "profiles");
    read(pr, "dt", t.dt, "profiles");

    const YAML::Node out = root["output"];
    check_keys(out, {"dir"}, "output");
    std::string dir = c.out_dir.string();
    read(out, "dir", dir, "output");
    c.out_dir = dir;

    const YAML::Node inv = root["investment"];
    check_keys(inv, {"wt", "pv", "ae", "hs", "as", "as_block_output_t", "interest_rate"}, "investment");
    read_cost(inv, "wt", t.wt);
    read_cost(inv, "pv", t.pv);
    read_cost(inv, "ae", t.ae);
    read_cost(inv, "hs", t.hs);
    read_cost(inv, "as", t.as);
    read(inv, "as_block_output_t", t.as_block_output_t, "investment");
    read(inv, "interest_rate", t.interest_rate, "investment");

    const YAML::Node pri = root["prices"];
    check_keys(pri, {"p_fit", "p_purch", "p_nh3"}, "prices");
    read(pri, "p_fit", t.p_fit, "prices");
    read(pri, "p_purch", t.p_purch, "prices");
    read(pri, "p_nh3", t.p_nh3, "prices");

    const YAML::Node eco = root["economics"];
    check_keys(eco, {"r_net", "annual_nh3_t", "er_min"}, "economics");
    read(eco, "r_net", t.r_net, "economics");
    read(eco, "annual_nh3_t", t.annual_nh3_t, "economics");
    const YAML::Node er = eco ? eco["er_min"] : YAML::Node();
    check_keys(er, {"rg", "aehs", "as"}, "economics.er_min");
    read(er, "rg", t.er_min_rg, "economics.er_min");
    read(er, "aehs", t.er_min_aehs, "economics.er_min");
    read(er, "as", t.er_min_as, "economics.er_min");

    const YAML::Node op = root["operation"];
    check_keys(op,
               {"c_ae_single_mw", "kappa_h2_kwh_per_nm3", "eta_ae_min", "eta_ae_max", "eta_hs_min", "eta_hs_max",
                "hs_initial_fraction", "ammonia"},
               "operation");
    read(op, "c_ae_single_mw", t.c_ae_single_mw, "operation");
    read(op, "kappa_h2_kwh_per_nm3", t.kappa_h2_kwh_per_nm3, "operation");
    read(op, "eta_ae_min", t.eta_ae_min, "operation");
    read(op, "eta_ae_max", t.eta_ae_max, "operation");
    read(op, "eta_hs_min", t.eta_hs_min, "operation");
    read(op, "eta_hs_max", t.eta_hs_max, "operation");
    read(op, "hs_initial_fraction", t.hs_initial_fraction, "operation");
    const YAML::Node am = op ? op["ammonia"] : YAML::Node();
    const std::string aw = "operation.ammonia";
    check_keys(am,
               {"kappa_n2", "kappa_nh3", "eta_as_min", "eta_as_max", "r_plus", "r_minus", "delta_t_as", "t_trans",
                "c_h2ma"},
               aw);
    read(am, "kappa_n2", t.ammonia.kappa_N2, aw);
    read(am, "kappa_nh3", t.ammonia.kappa_NH3, aw);
    read(am, "eta_as_min", t.ammonia.eta_AS_min, aw);
    read(am, "eta_as_max", t.ammonia.eta_AS_max, aw);
    read(am, "r_plus", t.ammonia.r_plus, aw);
    read(am, "r_minus", t.ammonia.r_minus, aw);
    read(am, "delta_t_as", t.ammonia.delta_T_AS, aw);
    read(am, "t_trans", t.ammonia.T_trans, aw);
    read(am, "c_h2ma", t.ammonia.C_H2mA, aw);

    const YAML::Node sc = root["scenario"];
    check_keys(sc, {"name", "C_W", "C_S", "N_AE", "C_HS", "no_storage"}, "scenario");
    std::string name = "proposed";
    read(sc, "name", name, "scenario");
    c.scenario.scenario = parse_scenario(name);
    read_opt(sc, "C_W", c.scenario.C_W, "scenario");
    read_opt(sc, "C_S", c.scenario.C_S, "scenario");
    read_opt(sc, "N_AE", c.scenario.N_AE, "scenario");
    read_opt(sc, "C_HS", c.scenario.C_HS, "scenario");
    read(sc, "no_storage", c.scenario.no_storage, "scenario");

    const YAML::Node rb = root["robust"];
    check_keys(rb, {"betas", "alpha_tol"}, "robust");
    read(rb, "betas", c.betas, "robust");
    read(rb, "alpha_tol", c.alpha_tol, "robust");

    const YAML::Node sw = root["sweep"];
    check_keys(sw, {"delta_t_as"}, "sweep");
    read(sw, "delta_t_as", c.sweep_delta_T_AS, "sweep");

    const YAML::Node pg = root["pricing"];
    check_keys(pg, {"p_lo", "p_hi", "n_p", "p_h2_max"}, "pricing");
    read(pg, "p_lo", c.price_grid.p_lo, "pricing");
    read(pg, "p_hi", c.price_grid.p_hi, "pricing");
    read(pg, "n_p", c.price_grid.N_p, "pricing");
    read(pg, "p_h2_max", c.p_h2_max, "pricing");

    const YAML::Node so = root["solver"];
    check_keys(so, {"backend", "gap", "time_limit", "node_limit"}, "solver");
    read(so, "backend", c.solve.backend, "solver");
    read(so, "gap", c.solve.relative_gap, "solver");
    read(so, "time_limit", c.solve.time_limit_s, "solver");
    read(so, "node_limit", c.solve.node_limit, "solver");

    if (root["workers"]) {
        try {
            c.workers = root["workers"].as<int>();
        } catch (const YAML::Exception&) {
            throw ConfigError("bad value for 'workers'");
        }
    }

    const YAML::Node fit = root["fit"];
    check_keys(fit, {"data", "unit", "q_k", "q_k1", "dt"}, "fit");
    std::optional<std::string> fdata;
    read_opt(fit, "data", fdata, "fit");
    if (fdata) c.fit.data = *fdata;
    read(fit, "unit", c.fit.unit, "fit");
    read(fit, "q_k", c.fit.q_k, "fit");
    read(fit, "q_k1", c.fit.q_k1, "fit");
    read(fit, "dt", c.fit.dt, "fit");

    return c;
}

}  // namespace

RunConfig RunConfig::from_yaml(const std::string& text) {
    RunConfig c = parse_config(text);
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig c = parse_config(ss.str());
    // Relative paths inside the file resolve against its directory.
    const auto base = path.parent_path();
    auto rebase = [&](std::optional<std::filesystem::path>& p) {
        if (p && p->is_relative() && !base.empty()) p = base / *p;
    };
    rebase(c.profiles.path);
    rebase(c.fit.data);
    c.validate();
    return c;
}

void RunConfig::validate() const {
    tech.validate();
    tech.steps_per_as_period();
    if (profiles.path && !std::filesystem::exists(*profiles.path)) {
        throw ConfigError("profile file '" + profiles.path->string() + "' does not exist");
    }
    if (fit.data && !std::filesystem::exists(*fit.data)) {
        throw ConfigError("fit data file '" + fit.data->string() + "' does not exist");
    }
    for (double d : sweep_points()) {
        TechnoEconomicConfig t = tech;
        t.ammonia.delta_T_AS = d;
        t.steps_per_as_period();
    }
    for (double b : betas) {
        if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("robust beta values must lie in [0, 1]");
    }
    if (fit.unit != "nm3_per_h" && fit.unit != "kg_per_h") {
        throw ConfigError("fit.unit must be nm3_per_h or kg_per_h");
    }
    if (!(alpha_tol > 0.0)) throw ConfigError("robust.alpha_tol must be positive");
    if (!(p_h2_max >= 0.0)) throw ConfigError("pricing.p_h2_max must be >= 0");
    if (!price_grid.degenerate() && price_grid.N_p < 2) throw ConfigError("pricing.n_p must be >= 2");
    if (price_grid.p_lo < 0.0 || price_grid.p_hi < price_grid.p_lo) {
        throw ConfigError("pricing grid needs 0 <= p_lo <= p_hi");
    }
    if (!(solve.relative_gap >= 0.0)) throw ConfigError("solver.gap must be >= 0");
    if (!(solve.time_limit_s > 0.0)) throw ConfigError("solver.time_limit must be positive");
    if (!(profiles.wind_flh > 0.0 && profiles.solar_flh > 0.0)) {
        throw ConfigError("synthetic FLH targets must be positive");
    }
    try {
        milp::make_backend(solve.backend);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

SizingOverrides RunConfig::overrides() const {
    SizingOverrides o = SizingOverrides::for_scenario(scenario.scenario, tech);
    if (scenario.C_W) o.C_W = scenario.C_W;
    if (scenario.C_S) o.C_S = scenario.C_S;
    if (scenario.N_AE) o.N_AE = scenario.N_AE;
    if (scenario.C_HS) o.C_HS = scenario.C_HS;
    if (scenario.no_storage) o.no_storage = true;
    return o;
}

std::vector<double> RunConfig::sweep_points() const {
    if (!sweep_delta_T_AS.empty()) return sweep_delta_T_AS;
    // Defaults that do not divide a short horizon are skipped.
    const double h = tech.horizon_hours();
    std::vector<double> out;
    for (double d : {4.0, 24.0}) {
        if (d < h && std::abs(std::remainder(h, d)) < 1e-9) out.push_back(d);
    }
    out.push_back(h);
    return out;
}

int RunConfig::worker_count() const {
    if (workers > 0) return workers;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::pair<Profile, Profile> obtain_profiles(const RunConfig& cfg) {
    const std::size_t n = cfg.tech.horizon;
    const double dt = cfg.tech.dt;
    if (cfg.profiles.path) {
        return load_profiles(*cfg.profiles.path, n, dt);
    }
    const double share = cfg.tech.horizon_hours() / 8760.0;
    Profile wind = synthesize_profile(ProfileKind::wind, cfg.profiles.wind_flh * share, cfg.profiles.seed, n, dt);
    Profile solar =
        synthesize_profile(ProfileKind::solar, cfg.profiles.solar_flh * share, cfg.profiles.seed + 1, n, dt);
    return {std::move(wind), std::move(solar)};
}

// ---------------------------------------------------------------- stages

void validate_sizing(const SizingResult& r, const TechnoEconomicConfig& cfg) {
    const AuditReport audit = audit_schedule(r.schedule, r.caps, cfg);
    if (!audit.clean()) {
        throw InconsistencyError("schedule audit failed: " + audit.summary());
    }
    const InvestorLedger l =
        ledger(r.schedule, r.caps, PriceSet::market(cfg), Distribution::ae_first(r.schedule), cfg);
    if (std::abs(l.total - r.dtr) > 1e-6 * std::max(1.0, std::abs(r.dtr))) {
        throw InconsistencyError("ledger total " + fmt(l.total) + " disagrees with DTR " + fmt(r.dtr));
    }
}

BenchmarkRow run_benchmark(Scenario scenario, const RunConfig& cfg, const Profile& wind, const Profile& solar) {
    const auto start = std::chrono::steady_clock::now();
    BenchmarkRow row;
    row.scenario = scenario;
    const SizingOverrides o = SizingOverrides::for_scenario(scenario, cfg.tech);
    row.sizing = size_system(cfg.tech, wind, solar, o, cfg.solve);
    validate_sizing(row.sizing, cfg.tech);
    row.rates = grid_rates(row.sizing.schedule);
    row.flh_ae = electrolyzer_flh(row.sizing.schedule, row.sizing.caps);
    const InvestorLedger base = ledger(row.sizing.schedule, row.sizing.caps, PriceSet::market(cfg.tech),
                                       Distribution::ae_first(row.sizing.schedule), cfg.tech);
    row.system_er = base.system_er;
    const double nan = std::nan("");
    row.er = {nan, nan, nan};
    row.prices = PriceSet::market(cfg.tech, nan, nan);
    try {
        PricingModel m = build_pricing_model(row.sizing, cfg.tech, cfg.price_grid, cfg.p_h2_max);
        row.pricing = solve_pricing(m, row.sizing, cfg.tech, cfg.solve);
        row.er = {row.pricing->er.er_rg, row.pricing->er.er_aehs, row.pricing->er.er_as};
        row.prices = row.pricing->prices;
        row.er_min_met = check_min_er(row.pricing->ledger, cfg.tech, 1e-9).all();
    } catch (const ErUnreachableError& e) {
        row.er = e.best_er();
        row.prices = e.best_prices();
        row.pricing_note = "minimum earnings ratios unreachable; prices maximize the smallest margin";
    } catch (const DomainError& e) {
        row.pricing_note = e.what();
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const Profile& wind, const Profile& solar) {
    const auto list = cfg.sweep_points();
    return parallel_map<SweepRow>(list.size(), cfg.worker_count(), [&](std::size_t i) {
        TechnoEconomicConfig t = cfg.tech;
        t.ammonia.delta_T_AS = list[i];
        SweepRow row;
        row.delta_T_AS = list[i];
        row.sizing = size_system(t, wind, solar, cfg.overrides(), cfg.solve);
        validate_sizing(row.sizing, t);
        row.rates = grid_rates(row.sizing.schedule);
        return row;
    });
}

std::vector<IgdtResult> run_robust(const SizingResult& deterministic, const RunConfig& cfg, const Profile& wind,
                                   const Profile& solar) {
    RobustOptions ro;
    ro.alpha_tol = cfg.alpha_tol;
    ro.solve = cfg.solve;
    auto rows = parallel_map<IgdtResult>(cfg.betas.size(), cfg.worker_count(), [&](std::size_t i) {
        IgdtResult r = solve_robust(deterministic, cfg.betas[i], cfg.tech, wind, solar, ro);
        validate_sizing(r.at_alpha, cfg.tech);
        return r;
    });
    return rows;
}

// ---------------------------------------------------------------- CSV

std::string schedule_csv(const Schedule& s) {
    std::ostringstream o;
    o << "hour,P_W,P_S,P_sell,P_purch,P_curt,P_AE,P_AS,q_in,q_out,n_sto\n";
    for (std::size_t t = 0; t < s.size(); ++t) {
        o << t << ',' << fmt(s.P_W[t]) << ',' << fmt(s.P_S[t]) << ',' << fmt(s.P_sell[t]) << ','
          << fmt(s.P_purch[t]) << ',' << fmt(s.P_curt[t]) << ',' << fmt(s.P_AE[t]) << ',' << fmt(s.P_AS[t]) << ','
          << fmt(s.q_in[t]) << ',' << fmt(s.q_out[t]) << ',';
        if (s.has_storage()) o << fmt(s.n_sto[t + 1]);
        o << '\n';
    }
    return o.str();
}

std::string bench_report(const std::vector<BenchmarkRow>& rows, const RunConfig& cfg) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(bench_json(r, cfg.tech));
    const json rep = {{"config", config_json(cfg)}, {"rows", arr}};
    return rep.dump(2) + "\n";
}

std::string bench_csv(const std::vector<BenchmarkRow>& rows) {
    std::ostringstream o;
    o << "scenario,C_W_MW,C_S_MW,C_AE_MW,C_HS_Nm3,p_inner,p_h2_inner,on_grid_rate,off_grid_rate,net_on_grid_rate,"
         "curtailment_rate,flh_ae_h,dtr_1e4_rmb,er_rg,er_aehs,er_as,er_system,er_min_met\n";
    for (const auto& r : rows) {
        const auto& c = r.sizing.caps;
        o << to_string(r.scenario) << ',' << fmt(c.C_W) << ',' << fmt(c.C_S) << ',' << fmt(c.C_AE) << ','
          << fmt(c.C_HS) << ',' << fmt(r.prices.p_inner) << ',' << fmt(r.prices.p_h2_inner) << ','
          << fmt(r.rates.on_grid) << ',' << fmt(r.rates.off_grid) << ',' << fmt(r.rates.net_on_grid) << ','
          << fmt(r.rates.curtailment) << ',' << fmt(r.flh_ae) << ',' << fmt(r.sizing.dtr / kRmbPerReportUnit) << ','
          << fmt(r.er[0]) << ',' << fmt(r.er[1]) << ',' << fmt(r.er[2]) << ',' << fmt(r.system_er) << ','
          << (r.er_min_met ? 1 : 0) << '\n';
    }
    return o.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o << "delta_T_AS_h,C_W_MW,C_S_MW,C_AE_MW,C_HS_Nm3,on_grid_rate,off_grid_rate,net_on_grid_rate,"
         "curtailment_rate,m_nh3_t,dtr_1e4_rmb\n";
    for (const auto& r : rows) {
        const auto& c = r.sizing.caps;
        o << fmt(r.delta_T_AS) << ',' << fmt(c.C_W) << ',' << fmt(c.C_S) << ',' << fmt(c.C_AE) << ','
          << fmt(c.C_HS) << ',' << fmt(r.rates.on_grid) << ',' << fmt(r.rates.off_grid) << ','
          << fmt(r.rates.net_on_grid) << ',' << fmt(r.rates.curtailment) << ',' << fmt(r.sizing.schedule.m_nh3)
          << ',' << fmt(r.sizing.dtr / kRmbPerReportUnit) << '\n';
    }
    return o.str();
}

std::string robust_csv(const std::vector<IgdtResult>& rows) {
    std::ostringstream o;
    o << "beta,alpha_star,C_HS,r_AS,RTR\n";
    for (const auto& r : rows) {
        o << fmt(r.beta) << ',' << fmt(r.alpha_star) << ',' << fmt(r.C_HS_robust) << ',' << fmt(r.r_AS) << ','
          << fmt(r.rtr / kRmbPerReportUnit) << '\n';
    }
    return o.str();
}

// ---------------------------------------------------------------- commands

bool cmd_size(const RunConfig& cfg) {
    const auto [wind, solar] = stage("profiles", [&] { return obtain_profiles(cfg); });
    const SizingResult r = do_size(cfg, wind, solar);
    json rep = {{"config", config_json(cfg)}, {"scenario", to_string(cfg.scenario.scenario)},
                {"sizing", sizing_json(r, cfg.tech)}};
    const auto dir = prepare_out(cfg);
    write_file(dir / "size.json", rep.dump(2) + "\n");
    write_file(dir / "schedule.csv", schedule_csv(r.schedule));
    return r.optimal;
}

bool cmd_robust(const RunConfig& cfg) {
    if (cfg.betas.empty()) throw ConfigError("robust needs at least one beta value");
    const auto [wind, solar] = stage("profiles", [&] { return obtain_profiles(cfg); });
    const SizingResult r = do_size(cfg, wind, solar);
    const auto rows = stage("robust", [&] { return run_robust(r, cfg, wind, solar); });
    json arr = json::array();
    bool optimal = r.optimal;
    for (const auto& x : rows) {
        arr.push_back(igdt_json(x));
        optimal = optimal && x.at_alpha.optimal;
    }
    json rep = {{"config", config_json(cfg)}, {"sizing", sizing_json(r, cfg.tech)}, {"robust", arr}};
    const auto dir = prepare_out(cfg);
    write_file(dir / "robust.json", rep.dump(2) + "\n");
    write_file(dir / "robust.csv", robust_csv(rows));
    return optimal;
}

bool cmd_price(const RunConfig& cfg) {
    const auto [wind, solar] = stage("profiles", [&] { return obtain_profiles(cfg); });
    const SizingResult r = do_size(cfg, wind, solar);
    const PricingResult p = do_price(r, cfg);
    json rep = {{"config", config_json(cfg)}, {"sizing", sizing_json(r, cfg.tech)}, {"pricing", pricing_json(p)}};
    const auto dir = prepare_out(cfg);
    write_file(dir / "price.json", rep.dump(2) + "\n");
    write_file(dir / "schedule.csv", schedule_csv(r.schedule));
    return r.optimal && p.solver.status == "optimal";
}

bool cmd_run(const RunConfig& cfg) {
    const auto [wind, solar] = stage("profiles", [&] { return obtain_profiles(cfg); });
    const SizingResult r = do_size(cfg, wind, solar);
    std::vector<IgdtResult> robust;
    if (!cfg.betas.empty()) {
        robust = stage("robust", [&] { return run_robust(r, cfg, wind, solar); });
    }
    const PricingResult p = do_price(r, cfg);
    json assess = stage("assess", [&] {
        const ErCheck ok = check_min_er(p.ledger, cfg.tech);
        return json{{"er_min_met", ok.all()},
                    {"er_min_met_by_part", {{"rg", ok.rg}, {"aehs", ok.aehs}, {"as", ok.as}}},
                    {"dtr_1e4_rmb", r.dtr / kRmbPerReportUnit},
                    {"system_er", p.ledger.system_er},
                    {"rates", rates_json(grid_rates(r.schedule))},
                    {"flh_ae_h", electrolyzer_flh(r.schedule, r.caps)},
                    {"capacities", caps_json(r.caps)},
                    {"prices", prices_json(p.prices)},
                    {"er", {{"rg", p.er.er_rg}, {"aehs", p.er.er_aehs}, {"as", p.er.er_as}}},
                    {"wall_time_s", r.solver.wall_time_s + p.solver.wall_time_s}};
    });
    json arr = json::array();
    bool optimal = r.optimal && p.solver.status == "optimal";
    for (const auto& x : robust) {
        arr.push_back(igdt_json(x));
        optimal = optimal && x.at_alpha.optimal;
    }
    json rep = {{"config", config_json(cfg)},
                {"scenario", to_string(cfg.scenario.scenario)},
                {"sizing", sizing_json(r, cfg.tech)},
                {"robust", arr},
                {"pricing", pricing_json(p)},
                {"assessment", assess}};
    const auto dir = prepare_out(cfg);
    write_file(dir / "report.json", rep.dump(2) + "\n");
    write_file(dir / "schedule.csv", schedule_csv(r.schedule));
    if (!robust.empty()) write_file(dir / "robust.csv", robust_csv(robust));
    return optimal;
}

bool cmd_bench(const RunConfig& cfg) {
    const auto [wind, solar] = stage("profiles", [&] { return obtain_profiles(cfg); });
    const std::vector<Scenario> order{Scenario::bs1, Scenario::bs2, Scenario::bs3, Scenario::bs4, Scenario::proposed};
    const auto rows = stage("bench", [&] {
        return parallel_map<BenchmarkRow>(order.size(), cfg.worker_count(),
                                          [&](std::size_t i) { return run_benchmark(order[i], cfg, wind, solar); });
    });
    bool optimal = true;
    for (const auto& r : rows) optimal = optimal && r.sizing.optimal;
    const auto dir = prepare_out(cfg);
    write_file(dir / "bench.json", bench_report(rows, cfg));
    write_file(dir / "bench.csv", bench_csv(rows));
    return optimal;
}

bool cmd_sweep(const RunConfig& cfg) {
    const auto [wind, solar] = stage("profiles", [&] { return obtain_profiles(cfg); });
    const auto rows = stage("sweep", [&] { return run_sweep(cfg, wind, solar); });
    json arr = json::array();
    bool optimal = true;
    for (const auto& r : rows) {
        json j = sizing_json(r.sizing, cfg.tech);
        j["delta_T_AS_h"] = r.delta_T_AS;
        arr.push_back(j);
        optimal = optimal && r.sizing.optimal;
    }
    json rep = {{"config", config_json(cfg)}, {"rows", arr}};
    const auto dir = prepare_out(cfg);
    write_file(dir / "sweep.json", rep.dump(2) + "\n");
    write_file(dir / "sweep.csv", sweep_csv(rows));
    return optimal;
}

void cmd_fit(const RunConfig& cfg) {
    if (!cfg.fit.data) throw ConfigError("fit needs fit.data pointing at a CSV with columns hour,flow");
    std::ifstream in(*cfg.fit.data);
    if (!in) throw ConfigError("cannot open fit data '" + cfg.fit.data->string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("fit data is empty");
    std::vector<std::string> header;
    {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            header.push_back(cell);
        }
    }
    const auto it = std::find(header.begin(), header.end(), "flow");
    if (it == header.end()) throw SchemaError("fit data lacks a 'flow' column");
    const auto col = static_cast<std::size_t>(it - header.begin());
    // Flows are fitted in Nm³/h; kg/h input is converted first.
    const double to_nm3 = cfg.fit.unit == "kg_per_h" ? kNm3PerKgH2 : 1.0;
    std::vector<double> obs;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::stringstream ls(line);
        std::string cell;
        for (std::size_t i = 0; i <= col; ++i) {
            if (!std::getline(ls, cell, ',')) throw SchemaError("short row in fit data: '" + line + "'");
        }
        try {
            obs.push_back(std::stod(cell) * to_nm3);
        } catch (const std::exception&) {
            throw SchemaError("non-numeric flow '" + cell + "'");
        }
    }
    const TransitionFit f = stage(
        "fit", [&] { return fit_T_trans(obs, cfg.fit.q_k * to_nm3, cfg.fit.q_k1 * to_nm3, cfg.fit.dt); });
    json rep = {{"T_trans_h", f.T_trans},
                {"rmse_nm3_per_h", f.rmse},
                {"rmse_input_unit", f.rmse / to_nm3},
                {"unit", cfg.fit.unit},
                {"observations", obs.size()},
                {"q_k", cfg.fit.q_k},
                {"q_k1", cfg.fit.q_k1},
                {"dt_h", cfg.fit.dt}};
    const auto dir = prepare_out(cfg);
    write_file(dir / "fit.json", rep.dump(2) + "\n");
}

}  // namespace repta
