#include "repta/profiles.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "repta/errors.hpp"

namespace repta {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        // trim whitespace and a stray CR from Windows line endings
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) {
            throw std::invalid_argument(cell);
        }
        return v;
    } catch (const std::exception&) {
        throw SchemaError("row " + std::to_string(row) + ", column '" + column + "': cannot parse '" + cell + "'");
    }
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

void warn_over_unity(const Profile& p, const char* origin) {
    const auto peak = std::max_element(p.values.begin(), p.values.end());
    if (peak != p.values.end() && *peak > 1.0) {
        spdlog::warn("{} {} profile exceeds 1.0 per-unit (peak {:.4f})", origin, to_string(p.kind), *peak);
    }
}

// Scales `base` by k and clips at 1; finds k so that the clipped sum hits
// `target_sum`. `base` must be non-negative.
std::vector<double> renormalize(const std::vector<double>& base, double target_sum) {
    auto clipped_sum = [&](double k) {
        double s = 0.0;
        for (double b : base) s += std::min(1.0, k * b);
        return s;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (clipped_sum(hi) < target_sum) {
        hi *= 2.0;
        if (hi > 1e15) {
            throw DomainError("target full-load hours not reachable by this profile shape");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clipped_sum(mid) < target_sum ? lo : hi) = mid;
    }
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        out[i] = std::min(1.0, hi * base[i]);
    }
    return out;
}

std::vector<double> solar_shape(std::size_t n, double dt, std::mt19937_64& rng) {
    std::normal_distribution<double> hourly_noise(0.0, 0.08);
    std::gamma_distribution<double> ga(4.0, 1.0);
    std::gamma_distribution<double> gb(1.5, 1.0);
    std::vector<double> base(n, 0.0);
    long current_day = -1;
    double cloud = 1.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double hour = (static_cast<double>(t) + 0.5) * dt;
        const long day = static_cast<long>(std::floor(hour / 24.0));
        if (day != current_day) {
            current_day = day;
            // Beta(4, 1.5) via two gammas: mostly clear days, some overcast.
            const double x = ga(rng);
            const double y = gb(rng);
            cloud = 0.15 + 0.85 * x / (x + y);
        }
        const double hod = std::fmod(hour, 24.0);
        const double noise = std::max(0.0, 1.0 + hourly_noise(rng));
        if (hod <= 6.0 || hod >= 18.0) {
            continue;
        }
        const double envelope = std::sin(std::numbers::pi * (hod - 6.0) / 12.0);
        const double seasonal = 1.0 + 0.25 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(day) - 172.0) / 365.0);
        base[t] = envelope * seasonal * cloud * noise;
    }
    return base;
}

std::vector<double> wind_shape(std::size_t n, double dt, std::mt19937_64& rng) {
    constexpr double mean_speed = 7.0;
    constexpr double speed_sd = 3.0;
    constexpr double cut_in = 3.0;
    constexpr double rated = 12.0;
    constexpr double cut_out = 25.0;
    // Hourly persistence 0.9, adjusted for the step length.
    const double phi = std::pow(0.9, dt);
    const double innovation = speed_sd * std::sqrt(1.0 - phi * phi);
    std::normal_distribution<double> eps(0.0, 1.0);

    std::vector<double> base(n);
    double v = mean_speed + speed_sd * eps(rng);
    for (std::size_t t = 0; t < n; ++t) {
        v = mean_speed + phi * (v - mean_speed) + innovation * eps(rng);
        const double s = std::max(0.0, v);
        double p = 0.0;
        if (s >= cut_in && s < rated) {
            p = (s * s * s - cut_in * cut_in * cut_in) / (rated * rated * rated - cut_in * cut_in * cut_in);
        } else if (s >= rated && s < cut_out) {
            p = 1.0;
        }
        // Small floor keeps every hour scalable, so any FLH up to N is reachable.
        base[t] = std::max(p, 1e-3);
    }
    return base;
}

}  // namespace

std::string_view to_string(ProfileKind kind) { return kind == ProfileKind::wind ? "wind" : "solar"; }

double Profile::flh() const { return resolution_h * sum(values); }

double PowerSeries::energy_mwh() const { return resolution_h * sum(values); }

std::pair<Profile, Profile> load_profiles(const std::filesystem::path& path, std::size_t horizon,
                                          double resolution_h) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open profile file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("profile file '" + path.string() + "' is empty");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line = line.substr(3);  // UTF-8 BOM
    }
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw SchemaError("profile file '" + path.string() + "' lacks column '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t wind_col = column("wind_cf");
    const std::size_t solar_col = column("solar_cf");

    Profile wind{{}, resolution_h, ProfileKind::wind};
    Profile solar{{}, resolution_h, ProfileKind::solar};
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() <= std::max(wind_col, solar_col)) {
            throw SchemaError("row " + std::to_string(row) + " has too few columns");
        }
        const double w = parse_cell(cells[wind_col], row, "wind_cf");
        const double s = parse_cell(cells[solar_col], row, "solar_cf");
        if (!std::isfinite(w) || !std::isfinite(s) || w < 0.0 || s < 0.0) {
            throw ValidationError("row " + std::to_string(row) + ": capacity factors must be finite and >= 0");
        }
        wind.values.push_back(w);
        solar.values.push_back(s);
    }
    if (wind.size() != horizon) {
        throw HorizonMismatchError("profile file has " + std::to_string(wind.size()) + " rows, horizon is " +
                                   std::to_string(horizon));
    }
    warn_over_unity(wind, "loaded");
    warn_over_unity(solar, "loaded");
    spdlog::info("loaded profiles from {}: wind FLH {:.1f} h, solar FLH {:.1f} h", path.string(), wind.flh(),
                 solar.flh());
    return {std::move(wind), std::move(solar)};
}

void write_profiles(const std::filesystem::path& path, const Profile& wind, const Profile& solar) {
    if (wind.size() != solar.size()) {
        throw HorizonMismatchError("wind and solar profiles differ in length");
    }
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out.precision(17);
    out << "hour,wind_cf,solar_cf\n";
    for (std::size_t t = 0; t < wind.size(); ++t) {
        out << t << ',' << wind.values[t] << ',' << solar.values[t] << '\n';
    }
}

Profile standardize(const PowerSeries& raw_power, double installed_capacity_mw, ProfileKind kind) {
    if (!(installed_capacity_mw > 0.0) || !std::isfinite(installed_capacity_mw)) {
        throw DomainError("installed capacity must be positive");
    }
    Profile p{{}, raw_power.resolution_h, kind};
    p.values.reserve(raw_power.size());
    for (double v : raw_power.values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ValidationError("raw power must be finite and >= 0");
        }
        p.values.push_back(v / installed_capacity_mw);
    }
    warn_over_unity(p, "standardized");
    return p;
}

PowerSeries scale(const Profile& profile, double capacity_mw, std::string label) {
    if (!(capacity_mw >= 0.0) || !std::isfinite(capacity_mw)) {
        throw DomainError("capacity must be finite and >= 0");
    }
    PowerSeries out;
    out.label = label.empty() ? std::string(to_string(profile.kind)) + " output" : std::move(label);
    out.resolution_h = profile.resolution_h;
    out.values.reserve(profile.size());
    for (double v : profile.values) {
        out.values.push_back(capacity_mw * v);
    }
    return out;
}

Profile synthesize_profile(ProfileKind kind, double target_flh, std::uint64_t seed, std::size_t n,
                           double resolution_h) {
    if (n == 0 || !(resolution_h > 0.0)) {
        throw DomainError("profile length and resolution must be positive");
    }
    const double max_flh = static_cast<double>(n) * resolution_h;
    if (!(target_flh > 0.0) || target_flh > max_flh * (1.0 + 1e-12)) {
        throw DomainError("target FLH must lie in (0, N*dT]");
    }
    Profile p{{}, resolution_h, kind};
    if (target_flh >= max_flh * (1.0 - 1e-12)) {
        if (kind == ProfileKind::solar) {
            throw DomainError("solar output is zero at night; FLH of N*dT is unreachable");
        }
        p.values.assign(n, 1.0);
        return p;
    }
    std::mt19937_64 rng(seed);
    const auto base = kind == ProfileKind::solar ? solar_shape(n, resolution_h, rng) : wind_shape(n, resolution_h, rng);
    const auto positive = static_cast<double>(std::count_if(base.begin(), base.end(), [](double b) { return b > 0.0; }));
    if (target_flh >= positive * resolution_h) {
        throw DomainError("target FLH exceeds the daylight hours of the synthetic solar shape");
    }
    p.values = renormalize(base, target_flh / resolution_h);
    return p;
}

Profile truncate(const Profile& profile, std::size_t n) {
    if (n > profile.size()) {
        throw HorizonMismatchError("cannot truncate a profile of length " + std::to_string(profile.size()) + " to " +
                                   std::to_string(n));
    }
    Profile p = profile;
    p.values.resize(n);
    return p;
}

}  // namespace repta
