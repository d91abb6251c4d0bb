#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace repta {

enum class ProfileKind { wind, solar };

std::string_view to_string(ProfileKind kind);

// Per-unit capacity factors, one value per step of `resolution_h` hours.
struct Profile {
    std::vector<double> values;
    double resolution_h = 1.0;
    ProfileKind kind = ProfileKind::wind;

    std::size_t size() const { return values.size(); }
    double flh() const;
};

// Hourly power in MW. Non-negative unless `is_signed`.
struct PowerSeries {
    std::vector<double> values;
    std::string label;
    double resolution_h = 1.0;
    bool is_signed = false;

    std::size_t size() const { return values.size(); }
    double energy_mwh() const;
};

// Reads `hour,wind_cf,solar_cf` CSV with header. Column order is free;
// extra columns are ignored.
std::pair<Profile, Profile> load_profiles(const std::filesystem::path& path, std::size_t horizon,
                                          double resolution_h = 1.0);

void write_profiles(const std::filesystem::path& path, const Profile& wind, const Profile& solar);

Profile standardize(const PowerSeries& raw_power, double installed_capacity_mw, ProfileKind kind);

PowerSeries scale(const Profile& profile, double capacity_mw, std::string label = {});

// Synthetic profile hitting `target_flh` to 0.1%. Solar is a clear-sky
// diurnal envelope with seasonal swing and daily cloud cover; wind is an
// AR(1) speed process through a cubic power curve.
Profile synthesize_profile(ProfileKind kind, double target_flh, std::uint64_t seed, std::size_t n,
                           double resolution_h = 1.0);

// First `n` steps of a profile (used for the short desk-scale horizons).
Profile truncate(const Profile& profile, std::size_t n);

}  // namespace repta
