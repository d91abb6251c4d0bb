#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "repta/errors.hpp"
#include "repta/profiles.hpp"

using namespace repta;

namespace {

std::filesystem::path temp_csv(const std::string& name, const std::string& header, std::size_t rows,
                               const std::function<std::string(std::size_t)>& row) {
    const auto path = std::filesystem::temp_directory_path() / ("repta_" + name + ".csv");
    std::ofstream out(path);
    out << header << "\n";
    for (std::size_t i = 0; i < rows; ++i) out << row(i) << "\n";
    return path;
}

}  // namespace

TEST_CASE("load_profiles reads a full year and reports FLH") {
    const double cf = 3500.0 / 8760.0;
    const auto path = temp_csv("year", "hour,wind_cf,solar_cf", 8760, [&](std::size_t i) {
        return std::to_string(i) + "," + std::to_string(cf) + ",0";
    });
    const auto [wind, solar] = load_profiles(path, 8760);
    CHECK(wind.kind == ProfileKind::wind);
    CHECK(solar.kind == ProfileKind::solar);
    CHECK(wind.flh() == doctest::Approx(3500.0).epsilon(1e-6));
    CHECK(solar.flh() == 0.0);
}

TEST_CASE("load_profiles accepts any column order") {
    const auto path = temp_csv("order", "solar_cf,extra,wind_cf,hour", 3,
                               [](std::size_t i) { return "0.25,x,0.5," + std::to_string(i); });
    const auto [wind, solar] = load_profiles(path, 3);
    CHECK(wind.values == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(solar.values == std::vector<double>{0.25, 0.25, 0.25});
}

TEST_CASE("load_profiles error taxonomy") {
    const auto short_file =
        temp_csv("short", "hour,wind_cf,solar_cf", 24, [](std::size_t i) { return std::to_string(i) + ",0.1,0.1"; });
    CHECK_THROWS_AS(load_profiles(short_file, 8760), HorizonMismatchError);

    const auto no_solar =
        temp_csv("nosolar", "hour,wind_cf", 4, [](std::size_t i) { return std::to_string(i) + ",0.1"; });
    CHECK_THROWS_AS(load_profiles(no_solar, 4), SchemaError);

    const auto negative = temp_csv("neg", "hour,wind_cf,solar_cf", 4,
                                   [](std::size_t i) { return std::to_string(i) + (i == 2 ? ",-0.1,0" : ",0.1,0"); });
    CHECK_THROWS_AS(load_profiles(negative, 4), ValidationError);

    const auto garbage = temp_csv("garbage", "hour,wind_cf,solar_cf", 2,
                                  [](std::size_t i) { return std::to_string(i) + ",abc,0"; });
    CHECK_THROWS_AS(load_profiles(garbage, 2), SchemaError);

    CHECK_THROWS_AS(load_profiles("/nonexistent/profiles.csv", 4), ConfigError);
}

TEST_CASE("write_profiles round trips") {
    Profile w{{0.1, 0.7, 1.2}, 1.0, ProfileKind::wind};
    Profile s{{0.0, 0.3, 0.9}, 1.0, ProfileKind::solar};
    const auto path = std::filesystem::temp_directory_path() / "repta_roundtrip.csv";
    write_profiles(path, w, s);
    const auto [w2, s2] = load_profiles(path, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(w2.values[i] == doctest::Approx(w.values[i]).epsilon(1e-12));
        CHECK(s2.values[i] == doctest::Approx(s.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("standardize divides by installed capacity") {
    PowerSeries raw{{100.0, 50.0}, "wind output"};
    const Profile p = standardize(raw, 200.0, ProfileKind::wind);
    CHECK(p.values == std::vector<double>{0.5, 0.25});

    PowerSeries zero{{0.0, 0.0, 0.0}, "wind output"};
    CHECK(standardize(zero, 10.0, ProfileKind::wind).values == std::vector<double>{0.0, 0.0, 0.0});

    PowerSeries over{{240.0}, "wind output"};
    CHECK(standardize(over, 200.0, ProfileKind::wind).values[0] == doctest::Approx(1.2));

    CHECK_THROWS_AS(standardize(raw, 0.0, ProfileKind::wind), DomainError);
    CHECK_THROWS_AS(standardize(raw, -5.0, ProfileKind::wind), DomainError);
}

TEST_CASE("scale multiplies by capacity") {
    CHECK(scale(Profile{{0.5}}, 347.0).values[0] == doctest::Approx(173.5));
    const auto z = scale(Profile{{0.3, 0.9}}, 0.0);
    CHECK(z.values == std::vector<double>{0.0, 0.0});
    const auto s = scale(Profile{{1.0, 0.2}}, 56.0);
    CHECK(s.values[0] == doctest::Approx(56.0));
    CHECK(s.values[1] == doctest::Approx(11.2));
    CHECK_THROWS_AS(scale(Profile{{1.0}}, -1.0), DomainError);
}

TEST_CASE("standardize inverts scale and FLH is capacity-invariant") {
    const Profile p = synthesize_profile(ProfileKind::wind, 300.0, 7, 720);
    for (double C : {0.5, 37.0, 1234.5}) {
        const PowerSeries ps = scale(p, C);
        const Profile back = standardize(ps, C, ProfileKind::wind);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::abs(back.values[i] - p.values[i]) <= 1e-12 * std::max(1.0, std::abs(p.values[i])));
        }
        CHECK(ps.energy_mwh() / C == doctest::Approx(p.flh()).epsilon(1e-12));
    }
}

TEST_CASE("synthetic solar hits its FLH and is dark at night") {
    const Profile p = synthesize_profile(ProfileKind::solar, 1800.0, 1, 8760);
    CHECK(p.size() == 8760);
    CHECK(p.flh() >= 1798.2);
    CHECK(p.flh() <= 1801.8);
    for (std::size_t t = 0; t < p.size(); ++t) {
        const std::size_t h = t % 24;
        if (h < 6 || h >= 18) CHECK(p.values[t] == 0.0);
        CHECK(p.values[t] >= 0.0);
        CHECK(p.values[t] <= 1.0);
    }
}

TEST_CASE("synthetic wind is autocorrelated and hits its FLH") {
    const Profile p = synthesize_profile(ProfileKind::wind, 3500.0, 1, 8760);
    CHECK(std::abs(p.flh() - 3500.0) <= 3.5);
    double mean = 0.0;
    for (double v : p.values) mean += v;
    mean /= static_cast<double>(p.size());
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        c0 += (p.values[t] - mean) * (p.values[t] - mean);
        if (t + 1 < p.size()) c1 += (p.values[t] - mean) * (p.values[t + 1] - mean);
    }
    CHECK(c1 / c0 > 0.5);
}

TEST_CASE("synthesis edge cases") {
    const Profile full = synthesize_profile(ProfileKind::wind, 8760.0, 1, 8760);
    for (double v : full.values) CHECK(v == 1.0);

    const Profile a = synthesize_profile(ProfileKind::solar, 1800.0, 42, 8760);
    const Profile b = synthesize_profile(ProfileKind::solar, 1800.0, 42, 8760);
    CHECK(a.values == b.values);
    const Profile c = synthesize_profile(ProfileKind::solar, 1800.0, 43, 8760);
    CHECK(a.values != c.values);

    CHECK_THROWS_AS(synthesize_profile(ProfileKind::wind, 0.0, 1, 24), DomainError);
    CHECK_THROWS_AS(synthesize_profile(ProfileKind::wind, 25.0, 1, 24), DomainError);
    // Solar cannot reach full load with dark nights.
    CHECK_THROWS_AS(synthesize_profile(ProfileKind::solar, 24.0, 1, 24), DomainError);
}

TEST_CASE("truncate keeps the leading steps") {
    const Profile p{{0.1, 0.2, 0.3}, 1.0, ProfileKind::solar};
    CHECK(truncate(p, 2).values == std::vector<double>{0.1, 0.2});
    CHECK(truncate(p, 2).kind == ProfileKind::solar);
    CHECK_THROWS(truncate(p, 4));
}
