#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "ncrsense/config.hpp"
#include "ncrsense/units.hpp"

using namespace ncrsense;

namespace {

const char *kBaselineDoc = R"(# baseline system parameters
noise_power_dbm = -94
chan_est_err_var_db = -20
propagated_noise_var_dbm = -198
repeater_user_chan_var_db = -80
composite_chan_var_db = -184
rcs_var_db = 10
target_angle_deg = 30
target_distance_m = 400
num_antennas = 64
num_time_samples = 128   # per OFDM symbol
num_subcarriers = 128
subcarrier_spacing_hz = 120e3
max_power = 1e6
min_user_sinr_db = 2
)";

std::string doc_without_line(const std::string &needle) {
    std::string doc(kBaselineDoc);
    const auto pos = doc.find(needle);
    REQUIRE(pos != std::string::npos);
    const auto end = doc.find('\n', pos);
    doc.erase(pos, end - pos + 1);
    return doc;
}

std::string doc_with_replaced(const std::string &needle, const std::string &replacement) {
    std::string doc(kBaselineDoc);
    const auto pos = doc.find(needle);
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, needle.size(), replacement);
    return doc;
}

} // namespace

TEST_CASE("baseline document parses with table values") {
    const SystemConfig cfg = load_config(kBaselineDoc);
    CHECK(cfg.noise_power() == doctest::Approx(std::pow(10.0, -9.4)).epsilon(1e-15));
    CHECK(cfg.chan_est_err_var() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(cfg.propagated_noise_var() == doctest::Approx(std::pow(10.0, -19.8)).epsilon(1e-15));
    CHECK(cfg.repeater_user_chan_var() == doctest::Approx(1e-8).epsilon(1e-15));
    CHECK(cfg.composite_chan_var() == doctest::Approx(std::pow(10.0, -18.4)).epsilon(1e-15));
    CHECK(cfg.rcs_var() == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(cfg.target_angle_rad() == doctest::Approx(M_PI / 6.0).epsilon(1e-15));
    CHECK(cfg.target_distance_m() == 400.0);
    CHECK(cfg.num_antennas() == 64);
    CHECK(cfg.num_time_samples() == 128);
    CHECK(cfg.num_subcarriers() == 128);
    CHECK(cfg.subcarrier_spacing_hz() == 120e3);
    CHECK(cfg.max_power() == 1e6);
    CHECK(cfg.min_user_sinr() == doctest::Approx(std::pow(10.0, 0.2)).epsilon(1e-15));
    CHECK(cfg.speed_of_light() == 299792458.0);
}

TEST_CASE("missing key is reported by name") {
    const std::string doc = doc_without_line("num_antennas");
    CHECK_THROWS_WITH_AS(load_config(doc), doctest::Contains("num_antennas"), ConfigError);
}

TEST_CASE("duplicate key is reported with both lines") {
    std::string doc(kBaselineDoc);
    doc += "max_power = 2e6\n";
    CHECK_THROWS_WITH_AS(load_config(doc), doctest::Contains("duplicate key 'max_power'"),
                         ConfigError);
}

TEST_CASE("unknown key rejected") {
    std::string doc(kBaselineDoc);
    doc += "carrier_freq_hz = 3e9\n";
    CHECK_THROWS_WITH_AS(load_config(doc), doctest::Contains("unknown key"), ConfigError);
}

TEST_CASE("non-numeric value rejected with key and line") {
    const std::string doc = doc_with_replaced("target_distance_m = 400", "target_distance_m = far");
    CHECK_THROWS_WITH_AS(load_config(doc), doctest::Contains("target_distance_m"), ConfigError);
}

TEST_CASE("invariant violations rejected") {
    CHECK_THROWS_AS(load_config(doc_with_replaced("target_distance_m = 400",
                                                  "target_distance_m = -1")),
                    ConfigError);
    CHECK_THROWS_AS(load_config(doc_with_replaced("num_antennas = 64", "num_antennas = 0")),
                    ConfigError);
    CHECK_THROWS_AS(load_config(doc_with_replaced("num_antennas = 64", "num_antennas = 2.5")),
                    ConfigError);
    CHECK_THROWS_AS(load_config(doc_with_replaced("subcarrier_spacing_hz = 120e3",
                                                  "subcarrier_spacing_hz = 0")),
                    ConfigError);
    CHECK_THROWS_AS(load_config(doc_with_replaced("max_power = 1e6", "max_power = -5")),
                    ConfigError);
}

TEST_CASE("db_to_linear basics") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(db_to_linear(-20.0) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(db_to_linear(std::nan("")), std::invalid_argument);
}

TEST_CASE("dB round trip is identity over 60 decades") {
    for (int e = -30; e <= 30; ++e) {
        const double x = std::pow(10.0, e) * 1.7;
        const double back = db_to_linear(linear_to_db(x));
        CHECK(std::abs(back - x) <= 1e-12 * x);
    }
}

TEST_CASE("accessors are pure") {
    const SystemConfig cfg = load_config(kBaselineDoc);
    CHECK(cfg.noise_power() == cfg.noise_power());
    CHECK(cfg.min_user_sinr() == cfg.min_user_sinr());
    CHECK(cfg.target_angle_rad() == cfg.target_angle_rad());
}

TEST_CASE("with_* overrides revalidate") {
    const SystemConfig cfg = load_config(kBaselineDoc);
    const SystemConfig swept = cfg.with_max_power(5e5);
    CHECK(swept.max_power() == 5e5);
    CHECK(cfg.max_power() == 1e6); // original untouched
    CHECK_THROWS_AS(cfg.with_max_power(-1.0), ConfigError);
    CHECK(cfg.with_rcs_var_db(5.0).rcs_var() == doctest::Approx(std::pow(10.0, 0.5)));
    CHECK(cfg.with_min_user_sinr_db(4.0).min_user_sinr_db() == 4.0);
}
