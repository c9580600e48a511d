#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ncrsense/sinr.hpp"

using namespace ncrsense;
using testutil::toy_params;

TEST_CASE("zero gain gives zero sinr") {
    const auto cfg = testutil::toy_config(4, 8);
    Rng rng(2);
    const auto g = testutil::random_cvector(rng, 4 * 8, 0.3).reshaped(8, 4).eval();
    const Precoder w = testutil::random_precoder(rng, 4, cfg.max_power());
    const auto report = user_sinr(w, 0.0, g, cfg);
    CHECK(report.sinr_linear == 0.0);
    CHECK(report.noise_plus_interference > 0.0);
    CHECK(report.sinr_db == -std::numeric_limits<double>::infinity());
}

TEST_CASE("large gain approaches the interference-limited ceiling") {
    const auto cfg = testutil::toy_config(4, 8);
    Rng rng(3);
    const auto g = testutil::random_cvector(rng, 4 * 8, 0.3).reshaped(8, 4).eval();
    const Precoder w = testutil::random_precoder(rng, 4, cfg.max_power());

    double signal = 0.0;
    for (int k = 0; k < 8; ++k) {
        Complex p(0, 0);
        for (int j = 0; j < 4; ++j) p += g(k, j) * w.w[j];
        signal += std::norm(p);
    }
    const double ceiling =
        signal / (8.0 * cfg.repeater_user_chan_var() * cfg.noise_power());
    const auto report = user_sinr(w, 1e6, g, cfg);
    CHECK(report.sinr_linear == doctest::Approx(ceiling).epsilon(1e-6));
}

TEST_CASE("single sub-carrier hand case") {
    // g = e_1, w = [sqrt(P), 0, ...], alpha = 1 -> P / (vb*ve + ve).
    auto params = toy_params(3, 1);
    params.repeater_user_chan_var_db = -7.0;
    params.noise_power_dbm = -4.0;
    const auto cfg = SystemConfig::from_params(params);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(1, 3);
    g(0, 0) = Complex(1.0, 0.0);
    Precoder w;
    w.w = Eigen::VectorXcd::Zero(3);
    w.w[0] = std::sqrt(cfg.max_power());
    const auto report = user_sinr(w, 1.0, g, cfg);
    const double vb = cfg.repeater_user_chan_var();
    const double ve = cfg.noise_power();
    CHECK(report.sinr_linear ==
          doctest::Approx(cfg.max_power() / (vb * ve + ve)).epsilon(1e-12));
}

TEST_CASE("scaling the precoder scales the sinr by |c|^2") {
    const auto cfg = testutil::toy_config(5, 6);
    Rng rng(4);
    const auto g = testutil::random_cvector(rng, 5 * 6, 0.5).reshaped(6, 5).eval();
    for (int i = 0; i < 20; ++i) {
        const Precoder w = testutil::random_precoder(rng, 5, rng.uniform(0.1, 4.0));
        const double c = rng.uniform(0.1, 3.0);
        Precoder scaled;
        scaled.w = c * w.w;
        const double base = user_sinr(w, 1.7, g, cfg).sinr_linear;
        const double after = user_sinr(scaled, 1.7, g, cfg).sinr_linear;
        CHECK(after == doctest::Approx(c * c * base).epsilon(1e-12));
    }
}

TEST_CASE("sinr is non-decreasing in alpha") {
    const auto cfg = testutil::toy_config(4, 8);
    Rng rng(5);
    const auto g = testutil::random_cvector(rng, 4 * 8, 0.5).reshaped(8, 4).eval();
    const Precoder w = testutil::random_precoder(rng, 4, cfg.max_power());
    double prev = user_sinr(w, 0.0, g, cfg).sinr_linear;
    for (double alpha = 1e-3; alpha < 1e5; alpha *= 3.0) {
        const double cur = user_sinr(w, alpha, g, cfg).sinr_linear;
        CHECK(cur >= prev * (1.0 - 1e-12));
        prev = cur;
    }
}

TEST_CASE("sinr is invariant under a common phase rotation of w") {
    const auto cfg = testutil::toy_config(6, 4);
    Rng rng(6);
    const auto g = testutil::random_cvector(rng, 6 * 4, 0.5).reshaped(4, 6).eval();
    const Precoder w = testutil::random_precoder(rng, 6, 2.0);
    const double base = user_sinr(w, 3.0, g, cfg).sinr_linear;
    for (double phase = 0.3; phase < 6.0; phase += 0.9) {
        Precoder rotated;
        rotated.w = std::polar(1.0, phase) * w.w;
        CHECK(user_sinr(rotated, 3.0, g, cfg).sinr_linear ==
              doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("report fields are consistent") {
    const auto cfg = testutil::toy_config(4, 8);
    Rng rng(8);
    const auto g = testutil::random_cvector(rng, 4 * 8, 0.5).reshaped(8, 4).eval();
    const Precoder w = testutil::random_precoder(rng, 4, 1.0);
    const auto report = user_sinr(w, 2.0, g, cfg);
    CHECK(report.sinr_linear ==
          doctest::Approx(report.signal_power / report.noise_plus_interference));
    CHECK(report.sinr_db == doctest::Approx(10.0 * std::log10(report.sinr_linear)));
    CHECK(report.sinr_linear >= 0.0);
}

TEST_CASE("dimension mismatch raises") {
    const auto cfg = testutil::toy_config(4, 8);
    Rng rng(9);
    const auto g = testutil::random_cvector(rng, 5 * 8, 0.5).reshaped(8, 5).eval();
    const Precoder w = testutil::random_precoder(rng, 4, 1.0);
    CHECK_THROWS_AS(user_sinr(w, 1.0, g, cfg), DimensionError);
    CHECK_THROWS_AS(user_sinr(w, -1.0, g.leftCols(4).eval(), cfg), std::invalid_argument);
}
