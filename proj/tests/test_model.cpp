#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "ncrsense/model.hpp"
#include "ncrsense/rng.hpp"

using namespace ncrsense;
using testutil::baseline_params;
using testutil::toy_params;

TEST_CASE("steering vector basics") {
    SUBCASE("broadside gives all ones") {
        const auto a = steering_vector(M_PI / 2.0, 4);
        for (int m = 0; m < 4; ++m) {
            CHECK(std::abs(a.entries[m] - Complex(1.0, 0.0)) < 1e-15);
        }
    }
    SUBCASE("endfire alternates sign") {
        const auto a = steering_vector(0.0, 2);
        CHECK(std::abs(a.entries[0] - Complex(1.0, 0.0)) < 1e-15);
        CHECK(std::abs(a.entries[1] - Complex(-1.0, 0.0)) < 1e-15);
    }
    SUBCASE("30 degrees, hand-evaluated phases") {
        const auto a = steering_vector(M_PI / 6.0, 3);
        const double phase = M_PI * std::sqrt(3.0) / 2.0;
        CHECK(std::abs(a.entries[0] - Complex(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(a.entries[1] - std::polar(1.0, phase)) < 1e-12);
        CHECK(std::abs(a.entries[2] - std::polar(1.0, 2.0 * phase)) < 1e-12);
    }
    SUBCASE("squared norm equals M for random angles") {
        Rng rng(7);
        for (int i = 0; i < 50; ++i) {
            const int m = 1 + static_cast<int>(rng.next_unit() * 64);
            const double phi = rng.uniform(0.0, M_PI);
            const auto a = steering_vector(phi, m);
            CHECK(a.entries.squaredNorm() == doctest::Approx(m).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(steering_vector(0.1, 0), DimensionError);
}

TEST_CASE("ofdm_sample") {
    SUBCASE("all-ones symbols at n = 0 sum to N_s") {
        const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(16);
        CHECK(std::abs(ofdm_sample(ones, 0) - Complex(16.0, 0.0)) < 1e-12);
    }
    SUBCASE("full period of 4th roots of unity cancels") {
        const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(4);
        CHECK(std::abs(ofdm_sample(ones, 1)) < 1e-12);
    }
    SUBCASE("random QPSK matches direct summation") {
        Rng rng(11);
        const auto symbols = testutil::random_qpsk(rng, 8);
        Complex expected(0.0, 0.0);
        for (int k = 0; k < 8; ++k) {
            expected += symbols[k] * std::exp(Complex(0.0, 2.0 * M_PI * k * 3 / 8.0));
        }
        CHECK(std::abs(ofdm_sample(symbols, 3) - expected) < 1e-12);
    }
    SUBCASE("non-unit symbol rejected") {
        Eigen::VectorXcd bad = Eigen::VectorXcd::Ones(4);
        bad[2] = Complex(1.0 + 1e-6, 0.0);
        CHECK_THROWS_AS(ofdm_sample(bad, 0), std::invalid_argument);
    }
    SUBCASE("Parseval over one symbol period") {
        Rng rng(13);
        const int ns = 16;
        const auto symbols = testutil::random_qpsk(rng, ns);
        double sample_energy = 0.0;
        for (int n = 0; n < ns; ++n) sample_energy += std::norm(ofdm_sample(symbols, n));
        CHECK(sample_energy ==
              doctest::Approx(ns * symbols.squaredNorm()).epsilon(1e-10));
    }
}

TEST_CASE("path loss and delay") {
    CHECK(path_loss(1.0) == 1.0);
    CHECK(path_loss(400.0) == doctest::Approx(6.25e-6).epsilon(1e-15));
    CHECK(path_loss(2.0) == 0.25);
    CHECK_THROWS_AS(path_loss(0.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss(-3.0), std::invalid_argument);

    const double c = SystemConfig::kSpeedOfLight;
    CHECK(round_trip_delay(c / 2.0, c) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(round_trip_delay(400.0, c) == doctest::Approx(800.0 / 299792458.0).epsilon(1e-15));
    CHECK(round_trip_delay(0.5 * c, c) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(round_trip_delay(0.0, c), std::invalid_argument);

    SUBCASE("monotonicity in distance") {
        double prev_loss = path_loss(1.0);
        double prev_delay = round_trip_delay(1.0, c);
        for (double d = 2.0; d < 1e4; d *= 2.7) {
            CHECK(path_loss(d) < prev_loss);
            CHECK(round_trip_delay(d, c) > prev_delay);
            prev_loss = path_loss(d);
            prev_delay = round_trip_delay(d, c);
        }
    }
}

TEST_CASE("draw_channels determinism and factorization") {
    const auto cfg = SystemConfig::from_params(toy_params(8, 12));
    const auto one = draw_channels(cfg, 42);
    const auto two = draw_channels(cfg, 42);
    CHECK(one.g == two.g);
    CHECK(one.h == two.h);
    CHECK(one.b == two.b);
    CHECK(one.rcs == two.rcs);
    const auto other = draw_channels(cfg, 43);
    CHECK(one.g != other.g);

    SUBCASE("composite is the row-wise product") {
        for (int k = 0; k < cfg.num_subcarriers(); ++k) {
            for (int j = 0; j < cfg.num_antennas(); ++j) {
                CHECK(std::abs(one.g(k, j) - one.b[k] * one.h(k, j)) < 1e-15);
            }
        }
    }
}

TEST_CASE("draw_channels statistics") {
    // 16x16 entries per draw, 400 draws: > 1e5 samples of g.
    auto params = toy_params(16, 16);
    params.composite_chan_var_db = -7.0;
    params.repeater_user_chan_var_db = -2.0;
    params.rcs_var_db = 4.0;
    const auto cfg = SystemConfig::from_params(params);

    double sum_sq = 0.0;
    Complex sum(0.0, 0.0);
    std::size_t count = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto chan = draw_channels(cfg, 1000 + trial);
        for (int k = 0; k < 16; ++k) {
            for (int j = 0; j < 16; ++j) {
                sum_sq += std::norm(chan.g(k, j));
                sum += chan.g(k, j);
                ++count;
            }
        }
    }
    const double var = sum_sq / count;
    CHECK(var == doctest::Approx(cfg.composite_chan_var()).epsilon(0.02));
    // Zero mean within 3 standard errors (per complex component).
    const double se = std::sqrt(cfg.composite_chan_var() / 2.0 / count);
    CHECK(std::abs(sum.real() / count) < 3.0 * se);
    CHECK(std::abs(sum.imag() / count) < 3.0 * se);
}

TEST_CASE("synthesize_received_ap") {
    auto params = toy_params(4, 8, 8);
    const auto cfg = SystemConfig::from_params(params);
    Rng rng(5);
    const auto symbols = testutil::random_qpsk(rng, 8);
    auto chan = draw_channels(cfg, 3);
    const Precoder w = testutil::random_precoder(rng, 4, cfg.max_power());
    const NoiseSpec no_noise{false, 0};

    SUBCASE("all terms off gives zero") {
        auto silent = chan;
        silent.rcs = Complex(0.0, 0.0);
        const auto y = synthesize_received_ap(cfg, w, 0.0, silent, symbols, 2, 3, no_noise);
        CHECK(y.norm() == 0.0);
    }

    SUBCASE("matches term-by-term reference") {
        const int k = 5, n = 6;
        const double alpha = 2.5;
        const auto y = synthesize_received_ap(cfg, w, alpha, chan, symbols, k, n, no_noise);

        const int m = cfg.num_antennas();
        Eigen::VectorXcd a(m);
        for (int i = 0; i < m; ++i) {
            a[i] = std::polar(1.0, i * M_PI * std::cos(cfg.target_angle_rad()));
        }
        const double d = cfg.target_distance_m();
        const double fs = cfg.subcarrier_spacing_hz() * cfg.num_subcarriers();
        Complex atw(0, 0), htw(0, 0);
        for (int i = 0; i < m; ++i) {
            atw += a[i] * w.w[i];
            htw += chan.h(k, i) * w.w[i];
        }
        const Complex echo = std::exp(Complex(
            0.0, 2.0 * M_PI * k * cfg.subcarrier_spacing_hz() *
                     (n / fs - 2.0 * d / cfg.speed_of_light())));
        const Complex feed = std::exp(Complex(0.0, 2.0 * M_PI * k * n / 8.0));
        Eigen::VectorXcd expected =
            chan.rcs / (d * d) * a * atw * symbols[k] * echo +
            alpha * chan.h.row(k).transpose() * htw * symbols[k] * feed;
        CHECK((y - expected).norm() < 1e-12 * expected.norm());
    }

    SUBCASE("linear in the precoder with noise off") {
        Precoder w2 = testutil::random_precoder(rng, 4, 1.0);
        Precoder sum;
        sum.w = 0.5 * w.w + 2.0 * w2.w;
        const auto y1 = synthesize_received_ap(cfg, w, 1.3, chan, symbols, 1, 2, no_noise);
        const auto y2 = synthesize_received_ap(cfg, w2, 1.3, chan, symbols, 1, 2, no_noise);
        const auto ys = synthesize_received_ap(cfg, sum, 1.3, chan, symbols, 1, 2, no_noise);
        CHECK((ys - (0.5 * y1 + 2.0 * y2)).norm() < 1e-12 * ys.norm());
    }

    SUBCASE("noise is seedable") {
        const NoiseSpec na{true, 77};
        const NoiseSpec nb{true, 78};
        const auto y1 = synthesize_received_ap(cfg, w, 1.0, chan, symbols, 1, 2, na);
        const auto y2 = synthesize_received_ap(cfg, w, 1.0, chan, symbols, 1, 2, na);
        const auto y3 = synthesize_received_ap(cfg, w, 1.0, chan, symbols, 1, 2, nb);
        CHECK(y1 == y2);
        CHECK(y1 != y3);
    }

    SUBCASE("index validation") {
        CHECK_THROWS_AS(synthesize_received_ap(cfg, w, 1.0, chan, symbols, 8, 0, no_noise),
                        DimensionError);
        CHECK_THROWS_AS(synthesize_received_ap(cfg, w, 1.0, chan, symbols, 0, 8, no_noise),
                        DimensionError);
    }
}
