#pragma once

#include <cmath>
#include <complex>
#include <Eigen/Dense>

#include "ncrsense/config.hpp"
#include "ncrsense/model.hpp"
#include "ncrsense/rng.hpp"

namespace testutil {

using ncrsense::Precoder;
using ncrsense::Rng;
using ncrsense::SystemConfig;
using ncrsense::SystemConfigParams;

/// Baseline parameter set used across the test suites (the default shipped
/// configuration): 64 antennas, 128 samples/sub-carriers, 120 kHz spacing.
inline SystemConfigParams baseline_params() {
    SystemConfigParams p;
    p.noise_power_dbm = -94.0;
    p.chan_est_err_var_db = -20.0;
    p.propagated_noise_var_dbm = -198.0;
    p.repeater_user_chan_var_db = -80.0;
    p.composite_chan_var_db = -184.0;
    p.rcs_var_db = 10.0;
    p.target_angle_deg = 30.0;
    p.target_distance_m = 400.0;
    p.num_antennas = 64;
    p.num_time_samples = 128;
    p.num_subcarriers = 128;
    p.subcarrier_spacing_hz = 120e3;
    p.max_power = 1e6;
    p.min_user_sinr_db = 2.0;
    return p;
}

inline SystemConfig baseline_config() { return SystemConfig::from_params(baseline_params()); }

/// Small instance with unit-scale variances for hand-checkable cases.
inline SystemConfigParams toy_params(int m, int ns, int n = 8) {
    SystemConfigParams p;
    p.noise_power_dbm = 0.0;
    p.chan_est_err_var_db = -10.0;
    p.propagated_noise_var_dbm = -30.0;
    p.repeater_user_chan_var_db = 0.0;
    p.composite_chan_var_db = -3.0;
    p.rcs_var_db = 3.0;
    p.target_angle_deg = 42.0;
    p.target_distance_m = 120.0;
    p.num_antennas = m;
    p.num_time_samples = n;
    p.num_subcarriers = ns;
    p.subcarrier_spacing_hz = 120e3;
    p.max_power = 4.0;
    p.min_user_sinr_db = -3.0;
    return p;
}

inline SystemConfig toy_config(int m, int ns, int n = 8) {
    return SystemConfig::from_params(toy_params(m, ns, n));
}

inline Eigen::VectorXcd random_cvector(Rng &rng, int m, double scale = 1.0) {
    Eigen::VectorXcd v(m);
    for (int j = 0; j < m; ++j) v[j] = rng.next_cn(scale * scale);
    return v;
}

/// Random precoder with the requested transmit power.
inline Precoder random_precoder(Rng &rng, int m, double power) {
    Precoder p;
    p.w = random_cvector(rng, m);
    p.w *= std::sqrt(power) / p.w.norm();
    return p;
}

inline Eigen::VectorXcd random_qpsk(Rng &rng, int ns) {
    Eigen::VectorXcd c(ns);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < ns; ++k) {
        const double re = rng.next_unit() < 0.5 ? -inv_sqrt2 : inv_sqrt2;
        const double im = rng.next_unit() < 0.5 ? -inv_sqrt2 : inv_sqrt2;
        c[k] = {re, im};
    }
    return c;
}

inline double rel_err(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    if (denom == 0.0) return 0.0;
    return std::abs(a - b) / denom;
}

} // namespace testutil
