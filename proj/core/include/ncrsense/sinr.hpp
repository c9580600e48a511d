#pragma once

#include <Eigen/Dense>

#include "ncrsense/config.hpp"
#include "ncrsense/model.hpp"

namespace ncrsense {

struct SinrReport {
    double sinr_linear = 0.0;
    double sinr_db = 0.0; // -inf when sinr_linear == 0
    double signal_power = 0.0;
    double noise_plus_interference = 0.0;
};

/// Signal-to-interference-plus-noise ratio at the user for precoder w and
/// repeater gain alpha over composite channels g (rows g_k):
///
///   sinr = sum_k alpha^2 |g_k^T w|^2
///          -------------------------------------
///          N_s alpha^2 sigma_b^2 sigma_e^2 + N_s sigma_e^2
///
/// All sub-carriers share the single precoder w; the transpose pairing
/// g_k^T w is used throughout the library.
SinrReport user_sinr(const Precoder &w, double alpha, const Eigen::MatrixXcd &g,
                     const SystemConfig &cfg);

} // namespace ncrsense
