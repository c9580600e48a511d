#include "ncrsense/sinr.hpp"

#include <cmath>
#include <limits>

#include "ncrsense/errors.hpp"

namespace ncrsense {

SinrReport user_sinr(const Precoder &w, double alpha, const Eigen::MatrixXcd &g,
                     const SystemConfig &cfg) {
    if (alpha < 0.0) {
        throw std::invalid_argument("user_sinr: alpha must be >= 0");
    }
    const int ns = cfg.num_subcarriers();
    const int m = cfg.num_antennas();
    if (g.rows() != ns || g.cols() != m || w.size() != m) {
        throw DimensionError("user_sinr: channel matrix / precoder dimensions disagree with config");
    }

    const double alpha_sq = alpha * alpha;
    double signal = 0.0;
    for (int k = 0; k < ns; ++k) {
        Complex p_k(0.0, 0.0);
        for (int j = 0; j < m; ++j) p_k += g(k, j) * w.w[j];
        signal += alpha_sq * std::norm(p_k);
    }

    const double var_e = cfg.noise_power();
    const double var_b = cfg.repeater_user_chan_var();
    const double denom = ns * alpha_sq * var_b * var_e + ns * var_e;

    SinrReport report;
    report.signal_power = signal;
    report.noise_plus_interference = denom;
    report.sinr_linear = signal / denom;
    report.sinr_db = report.sinr_linear > 0.0 ? 10.0 * std::log10(report.sinr_linear)
                                              : -std::numeric_limits<double>::infinity();
    return report;
}

} // namespace ncrsense
