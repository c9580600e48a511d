#pragma once

// Independent reference computations the implementation is checked against.
// Everything here is deliberately written from the defining formulas, not by
// calling into the library paths under test.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <Eigen/Dense>

#include "ncrsense/config.hpp"
#include "ncrsense/model.hpp"
#include "ncrsense/sinr.hpp"

namespace oracle {

using Complex = std::complex<double>;
using ncrsense::Precoder;
using ncrsense::SystemConfig;

/// Noise-free received mean for sample n, sub-carrier k as an explicit
/// function of the parameter vector (d, rcs_re, rcs_im). Unit symbols are
/// allowed to be arbitrary unit-modulus values.
inline Eigen::VectorXcd mean_vector(int n, int k, double d, Complex rcs,
                                    const Eigen::VectorXcd &w, Complex symbol, double phi,
                                    const SystemConfig &cfg) {
    const int m = static_cast<int>(w.size());
    const int ns = cfg.num_subcarriers();
    const double df = cfg.subcarrier_spacing_hz();
    const double c = cfg.speed_of_light();
    Eigen::VectorXcd a(m);
    for (int i = 0; i < m; ++i) a[i] = std::polar(1.0, i * M_PI * std::cos(phi));
    Complex a_t_w(0.0, 0.0);
    for (int i = 0; i < m; ++i) a_t_w += a[i] * w[i];
    const double beta = 1.0 / (d * d);
    const double tau = 2.0 * d / c;
    const Complex sample_phase = std::polar(1.0, 2.0 * M_PI * k * n / static_cast<double>(ns));
    const Complex delay_phase = std::polar(1.0, 2.0 * M_PI * k * df * tau);
    return rcs * (a * a_t_w) * symbol * sample_phase * beta * delay_phase;
}

/// Fisher information assembled from central finite differences of the mean,
/// summed over all samples and sub-carriers. The step for the range
/// coordinate is capped so the per-sub-carrier phase increment stays small;
/// the mean is linear in the reflectivity components, so their steps are
/// uncritical.
inline Eigen::Matrix3d fim_finite_difference(double d, Complex rcs, const Eigen::VectorXcd &w,
                                             double alpha, double phi, const SystemConfig &cfg,
                                             const Eigen::VectorXcd &symbols) {
    const int n_samples = cfg.num_time_samples();
    const int ns = cfg.num_subcarriers();
    const double df = cfg.subcarrier_spacing_hz();
    const double c = cfg.speed_of_light();

    const double sigma_total = alpha * alpha * cfg.chan_est_err_var() * w.squaredNorm() +
                               alpha * alpha * cfg.propagated_noise_var() + cfg.noise_power();

    const double phase_cap = ns > 1 ? 5e-3 * c / (4.0 * M_PI * (ns - 1) * df) : 1e-4 * d;
    const double h_d = std::min(1e-4 * d, phase_cap);
    const double h_re = 1e-4 * std::max(std::abs(rcs.real()), 1e-3);
    const double h_im = 1e-4 * std::max(std::abs(rcs.imag()), 1e-3);

    Eigen::Matrix3d fim = Eigen::Matrix3d::Zero();
    std::array<Eigen::VectorXcd, 3> partial;
    for (int n = 0; n < n_samples; ++n) {
        for (int k = 0; k < ns; ++k) {
            const Complex c_k = symbols[k];
            partial[0] = (mean_vector(n, k, d + h_d, rcs, w, c_k, phi, cfg) -
                          mean_vector(n, k, d - h_d, rcs, w, c_k, phi, cfg)) /
                         (2.0 * h_d);
            partial[1] = (mean_vector(n, k, d, rcs + Complex(h_re, 0), w, c_k, phi, cfg) -
                          mean_vector(n, k, d, rcs - Complex(h_re, 0), w, c_k, phi, cfg)) /
                         (2.0 * h_re);
            partial[2] = (mean_vector(n, k, d, rcs + Complex(0, h_im), w, c_k, phi, cfg) -
                          mean_vector(n, k, d, rcs - Complex(0, h_im), w, c_k, phi, cfg)) /
                         (2.0 * h_im);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    fim(i, j) += 2.0 * partial[i].dot(partial[j]).real() / sigma_total;
                }
            }
        }
    }
    return fim;
}

/// Brute-force minimizer for two-antenna instances: w is parametrized on the
/// full-power sphere (a power split and a relative phase; the global phase is
/// immaterial to both the objective and the constraints), alpha on a log
/// grid. Returns the best feasible objective found.
struct GridSearchResult {
    double best_crb = std::numeric_limits<double>::infinity();
    double best_alpha = 0.0;
    Eigen::VectorXcd best_w;
    bool any_feasible = false;
};

template <typename CrbFn>
GridSearchResult grid_search_m2(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                                const CrbFn &crb_of, int n_split, int n_phase, int n_alpha,
                                double log_alpha_min, double log_alpha_max) {
    GridSearchResult result;
    const double p_max = cfg.max_power();
    const double gamma_u = cfg.min_user_sinr();
    const int ns = cfg.num_subcarriers();
    const double var_e = cfg.noise_power();
    const double var_b = cfg.repeater_user_chan_var();

    Eigen::VectorXcd w(2);
    for (int is = 0; is < n_split; ++is) {
        const double theta = 0.5 * M_PI * is / (n_split - 1.0);
        for (int ip = 0; ip < n_phase; ++ip) {
            const double rel_phase = 2.0 * M_PI * ip / n_phase;
            w[0] = std::sqrt(p_max) * std::cos(theta);
            w[1] = std::polar(std::sqrt(p_max) * std::sin(theta), rel_phase);
            double pg = 0.0;
            for (int k = 0; k < ns; ++k) {
                Complex p(0.0, 0.0);
                for (int j = 0; j < 2; ++j) p += g(k, j) * w[j];
                pg += std::norm(p);
            }
            for (int ia = 0; ia < n_alpha; ++ia) {
                const double alpha =
                    std::exp(log_alpha_min +
                             (log_alpha_max - log_alpha_min) * ia / (n_alpha - 1.0));
                const double a2 = alpha * alpha;
                const double sinr = a2 * pg / (ns * var_e * (a2 * var_b + 1.0));
                if (sinr < gamma_u) continue;
                const double crb = crb_of(w, alpha);
                if (crb < result.best_crb) {
                    result.best_crb = crb;
                    result.best_alpha = alpha;
                    result.best_w = w;
                    result.any_feasible = true;
                }
            }
        }
    }
    return result;
}

} // namespace oracle
