#include "ncrsense/crb.hpp"

#include <cmath>

#include "ncrsense/errors.hpp"

namespace ncrsense {

namespace {

double interference_plus_noise_var(const Precoder &w, double alpha, const SystemConfig &cfg) {
    const double alpha_sq = alpha * alpha;
    return alpha_sq * cfg.chan_est_err_var() * w.power() + alpha_sq * cfg.propagated_noise_var() +
           cfg.noise_power();
}

std::complex<double> rcs_from_power(double rcs_power) {
    const double component = std::sqrt(rcs_power / 2.0);
    return {component, component};
}

Complex transpose_dot(const Eigen::VectorXcd &x, const Eigen::VectorXcd &y) {
    Complex acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

} // namespace

bool FisherMatrix::is_symmetric(double rel_tol) const {
    const double scale = std::max(max_abs(), 1e-300);
    return (entries - entries.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double FisherMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(entries);
    return solver.eigenvalues().minCoeff();
}

double echo_snr_scale(const Precoder &w, double alpha, double phi_rad, const SystemConfig &cfg,
                      BeamPairing pairing) {
    if (alpha < 0.0) {
        throw std::invalid_argument("echo_snr_scale: alpha must be >= 0");
    }
    const int m = cfg.num_antennas();
    if (w.size() != m) {
        throw DimensionError("echo_snr_scale: precoder size disagrees with config");
    }
    const auto a = steering_vector(phi_rad, m).entries;
    const Complex paired =
        pairing == BeamPairing::kTranspose ? transpose_dot(a, w.w) : Complex(a.dot(w.w));
    const double beam_power = std::norm(paired);
    const double n = cfg.num_time_samples();
    return 2.0 * m * n * beam_power / interference_plus_noise_var(w, alpha, cfg);
}

double range_sensitivity_coeff(const SystemConfig &cfg, double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("range_sensitivity_coeff: distance must be > 0");
    }
    const double ns = cfg.num_subcarriers();
    const double df = cfg.subcarrier_spacing_hz();
    const double c = cfg.speed_of_light();
    const double amplitude_term = 4.0 * ns / (distance_m * distance_m);
    const double phase_term =
        16.0 * M_PI * M_PI * df * df * ns * (ns - 1.0) * (2.0 * ns - 1.0) / (6.0 * c * c);
    return amplitude_term + phase_term;
}

RangeRcsCoupling range_rcs_coupling(std::complex<double> rcs, const SystemConfig &cfg,
                                    double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("range_rcs_coupling: distance must be > 0");
    }
    const double ns = cfg.num_subcarriers();
    const double df = cfg.subcarrier_spacing_hz();
    const double c = cfg.speed_of_light();
    const double amp_slope = 2.0 * ns / distance_m;
    const double phase_slope = 4.0 * M_PI * df * ns * (ns - 1.0) / (2.0 * c);
    RangeRcsCoupling s;
    s.re = -rcs.real() * amp_slope - rcs.imag() * phase_slope;
    s.im = -rcs.imag() * amp_slope + rcs.real() * phase_slope;
    return s;
}

namespace {

FisherMatrix assemble_closed_form(double snr_scale, double diag, std::complex<double> rcs,
                                  const SystemConfig &cfg, double distance_m) {
    const double d4 = distance_m * distance_m * distance_m * distance_m;
    const double kappa = snr_scale / d4;
    const double c_coeff = range_sensitivity_coeff(cfg, distance_m);
    const auto s = range_rcs_coupling(rcs, cfg, distance_m);

    FisherMatrix fim;
    fim.entries << std::norm(rcs) * c_coeff, s.re, s.im, //
        s.re, diag, 0.0,                                 //
        s.im, 0.0, diag;
    fim.entries *= kappa;
    return fim;
}

} // namespace

FisherMatrix fim_closed_form(const Precoder &w, double alpha, std::complex<double> rcs,
                             double phi_rad, double distance_m, const SystemConfig &cfg) {
    const double scale = echo_snr_scale(w, alpha, phi_rad, cfg, BeamPairing::kTranspose);
    return assemble_closed_form(scale, static_cast<double>(cfg.num_subcarriers()), rcs, cfg,
                                distance_m);
}

FisherMatrix fim_closed_form_published(const Precoder &w, double alpha, std::complex<double> rcs,
                                       double phi_rad, double distance_m,
                                       const SystemConfig &cfg) {
    const double scale = echo_snr_scale(w, alpha, phi_rad, cfg, BeamPairing::kConjugate);
    return assemble_closed_form(scale, 1.0, rcs, cfg, distance_m);
}

FisherMatrix fim_direct(const Precoder &w, double alpha, std::complex<double> rcs, double phi_rad,
                        double distance_m, const SystemConfig &cfg) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("fim_direct: distance must be > 0");
    }
    const int m = cfg.num_antennas();
    const int n_samples = cfg.num_time_samples();
    const int ns = cfg.num_subcarriers();
    if (w.size() != m) {
        throw DimensionError("fim_direct: precoder size disagrees with config");
    }

    const double sigma_total = interference_plus_noise_var(w, alpha, cfg);
    const double beta = path_loss(distance_m);
    const double beta_prime = -2.0 / (distance_m * distance_m * distance_m);
    const double tau = round_trip_delay(distance_m, cfg.speed_of_light());
    const double df = cfg.subcarrier_spacing_hz();
    const double c = cfg.speed_of_light();

    const auto a = steering_vector(phi_rad, m).entries;
    // All partial derivatives are scalar multiples of a (a^T w); unit-modulus
    // symbols cancel pairwise, so c_k = 1 without loss of generality.
    const Eigen::VectorXcd beam = a * transpose_dot(a, w.w);

    FisherMatrix fim;
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    Eigen::VectorXcd d_mu_d(m), d_mu_re(m), d_mu_im(m);

    for (int n = 0; n < n_samples; ++n) {
        for (int k = 0; k < ns; ++k) {
            const Complex sample_phase =
                std::polar(1.0, 2.0 * M_PI * k * n / static_cast<double>(ns));
            const Complex delay_phase = std::polar(1.0, 2.0 * M_PI * k * df * tau);
            const Complex common = sample_phase * delay_phase;

            const Complex range_slope(beta_prime, beta * 4.0 * M_PI * k * df / c);
            d_mu_d = rcs * common * range_slope * beam;
            d_mu_re = common * beta * beam;
            d_mu_im = Complex(0.0, 1.0) * d_mu_re;

            const Eigen::VectorXcd *partials[3] = {&d_mu_d, &d_mu_re, &d_mu_im};
            for (int i = 0; i < 3; ++i) {
                for (int j = i; j < 3; ++j) {
                    const Complex inner = partials[i]->dot(*partials[j]); // conjugates lhs
                    acc(i, j) += 2.0 * inner.real() / sigma_total;
                }
            }
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            acc(j, i) = acc(i, j);
        }
    }
    fim.entries = acc;
    return fim;
}

CrbBreakdown crb_range(const Precoder &w, double alpha, double rcs_power, double phi_rad,
                       double distance_m, const SystemConfig &cfg) {
    if (!(rcs_power > 0.0)) {
        throw IdentifiabilityError("crb_range: range is not identifiable with zero RCS power");
    }
    const int ns = cfg.num_subcarriers();
    if (ns < 2) {
        throw IdentifiabilityError(
            "crb_range: a single sub-carrier cannot separate range from the RCS phase "
            "(Fisher matrix is singular)");
    }
    const double snr_scale = echo_snr_scale(w, alpha, phi_rad, cfg, BeamPairing::kTranspose);
    if (!(snr_scale > 0.0)) {
        throw IdentifiabilityError(
            "crb_range: precoder carries no energy toward the target (beam power is zero)");
    }

    const std::complex<double> rcs = rcs_from_power(rcs_power);
    const double df = cfg.subcarrier_spacing_hz();
    const double c = cfg.speed_of_light();
    // |rcs|^2 C - (re^2 + im^2) / N_s with the 1/d^2 terms cancelled exactly.
    const double schur = rcs_power * 4.0 * M_PI * M_PI * df * df * ns *
                         (static_cast<double>(ns) * ns - 1.0) / (3.0 * c * c);
    if (!(schur > 0.0)) {
        throw IdentifiabilityError("crb_range: degenerate information (non-positive Schur term)");
    }

    const double d4 = distance_m * distance_m * distance_m * distance_m;
    CrbBreakdown out;
    out.crb_d = d4 / (snr_scale * schur);
    if (!std::isfinite(out.crb_d) || !(out.crb_d > 0.0)) {
        throw IdentifiabilityError("crb_range: non-finite bound from degenerate inputs");
    }
    out.snr_scale = snr_scale;
    out.sensitivity = range_sensitivity_coeff(cfg, distance_m);
    const auto coupling = range_rcs_coupling(rcs, cfg, distance_m);
    out.coupling_re = coupling.re;
    out.coupling_im = coupling.im;
    out.fim = fim_closed_form(w, alpha, rcs, phi_rad, distance_m, cfg);
    return out;
}

double crb_range_direct(const Precoder &w, double alpha, double rcs_power, double phi_rad,
                        double distance_m, const SystemConfig &cfg) {
    const FisherMatrix fim =
        fim_direct(w, alpha, rcs_from_power(rcs_power), phi_rad, distance_m, cfg);
    const Eigen::Matrix3d inv = fim.entries.inverse();
    return inv(0, 0);
}

double crb_range_published(const Precoder &w, double alpha, double rcs_power, double phi_rad,
                           double distance_m, const SystemConfig &cfg) {
    const std::complex<double> rcs = rcs_from_power(rcs_power);
    const double snr_scale = echo_snr_scale(w, alpha, phi_rad, cfg, BeamPairing::kConjugate);
    const double c_coeff = range_sensitivity_coeff(cfg, distance_m);
    const auto s = range_rcs_coupling(rcs, cfg, distance_m);
    const double schur = rcs_power * c_coeff - s.re * s.re - s.im * s.im;
    const double d4 = distance_m * distance_m * distance_m * distance_m;
    return d4 / (snr_scale * schur);
}

} // namespace ncrsense
