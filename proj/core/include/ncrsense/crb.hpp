#pragma once

#include <complex>
#include <Eigen/Dense>

#include "ncrsense/config.hpp"
#include "ncrsense/model.hpp"

namespace ncrsense {

/// Fisher information over the parameter vector (d, rcs_re, rcs_im):
/// range to the target and the real/imaginary parts of the reflectivity.
struct FisherMatrix {
    Eigen::Matrix3d entries = Eigen::Matrix3d::Zero();

    double max_abs() const { return entries.cwiseAbs().maxCoeff(); }
    bool is_symmetric(double rel_tol = 1e-12) const;
    double min_eigenvalue() const;
};

/// How the array response is paired with the precoder in the echo power.
/// The receive model pairs by plain transpose, |a(phi)^T w|^2; the published
/// closed form pairs by conjugate transpose, |a(phi)^H w|^2. The two coincide
/// for real-valued precoders and differ for general complex ones.
enum class BeamPairing { kTranspose, kConjugate };

/// Echo SNR scale shared by every entry of the Fisher matrix:
///
///   2 M N |a(phi)* w|^2
///   ----------------------------------------------------------
///   alpha^2 sigma_H^2 ||w||^2 + alpha^2 sigma_z^2 + sigma_e^2
///
/// The denominator is the per-antenna variance of the residual interference
/// plus noise after cancelling the known repeater feed-through.
double echo_snr_scale(const Precoder &w, double alpha, double phi_rad, const SystemConfig &cfg,
                      BeamPairing pairing = BeamPairing::kTranspose);

/// Range-sensitivity coefficient of the echo:
/// 4 N_s / d^2 + 16 pi^2 df^2 N_s (N_s - 1)(2 N_s - 1) / (6 c^2).
/// The first term comes from the amplitude slope of 1/d^2, the second from
/// the per-sub-carrier phase slopes of the round-trip delay.
double range_sensitivity_coeff(const SystemConfig &cfg, double distance_m);

/// Coupling between the range estimate and the reflectivity components:
///   re = -2 rcs_re N_s / d - rcs_im 4 pi df N_s (N_s - 1) / (2 c)
///   im = -2 rcs_im N_s / d + rcs_re 4 pi df N_s (N_s - 1) / (2 c)
/// Satisfies re^2 + im^2 = |rcs|^2 (A^2 + B^2) with A = 2 N_s / d and
/// B = 4 pi df N_s (N_s - 1) / (2 c); the phase of the reflectivity cancels.
struct RangeRcsCoupling {
    double re = 0.0;
    double im = 0.0;
};
RangeRcsCoupling range_rcs_coupling(std::complex<double> rcs, const SystemConfig &cfg,
                                    double distance_m);

/// Closed-form Fisher matrix consistent with the direct Slepian-Bangs
/// summation: transpose beam pairing and N_s on the trailing diagonal
/// (each sub-carrier contributes a unit reflectivity-information term).
FisherMatrix fim_closed_form(const Precoder &w, double alpha, std::complex<double> rcs,
                             double phi_rad, double distance_m, const SystemConfig &cfg);

/// Published closed-form variant kept for comparison: conjugate beam pairing
/// and 1 on the trailing diagonal. For N_s >= 2 its Schur complement
/// |rcs|^2 C - re^2 - im^2 is negative, so this matrix is not positive
/// semidefinite; it must not feed any downstream computation.
FisherMatrix fim_closed_form_published(const Precoder &w, double alpha, std::complex<double> rcs,
                                       double phi_rad, double distance_m, const SystemConfig &cfg);

/// Literal Slepian-Bangs evaluation: double sum over time samples and
/// sub-carriers of 2 Re{ (d mu / d xi_i)^H Sigma^{-1} (d mu / d xi_j) } with
/// analytic partial derivatives of the noise-free mean and the scalar
/// covariance Sigma = (alpha^2 sigma_H^2 ||w||^2 + alpha^2 sigma_z^2 +
/// sigma_e^2) I_M. This is the defining computation the closed form is
/// checked against.
FisherMatrix fim_direct(const Precoder &w, double alpha, std::complex<double> rcs, double phi_rad,
                        double distance_m, const SystemConfig &cfg);

/// Range CRB with the scalars that assemble it. `snr_scale` uses the
/// transpose pairing; `crb_d` depends on the reflectivity only through its
/// power, which is why crb_range takes |rcs|^2 directly.
struct CrbBreakdown {
    double crb_d = 0.0; // m^2
    double snr_scale = 0.0;
    double sensitivity = 0.0;
    double coupling_re = 0.0;
    double coupling_im = 0.0;
    FisherMatrix fim;
};

/// Range CRB as the (1,1) element of the inverse Fisher matrix, evaluated in
/// closed form via Cramer's rule:
///
///   crb_d = d^4 / (snr_scale * (|rcs|^2 C - (re^2 + im^2) / N_s))
///
/// The Schur term is computed through its algebraically cancelled form
/// |rcs|^2 * 4 pi^2 df^2 N_s (N_s^2 - 1) / (3 c^2), which is exact about the
/// N_s = 1 degeneracy. Throws IdentifiabilityError when the range is not
/// identifiable: zero reflectivity power, a single sub-carrier, or a precoder
/// orthogonal to the array response.
CrbBreakdown crb_range(const Precoder &w, double alpha, double rcs_power, double phi_rad,
                       double distance_m, const SystemConfig &cfg);

/// Range CRB through the full inverse of the direct-summation Fisher matrix.
/// Independent route used to cross-check crb_range.
double crb_range_direct(const Precoder &w, double alpha, double rcs_power, double phi_rad,
                        double distance_m, const SystemConfig &cfg);

/// Range CRB from the published closed-form variant, kept for side-by-side
/// reports. May be negative (see fim_closed_form_published); never used
/// downstream.
double crb_range_published(const Precoder &w, double alpha, double rcs_power, double phi_rad,
                           double distance_m, const SystemConfig &cfg);

} // namespace ncrsense
