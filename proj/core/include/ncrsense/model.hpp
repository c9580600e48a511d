#pragma once

#include <complex>
#include <cstdint>
#include <Eigen/Dense>

#include "ncrsense/config.hpp"

namespace ncrsense {

using Complex = std::complex<double>;

/// Half-wavelength uniform linear array response toward angle phi:
/// entries[m] = exp(j * m * pi * cos(phi)), m = 0..M-1. Unit-modulus entries,
/// so the squared norm is exactly M.
struct SteeringVector {
    Eigen::VectorXcd entries;
    double angle_rad = 0.0;
};

SteeringVector steering_vector(double phi_rad, int num_antennas);

/// Complex antenna weight vector; its squared norm is the transmit power.
struct Precoder {
    Eigen::VectorXcd w;

    double power() const { return w.squaredNorm(); }
    int size() const { return static_cast<int>(w.size()); }
};

/// Equal-power zero-phase precoder sqrt(P/M) * [1, ..., 1].
Precoder uniform_precoder(const SystemConfig &cfg);

/// Precoder conjugate-matched to the array response at the target angle,
/// at full transmit power.
Precoder matched_precoder(const SystemConfig &cfg);

/// Per-trial fading state. Row k of `h` is the access-point/repeater channel
/// on sub-carrier k, b[k] the repeater-to-user coefficient, and row k of `g`
/// the composite channel g_k = b_k * h_k consumed by the SINR and the
/// optimizer. `rcs` is the complex target reflectivity draw.
struct ChannelRealization {
    Eigen::MatrixXcd g; // N_s x M
    Eigen::MatrixXcd h; // N_s x M
    Eigen::VectorXcd b; // N_s
    Complex rcs{0.0, 0.0};
};

/// Draws one fading realization. h entries are CN(0, sigma_g^2 / sigma_b^2),
/// b entries CN(0, sigma_b^2) and g is formed as the row-wise product
/// b_k * h_k, so each g entry has variance sigma_g^2. rcs ~ CN(0, sigma_RCS^2).
/// Deterministic in `seed`; the h/b/rcs streams are independent.
ChannelRealization draw_channels(const SystemConfig &cfg, std::uint64_t seed);

/// One OFDM sample: sum_k c_k * exp(j 2 pi k n / N_s). Every symbol must be
/// unit modulus (tolerance 1e-9).
Complex ofdm_sample(const Eigen::VectorXcd &symbols, int n);

/// Line-of-sight two-way large-scale fading, beta(d) = 1/d^2. Requires d > 0.
double path_loss(double distance_m);

/// Round-trip propagation delay tau(d) = 2 d / c. Requires d > 0.
double round_trip_delay(double distance_m, double speed_of_light);

/// Noise switch for signal synthesis: disabled gives the deterministic
/// noise-free model, enabled draws AWGN from (seed, k, n).
struct NoiseSpec {
    bool enabled = true;
    std::uint64_t seed = 0;
};

/// Received M-vector at the access point for sub-carrier k, sample n:
/// target echo + repeater feed-through + amplified repeater noise + AWGN.
/// The delayed echo is evaluated analytically as
/// w * c_k * exp(j 2 pi k df (n/fs - tau(d))).
Eigen::VectorXcd synthesize_received_ap(const SystemConfig &cfg, const Precoder &w, double alpha,
                                        const ChannelRealization &chan,
                                        const Eigen::VectorXcd &symbols, int k, int n,
                                        const NoiseSpec &noise);

} // namespace ncrsense
