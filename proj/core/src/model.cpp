#include "ncrsense/model.hpp"

#include <cmath>
#include <stdexcept>

#include "ncrsense/errors.hpp"
#include "ncrsense/rng.hpp"

namespace ncrsense {

namespace {

constexpr std::uint64_t kStreamH = 0x68'63'68'61'6eULL;   // "hchan"
constexpr std::uint64_t kStreamB = 0x62'63'68'61'6eULL;   // "bchan"
constexpr std::uint64_t kStreamRcs = 0x72'63'73ULL;       // "rcs"
constexpr std::uint64_t kStreamNoise = 0x6e'6f'69'73'65ULL;

// Plain-transpose inner product x^T y (no conjugation).
Complex transpose_dot(const Eigen::VectorXcd &x, const Eigen::VectorXcd &y) {
    Complex acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

} // namespace

SteeringVector steering_vector(double phi_rad, int num_antennas) {
    if (num_antennas < 1) {
        throw DimensionError("steering_vector: num_antennas must be >= 1");
    }
    SteeringVector a;
    a.angle_rad = phi_rad;
    a.entries.resize(num_antennas);
    const double spatial_freq = M_PI * std::cos(phi_rad);
    for (int m = 0; m < num_antennas; ++m) {
        a.entries[m] = std::polar(1.0, spatial_freq * static_cast<double>(m));
    }
    return a;
}

Precoder uniform_precoder(const SystemConfig &cfg) {
    const int m = cfg.num_antennas();
    Precoder p;
    p.w = Eigen::VectorXcd::Constant(m, Complex(std::sqrt(cfg.max_power() / m), 0.0));
    return p;
}

Precoder matched_precoder(const SystemConfig &cfg) {
    const auto a = steering_vector(cfg.target_angle_rad(), cfg.num_antennas());
    Precoder p;
    p.w = std::sqrt(cfg.max_power() / cfg.num_antennas()) * a.entries.conjugate();
    return p;
}

ChannelRealization draw_channels(const SystemConfig &cfg, std::uint64_t seed) {
    const int ns = cfg.num_subcarriers();
    const int m = cfg.num_antennas();
    const double var_b = cfg.repeater_user_chan_var();
    const double var_h = cfg.composite_chan_var() / var_b;

    ChannelRealization chan;
    chan.h.resize(ns, m);
    chan.b.resize(ns);
    chan.g.resize(ns, m);

    Rng rng_h(mix_seed(seed, kStreamH));
    Rng rng_b(mix_seed(seed, kStreamB));
    Rng rng_rcs(mix_seed(seed, kStreamRcs));

    for (int k = 0; k < ns; ++k) {
        for (int j = 0; j < m; ++j) {
            chan.h(k, j) = rng_h.next_cn(var_h);
        }
        chan.b[k] = rng_b.next_cn(var_b);
        chan.g.row(k) = chan.b[k] * chan.h.row(k);
    }
    chan.rcs = rng_rcs.next_cn(cfg.rcs_var());
    return chan;
}

Complex ofdm_sample(const Eigen::VectorXcd &symbols, int n) {
    if (n < 0) {
        throw DimensionError("ofdm_sample: sample index must be >= 0");
    }
    const int ns = static_cast<int>(symbols.size());
    Complex acc(0.0, 0.0);
    for (int k = 0; k < ns; ++k) {
        if (std::abs(std::abs(symbols[k]) - 1.0) > 1e-9) {
            throw std::invalid_argument("ofdm_sample: symbols must be unit modulus");
        }
        acc += symbols[k] * std::polar(1.0, 2.0 * M_PI * k * n / ns);
    }
    return acc;
}

double path_loss(double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("path_loss: distance must be > 0");
    }
    return 1.0 / (distance_m * distance_m);
}

double round_trip_delay(double distance_m, double speed_of_light) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("round_trip_delay: distance must be > 0");
    }
    return 2.0 * distance_m / speed_of_light;
}

Eigen::VectorXcd synthesize_received_ap(const SystemConfig &cfg, const Precoder &w, double alpha,
                                        const ChannelRealization &chan,
                                        const Eigen::VectorXcd &symbols, int k, int n,
                                        const NoiseSpec &noise) {
    const int m = cfg.num_antennas();
    const int ns = cfg.num_subcarriers();
    if (w.size() != m || chan.g.cols() != m || chan.g.rows() != ns ||
        static_cast<int>(symbols.size()) != ns) {
        throw DimensionError("synthesize_received_ap: dimension mismatch with SystemConfig");
    }
    if (k < 0 || k >= ns || n < 0 || n >= cfg.num_time_samples()) {
        throw DimensionError("synthesize_received_ap: sub-carrier or sample index out of range");
    }
    if (alpha < 0.0) {
        throw std::invalid_argument("synthesize_received_ap: alpha must be >= 0");
    }

    const double d = cfg.target_distance_m();
    const double beta = path_loss(d);
    const double tau = round_trip_delay(d, cfg.speed_of_light());
    const double df = cfg.subcarrier_spacing_hz();
    const double fs = df * ns;

    const auto a = steering_vector(cfg.target_angle_rad(), m).entries;
    const Complex c_k = symbols[k];

    // Target echo, delayed waveform evaluated in closed form.
    const Complex echo_phase = std::polar(1.0, 2.0 * M_PI * k * df * (n / fs - tau));
    const Complex a_t_w = transpose_dot(a, w.w);
    Eigen::VectorXcd y = chan.rcs * beta * (a * a_t_w) * c_k * echo_phase;

    // Repeater feed-through of the current sample.
    const Complex sample_phase = std::polar(1.0, 2.0 * M_PI * k * n / static_cast<double>(ns));
    const Eigen::VectorXcd h_k = chan.h.row(k).transpose();
    const Complex h_t_w = transpose_dot(h_k, w.w);
    y += alpha * h_k * (h_t_w * c_k * sample_phase);

    if (noise.enabled) {
        const double var_e = cfg.noise_power();
        Rng rng(mix_seed(mix_seed(noise.seed, kStreamNoise),
                         (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint64_t>(n)));
        const Complex n_rk = rng.next_cn(var_e);
        y += alpha * h_k * n_rk;
        for (int j = 0; j < m; ++j) {
            y[j] += rng.next_cn(var_e);
        }
    }
    return y;
}

} // namespace ncrsense
