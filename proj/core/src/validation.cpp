#include "ncrsense/validation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ncrsense/config.hpp"
#include "ncrsense/crb.hpp"
#include "ncrsense/model.hpp"
#include "ncrsense/optimizer.hpp"
#include "ncrsense/rng.hpp"
#include "ncrsense/sinr.hpp"

namespace ncrsense {

namespace {

struct RandomInstance {
    SystemConfig cfg;
    Precoder w;
    double alpha = 1.0;
    double rcs_power = 1.0;
};

RandomInstance random_instance(Rng &rng, int max_m = 16, int max_ns = 64) {
    SystemConfigParams p;
    p.noise_power_dbm = rng.uniform(-104.0, -84.0);
    p.chan_est_err_var_db = rng.uniform(-30.0, -10.0);
    p.propagated_noise_var_dbm = rng.uniform(-208.0, -188.0);
    p.repeater_user_chan_var_db = -80.0;
    p.composite_chan_var_db = -184.0;
    p.rcs_var_db = rng.uniform(-10.0, 20.0);
    p.target_angle_deg = rng.uniform(5.0, 175.0);
    p.target_distance_m = rng.uniform(50.0, 1000.0);
    p.num_antennas = 1 + static_cast<int>(rng.next_unit() * max_m);
    p.num_time_samples = 1 + static_cast<int>(rng.next_unit() * 256);
    p.num_subcarriers = 2 + static_cast<int>(rng.next_unit() * (max_ns - 1));
    p.subcarrier_spacing_hz = rng.uniform(2e4, 2.4e5);
    p.max_power = std::pow(10.0, rng.uniform(0.0, 6.0));
    p.min_user_sinr_db = 2.0;

    RandomInstance inst{SystemConfig::from_params(p), {}, 0.0, 0.0};
    const int m = p.num_antennas;
    inst.w.w.resize(m);
    for (int j = 0; j < m; ++j) inst.w.w[j] = rng.next_cn(1.0);
    inst.w.w *= std::sqrt(p.max_power * rng.uniform(0.05, 1.0)) / inst.w.w.norm();
    inst.alpha = std::pow(10.0, rng.uniform(-1.0, 2.0));
    inst.rcs_power = std::pow(10.0, rng.uniform(-1.0, 2.0));
    return inst;
}

double rel_err(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

Eigen::MatrixXcd random_channel(Rng &rng, const SystemConfig &cfg) {
    Eigen::MatrixXcd g(cfg.num_subcarriers(), cfg.num_antennas());
    const double var = cfg.composite_chan_var();
    for (Eigen::Index k = 0; k < g.rows(); ++k) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(k, j) = rng.next_cn(var);
    }
    return g;
}

} // namespace

std::vector<ValidationCheck> run_validation(const ValidationOptions &options) {
    std::vector<ValidationCheck> checks;
    const int trials = std::max(1, options.trials);

    { // Closed form vs direct summation.
        Rng rng(mix_seed(options.seed, 1));
        double worst = 0.0;
        for (int i = 0; i < trials; ++i) {
            const auto inst = random_instance(rng);
            const double phi = inst.cfg.target_angle_rad();
            const double d = inst.cfg.target_distance_m();
            const double closed =
                crb_range(inst.w, inst.alpha, inst.rcs_power, phi, d, inst.cfg).crb_d;
            const double direct =
                crb_range_direct(inst.w, inst.alpha, inst.rcs_power, phi, d, inst.cfg);
            worst = std::max(worst, rel_err(closed, direct));
        }
        checks.push_back({"closed-form vs direct-summation range bound", worst <= 1e-9, worst,
                          1e-9});
    }

    { // Analytic merit gradient vs central differences at feasible points.
        Rng rng(mix_seed(options.seed, 2));
        double worst = 0.0;
        int done = 0;
        while (done < trials) {
            const auto inst = random_instance(rng, 8, 16);
            const auto g = random_channel(rng, inst.cfg);
            const double t = rng.uniform(-1.0, 4.0);
            const double sinr = user_sinr(inst.w, std::exp(t), g, inst.cfg).sinr_linear;
            if (sinr < inst.cfg.min_user_sinr()) continue; // want feasible points
            const double rho = std::pow(10.0, rng.uniform(0.0, 3.0));
            const auto analytic = merit_gradient(inst.cfg, g, inst.w.w, t, rho);
            const auto fd = merit_gradient_fd(inst.cfg, g, inst.w.w, t, rho);
            worst = std::max(worst, (analytic - fd).norm() / fd.norm());
            ++done;
        }
        checks.push_back({"merit gradient vs central differences", worst <= 1e-4, worst, 1e-4});
    }

    { // Positive semidefiniteness.
        Rng rng(mix_seed(options.seed, 3));
        double worst = 0.0; // most negative eigenvalue relative to the trace
        for (int i = 0; i < trials; ++i) {
            const auto inst = random_instance(rng, 8, 32);
            const double phi = inst.cfg.target_angle_rad();
            const double d = inst.cfg.target_distance_m();
            const std::complex<double> rcs =
                std::polar(std::sqrt(inst.rcs_power), rng.uniform(0.0, 2.0 * M_PI));
            const FisherMatrix fim =
                options.published_diagonal
                    ? fim_closed_form_published(inst.w, inst.alpha, rcs, phi, d, inst.cfg)
                    : fim_direct(inst.w, inst.alpha, rcs, phi, d, inst.cfg);
            const double trace = fim.entries.trace();
            if (trace > 0.0) {
                worst = std::max(worst, -fim.min_eigenvalue() / trace);
            }
        }
        const char *name = options.published_diagonal
                               ? "positive semidefiniteness (published closed-form variant)"
                               : "direct Fisher matrix positive semidefinite";
        checks.push_back({name, worst <= 1e-9, worst, 1e-9});
    }

    { // Reflectivity phase invariance of the bound.
        Rng rng(mix_seed(options.seed, 4));
        double worst = 0.0;
        for (int i = 0; i < trials; ++i) {
            const auto inst = random_instance(rng, 8, 16);
            const double phi = inst.cfg.target_angle_rad();
            const double d = inst.cfg.target_distance_m();
            const double closed =
                crb_range(inst.w, inst.alpha, inst.rcs_power, phi, d, inst.cfg).crb_d;
            const std::complex<double> rcs =
                std::polar(std::sqrt(inst.rcs_power), rng.uniform(0.0, 2.0 * M_PI));
            const auto fim = fim_direct(inst.w, inst.alpha, rcs, phi, d, inst.cfg);
            const double rotated = fim.entries.inverse()(0, 0);
            worst = std::max(worst, rel_err(closed, rotated));
        }
        checks.push_back({"bound invariant to the reflectivity phase", worst <= 1e-9, worst,
                          1e-9});
    }

    { // Bound non-decreasing in the repeater gain.
        Rng rng(mix_seed(options.seed, 5));
        int violations = 0;
        for (int i = 0; i < trials; ++i) {
            const auto inst = random_instance(rng, 8, 16);
            const double phi = inst.cfg.target_angle_rad();
            const double d = inst.cfg.target_distance_m();
            double prev = 0.0;
            for (double alpha : {0.0, 0.1, 1.0, 10.0, 100.0}) {
                const double cur =
                    crb_range(inst.w, alpha, inst.rcs_power, phi, d, inst.cfg).crb_d;
                if (cur < prev * (1.0 - 1e-12)) ++violations;
                prev = cur;
            }
        }
        checks.push_back({"bound non-decreasing in repeater gain", violations == 0,
                          static_cast<double>(violations), 0.0});
    }

    { // SINR gain monotonicity and quadratic precoder scaling.
        Rng rng(mix_seed(options.seed, 6));
        int violations = 0;
        double worst_scaling = 0.0;
        for (int i = 0; i < trials; ++i) {
            const auto inst = random_instance(rng, 8, 16);
            const auto g = random_channel(rng, inst.cfg);
            double prev = 0.0;
            for (double alpha : {0.0, 0.01, 0.3, 3.0, 300.0}) {
                const double cur = user_sinr(inst.w, alpha, g, inst.cfg).sinr_linear;
                if (cur < prev * (1.0 - 1e-12)) ++violations;
                prev = cur;
            }
            const double c = rng.uniform(0.1, 3.0);
            Precoder scaled;
            scaled.w = c * inst.w.w;
            const double base = user_sinr(inst.w, 1.7, g, inst.cfg).sinr_linear;
            const double after = user_sinr(scaled, 1.7, g, inst.cfg).sinr_linear;
            worst_scaling = std::max(worst_scaling, rel_err(after, c * c * base));
        }
        checks.push_back({"user SINR gain monotonicity", violations == 0,
                          static_cast<double>(violations), 0.0});
        checks.push_back({"user SINR quadratic precoder scaling", worst_scaling <= 1e-12,
                          worst_scaling, 1e-12});
    }

    return checks;
}

bool all_passed(const std::vector<ValidationCheck> &checks) {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ValidationCheck &c) { return c.passed; });
}

} // namespace ncrsense
