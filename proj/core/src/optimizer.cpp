#include "ncrsense/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncrsense/crb.hpp"
#include "ncrsense/errors.hpp"
#include "ncrsense/sinr.hpp"

namespace ncrsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLogAlphaMin = -60.0;
constexpr double kLogAlphaMax = 60.0;
// Largest relative SINR shortfall the final polish is allowed to close.
constexpr double kPolishBand = 1e-3;

struct MeritParts {
    double merit = kInf;
    double log_crb = kInf;
    double sinr = 0.0;
    double channel_power = 0.0; // sum_k |g_k^T w|^2
    double beam_power = 0.0;    // |a^T w|^2
};

class MeritEvaluator {
  public:
    MeritEvaluator(const SystemConfig &cfg, const Eigen::MatrixXcd &g) : cfg_(cfg), g_(g) {
        m_ = cfg.num_antennas();
        ns_ = cfg.num_subcarriers();
        n_ = cfg.num_time_samples();
        if (g.rows() != ns_ || g.cols() != m_) {
            throw DimensionError("optimizer: channel matrix dimensions disagree with config");
        }
        a_ = steering_vector(cfg.target_angle_rad(), m_).entries;
        var_e_ = cfg.noise_power();
        var_b_ = cfg.repeater_user_chan_var();
        var_h_ = cfg.chan_est_err_var();
        var_z_ = cfg.propagated_noise_var();
        gamma_u_ = cfg.min_user_sinr();
        log_gamma_u_ = std::log(gamma_u_);

        const double d = cfg.target_distance_m();
        const double df = cfg.subcarrier_spacing_hz();
        const double c = cfg.speed_of_light();
        const double schur = cfg.rcs_var() * 4.0 * M_PI * M_PI * df * df * ns_ *
                             (static_cast<double>(ns_) * ns_ - 1.0) / (3.0 * c * c);
        if (!(schur > 0.0)) {
            throw IdentifiabilityError(
                "optimizer: range is not identifiable for this config (single sub-carrier)");
        }
        objective_const_ = 4.0 * std::log(d) - std::log(schur) - std::log(2.0 * m_ * n_);
    }

    double gamma_u() const { return gamma_u_; }

    double channel_power(const Eigen::VectorXcd &w) const {
        double pg = 0.0;
        for (int k = 0; k < ns_; ++k) {
            Complex p(0.0, 0.0);
            for (int j = 0; j < m_; ++j) p += g_(k, j) * w[j];
            pg += std::norm(p);
        }
        return pg;
    }

    double sinr_of(const Eigen::VectorXcd &w, double alpha) const {
        const double a2 = alpha * alpha;
        return a2 * channel_power(w) / (ns_ * var_e_ * (a2 * var_b_ + 1.0));
    }

    MeritParts value(const Eigen::VectorXcd &w, double t, double rho) const {
        MeritParts parts;
        const double alpha = std::exp(t);
        const double a2 = alpha * alpha;

        Complex beam(0.0, 0.0);
        for (int j = 0; j < m_; ++j) beam += a_[j] * w[j];
        parts.beam_power = std::norm(beam);
        const double noise_total = a2 * var_h_ * w.squaredNorm() + a2 * var_z_ + var_e_;
        parts.log_crb = objective_const_ - std::log(parts.beam_power) + std::log(noise_total);

        parts.channel_power = channel_power(w);
        parts.sinr = a2 * parts.channel_power / (ns_ * var_e_ * (a2 * var_b_ + 1.0));
        const double violation =
            parts.sinr > 0.0 ? std::max(0.0, log_gamma_u_ - std::log(parts.sinr)) : kInf;
        parts.merit = parts.log_crb + rho * violation * violation;
        return parts;
    }

    /// Gradient over [Re w; Im w; t].
    Eigen::VectorXd gradient(const Eigen::VectorXcd &w, double t, double rho) const {
        const double alpha = std::exp(t);
        const double a2 = alpha * alpha;

        Complex beam(0.0, 0.0);
        for (int j = 0; j < m_; ++j) beam += a_[j] * w[j];
        const double beam_power = std::norm(beam);
        const double w_norm_sq = w.squaredNorm();
        const double noise_total = a2 * var_h_ * w_norm_sq + a2 * var_z_ + var_e_;

        Eigen::VectorXcd p_k(ns_);
        double pg = 0.0;
        for (int k = 0; k < ns_; ++k) {
            Complex p(0.0, 0.0);
            for (int j = 0; j < m_; ++j) p += g_(k, j) * w[j];
            p_k[k] = p;
            pg += std::norm(p);
        }
        const double sinr = a2 * pg / (ns_ * var_e_ * (a2 * var_b_ + 1.0));
        const double violation = sinr > 0.0 ? std::max(0.0, log_gamma_u_ - std::log(sinr)) : kInf;

        // d merit / d conj(w)
        Eigen::VectorXcd gw = -(beam / beam_power) * a_.conjugate();
        gw += (a2 * var_h_ / noise_total) * w;
        if (violation > 0.0) {
            Eigen::VectorXcd dpg = Eigen::VectorXcd::Zero(m_);
            for (int k = 0; k < ns_; ++k) {
                for (int j = 0; j < m_; ++j) dpg[j] += p_k[k] * std::conj(g_(k, j));
            }
            gw += (-2.0 * rho * violation / pg) * dpg;
        }

        Eigen::VectorXd grad(2 * m_ + 1);
        for (int j = 0; j < m_; ++j) {
            grad[j] = 2.0 * gw[j].real();
            grad[m_ + j] = 2.0 * gw[j].imag();
        }
        double gt = 2.0 * a2 * (var_h_ * w_norm_sq + var_z_) / noise_total;
        if (violation > 0.0) {
            gt += -2.0 * rho * violation * 2.0 / (a2 * var_b_ + 1.0);
        }
        grad[2 * m_] = gt;
        return grad;
    }

    Eigen::VectorXd gradient_fd(const Eigen::VectorXcd &w, double t, double rho) const {
        Eigen::VectorXd grad(2 * m_ + 1);
        Eigen::VectorXcd wp = w;
        auto eval = [&](const Eigen::VectorXcd &wv, double tv) { return value(wv, tv, rho).merit; };
        for (int j = 0; j < 2 * m_; ++j) {
            const int idx = j % m_;
            const bool imag = j >= m_;
            const double base = imag ? w[idx].imag() : w[idx].real();
            const double h = 1e-6 * (1.0 + std::abs(base));
            auto set = [&](double v) {
                wp[idx] = imag ? Complex(w[idx].real(), v) : Complex(v, w[idx].imag());
            };
            set(base + h);
            const double fp = eval(wp, t);
            set(base - h);
            const double fm = eval(wp, t);
            set(base);
            grad[j] = (fp - fm) / (2.0 * h);
        }
        const double ht = 1e-6 * (1.0 + std::abs(t));
        grad[2 * m_] = (eval(w, t + ht) - eval(w, t - ht)) / (2.0 * ht);
        return grad;
    }

  private:
    const SystemConfig &cfg_;
    const Eigen::MatrixXcd &g_;
    Eigen::VectorXcd a_;
    int m_ = 0, ns_ = 0, n_ = 0;
    double var_e_ = 0.0, var_b_ = 0.0, var_h_ = 0.0, var_z_ = 0.0;
    double gamma_u_ = 0.0, log_gamma_u_ = 0.0;
    double objective_const_ = 0.0;
};

struct PackedPoint {
    Eigen::VectorXd x; // [Re w / r; Im w / r; (t)]
};

Eigen::VectorXcd unpack_w(const Eigen::VectorXd &x, int m, double r) {
    Eigen::VectorXcd w(m);
    for (int j = 0; j < m; ++j) w[j] = r * Complex(x[j], x[m + j]);
    return w;
}

void pack_w(Eigen::VectorXd &x, const Eigen::VectorXcd &w, int m, double r) {
    for (int j = 0; j < m; ++j) {
        x[j] = w[j].real() / r;
        x[m + j] = w[j].imag() / r;
    }
}

void project(Eigen::VectorXd &x, int m, bool joint) {
    const double n2 = x.head(2 * m).squaredNorm();
    if (n2 > 1.0) x.head(2 * m) /= std::sqrt(n2);
    if (joint) x[2 * m] = std::clamp(x[2 * m], kLogAlphaMin, kLogAlphaMax);
}

double relative_shortfall(double sinr, double gamma_u) {
    return std::max(0.0, gamma_u - sinr) / gamma_u;
}

/// Smallest gain meeting the SINR floor for a fixed precoder, or NaN when no
/// finite gain can (channel power at or below the gain-limited noise floor).
double required_alpha(double channel_power, double gamma_u, int ns, double var_e, double var_b) {
    const double denom = channel_power - gamma_u * ns * var_e * var_b;
    if (!(denom > 0.0)) return kNaN;
    return std::sqrt(gamma_u * ns * var_e / denom);
}

struct Candidate {
    Eigen::VectorXcd w;
    double alpha = 1.0;
    double sinr = 0.0;
    double shortfall = kInf;
    double log_crb = kInf;
};

Candidate finalize_candidate(const MeritEvaluator &ev, const SystemConfig &cfg,
                             Eigen::VectorXcd w, double alpha, bool joint) {
    Candidate c;
    const double gamma_u = ev.gamma_u();
    const int ns = cfg.num_subcarriers();
    const double var_e = cfg.noise_power();
    const double var_b = cfg.repeater_user_chan_var();

    double pg = ev.channel_power(w);
    double sinr = ev.sinr_of(w, alpha);
    if (sinr < gamma_u) {
        if (joint) {
            const double a_req = required_alpha(pg, gamma_u, ns, var_e, var_b);
            if (std::isfinite(a_req) && a_req > alpha) alpha = a_req;
        } else if (pg > 0.0) {
            // Scale the precoder up to restore the floor, power permitting.
            const double a2 = alpha * alpha;
            const double scale_sq_needed = gamma_u * ns * var_e * (a2 * var_b + 1.0) / (a2 * pg);
            if (scale_sq_needed > 1.0) {
                const double scale_sq_cap = cfg.max_power() / w.squaredNorm();
                const double scale_sq = std::min(scale_sq_needed, scale_sq_cap);
                if (scale_sq > 1.0) w *= std::sqrt(scale_sq);
            }
        }
        sinr = ev.sinr_of(w, alpha);
    }
    c.w = std::move(w);
    c.alpha = alpha;
    c.sinr = sinr;
    c.shortfall = relative_shortfall(sinr, gamma_u);
    c.log_crb = ev.value(c.w, std::log(alpha), 0.0).log_crb;
    return c;
}

OptimizationResult run_descent(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                               const Precoder &w0, double alpha0, bool joint, double alpha_fixed,
                               const OptimizeOptions &opts) {
    OptimizationResult result;
    result.w = w0;
    result.alpha = joint ? alpha0 : alpha_fixed;
    result.power_used = w0.power();
    result.crb_d = kNaN;
    result.sinr_db = -kInf;

    const auto feas = feasibility_check(g, cfg);
    if (!feas.feasible) {
        result.infeasible = true;
        const auto report = user_sinr(result.w, result.alpha, g, cfg);
        result.sinr_db = report.sinr_db;
        return result;
    }

    MeritEvaluator ev(cfg, g);
    const int m = cfg.num_antennas();
    const double r = std::sqrt(cfg.max_power());
    const double gamma_u = ev.gamma_u();
    const int dim = 2 * m + (joint ? 1 : 0);
    const double t_fixed = std::log(alpha_fixed);

    Eigen::VectorXd x(dim);
    pack_w(x, w0.w, m, r);
    if (joint) x[2 * m] = std::clamp(std::log(alpha0), kLogAlphaMin, kLogAlphaMax);
    project(x, m, joint);

    auto t_of = [&](const Eigen::VectorXd &xv) { return joint ? xv[2 * m] : t_fixed; };
    auto eval = [&](const Eigen::VectorXd &xv, double rho) {
        return ev.value(unpack_w(xv, m, r), t_of(xv), rho);
    };

    double rho = opts.penalty_rho0;
    MeritParts parts = eval(x, rho);
    if (!std::isfinite(parts.merit)) {
        // Start point radiates nothing toward the target or the user; nothing
        // to descend from.
        const auto report = user_sinr(result.w, result.alpha, g, cfg);
        result.sinr_db = report.sinr_db;
        return result;
    }

    result.objective_trace.push_back(parts.merit);
    bool has_best = false;
    Eigen::VectorXd x_best;
    double best_log_crb = kInf;
    auto consider_best = [&](const Eigen::VectorXd &xv, const MeritParts &p) {
        if (relative_shortfall(p.sinr, gamma_u) <= opts.sinr_rel_tol && p.log_crb < best_log_crb) {
            has_best = true;
            x_best = xv;
            best_log_crb = p.log_crb;
        }
    };
    consider_best(x, parts);

    auto can_stop = [&](const MeritParts &p, const Eigen::VectorXd &xv) {
        const double shortfall = relative_shortfall(p.sinr, gamma_u);
        if (shortfall <= opts.sinr_rel_tol) return true;
        if (shortfall > kPolishBand) return false;
        // Stop early only if the polish step can actually close the gap.
        if (joint) {
            return std::isfinite(required_alpha(p.channel_power, gamma_u, cfg.num_subcarriers(),
                                                cfg.noise_power(), cfg.repeater_user_chan_var()));
        }
        const double a2 = alpha_fixed * alpha_fixed;
        const double scale_sq = gamma_u * cfg.num_subcarriers() * cfg.noise_power() *
                                (a2 * cfg.repeater_user_chan_var() + 1.0) /
                                (a2 * p.channel_power);
        const Eigen::VectorXcd w_cur = unpack_w(xv, m, r);
        return scale_sq * w_cur.squaredNorm() <= cfg.max_power() * (1.0 + 1e-12);
    };

    bool stationary = false;
    int penalty_rounds = 0;
    int stall = 0;
    int iter = 0;
    // Initial trial step grows after accepted steps so flat directions
    // (e.g. the gain headed for its lower bound with an inactive SINR floor)
    // are traversed geometrically instead of at a fixed rate.
    double step_init = 1.0;
    while (iter < opts.max_iterations) {
        ++iter;
        const Eigen::VectorXcd w_cur = unpack_w(x, m, r);
        Eigen::VectorXd grad_full = opts.use_fd_gradient ? ev.gradient_fd(w_cur, t_of(x), rho)
                                                         : ev.gradient(w_cur, t_of(x), rho);
        Eigen::VectorXd grad(dim);
        grad.head(2 * m) = r * grad_full.head(2 * m);
        if (joint) grad[2 * m] = grad_full[2 * m];
        if (!grad.allFinite()) break;

        bool accepted = false;
        double step = step_init;
        Eigen::VectorXd x_new(dim);
        MeritParts parts_new;
        for (int ls = 0; ls < 96; ++ls) {
            x_new = x - step * grad;
            project(x_new, m, joint);
            parts_new = eval(x_new, rho);
            const double predicted = grad.dot(x_new - x);
            if (std::isfinite(parts_new.merit) &&
                parts_new.merit <= parts.merit + opts.armijo_c * predicted) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (accepted) step_init = std::min(step * 2.0, 1e6);

        bool at_stationary = false;
        if (accepted) {
            const double rel_change =
                std::abs(parts.merit - parts_new.merit) / std::max(1.0, std::abs(parts.merit));
            x = x_new;
            parts = parts_new;
            result.objective_trace.push_back(parts.merit);
            consider_best(x, parts);
            stall = rel_change < opts.objective_rel_tol ? stall + 1 : 0;
            at_stationary = stall >= opts.stall_steps;
        } else {
            at_stationary = true; // line search exhausted
        }

        if (at_stationary) {
            if (can_stop(parts, x)) {
                stationary = true;
                break;
            }
            if (penalty_rounds >= opts.max_penalty_rounds) break;
            rho *= opts.penalty_growth;
            ++penalty_rounds;
            stall = 0;
            parts = eval(x, rho);
            result.objective_trace.push_back(parts.merit);
            result.last_penalty_change =
                static_cast<int>(result.objective_trace.size()) - 1;
        }
    }
    result.iterations = iter;

    // Final selection: the stationary point and the best feasible iterate,
    // both after the polish step.
    Candidate chosen = finalize_candidate(ev, cfg, unpack_w(x, m, r),
                                          joint ? std::exp(t_of(x)) : alpha_fixed, joint);
    if (has_best) {
        Candidate best = finalize_candidate(ev, cfg, unpack_w(x_best, m, r),
                                            joint ? std::exp(x_best[2 * m]) : alpha_fixed, joint);
        const bool chosen_ok = chosen.shortfall <= opts.sinr_rel_tol;
        const bool best_ok = best.shortfall <= opts.sinr_rel_tol;
        if ((best_ok && !chosen_ok) || (best_ok == chosen_ok && best.log_crb < chosen.log_crb)) {
            chosen = std::move(best);
        }
    }

    result.w.w = chosen.w;
    result.alpha = chosen.alpha;
    result.power_used = chosen.w.squaredNorm();
    const auto report = user_sinr(result.w, result.alpha, g, cfg);
    result.sinr_db = report.sinr_db;
    try {
        result.crb_d = crb_range(result.w, result.alpha, cfg.rcs_var(), cfg.target_angle_rad(),
                                 cfg.target_distance_m(), cfg)
                           .crb_d;
    } catch (const IdentifiabilityError &) {
        result.crb_d = kNaN;
    }
    result.converged = stationary && chosen.shortfall <= opts.sinr_rel_tol &&
                       result.power_used <= cfg.max_power() * (1.0 + 1e-9) &&
                       std::isfinite(result.crb_d);
    return result;
}

} // namespace

FeasibilityReport feasibility_check(const Eigen::MatrixXcd &g, const SystemConfig &cfg) {
    const int m = cfg.num_antennas();
    const int ns = cfg.num_subcarriers();
    if (g.rows() != ns || g.cols() != m) {
        throw DimensionError("feasibility_check: channel matrix dimensions disagree with config");
    }
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(m, m);
    for (int k = 0; k < ns; ++k) {
        const Eigen::VectorXcd col = g.row(k).conjugate().transpose();
        gram.noalias() += col * col.adjoint();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
    const double lambda_max = std::max(0.0, solver.eigenvalues().maxCoeff());
    const double sup_sinr = cfg.max_power() * lambda_max /
                            (ns * cfg.repeater_user_chan_var() * cfg.noise_power());
    FeasibilityReport report;
    report.certificate = sup_sinr / cfg.min_user_sinr();
    report.feasible = report.certificate >= 1.0;
    return report;
}

OptimizationResult optimize_joint(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                                  const Precoder &w0, double alpha0, const OptimizeOptions &opts) {
    if (!(alpha0 > 0.0)) {
        throw std::invalid_argument("optimize_joint: initial alpha must be > 0");
    }
    return run_descent(cfg, g, w0, alpha0, /*joint=*/true, alpha0, opts);
}

OptimizationResult optimize_fixed_gain(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                                       double alpha_fixed, const Precoder &w0,
                                       const OptimizeOptions &opts) {
    if (!(alpha_fixed > 0.0)) {
        throw std::invalid_argument("optimize_fixed_gain: alpha must be > 0");
    }
    return run_descent(cfg, g, w0, alpha_fixed, /*joint=*/false, alpha_fixed, opts);
}

double merit_value(const SystemConfig &cfg, const Eigen::MatrixXcd &g, const Eigen::VectorXcd &w,
                   double t, double rho) {
    return MeritEvaluator(cfg, g).value(w, t, rho).merit;
}

Eigen::VectorXd merit_gradient(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                               const Eigen::VectorXcd &w, double t, double rho) {
    return MeritEvaluator(cfg, g).gradient(w, t, rho);
}

Eigen::VectorXd merit_gradient_fd(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                                  const Eigen::VectorXcd &w, double t, double rho) {
    return MeritEvaluator(cfg, g).gradient_fd(w, t, rho);
}

double beam_alignment(const Precoder &w, double phi_rad) {
    const int m = w.size();
    const auto a = steering_vector(phi_rad, m).entries;
    Complex beam(0.0, 0.0);
    for (int j = 0; j < m; ++j) beam += a[j] * w.w[j];
    const double power = w.power();
    if (!(power > 0.0)) return 0.0;
    return std::norm(beam) / (m * power);
}

} // namespace ncrsense
