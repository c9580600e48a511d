#pragma once

#include <vector>
#include <Eigen/Dense>

#include "ncrsense/config.hpp"
#include "ncrsense/model.hpp"

namespace ncrsense {

struct FeasibilityReport {
    bool feasible = false;
    double certificate = 0.0; // sup SINR over the feasible set / required SINR
};

/// Limit analysis of the SINR constraint: over ||w||^2 = P_max and
/// alpha -> inf the user SINR approaches
/// P_max lambda_max(sum_k conj(g_k) g_k^T) / (N_s sigma_b^2 sigma_e^2).
/// The instance is feasible iff that supremum reaches the SINR floor;
/// certificate is their ratio (1 = boundary).
FeasibilityReport feasibility_check(const Eigen::MatrixXcd &g, const SystemConfig &cfg);

struct OptimizeOptions {
    int max_iterations = 5000;
    double armijo_c = 1e-4;
    double objective_rel_tol = 1e-10;
    int stall_steps = 5;        // consecutive small relative changes = stationary
    double sinr_rel_tol = 1e-6; // relative SINR shortfall accepted as feasible
    double penalty_rho0 = 1.0;
    double penalty_growth = 10.0;
    int max_penalty_rounds = 16;
    bool use_fd_gradient = false; // cross-check fallback, much slower
};

struct OptimizationResult {
    Precoder w;
    double alpha = 1.0;
    double crb_d = 0.0; // m^2
    double sinr_db = 0.0;
    double power_used = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> objective_trace; // merit at accepted iterates
    bool infeasible = false;
    int last_penalty_change = 0; // trace index of the last penalty escalation
};

/// Joint minimization of the range CRB over (w, alpha) subject to
/// user SINR >= gamma_u and ||w||^2 <= P_max. Projected gradient descent on
/// (w, t) with alpha = exp(t), minimizing
///
///   log crb_d + rho * max(0, log gamma_u - log sinr)^2
///
/// with w projected onto the power ball after each step, backtracking Armijo
/// line search, and geometric growth of rho whenever a stationary iterate
/// still violates the SINR floor. The violation is penalized in the log
/// domain to match the objective: the constraint quantities span many orders
/// of magnitude and a linear-domain quadratic penalty would need rho beyond
/// 1e15 before its gradient is visible against the objective.
/// A final polish raises alpha by the smallest factor restoring the SINR
/// floor exactly. Deterministic given (cfg, g, init).
OptimizationResult optimize_joint(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                                  const Precoder &w0, double alpha0,
                                  const OptimizeOptions &opts = {});

/// Same problem with the repeater gain frozen at alpha_fixed; only the
/// precoder is optimized. The polish step scales the precoder up to the
/// power cap when the SINR floor is narrowly missed.
OptimizationResult optimize_fixed_gain(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                                       double alpha_fixed, const Precoder &w0,
                                       const OptimizeOptions &opts = {});

/// Merit function the optimizer descends, exposed for gradient checks.
/// Parameters are the unscaled precoder and t = log(alpha).
double merit_value(const SystemConfig &cfg, const Eigen::MatrixXcd &g, const Eigen::VectorXcd &w,
                   double t, double rho);

/// Analytic gradient of merit_value over the stacked real parameters
/// [Re w; Im w; t] (2M+1 entries; the t entry is last).
Eigen::VectorXd merit_gradient(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                               const Eigen::VectorXcd &w, double t, double rho);

/// Central-difference gradient of merit_value, same layout.
Eigen::VectorXd merit_gradient_fd(const SystemConfig &cfg, const Eigen::MatrixXcd &g,
                                  const Eigen::VectorXcd &w, double t, double rho);

/// Fraction of the precoder power radiated toward angle phi:
/// |a(phi)^T w|^2 / (M ||w||^2), in [0, 1]; 1 means conjugate-matched.
double beam_alignment(const Precoder &w, double phi_rad);

} // namespace ncrsense
