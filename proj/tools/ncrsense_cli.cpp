// Command line front end: single-point bound evaluation, one-shot
// optimization, Monte Carlo sweeps and the randomized self-check suite.
//
// Exit codes: 0 success, 1 usage/config error, 2 infeasible instance,
// 3 non-convergence, 4 validation failure, 5 degenerate identifiability.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncrsense/config.hpp"
#include "ncrsense/crb.hpp"
#include "ncrsense/errors.hpp"
#include "ncrsense/experiments.hpp"
#include "ncrsense/model.hpp"
#include "ncrsense/optimizer.hpp"
#include "ncrsense/rng.hpp"
#include "ncrsense/sinr.hpp"
#include "ncrsense/units.hpp"
#include "ncrsense/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitValidationFailure = 4;
constexpr int kExitIdentifiability = 5;

using ncrsense::format_double;

ncrsense::Precoder make_precoder(const ncrsense::SystemConfig &cfg, const std::string &kind) {
    if (kind == "matched") return ncrsense::matched_precoder(cfg);
    return ncrsense::uniform_precoder(cfg);
}

int cmd_crb(const std::string &config_path, double alpha, const std::string &precoder_kind,
            std::optional<double> distance) {
    ncrsense::SystemConfig cfg = ncrsense::load_config_file(config_path);
    if (distance) cfg = cfg.with_target_distance_m(*distance);
    const double d = cfg.target_distance_m();
    const double phi = cfg.target_angle_rad();
    const double rcs_power = cfg.rcs_var();
    const auto w = make_precoder(cfg, precoder_kind);

    const auto breakdown = ncrsense::crb_range(w, alpha, rcs_power, phi, d, cfg);
    const double direct = ncrsense::crb_range_direct(w, alpha, rcs_power, phi, d, cfg);
    const double published = ncrsense::crb_range_published(w, alpha, rcs_power, phi, d, cfg);
    const double snr_scale_published =
        ncrsense::echo_snr_scale(w, alpha, phi, cfg, ncrsense::BeamPairing::kConjugate);
    const double discrepancy =
        std::abs(breakdown.crb_d - direct) / std::max(std::abs(direct), 1e-300);

    std::cout << "config:                     " << config_path << "\n"
              << "precoder:                   " << precoder_kind << "\n"
              << "alpha (linear):             " << format_double(alpha) << "\n"
              << "distance (m):               " << format_double(d) << "\n"
              << "rcs power (linear):         " << format_double(rcs_power) << "\n"
              << "snr scale (model):          " << format_double(breakdown.snr_scale) << "\n"
              << "snr scale (published):      " << format_double(snr_scale_published) << "\n"
              << "range sensitivity C:        " << format_double(breakdown.sensitivity) << "\n"
              << "coupling S_re:              " << format_double(breakdown.coupling_re) << "\n"
              << "coupling S_im:              " << format_double(breakdown.coupling_im) << "\n"
              << "crb_d closed form (m^2):    " << format_double(breakdown.crb_d) << "\n"
              << "crb_d direct sum (m^2):     " << format_double(direct) << "\n"
              << "relative discrepancy:       " << format_double(discrepancy) << "\n"
              << "sqrt crb_d (m):             " << format_double(std::sqrt(breakdown.crb_d))
              << "\n"
              << "crb_d published form (m^2): " << format_double(published)
              << "  (unit trailing diagonal; not a valid information matrix for N_s >= 2)\n";
    return kExitOk;
}

int cmd_optimize(const std::string &config_path, std::uint64_t seed, const std::string &arm,
                 double fixed_alpha_db, const std::string &out_path) {
    const ncrsense::SystemConfig cfg = ncrsense::load_config_file(config_path);
    const auto chan = ncrsense::draw_channels(cfg, seed);
    const auto feasibility = ncrsense::feasibility_check(chan.g, cfg);
    std::cout << "feasibility certificate:  " << format_double(feasibility.certificate) << "\n";

    const auto w0 = ncrsense::uniform_precoder(cfg);
    const bool joint = arm == "joint";
    const double alpha_fixed = ncrsense::db_to_linear(fixed_alpha_db);
    const ncrsense::OptimizationResult result =
        joint ? ncrsense::optimize_joint(cfg, chan.g, w0, 1.0)
              : ncrsense::optimize_fixed_gain(cfg, chan.g, alpha_fixed, w0);

    std::cout << "arm:                      " << arm << "\n"
              << "infeasible:               " << (result.infeasible ? 1 : 0) << "\n"
              << "converged:                " << (result.converged ? 1 : 0) << "\n"
              << "iterations:               " << result.iterations << "\n"
              << "alpha (linear):           " << format_double(result.alpha) << "\n"
              << "crb_d (m^2):              " << format_double(result.crb_d) << "\n"
              << "sqrt crb_d (m):           " << format_double(std::sqrt(result.crb_d)) << "\n"
              << "sinr (dB):                " << format_double(result.sinr_db) << "\n"
              << "power used:               " << format_double(result.power_used) << "\n"
              << "beam alignment:           "
              << format_double(ncrsense::beam_alignment(result.w, cfg.target_angle_rad()))
              << "\n";

    if (!out_path.empty()) {
        ncrsense::TrialRecord rec;
        rec.sweep_value = cfg.max_power();
        rec.trial_index = 0;
        rec.arm = joint ? ncrsense::Arm::kJoint : ncrsense::Arm::kFixedGain;
        rec.alpha = result.alpha;
        rec.crb_d = result.crb_d;
        rec.sqrt_crb_d = std::sqrt(result.crb_d);
        rec.sinr_db = result.sinr_db;
        rec.power_used = result.power_used;
        rec.converged = result.converged;
        rec.infeasible = result.infeasible;
        rec.iterations = result.iterations;
        rec.channel_digest = ncrsense::channel_digest(chan.g);
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return kExitUsage;
        }
        ncrsense::write_trial_csv(out, ncrsense::SweepVariable::kMaxPower, {rec});
    }

    if (result.infeasible) return kExitInfeasible;
    return result.converged ? kExitOk : kExitNotConverged;
}

std::string derived_aggregate_path(const std::string &out_path) {
    const std::string suffix = ".csv";
    if (out_path.size() > suffix.size() &&
        out_path.compare(out_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return out_path.substr(0, out_path.size() - suffix.size()) + "_agg.csv";
    }
    return out_path + "_agg.csv";
}

int cmd_sweep(const std::string &config_path, const std::string &variable,
              std::vector<double> grid, int trials, std::uint64_t seed, const std::string &arms,
              double fixed_alpha_db, const std::string &out_path, std::string agg_path,
              int workers) {
    const ncrsense::SystemConfig cfg = ncrsense::load_config_file(config_path);
    const auto var = ncrsense::sweep_variable_from_string(variable);
    if (!var) {
        std::cerr << "error: unknown sweep variable '" << variable
                  << "' (expected max_power, min_user_sinr_db or rcs_var_db)\n";
        return kExitUsage;
    }

    ncrsense::SweepSpec spec;
    spec.variable = *var;
    spec.grid = std::move(grid);
    spec.trials = trials;
    spec.base_seed = seed;
    spec.run_joint = arms.find("joint") != std::string::npos;
    spec.run_fixed = arms.find("fixed") != std::string::npos;
    spec.fixed_alpha_db = fixed_alpha_db;
    spec.workers = workers;
    if (!spec.run_joint && !spec.run_fixed) {
        std::cerr << "error: --arms must name joint, fixed or both\n";
        return kExitUsage;
    }

    const auto records = ncrsense::run_sweep(cfg, spec);
    const auto aggregated = ncrsense::aggregate(records);

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kExitUsage;
    }
    ncrsense::write_trial_csv(out, spec.variable, records);

    if (agg_path.empty()) agg_path = derived_aggregate_path(out_path);
    std::ofstream agg(agg_path);
    if (!agg) {
        std::cerr << "error: cannot write '" << agg_path << "'\n";
        return kExitUsage;
    }
    ncrsense::write_aggregate_csv(agg, spec.variable, aggregated);

    std::cout << "wrote " << records.size() << " records to " << out_path << "\n"
              << "wrote " << aggregated.size() << " aggregate rows to " << agg_path << "\n";
    return kExitOk;
}

int cmd_validate(int trials, std::uint64_t seed, bool published_diagonal) {
    ncrsense::ValidationOptions options;
    options.trials = trials;
    options.seed = seed;
    options.published_diagonal = published_diagonal;
    const auto checks = ncrsense::run_validation(options);
    for (const auto &check : checks) {
        std::cout << (check.passed ? "PASS" : "FAIL") << "  " << check.name
                  << "  (worst " << format_double(check.worst) << ", tolerance "
                  << format_double(check.tolerance) << ")\n";
    }
    return ncrsense::all_passed(checks) ? kExitOk : kExitValidationFailure;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Monostatic range sensing under an amplify-and-forward repeater: "
                 "estimation bounds and joint precoder/gain optimization"};
    app.require_subcommand(1);

    // crb
    auto *crb = app.add_subcommand("crb", "Evaluate the range estimation bound at one point");
    std::string crb_config;
    double crb_alpha = 1.0;
    std::string crb_precoder = "uniform";
    std::optional<double> crb_distance;
    crb->add_option("--config", crb_config, "Configuration file")->required();
    crb->add_option("--alpha", crb_alpha, "Repeater gain, linear (default 1)");
    crb->add_option("--precoder", crb_precoder, "Precoder: uniform or matched")
        ->check(CLI::IsMember({"uniform", "matched"}));
    crb->add_option("--distance", crb_distance, "Override the target distance in meters");

    // optimize
    auto *opt = app.add_subcommand("optimize", "Optimize the precoder (and gain) for one draw");
    std::string opt_config, opt_arm = "joint", opt_out;
    std::uint64_t opt_seed = 1;
    double opt_fixed_alpha_db = 18.5;
    opt->add_option("--config", opt_config, "Configuration file")->required();
    opt->add_option("--seed", opt_seed, "Channel draw seed (default 1)");
    opt->add_option("--arm", opt_arm, "joint or fixed")->check(CLI::IsMember({"joint", "fixed"}));
    opt->add_option("--fixed-alpha-db", opt_fixed_alpha_db,
                    "Repeater gain for the fixed arm, dB (default 18.5)");
    opt->add_option("--out", opt_out, "Optional CSV file for the result row");

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Monte Carlo parameter sweep over both arms");
    std::string sweep_config, sweep_variable, sweep_arms = "joint,fixed", sweep_out, sweep_agg;
    std::vector<double> sweep_grid;
    int sweep_trials = 100;
    std::uint64_t sweep_seed = 1;
    double sweep_fixed_alpha_db = 18.5;
    int sweep_workers = 0;
    sweep->add_option("--config", sweep_config, "Configuration file")->required();
    sweep->add_option("--variable", sweep_variable,
                      "Swept field: max_power, min_user_sinr_db or rcs_var_db")
        ->required();
    sweep->add_option("--grid", sweep_grid, "Comma-separated grid values, strictly increasing")
        ->required()
        ->delimiter(',');
    sweep->add_option("--trials", sweep_trials, "Monte Carlo trials per grid value (default 100)");
    sweep->add_option("--seed", sweep_seed, "Base seed (default 1)");
    sweep->add_option("--arms", sweep_arms, "Arms to run: joint, fixed or joint,fixed");
    sweep->add_option("--fixed-alpha-db", sweep_fixed_alpha_db,
                      "Repeater gain for the fixed arm, dB (default 18.5)");
    sweep->add_option("--out", sweep_out, "Trial CSV path")->required();
    sweep->add_option("--agg-out", sweep_agg,
                      "Aggregate CSV path (default: trial path with _agg suffix)");
    sweep->add_option("--workers", sweep_workers,
                      "Worker threads (default: NCRSENSE_WORKERS or hardware concurrency)");

    // validate
    auto *validate = app.add_subcommand("validate", "Randomized self-checks across computation routes");
    int val_trials = 100;
    std::uint64_t val_seed = 1;
    bool val_published = false;
    validate->add_option("--trials", val_trials, "Instances per check (default 100)");
    validate->add_option("--seed", val_seed, "Random seed (default 1)");
    validate->add_flag("--published-diagonal", val_published,
                       "Check positive semidefiniteness of the published closed-form variant "
                       "instead (expected to fail for N_s >= 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(crb)) {
            return cmd_crb(crb_config, crb_alpha, crb_precoder, crb_distance);
        }
        if (app.got_subcommand(opt)) {
            return cmd_optimize(opt_config, opt_seed, opt_arm, opt_fixed_alpha_db, opt_out);
        }
        if (app.got_subcommand(sweep)) {
            return cmd_sweep(sweep_config, sweep_variable, sweep_grid, sweep_trials, sweep_seed,
                             sweep_arms, sweep_fixed_alpha_db, sweep_out, sweep_agg,
                             sweep_workers);
        }
        if (app.got_subcommand(validate)) {
            return cmd_validate(val_trials, val_seed, val_published);
        }
    } catch (const ncrsense::IdentifiabilityError &e) {
        std::cerr << "identifiability error: " << e.what() << "\n";
        return kExitIdentifiability;
    } catch (const ncrsense::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
