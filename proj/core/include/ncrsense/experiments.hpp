#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>
#include <Eigen/Dense>

#include "ncrsense/config.hpp"
#include "ncrsense/optimizer.hpp"

namespace ncrsense {

enum class SweepVariable { kMaxPower, kMinUserSinrDb, kRcsVarDb };
enum class Arm { kJoint, kFixedGain };

std::string to_string(SweepVariable variable);
std::string to_string(Arm arm);
std::optional<SweepVariable> sweep_variable_from_string(const std::string &name);

struct SweepSpec {
    SweepVariable variable = SweepVariable::kMaxPower;
    std::vector<double> grid; // non-empty, strictly increasing
    int trials = 1;
    std::uint64_t base_seed = 0;
    bool run_joint = true;
    bool run_fixed = true;
    double fixed_alpha_db = 18.5;
    OptimizeOptions optimizer;
    int workers = 0; // 0 = environment override or hardware concurrency
};

struct TrialRecord {
    double sweep_value = 0.0;
    int trial_index = 0;
    Arm arm = Arm::kJoint;
    double alpha = 0.0;
    double crb_d = 0.0;
    double sqrt_crb_d = 0.0;
    double sinr_db = 0.0;
    double power_used = 0.0;
    bool converged = false;
    bool infeasible = false;
    int iterations = 0;
    double wall_time_s = 0.0; // informational only, never serialized
    std::uint64_t channel_digest = 0;
};

/// Runs the full sweep. Per-trial channels are drawn with
/// seed = mix(base_seed, trial_index), so every grid value and both arms of
/// one trial share the same realization (common random numbers). Per-trial
/// failures are recorded, never aborting the sweep. Output ordering is
/// canonical in (grid index, trial, arm) and independent of the worker count.
std::vector<TrialRecord> run_sweep(const SystemConfig &cfg, const SweepSpec &spec);

struct AggregateRow {
    double sweep_value = 0.0;
    Arm arm = Arm::kJoint;
    int n_ok = 0;    // converged, feasible records with a finite bound
    int n_total = 0;
    double mean_sqrt_crb = 0.0;
    double median_sqrt_crb = 0.0;
    double p10_sqrt_crb = 0.0;
    double p90_sqrt_crb = 0.0;
    double feasible_rate = 0.0;
    double converged_rate = 0.0;
};

/// Per-(sweep value, arm) statistics of sqrt(crb_d) over the converged,
/// feasible records. Rows with n_ok == 0 carry NaN statistics and act as the
/// empty-summary marker. Throws on an empty record set.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord> &records);

/// FNV-1a over the raw bytes of the composite channel matrix, row-major.
/// Used to verify that paired arms consumed identical realizations.
std::uint64_t channel_digest(const Eigen::MatrixXcd &g);

/// Shortest round-trippable representation: 17 significant digits, '.'
/// decimal separator regardless of locale.
std::string format_double(double value);

void write_trial_csv(std::ostream &out, SweepVariable variable,
                     const std::vector<TrialRecord> &records);
void write_aggregate_csv(std::ostream &out, SweepVariable variable,
                         const std::vector<AggregateRow> &rows);

/// Worker count: `requested` when positive, else the NCRSENSE_WORKERS
/// environment variable, else hardware concurrency.
int resolve_worker_count(int requested);

} // namespace ncrsense
