#include "ncrsense/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ncrsense/model.hpp"
#include "ncrsense/rng.hpp"
#include "ncrsense/units.hpp"

namespace ncrsense {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SystemConfig apply_override(const SystemConfig &cfg, SweepVariable variable, double value) {
    switch (variable) {
    case SweepVariable::kMaxPower:
        return cfg.with_max_power(value);
    case SweepVariable::kMinUserSinrDb:
        return cfg.with_min_user_sinr_db(value);
    case SweepVariable::kRcsVarDb:
        return cfg.with_rcs_var_db(value);
    }
    throw std::logic_error("apply_override: unreachable");
}

void validate_spec(const SweepSpec &spec) {
    if (spec.grid.empty()) {
        throw std::invalid_argument("run_sweep: grid must be non-empty");
    }
    for (std::size_t i = 1; i < spec.grid.size(); ++i) {
        if (!(spec.grid[i] > spec.grid[i - 1])) {
            throw std::invalid_argument("run_sweep: grid must be strictly increasing");
        }
    }
    if (spec.trials < 1) {
        throw std::invalid_argument("run_sweep: trials must be >= 1");
    }
    if (!spec.run_joint && !spec.run_fixed) {
        throw std::invalid_argument("run_sweep: at least one arm must be requested");
    }
}

double percentile(const std::vector<double> &sorted, double q) {
    if (sorted.empty()) return kNaN;
    if (sorted.size() == 1) return sorted.front();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

std::string to_string(SweepVariable variable) {
    switch (variable) {
    case SweepVariable::kMaxPower:
        return "max_power";
    case SweepVariable::kMinUserSinrDb:
        return "min_user_sinr_db";
    case SweepVariable::kRcsVarDb:
        return "rcs_var_db";
    }
    return "?";
}

std::string to_string(Arm arm) { return arm == Arm::kJoint ? "joint" : "fixed"; }

std::optional<SweepVariable> sweep_variable_from_string(const std::string &name) {
    if (name == "max_power") return SweepVariable::kMaxPower;
    if (name == "min_user_sinr_db") return SweepVariable::kMinUserSinrDb;
    if (name == "rcs_var_db") return SweepVariable::kRcsVarDb;
    return std::nullopt;
}

std::uint64_t channel_digest(const Eigen::MatrixXcd &g) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto feed = [&hash](double v) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int byte = 0; byte < 8; ++byte) {
            hash ^= (bits >> (8 * byte)) & 0xffULL;
            hash *= 0x100000001b3ULL;
        }
    };
    for (Eigen::Index k = 0; k < g.rows(); ++k) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            feed(g(k, j).real());
            feed(g(k, j).imag());
        }
    }
    return hash;
}

int resolve_worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char *env = std::getenv("NCRSENSE_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<TrialRecord> run_sweep(const SystemConfig &cfg, const SweepSpec &spec) {
    validate_spec(spec);

    std::vector<Arm> arms;
    if (spec.run_joint) arms.push_back(Arm::kJoint);
    if (spec.run_fixed) arms.push_back(Arm::kFixedGain);

    // Overridden configs are validated up front so a bad grid value fails
    // fast instead of inside a worker.
    std::vector<SystemConfig> grid_cfgs;
    grid_cfgs.reserve(spec.grid.size());
    for (double value : spec.grid) {
        grid_cfgs.push_back(apply_override(cfg, spec.variable, value));
    }

    const double alpha_fixed = db_to_linear(spec.fixed_alpha_db);
    const std::size_t per_trial = spec.grid.size() * arms.size();
    std::vector<TrialRecord> records(per_trial * static_cast<std::size_t>(spec.trials));

    auto run_trial = [&](int trial) {
        const std::uint64_t seed = mix_seed(spec.base_seed, static_cast<std::uint64_t>(trial));
        const ChannelRealization chan = draw_channels(cfg, seed);
        const std::uint64_t digest = channel_digest(chan.g);

        std::size_t slot = static_cast<std::size_t>(trial) * per_trial;
        for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
            const SystemConfig &trial_cfg = grid_cfgs[gi];
            const Precoder w0 = uniform_precoder(trial_cfg);
            for (Arm arm : arms) {
                TrialRecord &rec = records[slot++];
                rec.sweep_value = spec.grid[gi];
                rec.trial_index = trial;
                rec.arm = arm;
                rec.channel_digest = digest;
                const auto start = std::chrono::steady_clock::now();
                try {
                    OptimizationResult res =
                        arm == Arm::kJoint
                            ? optimize_joint(trial_cfg, chan.g, w0, 1.0, spec.optimizer)
                            : optimize_fixed_gain(trial_cfg, chan.g, alpha_fixed, w0,
                                                  spec.optimizer);
                    rec.alpha = res.alpha;
                    rec.crb_d = res.crb_d;
                    rec.sqrt_crb_d = std::sqrt(res.crb_d);
                    rec.sinr_db = res.sinr_db;
                    rec.power_used = res.power_used;
                    rec.converged = res.converged;
                    rec.infeasible = res.infeasible;
                    rec.iterations = res.iterations;
                } catch (const std::exception &) {
                    // Per-trial failures are recorded, never abort the sweep.
                    rec.alpha = kNaN;
                    rec.crb_d = kNaN;
                    rec.sqrt_crb_d = kNaN;
                    rec.sinr_db = kNaN;
                    rec.power_used = kNaN;
                    rec.converged = false;
                    rec.infeasible = false;
                    rec.iterations = 0;
                }
                const auto stop = std::chrono::steady_clock::now();
                rec.wall_time_s = std::chrono::duration<double>(stop - start).count();
            }
        }
    };

    const int workers = std::min(resolve_worker_count(spec.workers), spec.trials);
    if (workers <= 1) {
        for (int trial = 0; trial < spec.trials; ++trial) run_trial(trial);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back([&] {
                for (int trial = next.fetch_add(1); trial < spec.trials;
                     trial = next.fetch_add(1)) {
                    run_trial(trial);
                }
            });
        }
        for (auto &t : pool) t.join();
    }

    // Canonical order: (grid index, trial, arm).
    std::vector<TrialRecord> ordered;
    ordered.reserve(records.size());
    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
        for (int trial = 0; trial < spec.trials; ++trial) {
            for (std::size_t ai = 0; ai < arms.size(); ++ai) {
                ordered.push_back(
                    records[static_cast<std::size_t>(trial) * per_trial + gi * arms.size() + ai]);
            }
        }
    }
    return ordered;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord> &records) {
    if (records.empty()) {
        throw std::invalid_argument("aggregate: record set is empty");
    }

    std::map<std::pair<double, int>, std::vector<const TrialRecord *>> groups;
    for (const auto &rec : records) {
        groups[{rec.sweep_value, static_cast<int>(rec.arm)}].push_back(&rec);
    }

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto &[key, group] : groups) {
        AggregateRow row;
        row.sweep_value = key.first;
        row.arm = static_cast<Arm>(key.second);
        row.n_total = static_cast<int>(group.size());

        std::vector<double> ok_values;
        int n_feasible = 0;
        int n_converged = 0;
        for (const TrialRecord *rec : group) {
            if (!rec->infeasible) ++n_feasible;
            if (rec->converged) ++n_converged;
            if (rec->converged && !rec->infeasible && std::isfinite(rec->sqrt_crb_d)) {
                ok_values.push_back(rec->sqrt_crb_d);
            }
        }
        row.n_ok = static_cast<int>(ok_values.size());
        row.feasible_rate = static_cast<double>(n_feasible) / row.n_total;
        row.converged_rate = static_cast<double>(n_converged) / row.n_total;

        if (ok_values.empty()) {
            row.mean_sqrt_crb = kNaN;
            row.median_sqrt_crb = kNaN;
            row.p10_sqrt_crb = kNaN;
            row.p90_sqrt_crb = kNaN;
        } else {
            std::sort(ok_values.begin(), ok_values.end());
            double sum = 0.0;
            for (double v : ok_values) sum += v;
            row.mean_sqrt_crb = sum / static_cast<double>(ok_values.size());
            row.median_sqrt_crb = percentile(ok_values, 0.5);
            row.p10_sqrt_crb = percentile(ok_values, 0.1);
            row.p90_sqrt_crb = percentile(ok_values, 0.9);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_trial_csv(std::ostream &out, SweepVariable variable,
                     const std::vector<TrialRecord> &records) {
    out << "variable,sweep_value,trial,arm,alpha_linear,crb_d_m2,sqrt_crb_d_m,sinr_db,"
           "power_used,converged,infeasible,iterations,channel_digest\n";
    const std::string var = to_string(variable);
    char digest[32];
    for (const auto &rec : records) {
        std::snprintf(digest, sizeof(digest), "%016llx",
                      static_cast<unsigned long long>(rec.channel_digest));
        out << var << ',' << format_double(rec.sweep_value) << ',' << rec.trial_index << ','
            << to_string(rec.arm) << ',' << format_double(rec.alpha) << ','
            << format_double(rec.crb_d) << ',' << format_double(rec.sqrt_crb_d) << ','
            << format_double(rec.sinr_db) << ',' << format_double(rec.power_used) << ','
            << (rec.converged ? 1 : 0) << ',' << (rec.infeasible ? 1 : 0) << ',' << rec.iterations
            << ',' << digest << '\n';
    }
}

void write_aggregate_csv(std::ostream &out, SweepVariable variable,
                         const std::vector<AggregateRow> &rows) {
    out << "variable,sweep_value,arm,n_ok,mean_sqrt_crb,median_sqrt_crb,p10,p90,feasible_rate,"
           "converged_rate\n";
    const std::string var = to_string(variable);
    for (const auto &row : rows) {
        out << var << ',' << format_double(row.sweep_value) << ',' << to_string(row.arm) << ','
            << row.n_ok << ',' << format_double(row.mean_sqrt_crb) << ','
            << format_double(row.median_sqrt_crb) << ',' << format_double(row.p10_sqrt_crb) << ','
            << format_double(row.p90_sqrt_crb) << ',' << format_double(row.feasible_rate) << ','
            << format_double(row.converged_rate) << '\n';
    }
}

} // namespace ncrsense
