#pragma once

#include <string>
#include <string_view>

#include "ncrsense/errors.hpp"
#include "ncrsense/units.hpp"

namespace ncrsense {

/// Raw parameter set as written in a configuration document. Power-like
/// quantities are kept in dB/dBm and angles in degrees; validation and unit
/// conversion happen when a SystemConfig is built from it.
struct SystemConfigParams {
    double noise_power_dbm = 0.0;           // AWGN variance sigma_e^2
    double chan_est_err_var_db = 0.0;       // channel estimation error sigma_H^2
    double propagated_noise_var_dbm = 0.0;  // repeater propagated noise sigma_z^2
    double repeater_user_chan_var_db = 0.0; // repeater-to-user coefficient sigma_b^2
    double composite_chan_var_db = 0.0;     // composite channel sigma_g^2
    double rcs_var_db = 0.0;                // radar cross-section sigma_RCS^2
    double target_angle_deg = 0.0;
    double target_distance_m = 0.0;
    int num_antennas = 0;
    int num_time_samples = 0;
    int num_subcarriers = 0;
    double subcarrier_spacing_hz = 0.0;
    double max_power = 0.0;     // linear, same scale as the dBm noise entries
    double min_user_sinr_db = 0.0;
};

/// Validated, immutable system parameters. All internal computation uses
/// linear units (power ratios, radians, meters, Hz); dB/dBm/degrees exist
/// only at this boundary. Instances are safe to share across workers.
class SystemConfig {
  public:
    static constexpr double kSpeedOfLight = 299792458.0; // m/s

    /// Validates and builds a config; throws ConfigError on any invariant
    /// violation (non-positive dimensions, distance, spacing or power).
    static SystemConfig from_params(const SystemConfigParams &params);

    // Linear-domain accessors (pure; stored values are never mutated).
    double noise_power() const { return db_to_linear(p_.noise_power_dbm); }
    double chan_est_err_var() const { return db_to_linear(p_.chan_est_err_var_db); }
    double propagated_noise_var() const { return db_to_linear(p_.propagated_noise_var_dbm); }
    double repeater_user_chan_var() const { return db_to_linear(p_.repeater_user_chan_var_db); }
    double composite_chan_var() const { return db_to_linear(p_.composite_chan_var_db); }
    double rcs_var() const { return db_to_linear(p_.rcs_var_db); }
    double min_user_sinr() const { return db_to_linear(p_.min_user_sinr_db); }

    double target_angle_rad() const { return deg_to_rad(p_.target_angle_deg); }
    double target_distance_m() const { return p_.target_distance_m; }
    int num_antennas() const { return p_.num_antennas; }
    int num_time_samples() const { return p_.num_time_samples; }
    int num_subcarriers() const { return p_.num_subcarriers; }
    double subcarrier_spacing_hz() const { return p_.subcarrier_spacing_hz; }
    double max_power() const { return p_.max_power; }
    double speed_of_light() const { return kSpeedOfLight; }

    // Boundary-unit accessors for reports.
    double noise_power_dbm() const { return p_.noise_power_dbm; }
    double chan_est_err_var_db() const { return p_.chan_est_err_var_db; }
    double propagated_noise_var_dbm() const { return p_.propagated_noise_var_dbm; }
    double repeater_user_chan_var_db() const { return p_.repeater_user_chan_var_db; }
    double composite_chan_var_db() const { return p_.composite_chan_var_db; }
    double rcs_var_db() const { return p_.rcs_var_db; }
    double target_angle_deg() const { return p_.target_angle_deg; }
    double min_user_sinr_db() const { return p_.min_user_sinr_db; }

    const SystemConfigParams &params() const { return p_; }

    /// Copy with one field replaced, re-validated. Used by parameter sweeps.
    SystemConfig with_max_power(double value) const;
    SystemConfig with_min_user_sinr_db(double value) const;
    SystemConfig with_rcs_var_db(double value) const;
    SystemConfig with_target_distance_m(double value) const;

  private:
    explicit SystemConfig(const SystemConfigParams &params) : p_(params) {}
    SystemConfigParams p_;
};

/// Parses a `key = value` document (one pair per line, `#` comments).
/// Every required key must appear exactly once; unknown keys are rejected.
/// Errors identify the key and line number.
SystemConfig load_config(std::string_view document);

/// Convenience wrapper reading the document from a file.
SystemConfig load_config_file(const std::string &path);

} // namespace ncrsense
