#include "ncrsense/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace ncrsense {

namespace {

std::string trim(std::string_view s) {
    const auto *begin = s.data();
    const auto *end = s.data() + s.size();
    while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end != begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
    return std::string(begin, end);
}

struct ParsedValue {
    double value = 0.0;
    int line = 0;
};

const std::vector<std::string> &known_keys() {
    static const std::vector<std::string> keys = {
        "noise_power_dbm",
        "chan_est_err_var_db",
        "propagated_noise_var_dbm",
        "repeater_user_chan_var_db",
        "composite_chan_var_db",
        "rcs_var_db",
        "target_angle_deg",
        "target_distance_m",
        "num_antennas",
        "num_time_samples",
        "num_subcarriers",
        "subcarrier_spacing_hz",
        "max_power",
        "min_user_sinr_db",
    };
    return keys;
}

double parse_number(const std::string &key, const std::string &text, int line) {
    const std::string t = trim(text);
    if (t.empty()) {
        throw ConfigError("config: empty value for key '" + key + "' at line " + std::to_string(line));
    }
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError("config: non-numeric value '" + t + "' for key '" + key + "' at line " +
                          std::to_string(line));
    }
    return v;
}

int parse_positive_int(const std::string &key, double v, int line) {
    if (v < 1.0 || v != std::floor(v) || v > 1e9) {
        throw ConfigError("config: key '" + key + "' at line " + std::to_string(line) +
                          " must be a positive integer, got " + std::to_string(v));
    }
    return static_cast<int>(v);
}

} // namespace

SystemConfig SystemConfig::from_params(const SystemConfigParams &params) {
    auto require = [](bool cond, const char *msg) {
        if (!cond) throw ConfigError(std::string("config: invariant violation: ") + msg);
    };
    require(params.num_antennas >= 1, "num_antennas must be >= 1");
    require(params.num_time_samples >= 1, "num_time_samples must be >= 1");
    require(params.num_subcarriers >= 1, "num_subcarriers must be >= 1");
    require(params.subcarrier_spacing_hz > 0.0 && std::isfinite(params.subcarrier_spacing_hz),
            "subcarrier_spacing_hz must be > 0");
    require(params.target_distance_m > 0.0 && std::isfinite(params.target_distance_m),
            "target_distance_m must be > 0");
    require(params.max_power > 0.0 && std::isfinite(params.max_power), "max_power must be > 0");
    for (double db : {params.noise_power_dbm, params.chan_est_err_var_db,
                      params.propagated_noise_var_dbm, params.repeater_user_chan_var_db,
                      params.composite_chan_var_db, params.rcs_var_db, params.target_angle_deg,
                      params.min_user_sinr_db}) {
        require(std::isfinite(db), "all dB/degree fields must be finite");
    }
    return SystemConfig(params);
}

SystemConfig SystemConfig::with_max_power(double value) const {
    SystemConfigParams p = p_;
    p.max_power = value;
    return from_params(p);
}

SystemConfig SystemConfig::with_min_user_sinr_db(double value) const {
    SystemConfigParams p = p_;
    p.min_user_sinr_db = value;
    return from_params(p);
}

SystemConfig SystemConfig::with_rcs_var_db(double value) const {
    SystemConfigParams p = p_;
    p.rcs_var_db = value;
    return from_params(p);
}

SystemConfig SystemConfig::with_target_distance_m(double value) const {
    SystemConfigParams p = p_;
    p.target_distance_m = value;
    return from_params(p);
}

SystemConfig load_config(std::string_view document) {
    std::map<std::string, ParsedValue> seen;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= document.size()) {
        const std::size_t nl = document.find('\n', pos);
        std::string_view raw = document.substr(pos, nl == std::string_view::npos ? document.size() - pos
                                                                                 : nl - pos);
        pos = (nl == std::string_view::npos) ? document.size() + 1 : nl + 1;
        ++line_no;

        std::string line(raw);
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        const auto &keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError("config: unknown key '" + key + "' at line " + std::to_string(line_no));
        }
        if (seen.count(key)) {
            throw ConfigError("config: duplicate key '" + key + "' at line " + std::to_string(line_no) +
                              " (first seen at line " + std::to_string(seen[key].line) + ")");
        }
        seen[key] = ParsedValue{parse_number(key, value, line_no), line_no};
    }

    for (const auto &key : known_keys()) {
        if (!seen.count(key)) {
            throw ConfigError("config: missing required key '" + key + "'");
        }
    }

    auto get = [&](const char *key) { return seen.at(key); };

    SystemConfigParams p;
    p.noise_power_dbm = get("noise_power_dbm").value;
    p.chan_est_err_var_db = get("chan_est_err_var_db").value;
    p.propagated_noise_var_dbm = get("propagated_noise_var_dbm").value;
    p.repeater_user_chan_var_db = get("repeater_user_chan_var_db").value;
    p.composite_chan_var_db = get("composite_chan_var_db").value;
    p.rcs_var_db = get("rcs_var_db").value;
    p.target_angle_deg = get("target_angle_deg").value;
    p.target_distance_m = get("target_distance_m").value;
    p.num_antennas = parse_positive_int("num_antennas", get("num_antennas").value,
                                        get("num_antennas").line);
    p.num_time_samples = parse_positive_int("num_time_samples", get("num_time_samples").value,
                                            get("num_time_samples").line);
    p.num_subcarriers = parse_positive_int("num_subcarriers", get("num_subcarriers").value,
                                           get("num_subcarriers").line);
    p.subcarrier_spacing_hz = get("subcarrier_spacing_hz").value;
    p.max_power = get("max_power").value;
    p.min_user_sinr_db = get("min_user_sinr_db").value;

    return SystemConfig::from_params(p);
}

SystemConfig load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config(buf.str());
}

} // namespace ncrsense
