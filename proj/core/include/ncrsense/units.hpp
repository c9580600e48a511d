#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncrsense {

/// Decibel power ratio to linear power ratio, 10^(x/10).
/// dB and dBm values share one linear scale; every model expression is a
/// ratio of such quantities, so no absolute reference is needed.
inline double db_to_linear(double db) {
    if (!std::isfinite(db)) {
        throw std::invalid_argument("db_to_linear: non-finite input");
    }
    return std::pow(10.0, db / 10.0);
}

/// Linear power ratio to decibels, 10*log10(x). Requires x > 0.
inline double linear_to_db(double linear) {
    if (!(linear > 0.0) || !std::isfinite(linear)) {
        throw std::invalid_argument("linear_to_db: input must be positive and finite");
    }
    return 10.0 * std::log10(linear);
}

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

} // namespace ncrsense
