#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace herzlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Integral or sum cannot be finite for the supplied input.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Not enough samples/terms to perform the requested estimate.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double pow2(int t) { return std::ldexp(1.0, t); }

inline int sign(double x) { return (x > 0.0) - (x < 0.0); }

inline bool nearly_equal(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

// \int_a^b x^e dx for 0 <= a <= b (endpoints may be 0 or +inf).
// Returns +inf when the integral diverges.
inline double power_primitive(double e, double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("power_primitive: requires 0 <= a <= b");
    if (a == b) return 0.0;
    if (e == -1.0) {
        if (a == 0.0 || std::isinf(b)) return kInf;
        return std::log(b / a);
    }
    const double k = e + 1.0;
    if (k > 0.0) {
        if (std::isinf(b)) return kInf;
        const double hi = std::pow(b, k);
        const double lo = (a == 0.0) ? 0.0 : std::pow(a, k);
        return (hi - lo) / k;
    }
    // k < 0: integrable at +inf, divergent at 0
    if (a == 0.0) return kInf;
    const double lo = std::pow(a, k);
    const double hi = std::isinf(b) ? 0.0 : std::pow(b, k);
    return (hi - lo) / k;
}

} // namespace herzlab
