#pragma once

#include <fstream>
#include <iomanip>
#include <span>
#include <vector>

#include "herzlab/common.hpp"
#include "herzlab/measure.hpp"
#include "herzlab/piecewise.hpp"

namespace herzlab {

/// nu({x : |f(x)| > s}), exact by solving c|x|^a > s piecewise.
/// Infinite mass is reported as +inf, not as an error.
inline double distribution_function(const PiecewisePowerFunction& f, const Measure& nu, double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("distribution_function: level s must be >= 0");
    return f.superlevel_mass(nu, s);
}

/// f*(t) = inf{s >= 0 : nu(|f| > s) <= t}. Inverts the closed-form
/// distribution function by bisection; plateau levels (indicators) are
/// snapped to the exact endpoint value, so f* takes the lower level on the
/// closure boundary of a plateau.
inline double decreasing_rearrangement(const PiecewisePowerFunction& f, const Measure& nu,
                                       double t) {
    if (!(t > 0.0)) throw std::invalid_argument("decreasing_rearrangement: t must be > 0");
    if (f.empty()) return 0.0;
    const auto dist = [&](double s) { return f.superlevel_mass(nu, s); };
    if (dist(0.0) <= t) return 0.0;

    double hi = f.sup_abs();
    if (!std::isfinite(hi)) {
        hi = 1.0;
        while (dist(hi) > t) {
            hi *= 2.0;
            if (hi > 1e300) return kInf; // distribution never drops below t
        }
    }
    double lo = 0.0;
    for (int i = 0; i < 200 && lo < hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (dist(mid) <= t) hi = mid;
        else lo = mid;
    }
    // snap to an exact breakpoint level when the bisection landed on a plateau edge
    for (double v : f.level_candidates()) {
        if (std::abs(v - hi) <= 1e-9 * (1.0 + std::abs(v)) && dist(v) <= t &&
            (v == 0.0 || dist(v * (1.0 - 1e-12)) > t))
            return v;
    }
    return hi;
}

/// f**(t) = (1/t) int_0^t f*(u) du, via the layer-cake identity
/// int_0^t f* = t f*(t) + int (|f| - f*(t))_+ dnu (both sides exact).
inline double maximal_average(const PiecewisePowerFunction& f, const Measure& nu, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("maximal_average: t must be > 0");
    if (f.empty()) return 0.0;
    const double star = decreasing_rearrangement(f, nu, t);
    if (!std::isfinite(star)) throw DivergenceError("maximal_average: f* is infinite at t");
    double excess = f.excess_integral(nu, star);
    if (!std::isfinite(excess))
        throw DivergenceError("maximal_average: integral of f* diverges near 0");
    // 0 <= excess <= t (sup|f| - f*(t)); the closed form cancels catastrophically
    // when the superlevel set is a sliver, so clamp to the exact bounds
    excess = std::max(excess, 0.0);
    const double sup = f.sup_abs();
    if (std::isfinite(sup)) excess = std::min(excess, t * std::max(sup - star, 0.0));
    return star + excess / t;
}

struct RearrangementProfile {
    std::vector<double> breakpoints;
    std::vector<double> values;
    bool exact_flag = false;
};

/// Sample f* on the given increasing t-grid. exact_flag is set when every
/// value snapped to a closed-form plateau level (piecewise-constant f).
inline RearrangementProfile rearrangement_profile(const PiecewisePowerFunction& f,
                                                  const Measure& nu,
                                                  std::span<const double> t_grid) {
    RearrangementProfile profile;
    profile.breakpoints.assign(t_grid.begin(), t_grid.end());
    const auto levels = f.level_candidates();
    bool all_exact = true;
    for (double t : t_grid) {
        const double v = decreasing_rearrangement(f, nu, t);
        bool snapped = false;
        for (double cand : levels)
            if (v == cand) snapped = true;
        all_exact = all_exact && snapped;
        profile.values.push_back(v);
    }
    profile.exact_flag = all_exact;
    return profile;
}

inline void write_profile_csv(const RearrangementProfile& profile, std::ostream& os) {
    os << "t,f_star\n" << std::setprecision(17);
    for (std::size_t i = 0; i < profile.breakpoints.size(); ++i)
        os << profile.breakpoints[i] << "," << profile.values[i] << "\n";
}

} // namespace herzlab
