#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "herzlab/common.hpp"

namespace herzlab {

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    double window_lo = 0.0; // first index used (after burn-in)
    double window_hi = 0.0;
};

/// Plain least-squares line through (x_i, y_i).
inline ExponentFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    if (x.size() < 2) throw InsufficientDataError("fit_line: need at least 2 points");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw InsufficientDataError("fit_line: degenerate abscissae");
    ExponentFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::abs(y[i] - fit.slope * x[i] - fit.intercept));
    fit.window_lo = x.front();
    fit.window_hi = x.back();
    return fit;
}

/// log(value) against log(index) with the burn-in prefix (index < burn_in)
/// dropped; quantifies growth exponents of norm families.
inline ExponentFit fit_loglog(std::span<const double> index, std::span<const double> values,
                              double burn_in = 4.0) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] < burn_in) continue;
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("fit_loglog: values must be positive and finite");
        lx.push_back(std::log(index[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 2)
        throw InsufficientDataError("fit_loglog: fewer than 2 points after burn-in");
    ExponentFit fit = fit_line(lx, ly);
    fit.window_lo = std::exp(fit.window_lo);
    fit.window_hi = std::exp(fit.window_hi);
    return fit;
}

} // namespace herzlab
