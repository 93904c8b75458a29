#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "herzlab/common.hpp"

namespace herzlab {
namespace quad {

// Gauss-Kronrod 7/15 abscissae and weights (positive half).
inline constexpr std::array<double, 8> kGK15X = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr std::array<double, 8> kGK15WK = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kGK15WG = {0.129484966168870, 0.279705391489277,
                                                  0.381830050505119, 0.417959183673469};

// Gauss-Legendre 16 (positive half).
inline constexpr std::array<double, 8> kGL16X = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGL16W = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// Gauss-Legendre 8 (positive half).
inline constexpr std::array<double, 4> kGL8X = {0.1834346424956498, 0.5255324099163290,
                                                0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGL8W = {0.3626837833783620, 0.3137066458778873,
                                                0.2223810344533745, 0.1012285362903763};

template <class F>
double gk15(F&& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k15 = kGK15WK[7] * f0;
    double g7 = kGK15WG[3] * f0;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGK15X[i];
        const double fs = f(mid + dx) + f(mid - dx);
        k15 += kGK15WK[i] * fs;
        if (i % 2 == 1) g7 += kGK15WG[i / 2] * fs;
    }
    k15 *= half;
    g7 *= half;
    err = std::abs(k15 - g7);
    return k15;
}

template <class F>
double gl16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kGL16X[i];
        s += kGL16W[i] * (f(mid + dx) + f(mid - dx));
    }
    return s * half;
}

/// Adaptive Gauss-Kronrod on [a, b]; the integrand must be smooth in the
/// interior (split at kinks/singularities before calling).
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol = 1e-10, double abs_floor = 0.0,
                int max_panels = 4000) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b, value, err;
    };
    std::vector<Panel> panels;
    double err0;
    double v0 = gk15(f, a, b, err0);
    panels.push_back({a, b, v0, err0});
    double total = v0, total_err = err0;
    int evals = 1;
    while (total_err > std::max(rel_tol * std::abs(total), abs_floor) && evals < max_panels) {
        // split the worst panel
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].err > panels[worst].err) worst = i;
        Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) break; // interval exhausted in double precision
        double e1, e2;
        const double v1 = gk15(f, p.a, mid, e1);
        const double v2 = gk15(f, mid, p.b, e2);
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        panels[worst] = {p.a, mid, v1, e1};
        panels.push_back({mid, p.b, v2, e2});
        evals += 2;
    }
    return total;
}

/// Integrate over (a, b) with an integrable power-type singularity allowed at
/// either endpoint: geometric panel grading (ratio 1/2, depth <= 60) toward
/// the singular end(s), plus geometric extrapolation of the remaining stub
/// (exact for pure power decay). Throws DivergenceError when panel sums fail
/// to decay.
template <class F>
double graded(F&& f, double a, double b, bool singular_lo, bool singular_hi,
              double rel_tol = 1e-10) {
    if (!(a < b)) return 0.0;
    if (singular_lo && singular_hi) {
        const double mid = 0.5 * (a + b);
        return graded(f, a, mid, true, false, rel_tol) +
               graded(f, mid, b, false, true, rel_tol);
    }
    if (!singular_lo && !singular_hi) return adaptive(f, a, b, rel_tol);

    const double len = b - a;
    const double sing = singular_lo ? a : b;
    // never let panel nodes collapse onto the singular point in double precision
    const double width_floor =
        512.0 * std::numeric_limits<double>::epsilon() * std::abs(sing);

    double acc = 0.0;
    double prev = kNaN;
    double panel = 0.0, ratio = kNaN;
    int grow_streak = 0;
    for (int j = 0; j < 60; ++j) {
        const double w_hi = std::ldexp(len, -j);
        const double w_lo = std::ldexp(len, -(j + 1));
        const double lo = singular_lo ? a + w_lo : b - w_hi;
        const double hi = singular_lo ? a + w_hi : b - w_lo;
        if (!(lo < hi)) break;
        panel = adaptive(f, lo, hi, rel_tol * 0.25, rel_tol * 0.01 * std::abs(acc));
        acc += panel;
        const double ap = std::abs(panel);
        if (!std::isnan(prev) && prev > 0.0) {
            ratio = ap / prev;
            if (ratio >= 1.0) {
                if (++grow_streak >= 8)
                    throw DivergenceError("graded quadrature: panel sums do not decay "
                                          "(non-integrable endpoint singularity)");
            } else {
                grow_streak = 0;
            }
        }
        prev = ap;
        if (j >= 4 && ap <= rel_tol * 0.01 * std::abs(acc)) return acc;
        if (w_lo <= width_floor) break;
    }
    // geometric stub: panels of a power singularity decay with a fixed ratio
    if (!std::isnan(ratio) && ratio < 0.999 && panel != 0.0)
        acc += panel * ratio / (1.0 - ratio);
    return acc;
}

} // namespace quad
} // namespace herzlab
