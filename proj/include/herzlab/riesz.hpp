#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "herzlab/common.hpp"
#include "herzlab/fft.hpp"
#include "herzlab/grid.hpp"
#include "herzlab/piecewise.hpp"
#include "herzlab/quadrature.hpp"

namespace herzlab {

struct RieszParams {
    double gamma = 0.5;
    int dimension = 1;

    RieszParams(double g, int n) : gamma(g), dimension(n) {
        if (!(n >= 1)) throw std::invalid_argument("RieszParams: dimension must be >= 1");
        if (!(g > 0.0 && g < double(n)))
            throw std::invalid_argument("RieszParams: requires 0 < gamma < n");
    }
};

/// K_gamma(x) = |x|^{gamma-n}.
inline double riesz_kernel(std::span<const double> x, const RieszParams& params) {
    if (int(x.size()) != params.dimension)
        throw std::invalid_argument("riesz_kernel: point/params dimension mismatch");
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    if (r2 == 0.0) throw std::invalid_argument("riesz_kernel: singular at x = 0");
    return std::pow(std::sqrt(r2), params.gamma - double(params.dimension));
}

namespace detail {

// sgn(y) |y|^gamma / gamma: antiderivative of |x-y|^{gamma-1} in y up to reflection.
inline double kernel_primitive(double y, double gamma) {
    if (y == 0.0) return 0.0;
    return sign(y) * std::pow(std::abs(y), gamma) / gamma;
}

// Exact I_gamma of an indicator piece of height c on (a, b), n = 1.
inline double potential_indicator(double c, double a, double b, double x, double gamma) {
    return c * (kernel_primitive(x - a, gamma) - kernel_primitive(x - b, gamma));
}

} // namespace detail

/// I_gamma f(x) = int f(y) |x-y|^{gamma-1} dy on the line. Indicator pieces
/// use the exact antiderivative; power pieces use adaptive quadrature with
/// panel boundaries pinned at y = x and y = 0 and geometric grading toward
/// both singular points.
inline double riesz_potential_1d(const PiecewisePowerFunction& f, const RieszParams& params,
                                 double x, double rel_tol = 1e-8) {
    if (params.dimension != 1) throw std::invalid_argument("riesz_potential_1d: n must be 1");
    const double gamma = params.gamma;
    double total = 0.0;
    for (const PowerPiece& p : f.pieces()) {
        if (p.expo == 0.0) {
            total += detail::potential_indicator(p.coef, p.lo, p.hi, x, gamma);
            continue;
        }
        // divergence checks at the piece's singular endpoints
        const bool touches_zero = (p.lo == 0.0 || p.hi == 0.0);
        if (touches_zero && p.expo < 0.0) {
            const double near_zero_expo = (x == 0.0) ? p.expo + gamma - 1.0 : p.expo;
            if (near_zero_expo <= -1.0)
                throw DivergenceError("riesz_potential_1d: kernel integral diverges at 0 on piece " +
                                      p.describe());
        }
        if (std::isinf(p.lo) || std::isinf(p.hi)) {
            if (p.expo + gamma - 1.0 >= -1.0)
                throw DivergenceError("riesz_potential_1d: kernel integral diverges at infinity on piece " +
                                      p.describe());
        }
        const auto integrand = [&](double y) {
            return p.coef * std::pow(std::abs(y), p.expo) *
                   std::pow(std::abs(x - y), gamma - 1.0);
        };
        std::vector<double> cuts{p.lo, p.hi};
        if (x > p.lo && x < p.hi) cuts.insert(cuts.begin() + 1, x);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            const auto singular = [&](double endpoint) {
                return endpoint == x || (endpoint == 0.0 && p.expo != 0.0);
            };
            total += quad::graded(integrand, a, b, singular(a), singular(b), rel_tol);
        }
    }
    return total;
}

// G(gamma) = pi^{n/2} 2^gamma Gamma(gamma/2) / Gamma((n-gamma)/2): the constant
// making I_gamma / G(gamma) the inverse of (-Delta)^{gamma/2}.
inline double normalization_constant(const RieszParams& params) {
    const double n = params.dimension, g = params.gamma;
    return std::pow(std::numbers::pi, 0.5 * n) * std::pow(2.0, g) * std::tgamma(0.5 * g) /
           std::tgamma(0.5 * (n - g));
}

struct GridPotential {
    GridFunction values;
    bool boundary_warning = false;
};

namespace detail {

// Exact cell averages of |y|^{gamma-1} over 1-d cells [mh - h/2, mh + h/2].
inline double kernel_cell_average_1d(long m, double h, double gamma) {
    const double a = (double(m) - 0.5) * h;
    const double b = (double(m) + 0.5) * h;
    return (kernel_primitive(b, gamma) - kernel_primitive(a, gamma)) / h;
}

// Average of |y|^{gamma-2} over the 2-d cell centered at (mi h, mj h):
// polar reduction for the singular centered cell, tensor Gauss panels for the
// near cells, midpoint beyond.
inline double kernel_cell_average_2d(long mi, long mj, double h, double gamma) {
    if (mi == 0 && mj == 0) {
        const auto sec_pow = [&](double th) { return std::pow(std::cos(th), -gamma); };
        const double angular = quad::adaptive(sec_pow, 0.0, std::numbers::pi / 4.0, 1e-13);
        return (8.0 / gamma) * std::pow(0.5 * h, gamma) * angular / (h * h);
    }
    const double cx = double(mi) * h, cy = double(mj) * h;
    if (std::max(std::labs(mi), std::labs(mj)) <= 4) {
        double acc = 0.0;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                for (int sa : {-1, 1}) {
                    for (int sb : {-1, 1}) {
                        const double x = cx + 0.5 * h * sa * quad::kGL8X[a];
                        const double y = cy + 0.5 * h * sb * quad::kGL8X[b];
                        acc += quad::kGL8W[a] * quad::kGL8W[b] *
                               std::pow(std::hypot(x, y), gamma - 2.0);
                    }
                }
            }
        }
        return acc * 0.25; // Gauss weights normalized over [-1,1]^2
    }
    return std::pow(std::hypot(cx, cy), gamma - 2.0);
}

} // namespace detail

/// I_gamma f on the grid by zero-padded FFT convolution with the cell-averaged
/// kernel table. Inputs that do not decay at the boundary get the result with
/// a warning flag rather than an error.
inline GridPotential riesz_potential_grid(const GridFunction& f, const RieszParams& params) {
    if (params.dimension != f.dimension())
        throw std::invalid_argument("riesz_potential_grid: dimension mismatch");
    const double gamma = params.gamma;
    const double h = f.spacing();

    GridPotential out{f, false};
    const double interior = f.max_abs();
    if (interior > 0.0 && f.boundary_max_abs() > 1e-6 * interior) out.boundary_warning = true;

    if (f.dimension() == 1) {
        const std::size_t n = f.size(0);
        const std::size_t m = fft::next_pow2(2 * n);
        std::vector<std::complex<double>> src(m), ker(m);
        for (std::size_t i = 0; i < n; ++i) src[i] = f.at(i);
        for (long d = -long(n) + 1; d < long(n); ++d)
            ker[std::size_t((d + long(m)) % long(m))] =
                detail::kernel_cell_average_1d(d, h, gamma);
        auto conv = fft::convolve(std::move(src), std::move(ker));
        for (std::size_t i = 0; i < n; ++i) out.values.at(i) = conv[i].real() * h;
        return out;
    }

    const std::size_t n0 = f.size(0), n1 = f.size(1);
    const std::size_t m0 = fft::next_pow2(2 * n0), m1 = fft::next_pow2(2 * n1);
    std::vector<std::complex<double>> src(m0 * m1), ker(m0 * m1);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) src[i * m1 + j] = f.at(i, j);
    for (long di = -long(n0) + 1; di < long(n0); ++di) {
        const std::size_t wi = std::size_t((di + long(m0)) % long(m0));
        for (long dj = -long(n1) + 1; dj < long(n1); ++dj) {
            const std::size_t wj = std::size_t((dj + long(m1)) % long(m1));
            ker[wi * m1 + wj] = detail::kernel_cell_average_2d(di, dj, h, gamma);
        }
    }
    fft::transform_2d(src, m0, m1, false);
    fft::transform_2d(ker, m0, m1, false);
    for (std::size_t i = 0; i < src.size(); ++i) src[i] *= ker[i];
    fft::transform_2d(src, m0, m1, true);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) out.values.at(i, j) = src[i * m1 + j].real() * h * h;
    return out;
}

/// u with (-Delta)^{gamma/2} u = f, i.e. I_gamma f / G(gamma), at one point.
inline double fractional_laplace_solve_1d(const PiecewisePowerFunction& f,
                                          const RieszParams& params, double x,
                                          double rel_tol = 1e-8) {
    return riesz_potential_1d(f, params, x, rel_tol) / normalization_constant(params);
}

inline GridPotential fractional_laplace_solve_grid(const GridFunction& f,
                                                   const RieszParams& params) {
    GridPotential res = riesz_potential_grid(f, params);
    const double scale = 1.0 / normalization_constant(params);
    for (double& v : res.values.samples()) v *= scale;
    return res;
}

} // namespace herzlab
