#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "herzlab/riesz.hpp"

using namespace herzlab;
using Catch::Approx;

namespace {

// Midpoint-rule oracle for the potential of one power piece (test-only).
// Segments touching the kernel singularity are integrated in w = |y-x|^gamma,
// which removes the singularity exactly.
double brute_piece_potential(const PowerPiece& p, double gamma, double x, int n = 200000) {
    const auto segment = [&](double a, double b) {
        if (!(a < b)) return 0.0;
        if (x == a || x == b) {
            const double W = std::pow(b - a, gamma);
            const double hw = W / n;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double w = (i + 0.5) * hw;
                const double y = (x == a) ? x + std::pow(w, 1.0 / gamma)
                                          : x - std::pow(w, 1.0 / gamma);
                acc += p.coef * std::pow(std::abs(y), p.expo);
            }
            return acc * hw / gamma;
        }
        const double h = (b - a) / n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double y = a + (i + 0.5) * h;
            acc += p.coef * std::pow(std::abs(y), p.expo) *
                   std::pow(std::abs(x - y), gamma - 1.0);
        }
        return acc * h;
    };
    if (x > p.lo && x < p.hi) return segment(p.lo, x) + segment(x, p.hi);
    return segment(p.lo, p.hi);
}

double brute_potential(const PiecewisePowerFunction& f, double gamma, double x) {
    double acc = 0.0;
    for (const auto& p : f.pieces()) acc += brute_piece_potential(p, gamma, x);
    return acc;
}

} // namespace

TEST_CASE("riesz kernel", "[riesz]") {
    const std::vector<double> x1{4.0};
    CHECK(riesz_kernel(x1, RieszParams(0.5, 1)) == Approx(0.5));
    const std::vector<double> x2{3.0, 4.0};
    CHECK(riesz_kernel(x2, RieszParams(1.0, 2)) == Approx(0.2));
    const std::vector<double> x3{1.0};
    CHECK(riesz_kernel(x3, RieszParams(0.9, 1)) == Approx(1.0));

    const std::vector<double> zero{0.0};
    CHECK_THROWS_AS(riesz_kernel(zero, RieszParams(0.5, 1)), std::invalid_argument);
    CHECK_THROWS_AS(RieszParams(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RieszParams(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RieszParams(2.5, 2), std::invalid_argument);
}

TEST_CASE("1d potential of indicators: exact antiderivatives", "[riesz]") {
    const auto chi_sym = PiecewisePowerFunction::indicator(-1.0, 1.0);
    for (double gamma : {0.1, 0.25, 0.5, 0.9}) {
        CHECK(riesz_potential_1d(chi_sym, RieszParams(gamma, 1), 0.0) ==
              Approx(2.0 / gamma).epsilon(1e-13));
    }

    const auto chi = PiecewisePowerFunction::indicator(0.0, 1.0);
    const RieszParams half(0.5, 1);
    CHECK(riesz_potential_1d(chi, half, 2.0) == Approx(2.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-13));
    // both sides of the split at x contribute 2*sqrt(1/2)
    CHECK(riesz_potential_1d(chi, half, 0.5) == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("1d potential of power pieces vs brute force", "[riesz]") {
    const auto f = PiecewisePowerFunction::abs_power(1.0, 0.5, 0.0, 2.0);
    const auto g = PiecewisePowerFunction::abs_power(2.0, -0.5, 1.0, 4.0);
    for (double gamma : {0.3, 0.5, 0.75}) {
        const RieszParams params(gamma, 1);
        for (double x : {-1.0, 0.0, 0.5, 1.5, 3.0, 10.0}) {
            const double exact_f = riesz_potential_1d(f, params, x);
            CHECK(exact_f == Approx(brute_potential(f, gamma, x)).epsilon(2e-3));
            const double exact_g = riesz_potential_1d(g, params, x);
            CHECK(exact_g == Approx(brute_potential(g, gamma, x)).epsilon(2e-3));
            CHECK(exact_f >= 0.0);
            CHECK(exact_g >= 0.0);
        }
    }
}

TEST_CASE("1d potential divergence detection", "[riesz]") {
    const RieszParams params(0.5, 1);
    const auto bad0 = PiecewisePowerFunction::abs_power(1.0, -1.0, 0.0, 1.0);
    CHECK_THROWS_AS(riesz_potential_1d(bad0, params, 2.0), DivergenceError);
    const auto badinf = PiecewisePowerFunction::abs_power(1.0, 0.5, 1.0, kInf);
    CHECK_THROWS_AS(riesz_potential_1d(badinf, params, 0.0), DivergenceError);
    // x = 0 tightens the near-zero requirement to expo + gamma > 0
    const auto edge = PiecewisePowerFunction::abs_power(1.0, -0.7, 0.0, 1.0);
    CHECK_THROWS_AS(riesz_potential_1d(edge, RieszParams(0.6, 1), 0.0), DivergenceError);
    CHECK(std::isfinite(riesz_potential_1d(edge, RieszParams(0.8, 1), 0.0)));
}

TEST_CASE("translation equivariance and dilation law", "[riesz]") {
    const auto f = PiecewisePowerFunction::indicator(0.0, 1.0)
                       .disjoint_sum(PiecewisePowerFunction::indicator(2.0, 3.0, 2.0));
    const RieszParams params(0.4, 1);
    for (double a : {-3.0, 0.7, 11.0}) {
        const auto fa = f.translated(a);
        for (double x : {-1.0, 0.25, 2.5, 6.0})
            CHECK(riesz_potential_1d(fa, params, x + a) ==
                  Approx(riesz_potential_1d(f, params, x)).epsilon(1e-10));
    }

    // I_gamma f_s (x) = s^{-gamma} (I_gamma f)(s x), f_s(y) = f(s y)
    for (const auto& base :
         {PiecewisePowerFunction::indicator(-1.0, 1.0),
          PiecewisePowerFunction::abs_power(1.0, 0.5, 0.0, 2.0)}) {
        for (double gamma : {0.25, 0.5}) {
            const RieszParams pr(gamma, 1);
            for (double s : {0.5, 2.0, 8.0}) {
                const auto fs = base.dilated(s);
                for (double x : {0.0, 0.3, 1.7}) {
                    const double lhs = riesz_potential_1d(fs, pr, x);
                    const double rhs =
                        std::pow(s, -gamma) * riesz_potential_1d(base, pr, s * x);
                    CHECK(lhs == Approx(rhs).epsilon(1e-8).margin(1e-14));
                }
            }
        }
    }
}

TEST_CASE("normalization constant", "[riesz]") {
    CHECK(normalization_constant(RieszParams(0.5, 1)) ==
          Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-13));
    CHECK(normalization_constant(RieszParams(1.0, 2)) ==
          Approx(2.0 * std::numbers::pi).epsilon(1e-13));
    CHECK(normalization_constant(RieszParams(2.0, 3)) ==
          Approx(4.0 * std::numbers::pi).epsilon(1e-13));

    // gamma-function oracle through lgamma
    for (auto [g, n] : std::vector<std::pair<double, int>>{{0.3, 1}, {0.8, 2}, {1.7, 2}}) {
        const double expected =
            std::pow(std::numbers::pi, 0.5 * n) * std::pow(2.0, g) *
            std::exp(std::lgamma(0.5 * g) - std::lgamma(0.5 * (n - g)));
        CHECK(normalization_constant(RieszParams(g, n)) == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("grid potential matches the exact 1d evaluator", "[riesz]") {
    const double h = std::pow(2.0, -10.0);
    const std::size_t n = std::size_t(4.0 / h);
    const auto chi = PiecewisePowerFunction::indicator(-1.0, 1.0);
    const RieszParams params(0.5, 1);
    const auto grid = GridFunction::sample_1d(-2.0, h, n, [&](double x) { return chi(x); });
    const auto pot = riesz_potential_grid(grid, params);
    CHECK_FALSE(pot.boundary_warning);

    const std::size_t center = std::size_t(2.0 / h); // x = 0
    const double exact0 = riesz_potential_1d(chi, params, 0.0);
    CHECK(pot.values.at(center) == Approx(exact0).epsilon(1e-3));

    for (double x : {-0.75, 0.5, 1.25}) {
        const auto idx = std::size_t((x + 2.0) / h);
        CHECK(pot.values.at(idx) ==
              Approx(riesz_potential_1d(chi, params, x)).epsilon(1e-3));
    }
}

TEST_CASE("grid potential: zero input, linearity, warning flag", "[riesz]") {
    const RieszParams params(0.5, 1);
    auto zero = GridFunction::sample_1d(-1.0, 0.125, 16, [](double) { return 0.0; });
    const auto pz = riesz_potential_grid(zero, params);
    for (double v : pz.values.samples()) CHECK(v == 0.0);

    auto f = GridFunction::sample_1d(-1.0, 0.125, 16,
                                     [](double x) { return std::exp(-8.0 * x * x); });
    auto g = GridFunction::sample_1d(-1.0, 0.125, 16,
                                     [](double x) { return x * std::exp(-8.0 * x * x); });
    auto sum = f;
    for (std::size_t i = 0; i < sum.size(0); ++i) sum.at(i) += g.at(i);
    const auto pf = riesz_potential_grid(f, params);
    const auto pg = riesz_potential_grid(g, params);
    const auto ps = riesz_potential_grid(sum, params);
    for (std::size_t i = 0; i < sum.size(0); ++i)
        CHECK(ps.values.at(i) == Approx(pf.values.at(i) + pg.values.at(i)).margin(1e-12));

    auto flat = GridFunction::sample_1d(-1.0, 0.125, 16, [](double) { return 1.0; });
    CHECK(riesz_potential_grid(flat, params).boundary_warning);
}

TEST_CASE("2d grid potential", "[riesz]") {
    const RieszParams params(1.0, 2);
    const double h = 1.0 / 32.0;
    const std::size_t n = 128; // [-2, 2)
    const auto bump = [](double x, double y) {
        const double r2 = x * x + y * y;
        return r2 < 1.0 ? (1.0 - r2) * (1.0 - r2) : 0.0;
    };
    const auto grid = GridFunction::sample_2d({-2.0, -2.0}, h, n, n, bump);
    const auto pot = riesz_potential_grid(grid, params);

    // I_1 f(0) = 2 pi int_0^1 (1-r^2)^2 dr = 2 pi * 8/15
    const double expected0 = 2.0 * std::numbers::pi * (8.0 / 15.0);
    const std::size_t c = 64;
    CHECK(pot.values.at(c, c) == Approx(expected0).epsilon(5e-3));

    // direct-sum oracle on a subsampled set of points
    std::mt19937 rng(5);
    std::uniform_int_distribution<std::size_t> pick(32, 96);
    for (int rep = 0; rep < 3; ++rep) {
        const std::size_t i = pick(rng), j = pick(rng);
        double direct = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (grid.at(a, b) == 0.0) continue;
                direct += grid.at(a, b) *
                          detail::kernel_cell_average_2d(long(i) - long(a), long(j) - long(b), h,
                                                         params.gamma);
            }
        direct *= h * h;
        CHECK(pot.values.at(i, j) == Approx(direct).epsilon(1e-11).margin(1e-11));
    }
}

TEST_CASE("fractional laplace solve is the normalized potential", "[riesz]") {
    const auto chi = PiecewisePowerFunction::indicator(-1.0, 1.0);
    const RieszParams params(0.5, 1);
    const double g = normalization_constant(params);
    CHECK(fractional_laplace_solve_1d(chi, params, 0.3) ==
          Approx(riesz_potential_1d(chi, params, 0.3) / g).epsilon(1e-14));

    auto zero = GridFunction::sample_1d(-1.0, 0.125, 16, [](double) { return 0.0; });
    const auto pz = fractional_laplace_solve_grid(zero, params);
    for (double v : pz.values.samples()) CHECK(v == 0.0);
}

TEST_CASE("grid function serialization round trip", "[riesz]") {
    auto g = GridFunction::sample_1d(-1.5, 0.25, 12, [](double x) { return std::sin(3.0 * x); });
    std::stringstream buf;
    g.write_binary(buf);
    const auto back = GridFunction::read_binary(buf);
    REQUIRE(back.dimension() == 1);
    REQUIRE(back.size(0) == g.size(0));
    CHECK(back.spacing() == g.spacing());
    CHECK(back.origin(0) == g.origin(0));
    for (std::size_t i = 0; i < g.size(0); ++i) CHECK(back.at(i) == g.at(i));

    auto g2 = GridFunction::sample_2d({0.0, -1.0}, 0.5, 6, 4,
                                      [](double x, double y) { return x - 2.0 * y; });
    std::stringstream buf2;
    g2.write_binary(buf2);
    const auto back2 = GridFunction::read_binary(buf2);
    REQUIRE(back2.dimension() == 2);
    CHECK(back2.size(0) == 6);
    CHECK(back2.size(1) == 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(back2.at(i, j) == g2.at(i, j));

    std::ostringstream csv;
    g.write_csv(csv);
    CHECK(csv.str().rfind("x,value\n", 0) == 0);
}

TEST_CASE("fft building blocks", "[riesz]") {
    using cd = std::complex<double>;
    std::vector<cd> impulse(8, cd(0.0));
    impulse[0] = 1.0;
    auto spec = impulse;
    fft::transform(spec, false);
    for (const auto& z : spec) CHECK(std::abs(z - cd(1.0)) < 1e-14);

    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cd> v(64);
    for (auto& z : v) z = cd(u(rng), u(rng));
    auto w = v;
    fft::transform(w, false);
    double pv = 0.0, pw = 0.0;
    for (const auto& z : v) pv += std::norm(z);
    for (const auto& z : w) pw += std::norm(z);
    CHECK(pw == Approx(64.0 * pv).epsilon(1e-12)); // Parseval
    fft::transform(w, true);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(w[i] - v[i]) < 1e-13);

    std::vector<cd> m(16 * 8);
    for (auto& z : m) z = cd(u(rng), u(rng));
    auto m2 = m;
    fft::transform_2d(m2, 16, 8, false);
    fft::transform_2d(m2, 16, 8, true);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(m2[i] - m[i]) < 1e-13);

    CHECK_THROWS_AS(([&] {
                        std::vector<cd> bad(6);
                        fft::transform(bad, false);
                    }()),
                    std::invalid_argument);
}
