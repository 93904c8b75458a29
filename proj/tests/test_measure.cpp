#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "herzlab/measure.hpp"

using namespace herzlab;
using Catch::Approx;

TEST_CASE("ball mass closed forms", "[measure]") {
    const Measure m1 = Measure::lebesgue(1);
    CHECK(m1.ball_mass(Ball::at(0.0, 3.0)) == Approx(6.0));

    const Measure mu = Measure::power_weight(0.5);
    CHECK(mu.ball_mass(Ball::at(2.0, 2.0)) == Approx(4.0)); // (0,4): 4^{1/2}/0.5
    CHECK(Measure::power_weight(1.0).ball_mass(Ball::at(-1.0, 0.5)) == 0.0);

    const Measure m2 = Measure::lebesgue(2);
    CHECK(m2.ball_mass(Ball{{0.0, 0.0}, 2.0}) == Approx(4.0 * std::numbers::pi));

    CHECK_THROWS_AS(m2.ball_mass(Ball::at(0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(m1.ball_mass(Ball::at(0.0, -1.0)), std::invalid_argument);
    CHECK_THROWS_AS(Measure::power_weight(0.0), std::invalid_argument);
}

TEST_CASE("annulus mass", "[measure]") {
    const Measure m1 = Measure::lebesgue(1);
    CHECK(m1.annulus_mass(0) == Approx(1.0));
    CHECK(m1.annulus_mass(1) == Approx(2.0));
    CHECK(Measure::power_weight(1.0).annulus_mass(1) == Approx(1.0));

    // set algebra contract: nu(Omega_t) = nu(B(0,2^t)) - nu(B(0,2^{t-1}))
    for (const Measure& nu : {m1, Measure::lebesgue(2), Measure::power_weight(0.5)}) {
        for (int t : {-7, -1, 0, 1, 2, 9}) {
            if (nu.dimension() != 1 && nu.kind() == MeasureKind::power_weight) continue;
            std::vector<double> c(std::size_t(nu.dimension()), 0.0);
            const double outer = nu.ball_mass(Ball{c, pow2(t)});
            const double inner = nu.ball_mass(Ball{c, pow2(t - 1)});
            CHECK(nu.annulus_mass(t) == Approx(outer - inner).epsilon(1e-12));
        }
    }
}

TEST_CASE("interval additivity over random splits", "[measure]") {
    std::mt19937 rng(20240801);
    std::uniform_real_distribution<double> pos(-8.0, 8.0);
    for (const Measure& nu : {Measure::lebesgue(1), Measure::power_weight(0.5),
                              Measure::power_weight(0.75), Measure::power_weight(2.5)}) {
        for (int it = 0; it < 200; ++it) {
            double a = pos(rng), b = pos(rng), c = pos(rng);
            if (a > b) std::swap(a, b);
            if (b > c) std::swap(b, c);
            if (a > b) std::swap(a, b);
            const double whole = nu.interval_mass(a, c);
            const double parts = nu.interval_mass(a, b) + nu.interval_mass(b, c);
            CHECK(whole == Approx(parts).epsilon(1e-12).margin(1e-300));
        }
    }
}

TEST_CASE("power weight with beta=1 is Lebesgue on (0,inf)", "[measure]") {
    const Measure mu = Measure::power_weight(1.0);
    const Measure m = Measure::lebesgue(1);
    for (auto [a, b] : std::vector<std::pair<double, double>>{
             {0.0, 1.0}, {0.5, 4.0}, {1.0, 1024.0}, {0.0, 0.125}}) {
        CHECK(mu.interval_mass(a, b) == m.interval_mass(a, b));
    }
    CHECK(mu.interval_mass(-3.0, 2.0) == 2.0); // negative part carries no mass
}

TEST_CASE("ball growth report", "[measure]") {
    SECTION("origin balls give the constant ratio 1/(beta 2^beta)") {
        const double beta = 0.75;
        const Measure mu = Measure::power_weight(beta);
        std::vector<Ball> balls;
        for (int t = -10; t <= 10; ++t) balls.push_back(Ball::at(0.0, pow2(t)));
        const auto rep = ball_growth_report(mu, beta, balls);
        const double expected = 1.0 / (beta * std::pow(2.0, beta));
        for (const Ball& b : balls) {
            const double ratio = mu.ball_mass(b) / std::pow(2.0 * b.radius, beta);
            CHECK(ratio == Approx(expected).epsilon(1e-12));
        }
        CHECK(rep.sup_ratio == Approx(expected).epsilon(1e-12));
    }

    SECTION("lebesgue with exponent 1 is identically 1") {
        const auto rep = ball_growth_report(Measure::lebesgue(1), 1.0, default_growth_sample(6));
        CHECK(rep.sup_ratio == Approx(1.0).epsilon(1e-14));
    }

    SECTION("sup attained by origin-touching balls, bounded by 1/beta") {
        const double beta = 0.5;
        const Measure mu = Measure::power_weight(beta);
        std::vector<Ball> near, far;
        for (int t = -6; t <= 6; ++t) {
            near.push_back(Ball::at(0.0, pow2(t)));
            far.push_back(Ball::at(100.0 + pow2(t), pow2(t)));
        }
        const auto rep_near = ball_growth_report(mu, beta, near);
        const auto rep_far = ball_growth_report(mu, beta, far);
        CHECK(rep_near.sup_ratio > rep_far.sup_ratio);
        CHECK(rep_near.sup_ratio <= 1.0 / beta + 1e-12);
    }

    SECTION("random balls respect the 1/beta bound for beta <= 1") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> center(-4.0, 12.0);
        std::uniform_int_distribution<int> expo(-12, 12);
        for (double beta : {0.25, 0.5, 0.9, 1.0}) {
            const Measure mu = Measure::power_weight(beta);
            std::vector<Ball> balls;
            for (int i = 0; i < 500; ++i) balls.push_back(Ball::at(center(rng), pow2(expo(rng))));
            const auto rep = ball_growth_report(mu, beta, balls);
            CHECK(rep.sup_ratio <= 1.0 / beta + 1e-12);
        }
    }

    SECTION("argument validation") {
        CHECK_THROWS_AS(ball_growth_report(Measure::lebesgue(1), 1.0, std::span<const Ball>{}),
                        std::invalid_argument);
        const auto balls = default_growth_sample(2);
        CHECK_THROWS_AS(ball_growth_report(Measure::lebesgue(1), 0.0, balls),
                        std::invalid_argument);
    }
}
