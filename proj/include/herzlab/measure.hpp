#pragma once

#include <algorithm>
#include <numbers>
#include <span>
#include <vector>

#include "herzlab/common.hpp"

namespace herzlab {

struct Ball {
    std::vector<double> center;
    double radius = 1.0;

    static Ball at(double c, double r) { return Ball{{c}, r}; }
    int dimension() const { return static_cast<int>(center.size()); }
};

enum class MeasureKind { lebesgue, power_weight };

/// Positive Borel measure on R^n: either Lebesgue, or the one-dimensional
/// measure with density x^{beta-1} on (0, inf), beta > 0.
class Measure {
public:
    static Measure lebesgue(int dimension = 1) {
        if (dimension < 1) throw std::invalid_argument("Measure: dimension must be >= 1");
        return Measure(MeasureKind::lebesgue, dimension, 0.0);
    }

    static Measure power_weight(double beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("Measure: power weight requires beta > 0");
        return Measure(MeasureKind::power_weight, 1, beta);
    }

    MeasureKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    double beta() const { return beta_; }
    bool is_lebesgue() const { return kind_ == MeasureKind::lebesgue; }

    /// Radial density weight at x > 0 (1 for Lebesgue in 1-d, x^{beta-1} otherwise).
    double radial_density(double x) const {
        if (kind_ == MeasureKind::lebesgue) return 1.0;
        return std::pow(x, beta_ - 1.0);
    }

    /// Mass of the open interval (a, b) on the line, a <= b allowed in any signs.
    double interval_mass(double a, double b) const {
        if (dim_ != 1) throw std::invalid_argument("interval_mass: 1-d measures only");
        if (!(a <= b)) std::swap(a, b);
        if (kind_ == MeasureKind::lebesgue) return b - a;
        const double lo = std::max(a, 0.0);
        const double hi = std::max(b, 0.0);
        if (hi <= lo) return 0.0;
        return power_primitive(beta_ - 1.0, lo, hi);
    }

    // \int_{(a,b)} |x|^e dnu over one side of the line, 0 <= a <= b when positive=true,
    // interpreted as the reflected interval (-b,-a) when positive=false.
    double one_sided_power_mass(double e, double a, double b, bool positive) const {
        if (dim_ != 1) throw std::invalid_argument("one_sided_power_mass: 1-d measures only");
        if (!(0.0 <= a && a <= b)) throw std::invalid_argument("one_sided_power_mass: needs 0 <= a <= b");
        if (kind_ == MeasureKind::power_weight) {
            if (!positive) return 0.0;
            return power_primitive(e + beta_ - 1.0, a, b);
        }
        return power_primitive(e, a, b);
    }

    /// nu(B) in closed form.
    double ball_mass(const Ball& ball) const {
        if (ball.dimension() != dim_)
            throw std::invalid_argument("ball_mass: ball/measure dimension mismatch");
        if (!(ball.radius > 0.0)) throw std::invalid_argument("ball_mass: radius must be > 0");
        if (kind_ == MeasureKind::power_weight)
            return interval_mass(ball.center[0] - ball.radius, ball.center[0] + ball.radius);
        return unit_ball_volume(dim_) * std::pow(ball.radius, dim_);
    }

    /// nu(Omega_t) for the dyadic annulus Omega_t = {2^{t-1} <= |x| < 2^t}.
    double annulus_mass(int t) const {
        const double inner = pow2(t - 1);
        const double outer = pow2(t);
        if (kind_ == MeasureKind::power_weight)
            return power_primitive(beta_ - 1.0, inner, outer);
        return unit_ball_volume(dim_) * (std::pow(outer, dim_) - std::pow(inner, dim_));
    }

    static double unit_ball_volume(int n) {
        return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    }

private:
    Measure(MeasureKind k, int dim, double beta) : kind_(k), dim_(dim), beta_(beta) {}

    MeasureKind kind_;
    int dim_;
    double beta_;
};

struct BallGrowthReport {
    double sup_ratio = 0.0;
    Ball argmax_ball;
};

/// sup over the sample of mu(B) / m(B)^exponent, with the attaining ball.
inline BallGrowthReport ball_growth_report(const Measure& mu, double exponent,
                                           std::span<const Ball> balls) {
    if (!(exponent > 0.0)) throw std::invalid_argument("ball_growth_report: exponent must be > 0");
    if (balls.empty()) throw std::invalid_argument("ball_growth_report: empty ball sample");
    const Measure m = Measure::lebesgue(mu.dimension());
    BallGrowthReport report;
    report.sup_ratio = -kInf;
    for (const Ball& b : balls) {
        const double ratio = mu.ball_mass(b) / std::pow(m.ball_mass(b), exponent);
        if (ratio > report.sup_ratio) {
            report.sup_ratio = ratio;
            report.argmax_ball = b;
        }
    }
    return report;
}

/// Default sample for growth reports: log-spaced radii 2^{-K}..2^{K},
/// centers in {0} plus log-spaced positives. Worst cases sit at origin-touching balls.
inline std::vector<Ball> default_growth_sample(int K = 10) {
    std::vector<Ball> balls;
    std::vector<double> centers{0.0};
    for (int j = -K; j <= K; j += 2) centers.push_back(pow2(j));
    for (int t = -K; t <= K; ++t)
        for (double c : centers) balls.push_back(Ball::at(c, pow2(t)));
    return balls;
}

} // namespace herzlab
