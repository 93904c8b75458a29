#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "herzlab/common.hpp"
#include "herzlab/measure.hpp"

namespace herzlab {

/// One piece x -> coef * |x|^expo on the open interval (lo, hi).
struct PowerPiece {
    double lo = 0.0;
    double hi = 0.0;
    double coef = 0.0;
    double expo = 0.0;

    std::string describe() const {
        std::ostringstream os;
        os << coef << "*|x|^" << expo << " on (" << lo << "," << hi << ")";
        return os.str();
    }
};

namespace detail {
// Subinterval of (a,b) on the positive half-line where |c| x^e > s. Empty -> (0,0).
inline std::pair<double, double> superlevel_interval(double absc, double e, double a, double b,
                                                     double s) {
    if (absc <= 0.0) return {0.0, 0.0};
    if (e == 0.0) return absc > s ? std::make_pair(a, b) : std::make_pair(0.0, 0.0);
    if (s <= 0.0) return {a, b};
    const double xs = std::pow(s / absc, 1.0 / e);
    if (e > 0.0) {
        const double u = std::max(a, xs);
        return u < b ? std::make_pair(u, b) : std::make_pair(0.0, 0.0);
    }
    const double v = std::min(b, xs);
    return a < v ? std::make_pair(a, v) : std::make_pair(0.0, 0.0);
}
} // namespace detail

/// Finite union of disjoint intervals, each carrying c*|x|^a. The exact 1-d
/// test-function carrier for every rearrangement, norm and potential below.
///
/// Pieces are canonicalized to lie in one closed half-line each (split at 0),
/// so a piece with a negative exponent never has 0 in its interior.
class PiecewisePowerFunction {
public:
    PiecewisePowerFunction() = default;

    explicit PiecewisePowerFunction(std::vector<PowerPiece> pieces) {
        for (const PowerPiece& p : pieces) append_split(p);
        std::sort(pieces_.begin(), pieces_.end(),
                  [](const PowerPiece& a, const PowerPiece& b) { return a.lo < b.lo; });
        validate();
    }

    static PiecewisePowerFunction zero() { return PiecewisePowerFunction(); }

    static PiecewisePowerFunction indicator(double a, double b, double height = 1.0) {
        return PiecewisePowerFunction({PowerPiece{a, b, height, 0.0}});
    }

    /// c*|x|^e restricted to (lo, hi); splits at 0 automatically.
    static PiecewisePowerFunction abs_power(double coef, double expo, double lo, double hi) {
        return PiecewisePowerFunction({PowerPiece{lo, hi, coef, expo}});
    }

    /// Indicator of the dyadic annulus Omega_t = {2^{t-1} <= |x| < 2^t}.
    static PiecewisePowerFunction annulus_indicator(int t, double height = 1.0) {
        const double a = pow2(t - 1), b = pow2(t);
        return PiecewisePowerFunction({PowerPiece{-b, -a, height, 0.0}, PowerPiece{a, b, height, 0.0}});
    }

    /// |x|^{-(lambda+1/p1)} on {1 < |x| < 2^k}: the optimality family of the
    /// q1 <= q2 counterexample.
    static PiecewisePowerFunction fk(int k, double lambda, double p1) {
        const double e = -(lambda + 1.0 / p1);
        const double b = pow2(k);
        return PiecewisePowerFunction({PowerPiece{-b, -1.0, 1.0, e}, PowerPiece{1.0, b, 1.0, e}});
    }

    const std::vector<PowerPiece>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }

    double operator()(double x) const {
        for (const PowerPiece& p : pieces_)
            if (p.lo <= x && x < p.hi) return p.coef * std::pow(std::abs(x), p.expo);
        return 0.0;
    }

    PiecewisePowerFunction scaled(double c) const {
        std::vector<PowerPiece> out = pieces_;
        for (PowerPiece& p : out) p.coef *= c;
        return from_canonical(std::move(out));
    }

    PiecewisePowerFunction abs() const {
        std::vector<PowerPiece> out = pieces_;
        for (PowerPiece& p : out) p.coef = std::abs(p.coef);
        return from_canonical(std::move(out));
    }

    /// x -> f(s x), s > 0.
    PiecewisePowerFunction dilated(double s) const {
        if (!(s > 0.0)) throw std::invalid_argument("dilated: scale must be > 0");
        std::vector<PowerPiece> out;
        out.reserve(pieces_.size());
        for (const PowerPiece& p : pieces_)
            out.push_back(PowerPiece{p.lo / s, p.hi / s, p.coef * std::pow(s, p.expo), p.expo});
        std::sort(out.begin(), out.end(),
                  [](const PowerPiece& a, const PowerPiece& b) { return a.lo < b.lo; });
        return from_canonical(std::move(out));
    }

    /// x -> f(x - a). Only indicator pieces stay in the family.
    PiecewisePowerFunction translated(double a) const {
        std::vector<PowerPiece> out;
        for (const PowerPiece& p : pieces_) {
            if (p.expo != 0.0)
                throw std::invalid_argument("translated: only indicator pieces can be translated");
            out.push_back(PowerPiece{p.lo + a, p.hi + a, p.coef, p.expo});
        }
        return PiecewisePowerFunction(std::move(out));
    }

    /// Pointwise sum; supports must be disjoint.
    PiecewisePowerFunction disjoint_sum(const PiecewisePowerFunction& other) const {
        std::vector<PowerPiece> out = pieces_;
        out.insert(out.end(), other.pieces_.begin(), other.pieces_.end());
        return PiecewisePowerFunction(std::move(out));
    }

    PiecewisePowerFunction restricted(double lo, double hi) const {
        std::vector<PowerPiece> out;
        for (const PowerPiece& p : pieces_) {
            const double a = std::max(p.lo, lo);
            const double b = std::min(p.hi, hi);
            if (a < b) out.push_back(PowerPiece{a, b, p.coef, p.expo});
        }
        return from_canonical(std::move(out));
    }

    PiecewisePowerFunction restricted_to_annulus(int t) const {
        const double a = pow2(t - 1), b = pow2(t);
        std::vector<PowerPiece> out;
        for (const PiecewisePowerFunction& part : {restricted(-b, -a), restricted(a, b)})
            out.insert(out.end(), part.pieces_.begin(), part.pieces_.end());
        return from_canonical(std::move(out));
    }

    /// Restriction to {|x| < r}.
    PiecewisePowerFunction restricted_to_ball(double r) const { return restricted(-r, r); }

    double support_abs_min() const {
        double m = kInf;
        for (const PowerPiece& p : pieces_) {
            const double lo = (p.lo >= 0.0) ? p.lo : (p.hi <= 0.0 ? -p.hi : 0.0);
            m = std::min(m, lo);
        }
        return m;
    }

    double support_abs_max() const {
        double m = 0.0;
        for (const PowerPiece& p : pieces_) m = std::max(m, std::max(std::abs(p.lo), std::abs(p.hi)));
        return m;
    }

    /// sup |f| (may be +inf for negative exponents touching 0).
    double sup_abs() const {
        double s = 0.0;
        for (const PowerPiece& p : pieces_) {
            auto [a, b] = reflected_range(p);
            const double c = std::abs(p.coef);
            if (p.expo == 0.0) s = std::max(s, c);
            else if (p.expo > 0.0) s = std::max(s, c * std::pow(b, p.expo));
            else s = std::max(s, a == 0.0 ? kInf : c * std::pow(a, p.expo));
        }
        return s;
    }

    /// Levels where the distribution function can break slope: |f| at piece endpoints.
    std::vector<double> level_candidates() const {
        std::vector<double> out{0.0};
        for (const PowerPiece& p : pieces_) {
            auto [a, b] = reflected_range(p);
            const double c = std::abs(p.coef);
            if (p.expo == 0.0) {
                out.push_back(c);
            } else {
                for (double x : {a, b}) {
                    const double v = (x == 0.0 && p.expo < 0.0) ? kInf : c * std::pow(x, p.expo);
                    if (std::isfinite(v)) out.push_back(v);
                }
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// All finite piece endpoints (kink locations of potentials of f).
    std::vector<double> edges() const {
        std::vector<double> out;
        for (const PowerPiece& p : pieces_) {
            out.push_back(p.lo);
            out.push_back(p.hi);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // \int |f|^power dnu; throws DivergenceError naming the offending piece.
    double abs_power_integral(const Measure& nu, double power) const {
        double total = 0.0;
        for (const PowerPiece& p : pieces_) {
            auto [a, b] = reflected_range(p);
            const double term = std::pow(std::abs(p.coef), power) *
                                nu.one_sided_power_mass(p.expo * power, a, b, p.lo >= 0.0);
            if (!std::isfinite(term))
                throw DivergenceError("integral of |f|^" + std::to_string(power) +
                                      " diverges on piece " + p.describe());
            total += term;
        }
        return total;
    }

    // \int (|f| - s)_+ dnu (the layer-cake tail used by the maximal average).
    double excess_integral(const Measure& nu, double s) const {
        double total = 0.0;
        for (const PowerPiece& p : pieces_) {
            auto [a, b] = reflected_range(p);
            auto [u, v] = detail::superlevel_interval(std::abs(p.coef), p.expo, a, b, s);
            if (u >= v) continue;
            const bool positive = p.lo >= 0.0;
            const double mass_f = std::abs(p.coef) * nu.one_sided_power_mass(p.expo, u, v, positive);
            const double mass_s = s * nu.one_sided_power_mass(0.0, u, v, positive);
            if (!std::isfinite(mass_f))
                throw DivergenceError("excess integral diverges on piece " + p.describe());
            total += mass_f - mass_s;
        }
        return total;
    }

    // nu({x in piece support: |f(x)| > s}), summed over pieces; may return +inf.
    double superlevel_mass(const Measure& nu, double s) const {
        double total = 0.0;
        for (const PowerPiece& p : pieces_) {
            auto [a, b] = reflected_range(p);
            auto [u, v] = detail::superlevel_interval(std::abs(p.coef), p.expo, a, b, s);
            if (u >= v) continue;
            total += nu.one_sided_power_mass(0.0, u, v, p.lo >= 0.0);
            if (!std::isfinite(total)) return kInf;
        }
        return total;
    }

private:
    static std::pair<double, double> reflected_range(const PowerPiece& p) {
        if (p.lo >= 0.0) return {p.lo, p.hi};
        return {-p.hi, -p.lo};
    }

    static PiecewisePowerFunction from_canonical(std::vector<PowerPiece> pieces) {
        PiecewisePowerFunction f;
        for (PowerPiece& p : pieces)
            if (p.coef != 0.0) f.pieces_.push_back(p);
        std::sort(f.pieces_.begin(), f.pieces_.end(),
                  [](const PowerPiece& a, const PowerPiece& b) { return a.lo < b.lo; });
        return f;
    }

    void append_split(const PowerPiece& p) {
        if (!(p.lo < p.hi)) throw std::invalid_argument("piece requires lo < hi: " + p.describe());
        if (p.coef == 0.0) return;
        if (p.lo < 0.0 && p.hi > 0.0) {
            if (p.expo < 0.0)
                throw std::invalid_argument(
                    "piece with negative exponent may not contain 0 in its interior: " +
                    p.describe());
            pieces_.push_back(PowerPiece{p.lo, 0.0, p.coef, p.expo});
            pieces_.push_back(PowerPiece{0.0, p.hi, p.coef, p.expo});
        } else {
            pieces_.push_back(p);
        }
    }

    void validate() const {
        for (std::size_t i = 1; i < pieces_.size(); ++i)
            if (pieces_[i].lo < pieces_[i - 1].hi)
                throw std::invalid_argument("pieces overlap: " + pieces_[i - 1].describe() +
                                            " and " + pieces_[i].describe());
    }

    std::vector<PowerPiece> pieces_;
};

} // namespace herzlab
