#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "herzlab/common.hpp"
#include "herzlab/measure.hpp"
#include "herzlab/piecewise.hpp"
#include "herzlab/quadrature.hpp"
#include "herzlab/rearrange.hpp"

namespace herzlab {

enum class NormFamily { lebesgue, lorentz, lorentz_maximal, herz, herz_inhomogeneous, lorentz_herz };
enum class LorentzVariant { star, double_star };

struct TruncationPolicy {
    int t_min = -60;
    int t_max = 60;
    double tail_tolerance = 1e-8;

    void validate() const {
        if (!(t_min < t_max)) throw std::invalid_argument("TruncationPolicy: t_min < t_max required");
    }
};

struct NormSpec {
    NormFamily family = NormFamily::lebesgue;
    double p = 2.0;
    std::optional<double> r;      // Lorentz secondary exponent, may be +inf
    std::optional<double> q;      // Herz outer exponent, may be +inf
    std::optional<double> lambda; // Herz weight exponent
    Measure measure = Measure::lebesgue(1);
    TruncationPolicy truncation;

    static NormSpec lp(double p, Measure nu) {
        NormSpec s;
        s.family = NormFamily::lebesgue;
        s.p = p;
        s.measure = std::move(nu);
        return s;
    }
    static NormSpec lorentz(double p, double r, Measure nu, bool maximal = false) {
        NormSpec s;
        s.family = maximal ? NormFamily::lorentz_maximal : NormFamily::lorentz;
        s.p = p;
        s.r = r;
        s.measure = std::move(nu);
        return s;
    }
    static NormSpec herz(double p, double q, double lambda, Measure nu,
                         TruncationPolicy pol = {}, bool inhomogeneous = false) {
        NormSpec s;
        s.family = inhomogeneous ? NormFamily::herz_inhomogeneous : NormFamily::herz;
        s.p = p;
        s.q = q;
        s.lambda = lambda;
        s.measure = std::move(nu);
        s.truncation = pol;
        return s;
    }
    static NormSpec lorentz_herz(double p, double r, double q, double lambda, Measure nu,
                                 TruncationPolicy pol = {}) {
        NormSpec s;
        s.family = NormFamily::lorentz_herz;
        s.p = p;
        s.r = r;
        s.q = q;
        s.lambda = lambda;
        s.measure = std::move(nu);
        s.truncation = pol;
        return s;
    }

    bool needs_r() const {
        return family == NormFamily::lorentz || family == NormFamily::lorentz_maximal ||
               family == NormFamily::lorentz_herz;
    }
    bool needs_q() const {
        return family == NormFamily::herz || family == NormFamily::herz_inhomogeneous ||
               family == NormFamily::lorentz_herz;
    }

    void validate() const {
        if (!(p > 1.0))
            throw std::invalid_argument("NormSpec: p must be > 1 (quasi-norm range p <= 1 is not supported)");
        if (needs_r() != r.has_value())
            throw std::invalid_argument(needs_r() ? "NormSpec: family requires r"
                                                  : "NormSpec: family does not take r");
        if (needs_q() != q.has_value())
            throw std::invalid_argument(needs_q() ? "NormSpec: family requires q"
                                                  : "NormSpec: family does not take q");
        if (needs_q() != lambda.has_value())
            throw std::invalid_argument(needs_q() ? "NormSpec: family requires lambda"
                                                  : "NormSpec: family does not take lambda");
        if (r && !(*r >= 1.0)) throw std::invalid_argument("NormSpec: r must be in [1, inf]");
        if (q && !(*q >= 1.0)) throw std::invalid_argument("NormSpec: q must be in [1, inf]");
        truncation.validate();
    }
};

// ---------------------------------------------------------------------------
// L^p
// ---------------------------------------------------------------------------

/// (int |f|^p dnu)^{1/p}, exact piecewise-power integration.
inline double lp_norm(const PiecewisePowerFunction& f, const Measure& nu, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    return std::pow(f.abs_power_integral(nu, p), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Lorentz
// ---------------------------------------------------------------------------

namespace detail {

// Integrate g over (lo*2^j, lo*2^{j+1}) panels until the contributions fall
// below tolerance; throws if they fail to decay (divergent tail).
template <class G>
double log_tail_integral(G&& g, double lo, double rel_tol, const char* what) {
    double acc = 0.0;
    double prev = kInf;
    int grow = 0;
    for (int j = 0; j < 2200; ++j) {
        const double a = lo * std::pow(2.0, j);
        const double b = 2.0 * a;
        const double panel = quad::adaptive(g, a, b, rel_tol * 0.25, rel_tol * 0.01 * acc);
        acc += panel;
        if (panel >= prev && panel > 0.0) {
            if (++grow >= 6) throw DivergenceError(std::string(what) + ": tail does not decay");
        } else {
            grow = 0;
        }
        prev = panel;
        if (j >= 3 && panel <= rel_tol * 0.01 * std::max(acc, 1e-300)) break;
        if (!std::isfinite(acc)) throw DivergenceError(std::string(what) + ": tail diverges");
    }
    return acc;
}

// max of g over [lo, hi] by coarse scan + golden refinement between the
// neighbours of the best scan node.
template <class G>
double scan_max(G&& g, double lo, double hi, bool log_spaced) {
    const int N = 96;
    std::vector<double> xs(N + 1);
    for (int i = 0; i <= N; ++i)
        xs[i] = log_spaced ? lo * std::pow(hi / lo, double(i) / N)
                           : lo + (hi - lo) * double(i) / N;
    double best = -kInf;
    int best_i = 0;
    for (int i = 0; i <= N; ++i) {
        const double v = g(xs[i]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    double a = xs[std::max(0, best_i - 1)];
    double b = xs[std::min(N, best_i + 1)];
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 80 && b - a > 1e-14 * (std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = g(x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

} // namespace detail

/// Lorentz functional over (R, nu): star integrates t^{1/p} f*(t), double_star
/// integrates t^{1/p} f**(t); r = inf takes the sup over the profile.
///
/// The star/r<inf case uses the level-space form p*int s^{r-1} d(s)^{r/p} ds
/// with the exact distribution function, integrating between its breakpoint
/// levels.
inline double lorentz_norm(const PiecewisePowerFunction& f, const Measure& nu, double p, double r,
                           LorentzVariant variant = LorentzVariant::star) {
    if (variant == LorentzVariant::star) {
        if (!(p >= 1.0)) throw std::invalid_argument("lorentz_norm: p must be >= 1");
    } else if (!(p > 1.0)) {
        throw std::invalid_argument("lorentz_norm: double_star requires p > 1");
    }
    if (!(r >= 1.0)) throw std::invalid_argument("lorentz_norm: r must be in [1, inf]");
    if (f.empty()) return 0.0;

    // factor out the level scale so that f and c*f run through identical
    // quadratures (keeps homogeneity exact to rounding)
    {
        double scale = 0.0;
        for (double v : f.level_candidates()) scale = std::max(scale, v);
        if (std::isfinite(scale) && scale > 0.0 && std::abs(scale - 1.0) > 1e-6)
            return scale * lorentz_norm(f.scaled(1.0 / scale), nu, p, r, variant);
    }

    const auto dist = [&](double s) { return f.superlevel_mass(nu, s); };
    const double sup = f.sup_abs();

    if (variant == LorentzVariant::star) {
        std::vector<double> levels = f.level_candidates(); // sorted, starts at 0
        if (std::isinf(r)) {
            double best = 0.0;
            const auto g = [&](double s) {
                const double d = dist(s);
                return std::isfinite(d) ? s * std::pow(d, 1.0 / p) : kInf;
            };
            for (std::size_t i = 1; i < levels.size(); ++i) {
                const double lo = std::max(levels[i - 1], levels[i] * 1e-18);
                best = std::max(best, detail::scan_max(g, lo, levels[i] * (1.0 - 1e-15), true));
                best = std::max(best, g(levels[i] * (1.0 - 1e-15)));
            }
            if (!std::isfinite(sup)) {
                // scan the unbounded level range until s d(s)^{1/p} decays
                double s = levels.back() > 0.0 ? levels.back() : 1.0;
                double prev = kInf;
                int grow = 0;
                for (int j = 0; j < 2000; ++j, s *= 2.0) {
                    const double v = g(2.0 * s);
                    best = std::max(best, detail::scan_max(g, s, 2.0 * s, true));
                    if (v >= prev) {
                        if (++grow >= 8)
                            throw DivergenceError("lorentz_norm: sup t^{1/p} f* is infinite");
                    } else {
                        grow = 0;
                    }
                    prev = v;
                    if (j > 4 && v < best * 1e-6) break;
                }
            }
            if (!std::isfinite(best)) throw DivergenceError("lorentz_norm: infinite weak norm");
            return best;
        }
        // r < inf
        const auto integrand = [&](double s) {
            const double d = dist(s);
            return std::pow(s, r - 1.0) * std::pow(d, r / p);
        };
        if (!std::isfinite(dist(levels.size() > 1 ? levels[1] * 0.5 : 1.0)))
            throw DivergenceError("lorentz_norm: distribution function is infinite");
        double acc = 0.0;
        for (std::size_t i = 1; i < levels.size(); ++i)
            acc += quad::graded(integrand, levels[i - 1], levels[i], true, true, 1e-11);
        if (!std::isfinite(sup))
            acc += detail::log_tail_integral(integrand, levels.back() > 0.0 ? levels.back() : 1.0,
                                             1e-11, "lorentz_norm");
        if (!std::isfinite(acc)) throw DivergenceError("lorentz_norm: integral diverges");
        return std::pow(p * acc, 1.0 / r);
    }

    // double_star
    const auto fss = [&](double t) { return maximal_average(f, nu, t); };
    const double support_mass = dist(0.0);
    if (!std::isfinite(support_mass))
        throw DivergenceError("lorentz_norm: support has infinite measure (f** tail diverges)");
    const double l1 = f.abs().abs_power_integral(nu, 1.0);

    if (std::isinf(r)) {
        const auto g = [&](double t) { return std::pow(t, 1.0 / p) * fss(t); };
        double best = detail::scan_max(g, support_mass * 1e-12, support_mass, true);
        // beyond the support mass f**(t) = ||f||_1 / t exactly
        best = std::max(best, std::pow(support_mass, 1.0 / p - 1.0) * l1);
        // t^{1/p-1} decreases, so the sup over (support_mass, inf) sits at the left end
        return best;
    }
    const auto integrand = [&](double t) { return std::pow(t, r / p - 1.0) * std::pow(fss(t), r); };
    // breakpoints of f* in t: distribution values at the breakpoint levels
    std::vector<double> tbreaks;
    for (double s : f.level_candidates()) {
        for (double probe : {s * (1.0 - 1e-12), s * (1.0 + 1e-12), s}) {
            if (probe <= 0.0) continue;
            const double d = dist(probe);
            if (std::isfinite(d) && d > 0.0 && d < support_mass) tbreaks.push_back(d);
        }
    }
    tbreaks.push_back(support_mass);
    std::sort(tbreaks.begin(), tbreaks.end());
    tbreaks.erase(std::unique(tbreaks.begin(), tbreaks.end()), tbreaks.end());

    double acc = 0.0;
    double lo = 0.0;
    for (double hi : tbreaks) {
        acc += quad::graded(integrand, lo, hi, true, true, 1e-9);
        lo = hi;
    }
    // closed-form tail: f**(t) = ||f||_1 / t for t >= nu(supp f)
    const double tail_expo = r / p - r; // < 0 since p > 1
    acc += std::pow(l1, r) * std::pow(support_mass, tail_expo) / (-tail_expo);
    if (!std::isfinite(acc)) throw DivergenceError("lorentz_norm: f** integral diverges");
    return std::pow(acc, 1.0 / r);
}

// ---------------------------------------------------------------------------
// Herz sums
// ---------------------------------------------------------------------------

struct HerzTerm {
    int t;
    double value; // 2^{t lambda} * inner norm
};

struct HerzTermLedger {
    std::vector<HerzTerm> terms; // ascending t; only annuli actually evaluated
    double tail_estimate = 0.0;  // value-level contribution added for the clipped tails
    bool converged = true;

    double term_at(int t) const {
        for (const HerzTerm& h : terms)
            if (h.t == t) return h.value;
        return 0.0;
    }
};

struct HerzResult {
    double value = 0.0;
    HerzTermLedger ledger;
};

enum class LedgerSide { plus_infinity, minus_infinity };

/// Least-squares slope of log2(term) against t over the outermost five
/// nonzero terms of the requested side.
inline double tail_exponent(const HerzTermLedger& ledger, LedgerSide side) {
    std::vector<const HerzTerm*> nonzero;
    for (const HerzTerm& h : ledger.terms)
        if (h.value > 0.0) nonzero.push_back(&h);
    if (nonzero.size() < 4)
        throw InsufficientDataError("tail_exponent: need at least 4 nonzero terms");
    const std::size_t n = std::min<std::size_t>(5, nonzero.size());
    std::vector<const HerzTerm*> sel;
    if (side == LedgerSide::plus_infinity)
        sel.assign(nonzero.end() - n, nonzero.end());
    else
        sel.assign(nonzero.begin(), nonzero.begin() + n);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const HerzTerm* h : sel) {
        const double x = h->t, y = std::log2(h->value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = double(sel.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace detail {

struct SideTail {
    double tail_q = 0.0;  // addition to the sum of term^q
    double sup = 0.0;     // supremum of the extrapolated tail terms (q = inf)
    bool decays = true;
};

inline SideTail geometric_side_tail(const std::vector<double>& outward_terms, double q) {
    SideTail tail;
    std::vector<double> nz;
    for (double v : outward_terms)
        if (v > 0.0) nz.push_back(v);
    if (nz.size() < 2) return tail; // nothing to extrapolate
    const std::size_t n = std::min<std::size_t>(5, nz.size());
    const double first = nz[nz.size() - n];
    const double last = nz.back();
    const double rho = std::pow(last / first, 1.0 / double(n - 1));
    if (!(rho < 1.0 - 1e-9)) {
        tail.decays = false;
        tail.tail_q = kInf;
        tail.sup = kInf;
        return tail;
    }
    if (std::isinf(q)) {
        tail.sup = last * rho;
        return tail;
    }
    const double rq = std::pow(rho, q);
    tail.tail_q = std::pow(last, q) * rq / (1.0 - rq);
    return tail;
}

} // namespace detail

inline double pow2_lambda(int t, double lambda) { return std::pow(2.0, double(t) * lambda); }

/// Evaluates (sum over the window of (2^{t lambda} inner(t))^q)^{1/q} with
/// geometric tail estimation on any side whose window was clipped.
///
/// inner(t) must return the inner norm of f restricted to Omega_t.
/// exact_lo/exact_hi say that all terms outside [lo, hi] vanish identically.
template <class InnerFn>
HerzResult herz_sum(InnerFn&& inner, double lambda, double q, const TruncationPolicy& pol,
                    std::optional<int> exact_lo, std::optional<int> exact_hi) {
    pol.validate();
    const bool sup_mode = std::isinf(q);
    HerzResult res;

    const int lo = exact_lo ? std::max(*exact_lo, pol.t_min) : pol.t_min;
    const int hi = exact_hi ? std::min(*exact_hi, pol.t_max) : pol.t_max;
    const bool clipped_lo = !exact_lo || *exact_lo < pol.t_min;
    const bool clipped_hi = !exact_hi || *exact_hi > pol.t_max;

    double sum_q = 0.0;
    double sup_term = 0.0;
    for (int t = lo; t <= hi; ++t) {
        const double in = inner(t);
        const double term = pow2_lambda(t, lambda) * in;
        res.ledger.terms.push_back({t, term});
        if (sup_mode) sup_term = std::max(sup_term, term);
        else if (term > 0.0) sum_q += std::pow(term, q);
    }

    double tail_q = 0.0, tail_sup = 0.0;
    bool decays = true;
    if (clipped_lo) {
        std::vector<double> outward; // toward t -> -inf
        const int m = std::min<int>(8, int(res.ledger.terms.size()));
        for (int i = m - 1; i >= 0; --i) outward.push_back(res.ledger.terms[i].value);
        const auto side = detail::geometric_side_tail(outward, q);
        decays = decays && side.decays;
        tail_q += side.tail_q;
        tail_sup = std::max(tail_sup, side.sup);
    }
    if (clipped_hi) {
        std::vector<double> outward; // toward t -> +inf
        const int m = std::min<int>(8, int(res.ledger.terms.size()));
        for (int i = int(res.ledger.terms.size()) - m; i < int(res.ledger.terms.size()); ++i)
            outward.push_back(res.ledger.terms[i].value);
        const auto side = detail::geometric_side_tail(outward, q);
        decays = decays && side.decays;
        tail_q += side.tail_q;
        tail_sup = std::max(tail_sup, side.sup);
    }

    double value_trunc, value;
    if (sup_mode) {
        value_trunc = sup_term;
        value = decays ? std::max(sup_term, tail_sup) : kInf;
    } else {
        value_trunc = std::pow(sum_q, 1.0 / q);
        value = decays ? std::pow(sum_q + tail_q, 1.0 / q) : kInf;
    }
    if (!decays) {
        res.value = value_trunc; // report the truncated sum; caller reads converged
        res.ledger.tail_estimate = kInf;
        res.ledger.converged = false;
        return res;
    }
    res.value = value;
    res.ledger.tail_estimate = value - value_trunc;
    res.ledger.converged =
        res.ledger.tail_estimate <= pol.tail_tolerance * std::max(value, 1e-300);
    return res;
}

namespace detail {

inline std::optional<int> support_annulus_lo(const PiecewisePowerFunction& f) {
    const double amin = f.support_abs_min();
    if (!(amin > 0.0)) return std::nullopt;
    return int(std::floor(std::log2(amin))) + 1;
}

inline std::optional<int> support_annulus_hi(const PiecewisePowerFunction& f) {
    const double amax = f.support_abs_max();
    if (!std::isfinite(amax)) return std::nullopt;
    if (amax <= 0.0) return 0;
    return int(std::ceil(std::log2(amax)));
}

} // namespace detail

/// Homogeneous / inhomogeneous Herz norm of an exact piecewise function.
inline HerzResult herz_norm(const PiecewisePowerFunction& f, const NormSpec& spec) {
    spec.validate();
    if (spec.family != NormFamily::herz && spec.family != NormFamily::herz_inhomogeneous)
        throw std::invalid_argument("herz_norm: spec family must be herz or herz_inhomogeneous");
    const double lambda = *spec.lambda, q = *spec.q;
    const auto inner = [&](int t) {
        return lp_norm(f.restricted_to_annulus(t), spec.measure, spec.p);
    };
    if (f.empty()) return HerzResult{};

    if (spec.family == NormFamily::herz)
        return herz_sum(inner, lambda, q, spec.truncation, detail::support_annulus_lo(f),
                        detail::support_annulus_hi(f));

    // inhomogeneous: all annuli t <= -1 merge into the ball B(0, 1/2) term
    const double ball_inner = lp_norm(f.restricted_to_ball(0.5), spec.measure, spec.p);
    const double ball_term = pow2_lambda(-1, lambda) * ball_inner;
    auto lo = detail::support_annulus_lo(f);
    auto hi = detail::support_annulus_hi(f);
    TruncationPolicy pol = spec.truncation;
    pol.t_min = 0;
    HerzResult body = herz_sum(inner, lambda, q, pol, lo ? std::max(*lo, 0) : 0, hi);
    HerzResult res;
    res.ledger.terms.push_back({-1, ball_term});
    res.ledger.terms.insert(res.ledger.terms.end(), body.ledger.terms.begin(),
                            body.ledger.terms.end());
    res.ledger.tail_estimate = body.ledger.tail_estimate;
    res.ledger.converged = body.ledger.converged;
    if (std::isinf(q)) {
        res.value = std::max(ball_term, body.value);
    } else {
        res.value = std::pow(std::pow(ball_term, q) + std::pow(body.value, q), 1.0 / q);
    }
    return res;
}

/// Herz structure with the inner L^p replaced by the Lorentz (star) norm.
inline HerzResult lorentz_herz_norm(const PiecewisePowerFunction& f, const NormSpec& spec) {
    spec.validate();
    if (spec.family != NormFamily::lorentz_herz)
        throw std::invalid_argument("lorentz_herz_norm: spec family must be lorentz_herz");
    if (f.empty()) return HerzResult{};
    const auto inner = [&](int t) {
        return lorentz_norm(f.restricted_to_annulus(t), spec.measure, spec.p, *spec.r,
                            LorentzVariant::star);
    };
    return herz_sum(inner, *spec.lambda, *spec.q, spec.truncation, detail::support_annulus_lo(f),
                    detail::support_annulus_hi(f));
}

/// Evaluate whichever norm the spec names.
inline double norm_value(const PiecewisePowerFunction& f, const NormSpec& spec) {
    spec.validate();
    switch (spec.family) {
    case NormFamily::lebesgue:
        return lp_norm(f, spec.measure, spec.p);
    case NormFamily::lorentz:
        return lorentz_norm(f, spec.measure, spec.p, *spec.r, LorentzVariant::star);
    case NormFamily::lorentz_maximal:
        return lorentz_norm(f, spec.measure, spec.p, *spec.r, LorentzVariant::double_star);
    case NormFamily::herz:
    case NormFamily::herz_inhomogeneous:
        return herz_norm(f, spec).value;
    case NormFamily::lorentz_herz:
        return lorentz_herz_norm(f, spec).value;
    }
    throw std::logic_error("norm_value: unknown family");
}

inline void write_ledger_csv(const HerzTermLedger& ledger, double q, std::ostream& os) {
    os << "t,term,cumulative\n";
    double cum = 0.0;
    for (const HerzTerm& h : ledger.terms) {
        if (std::isinf(q)) cum = std::max(cum, h.value);
        else cum = std::pow(std::pow(cum, q) + std::pow(h.value, q), 1.0 / q);
        os << h.t << "," << h.value << "," << cum << "\n";
    }
}

} // namespace herzlab
