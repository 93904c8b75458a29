#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "herzlab/common.hpp"
#include "herzlab/fit.hpp"
#include "herzlab/grid.hpp"
#include "herzlab/norms.hpp"
#include "herzlab/riesz.hpp"

namespace herzlab {

// ---------------------------------------------------------------------------
// Trace parameters and hypothesis checking
// ---------------------------------------------------------------------------

struct TraceParams {
    int n = 1;
    double gamma = 0.25;
    double p1 = 2.0, p2 = 3.0;
    double q1 = 1.0, q2 = 2.0;
    std::optional<double> r1, r2;
    double lambda = 0.0;
    Measure mu = Measure::power_weight(0.75);

    double alpha_exponent() const { return double(n) / p1 - double(n) + lambda; }
    double delta_exponent() const { return double(n) / p1 - gamma + lambda; }
    // growth exponent of the trace measure condition mu(B) <= C m(B)^e
    double growth_exponent() const { return p2 * (1.0 / p1 - gamma / double(n)); }
};

enum class TheoremKind { MT, MT_LH, limiting };

struct Classification {
    bool admissible = true;
    std::vector<std::string> violated;
};

/// Evaluates each hypothesis of the requested trace theorem literally and
/// reports violations by name.
inline Classification classify_params(const TraceParams& pr, TheoremKind theorem) {
    Classification c;
    const auto require = [&](bool ok, const char* name) {
        if (!ok) {
            c.admissible = false;
            c.violated.push_back(name);
        }
    };
    const double n = double(pr.n);
    if (theorem == TheoremKind::limiting) {
        require(pr.p1 == pr.p2, "p1 = p2");
        require(pr.p1 > 1.0 && std::isfinite(pr.p1), "1 < p < inf");
    } else {
        require(pr.p1 > 1.0, "1 < p1");
        require(pr.p1 < pr.p2, "p1 < p2");
        require(std::isfinite(pr.p2), "p2 < inf");
    }
    require(pr.q1 >= 1.0, "1 <= q1");
    require(pr.q1 <= pr.q2, "q1 <= q2");
    require(std::isfinite(pr.q2), "q2 < inf");
    require(pr.gamma > 0.0, "0 < gamma");
    require(pr.gamma < n / pr.p1, "gamma < n/p1");
    require(pr.gamma - n / pr.p1 < pr.lambda, "gamma - n/p1 < lambda");
    require(pr.lambda < n - n / pr.p1, "lambda < n - n/p1");
    if (theorem == TheoremKind::MT_LH) {
        require(n * (1.0 / pr.p1 - 1.0 / pr.p2) <= pr.gamma, "n(1/p1 - 1/p2) <= gamma");
        require(pr.r1.has_value(), "r1 present");
        require(pr.r2.has_value(), "r2 present");
        if (pr.r1 && pr.r2) {
            const bool both_inf = std::isinf(*pr.r1) && std::isinf(*pr.r2);
            require(*pr.r1 >= 1.0, "1 <= r1");
            require(both_inf || *pr.r1 < *pr.r2, "r1 < r2 (or r1 = r2 = inf)");
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Annulus quadrature of pointwise integrands (potential targets)
// ---------------------------------------------------------------------------

namespace detail {

// Panel boundaries for one annulus side [L, 2L]: log-spaced, split at feature
// points (kinks of the integrand) with light geometric refinement toward them.
inline std::vector<double> annulus_panels(double L, double R, int n_panels,
                                          std::span<const double> features) {
    std::vector<double> bounds;
    for (int j = 0; j <= n_panels; ++j)
        bounds.push_back(L * std::pow(R / L, double(j) / n_panels));
    for (double c : features) {
        if (!(c > L && c < R)) continue;
        for (int k = 0; k <= 4; ++k) {
            const double w = (R - c) * std::ldexp(1.0, -k);
            if (c + w < R) bounds.push_back(c + w);
            const double wl = (c - L) * std::ldexp(1.0, -k);
            if (c - wl > L) bounds.push_back(c - wl);
        }
        bounds.push_back(c);
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    return bounds;
}

struct WeightedSamples {
    std::vector<double> values;  // |F| at nodes
    std::vector<double> weights; // quadrature weight x measure density
};

template <class F>
void annulus_side_samples(F&& eval, const Measure& mu, double L, double R, bool positive,
                          int n_panels, std::span<const double> features, WeightedSamples& out) {
    std::vector<double> local;
    for (double c : features) {
        const double a = std::abs(c);
        if ((c >= 0.0) == positive && a > L && a < R) local.push_back(a);
    }
    const auto bounds = annulus_panels(L, R, n_panels, local);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        const double mid = 0.5 * (bounds[i] + bounds[i + 1]);
        const double half = 0.5 * (bounds[i + 1] - bounds[i]);
        for (int g = 0; g < 4; ++g) {
            for (int s : {-1, 1}) {
                const double xr = mid + s * half * quad::kGL8X[g];
                const double w = half * quad::kGL8W[g] * mu.radial_density(xr);
                out.values.push_back(std::abs(eval(positive ? xr : -xr)));
                out.weights.push_back(w);
            }
        }
    }
}

template <class F>
WeightedSamples annulus_samples(F&& eval, const Measure& mu, int t, int nodes_per_side,
                                std::span<const double> features) {
    const double L = pow2(t - 1), R = pow2(t);
    const int n_panels = std::max(1, nodes_per_side / 8);
    WeightedSamples s;
    annulus_side_samples(eval, mu, L, R, true, n_panels, features, s);
    if (mu.kind() != MeasureKind::power_weight)
        annulus_side_samples(eval, mu, L, R, false, n_panels, features, s);
    return s;
}

inline double lp_of_samples(const WeightedSamples& s, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        acc += s.weights[i] * std::pow(s.values[i], p);
    return std::pow(acc, 1.0 / p);
}

// Lorentz (star) norm of the weighted-sample staircase: exact for the
// discrete measure sum w_i delta_{v_i}.
inline double lorentz_of_samples(WeightedSamples s, double p, double r) {
    std::vector<std::size_t> idx(s.values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return s.values[a] > s.values[b]; });
    if (std::isinf(r)) {
        double best = 0.0, W = 0.0;
        for (std::size_t i : idx) {
            W += s.weights[i];
            best = std::max(best, s.values[i] * std::pow(W, 1.0 / p));
        }
        return best;
    }
    double acc = 0.0, W = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        W += s.weights[idx[k]];
        const double hi = s.values[idx[k]];
        const double lo = (k + 1 < idx.size()) ? s.values[idx[k + 1]] : 0.0;
        acc += std::pow(W, r / p) * (std::pow(hi, r) - std::pow(lo, r));
    }
    return std::pow(acc * p / r, 1.0 / r);
}

} // namespace detail

struct TargetNormOptions {
    double p = 2.0;
    double q = 1.0;
    double lambda = 0.0;
    std::optional<double> lorentz_r; // inner Lorentz norm when set
    TruncationPolicy trunc{};
    int nodes_per_side = 64;
    bool doubling_check = true;
};

struct PotentialHerzResult {
    HerzResult herz;
    bool plus_decays = true;
    bool minus_decays = true;
    double quad_rel_err = 0.0;
};

/// Herz-type norm of a pointwise integrand (typically I_gamma f) over mu:
/// evaluates annulus terms by composite Gauss panels, extends the window
/// outward from the core until tails are geometric (or detected as
/// non-decaying), and finalizes with the same tail estimation as herz_sum.
inline PotentialHerzResult potential_herz_norm(const std::function<double(double)>& eval,
                                               const Measure& mu,
                                               const TargetNormOptions& opt,
                                               std::span<const double> features, int core_lo,
                                               int core_hi) {
    opt.trunc.validate();
    PotentialHerzResult res;
    const double q = opt.q;
    const bool sup_mode = std::isinf(q);

    core_lo = std::max(core_lo, opt.trunc.t_min);
    core_hi = std::min(core_hi, opt.trunc.t_max);

    std::map<int, double> terms;
    const auto inner_at = [&](int t) {
        const auto coarse = detail::annulus_samples(eval, mu, t, opt.nodes_per_side, features);
        double v_coarse, v;
        if (opt.lorentz_r) {
            v_coarse = detail::lorentz_of_samples(coarse, opt.p, *opt.lorentz_r);
            v = detail::lorentz_of_samples(
                detail::annulus_samples(eval, mu, t, 2 * opt.nodes_per_side, features), opt.p,
                *opt.lorentz_r);
        } else if (opt.doubling_check) {
            v_coarse = detail::lp_of_samples(coarse, opt.p);
            v = detail::lp_of_samples(
                detail::annulus_samples(eval, mu, t, 2 * opt.nodes_per_side, features), opt.p);
        } else {
            v = v_coarse = detail::lp_of_samples(coarse, opt.p);
        }
        if (v > 0.0)
            res.quad_rel_err = std::max(res.quad_rel_err, std::abs(v - v_coarse) / v);
        return v;
    };
    const auto term_at = [&](int t) { return pow2_lambda(t, opt.lambda) * inner_at(t); };

    for (int t = core_lo; t <= core_hi; ++t) terms[t] = term_at(t);

    // extend one side outward until the tail is resolvably geometric
    const auto extend = [&](int dir /*+1 or -1*/, bool& decays_out) {
        std::vector<double> outward;
        double sum_q = 0.0;
        for (const auto& [t, v] : terms)
            if (!sup_mode && v > 0.0) sum_q += std::pow(v, q);
        int t = (dir > 0) ? core_hi : core_lo;
        int grow_streak = 0;
        decays_out = true;
        while (true) {
            t += dir;
            if (t < opt.trunc.t_min || t > opt.trunc.t_max) return; // window edge: estimate later
            const double v = term_at(t);
            terms[t] = v;
            outward.push_back(v);
            if (!sup_mode && v > 0.0) sum_q += std::pow(v, q);
            const std::size_t n = outward.size();
            if (n >= 2 && outward[n - 1] >= outward[n - 2] && outward[n - 1] > 0.0) {
                if (++grow_streak >= 6 && n >= 12) {
                    decays_out = false;
                    return;
                }
            } else {
                grow_streak = 0;
            }
            if (n >= 5) {
                const double first = outward[n - 5], last = outward[n - 1];
                if (first > 0.0 && last > 0.0) {
                    const double rho = std::pow(last / first, 0.25);
                    if (rho < 0.99) {
                        const double tail_q =
                            sup_mode ? 0.0
                                     : std::pow(last, q) * std::pow(rho, q) /
                                           (1.0 - std::pow(rho, q));
                        if (sup_mode || tail_q <= 1e-3 * opt.trunc.tail_tolerance *
                                                        std::max(sum_q, 1e-300))
                            return;
                    }
                } else if (last == 0.0) {
                    return; // underflowed to zero: nothing further to resolve
                }
            }
        }
    };
    extend(+1, res.plus_decays);
    extend(-1, res.minus_decays);

    for (const auto& [t, v] : terms) res.herz.ledger.terms.push_back({t, v});

    // finalize exactly like herz_sum: geometric tails on both sides
    double sum_q = 0.0, sup_term = 0.0;
    for (const auto& [t, v] : terms) {
        if (sup_mode) sup_term = std::max(sup_term, v);
        else if (v > 0.0) sum_q += std::pow(v, q);
    }
    const int m = std::min<int>(8, int(res.herz.ledger.terms.size()));
    std::vector<double> out_lo, out_hi;
    for (int i = m - 1; i >= 0; --i) out_lo.push_back(res.herz.ledger.terms[i].value);
    for (int i = int(res.herz.ledger.terms.size()) - m; i < int(res.herz.ledger.terms.size()); ++i)
        out_hi.push_back(res.herz.ledger.terms[i].value);
    auto tail_lo = detail::geometric_side_tail(out_lo, q);
    auto tail_hi = detail::geometric_side_tail(out_hi, q);
    if (!res.minus_decays) tail_lo.decays = false;
    if (!res.plus_decays) tail_hi.decays = false;
    res.minus_decays = res.minus_decays && tail_lo.decays;
    res.plus_decays = res.plus_decays && tail_hi.decays;

    const bool decays = tail_lo.decays && tail_hi.decays;
    double value_trunc, value;
    if (sup_mode) {
        value_trunc = sup_term;
        value = decays ? std::max({sup_term, tail_lo.sup, tail_hi.sup}) : kInf;
    } else {
        value_trunc = std::pow(sum_q, 1.0 / q);
        value = decays ? std::pow(sum_q + tail_lo.tail_q + tail_hi.tail_q, 1.0 / q) : kInf;
    }
    if (!decays) {
        res.herz.value = value_trunc;
        res.herz.ledger.tail_estimate = kInf;
        res.herz.ledger.converged = false;
        return res;
    }
    res.herz.value = value;
    res.herz.ledger.tail_estimate = value - value_trunc;
    res.herz.ledger.converged = res.herz.ledger.tail_estimate <=
                                opt.trunc.tail_tolerance * std::max(value, 1e-300);
    return res;
}

// ---------------------------------------------------------------------------
// trace_ratio and friends
// ---------------------------------------------------------------------------

struct TraceOptions {
    NormFamily family = NormFamily::herz; // herz or lorentz_herz
    TruncationPolicy trunc{};
    int nodes_per_side = 64;
    bool doubling_check = true;
    double quad_tol = 1e-8;
    bool override_admissibility = false;
};

struct RatioRecord {
    double source = 0.0;
    double target = 0.0;
    double ratio = kNaN;
    bool ratio_defined = false;
    HerzTermLedger source_ledger, target_ledger;
    bool diverged = false; // a target tail fails to decay
    double quad_rel_err = 0.0;
    std::vector<std::string> flags;
};

namespace detail {

inline std::pair<int, int> core_annulus_window(const PiecewisePowerFunction& f,
                                               const TruncationPolicy& pol) {
    const double amin = f.support_abs_min();
    const double amax = f.support_abs_max();
    int hi = std::isfinite(amax) && amax > 0.0 ? int(std::ceil(std::log2(amax))) + 1
                                               : pol.t_max;
    int lo = (amin > 0.0) ? int(std::floor(std::log2(amin))) : hi - 4;
    lo = std::max(lo, pol.t_min);
    hi = std::min(hi, pol.t_max);
    if (lo > hi) lo = hi;
    return {lo, hi};
}

} // namespace detail

/// Target-over-source norm ratio for the trace inequality: source is the
/// exact Herz-type norm of f under Lebesgue measure, target the annulus
/// quadrature norm of I_gamma f under params.mu.
inline RatioRecord trace_ratio(const PiecewisePowerFunction& f, const TraceParams& params,
                               const TraceOptions& opt = {}) {
    if (params.n != 1) throw std::invalid_argument("trace_ratio: only n = 1 is implemented");
    const bool lorentz = opt.family == NormFamily::lorentz_herz;
    const auto cls = classify_params(params, lorentz ? TheoremKind::MT_LH : TheoremKind::MT);
    RatioRecord rec;
    if (!cls.admissible) {
        if (!opt.override_admissibility) {
            std::string msg = "trace_ratio: parameters violate:";
            for (const auto& v : cls.violated) msg += " [" + v + "]";
            throw std::invalid_argument(msg);
        }
        rec.flags.push_back("inadmissible_params");
    }

    const Measure m = Measure::lebesgue(1);
    HerzResult source;
    if (lorentz)
        source = lorentz_herz_norm(
            f, NormSpec::lorentz_herz(params.p1, params.r1.value_or(1.0), params.q1,
                                      params.lambda, m, opt.trunc));
    else
        source = herz_norm(f, NormSpec::herz(params.p1, params.q1, params.lambda, m, opt.trunc));
    rec.source = source.value;
    rec.source_ledger = source.ledger;

    if (rec.source == 0.0) {
        rec.flags.push_back("zero_over_zero");
        return rec; // ratio stays NaN: the 0/0 sentinel
    }

    const RieszParams rp(params.gamma, 1);
    const auto eval = [&, f](double x) { return riesz_potential_1d(f, rp, x, opt.quad_tol); };

    TargetNormOptions topt;
    topt.p = params.p2;
    topt.q = params.q2;
    topt.lambda = params.lambda;
    if (lorentz) topt.lorentz_r = params.r2.value_or(kInf);
    topt.trunc = opt.trunc;
    topt.nodes_per_side = opt.nodes_per_side;
    topt.doubling_check = opt.doubling_check;

    const auto [core_lo, core_hi] = detail::core_annulus_window(f, opt.trunc);
    const auto edges = f.edges();
    const auto target = potential_herz_norm(eval, params.mu, topt, edges, core_lo, core_hi);
    rec.target = target.herz.value;
    rec.target_ledger = target.herz.ledger;
    rec.quad_rel_err = target.quad_rel_err;
    rec.diverged = !(target.plus_decays && target.minus_decays);
    if (rec.diverged) rec.flags.push_back("diverged");
    if (std::isfinite(rec.target)) {
        rec.ratio = rec.target / rec.source;
        rec.ratio_defined = true;
    }
    return rec;
}

// ---------------------------------------------------------------------------
// necessity_check (converse direction, lambda = 0)
// ---------------------------------------------------------------------------

struct NecessityRow {
    Ball ball;
    double trace_ratio_value = kNaN;
    double raw_ratio = kNaN; // mu(B) / m(B)^{p2 (1/p1 - gamma/n)}
    bool diverged = false;
};

struct NecessityReport {
    double sup_trace_ratio = 0.0;
    double sup_raw_ratio = 0.0;
    std::vector<NecessityRow> rows;
};

inline NecessityReport necessity_check(const TraceParams& params, std::span<const double> radii,
                                       std::span<const double> centers,
                                       const TraceOptions& opt = {}) {
    if (params.lambda != 0.0)
        throw std::invalid_argument("necessity_check: requires lambda = 0");
    NecessityReport report;
    const Measure m = Measure::lebesgue(1);
    const double expo = params.growth_exponent();
    for (double c : centers) {
        for (double r : radii) {
            NecessityRow row;
            row.ball = Ball::at(c, r);
            row.raw_ratio = params.mu.ball_mass(row.ball) / std::pow(m.ball_mass(row.ball), expo);
            const auto f = PiecewisePowerFunction::indicator(c - r, c + r);
            const auto rec = trace_ratio(f, params, opt);
            row.trace_ratio_value = rec.ratio;
            row.diverged = rec.diverged;
            report.sup_raw_ratio = std::max(report.sup_raw_ratio, row.raw_ratio);
            if (rec.ratio_defined)
                report.sup_trace_ratio = std::max(report.sup_trace_ratio, rec.ratio);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// optimality_fk (the q1 <= q2 counterexample family)
// ---------------------------------------------------------------------------

struct RatioSeries {
    std::string family_label;
    std::vector<double> index;
    std::vector<double> source_norms, target_norms, ratios;
    std::vector<bool> diverged_flags;
};

struct OptimalityResult {
    RatioSeries series;
    ExponentFit source_fit, target_fit;
};

inline OptimalityResult optimality_fk(const TraceParams& params, int k_min, int k_max,
                                      const TraceOptions& opt_in = {}) {
    if (params.n != 1) throw std::invalid_argument("optimality_fk: requires n = 1");
    if (params.mu.kind() != MeasureKind::power_weight)
        throw std::invalid_argument("optimality_fk: mu must be the power-weight measure");
    const double beta_expected = params.growth_exponent();
    if (!(beta_expected <= 1.0) ||
        std::abs(params.mu.beta() - beta_expected) > 1e-9)
        throw std::invalid_argument(
            "optimality_fk: mu must have beta = p2 (1/p1 - gamma) <= 1");
    if (k_min > k_max) throw std::invalid_argument("optimality_fk: empty k range");

    TraceOptions opt = opt_in;
    opt.override_admissibility = true; // the family intentionally probes q1 > q2
    OptimalityResult out;
    out.series.family_label = "fk";
    for (int k = k_min; k <= k_max; ++k) {
        const auto fk = PiecewisePowerFunction::fk(k, params.lambda, params.p1);
        const auto rec = trace_ratio(fk, params, opt);
        out.series.index.push_back(double(k));
        out.series.source_norms.push_back(rec.source);
        out.series.target_norms.push_back(rec.target);
        out.series.ratios.push_back(rec.ratio);
        out.series.diverged_flags.push_back(rec.diverged);
    }
    out.source_fit = fit_loglog(out.series.index, out.series.source_norms);
    out.target_fit = fit_loglog(out.series.index, out.series.target_norms);
    return out;
}

// ---------------------------------------------------------------------------
// annulus_divergence (chi_{Omega_1} across a lambda grid)
// ---------------------------------------------------------------------------

struct DivergenceVerdict {
    double lambda = 0.0;
    bool converged = false; // both tails decay over the widest window
    double plus_slope = kNaN, minus_slope = kNaN;
    double predicted_plus = kNaN, predicted_minus = kNaN;
    HerzTermLedger ledger; // widest-window ledger
};

inline std::vector<DivergenceVerdict> annulus_divergence(const TraceParams& base,
                                                         std::span<const double> lambda_grid,
                                                         std::span<const int> window_growth,
                                                         const TraceOptions& opt_in = {}) {
    if (base.n != 1) throw std::invalid_argument("annulus_divergence: requires n = 1");
    if (window_growth.empty())
        throw std::invalid_argument("annulus_divergence: need at least one window width");
    std::vector<DivergenceVerdict> verdicts;
    const auto f = PiecewisePowerFunction::annulus_indicator(1);
    for (double lambda : lambda_grid) {
        TraceParams params = base;
        params.lambda = lambda;
        DivergenceVerdict v;
        v.lambda = lambda;
        v.predicted_plus = lambda - 1.0 + 1.0 / params.p1;
        v.predicted_minus = lambda + 1.0 / params.p1 - params.gamma;
        bool plus_dec = false, minus_dec = false;
        for (int w : window_growth) {
            TraceOptions opt = opt_in;
            opt.trunc.t_min = -w;
            opt.trunc.t_max = w;
            opt.override_admissibility = true;
            const auto rec = trace_ratio(f, params, opt);
            v.ledger = rec.target_ledger;
            plus_dec = minus_dec = !rec.diverged;
            // decay per side from the ledger itself
            try {
                v.plus_slope = tail_exponent(rec.target_ledger, LedgerSide::plus_infinity);
                v.minus_slope = tail_exponent(rec.target_ledger, LedgerSide::minus_infinity);
                plus_dec = v.plus_slope < -1e-3;
                minus_dec = v.minus_slope > 1e-3;
            } catch (const InsufficientDataError&) {
                // keep the record-level divergence flag
            }
        }
        v.converged = plus_dec && minus_dec;
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

// ---------------------------------------------------------------------------
// hls_ratio (fractional integration over Lebesgue measure, Lorentz-Herz)
// ---------------------------------------------------------------------------

inline RatioRecord hls_ratio(const PiecewisePowerFunction& f, const TraceParams& params_in,
                             const TraceOptions& opt_in = {}) {
    TraceParams params = params_in;
    if (!params.mu.is_lebesgue())
        throw std::invalid_argument("hls_ratio: the target measure must be Lebesgue");
    const double defect = 1.0 / params.p1 - 1.0 / params.p2 - params.gamma / double(params.n);
    if (std::abs(defect) > 1e-12)
        throw std::invalid_argument(
            "hls_ratio: requires the identity 1/p1 - 1/p2 = gamma/n (defect " +
            std::to_string(defect) + ")");
    TraceOptions opt = opt_in;
    opt.family = NormFamily::lorentz_herz;
    if (!params.r1) params.r1 = 1.0;
    if (!params.r2) params.r2 = 2.0;
    if (opt.nodes_per_side < 128) opt.nodes_per_side = 128; // staircase rearrangement
    return trace_ratio(f, params, opt);
}

// ---------------------------------------------------------------------------
// limiting case probe (p1 = p2, Lorentz-Herz source with r = 1)
// ---------------------------------------------------------------------------

struct LimitingProbeResult {
    RatioRecord base; // source r = 1
    std::vector<std::pair<double, RatioRecord>> exploratory; // r in (1, p)
};

inline LimitingProbeResult limiting_case_probe(const PiecewisePowerFunction& f,
                                               const TraceParams& params,
                                               std::span<const double> extra_r,
                                               const TraceOptions& opt_in = {}) {
    if (params.n != 1) throw std::invalid_argument("limiting_case_probe: requires n = 1");
    const auto cls = classify_params(params, TheoremKind::limiting);
    if (!cls.admissible) {
        std::string msg = "limiting_case_probe: parameters violate:";
        for (const auto& v : cls.violated) msg += " [" + v + "]";
        throw std::invalid_argument(msg);
    }
    const double p = params.p1;
    const double beta_expected = 1.0 - params.gamma * p / double(params.n);
    if (params.mu.kind() != MeasureKind::power_weight ||
        std::abs(params.mu.beta() - beta_expected) > 1e-9)
        throw std::invalid_argument(
            "limiting_case_probe: mu must have beta = 1 - gamma p / n");

    const Measure m = Measure::lebesgue(1);
    const RieszParams rp(params.gamma, 1);
    TraceOptions opt = opt_in;

    const auto run_with_r = [&](double r) {
        RatioRecord rec;
        const auto source = lorentz_herz_norm(
            f, NormSpec::lorentz_herz(p, r, params.q1, params.lambda, m, opt.trunc));
        rec.source = source.value;
        rec.source_ledger = source.ledger;
        if (rec.source == 0.0) {
            rec.flags.push_back("zero_over_zero");
            return rec;
        }
        const auto eval = [&, f](double x) { return riesz_potential_1d(f, rp, x, opt.quad_tol); };
        TargetNormOptions topt;
        topt.p = p;
        topt.q = params.q2;
        topt.lambda = params.lambda;
        topt.trunc = opt.trunc;
        topt.nodes_per_side = opt.nodes_per_side;
        topt.doubling_check = opt.doubling_check;
        const auto [core_lo, core_hi] = detail::core_annulus_window(f, opt.trunc);
        const auto edges = f.edges();
        const auto target = potential_herz_norm(eval, params.mu, topt, edges, core_lo, core_hi);
        rec.target = target.herz.value;
        rec.target_ledger = target.herz.ledger;
        rec.quad_rel_err = target.quad_rel_err;
        rec.diverged = !(target.plus_decays && target.minus_decays);
        if (rec.diverged) rec.flags.push_back("diverged");
        if (std::isfinite(rec.target)) {
            rec.ratio = rec.target / rec.source;
            rec.ratio_defined = true;
        }
        return rec;
    };

    LimitingProbeResult out;
    out.base = run_with_r(1.0);
    for (double r : extra_r) {
        if (!(r > 1.0 && r < p))
            throw std::invalid_argument("limiting_case_probe: exploratory r must lie in (1, p)");
        auto rec = run_with_r(r);
        rec.flags.push_back("exploratory");
        out.exploratory.emplace_back(r, std::move(rec));
    }
    return out;
}

} // namespace herzlab
