#pragma once

// The weight function phi, its derived quantities, and samplers that check
// the admissibility hypotheses: the log-slope band -a <= s (log phi)' <= -1,
// monotonicity of the log-slope, the near-zero growth bound
// phi(s) > alpha * s^(-k-eps) on (0, s0], and unboundedness of
// Phi(s) = int_0^s dtau / phi(tau).

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocmflow {

struct OrliczModel {
    enum class Kind { power, custom };
    Kind kind = Kind::power;

    // power kind: phi(s) = s^(1-p)
    double p = 2.0;

    // claimed band constant in -a <= s (log phi)' <= -1
    double a = 1.0;

    // growth-bound parameters: phi(s) > alpha * s^(-k-eps) for s in (0, s0].
    // epsilon is optional; when absent the checker picks max(p-k-1, 1e-6)
    // for the power family (the bound is tight at p = k+1) and 0.5 otherwise.
    double alpha = 0.5;
    std::optional<double> epsilon;
    double s0 = 1.0;

    // custom kind: phi plus optional closed forms
    std::function<double(double)> phi_fn;
    std::function<double(double)> phi_prime_fn;      // optional
    std::function<double(double)> antiderivative_fn; // optional closed-form Phi

    static OrliczModel power(double p_, std::optional<double> a_ = std::nullopt) {
        OrliczModel m;
        m.kind = Kind::power;
        m.p = p_;
        m.a = a_.value_or(std::max(1.0, p_ - 1.0));
        return m;
    }

    static OrliczModel custom(std::function<double(double)> phi,
                              std::function<double(double)> phi_prime = nullptr,
                              std::function<double(double)> antiderivative = nullptr) {
        OrliczModel m;
        m.kind = Kind::custom;
        m.phi_fn = std::move(phi);
        m.phi_prime_fn = std::move(phi_prime);
        m.antiderivative_fn = std::move(antiderivative);
        return m;
    }
};

inline double phi(const OrliczModel& m, double s) {
    if (!(s > 0.0)) throw std::domain_error("phi: s must be positive");
    if (m.kind == OrliczModel::Kind::power) return std::pow(s, 1.0 - m.p);
    return m.phi_fn(s);
}

inline double phi_prime(const OrliczModel& m, double s) {
    if (!(s > 0.0)) throw std::domain_error("phi_prime: s must be positive");
    if (m.kind == OrliczModel::Kind::power)
        return (1.0 - m.p) * std::pow(s, -m.p);
    if (m.phi_prime_fn) return m.phi_prime_fn(s);
    // five-point central difference on a relative step
    double d = s * 1e-3;
    return (-phi(m, s + 2 * d) + 8 * phi(m, s + d) - 8 * phi(m, s - d) + phi(m, s - 2 * d)) /
           (12 * d);
}

// g(s) = s phi'(s) / phi(s)
inline double log_slope(const OrliczModel& m, double s) {
    if (m.kind == OrliczModel::Kind::power) return 1.0 - m.p;
    return s * phi_prime(m, s) / phi(m, s);
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// rel_tol is relative to the first whole-interval estimate
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double rel_tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double tol = rel_tol * std::max(std::abs(whole), 1e-300);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 30);
}

}  // namespace detail

// Phi(s) = int_0^s dtau / phi(tau). Closed form for the power family;
// adaptive quadrature with dyadic subdivision toward 0 for custom models.
inline double phi_antiderivative(const OrliczModel& m, double s) {
    if (!(s > 0.0)) throw std::domain_error("phi_antiderivative: s must be positive");
    if (m.kind == OrliczModel::Kind::power) {
        if (m.p <= 0.0)
            throw std::domain_error("phi_antiderivative: divergent at 0 for p <= 0");
        return std::pow(s, m.p) / m.p;
    }
    if (m.antiderivative_fn) return m.antiderivative_fn(s);

    auto integrand = [&m](double t) { return 1.0 / phi(m, t); };

    // sampling check for integrability at 0: fit the log-log slope of 1/phi
    {
        double t1 = std::min(s, 1.0) * 1e-6, t2 = t1 * 16.0;
        double v1 = integrand(t1), v2 = integrand(t2);
        if (v1 > 0.0 && v2 > 0.0) {
            double slope = std::log(v2 / v1) / std::log(t2 / t1);
            if (slope <= -1.0)
                throw std::domain_error(
                    "phi_antiderivative: sampled 1/phi grows like t^" +
                    std::to_string(slope) + " near 0; integral diverges");
        }
    }

    // dyadic panels [s/2^(m+1), s/2^m] down to a negligible tail
    double total = 0.0;
    double hi = s;
    for (int it = 0; it < 60; ++it) {
        double lo = 0.5 * hi;
        double panel = detail::integrate_adaptive(integrand, lo, hi, 1e-12);
        total += panel;
        hi = lo;
        if (hi < 1e-14 * s || (it > 4 && panel < 1e-13 * std::max(total, 1e-300))) break;
    }
    return total;
}

// --- hypothesis checking ------------------------------------------------------

struct HypothesisClause {
    std::string name;
    bool pass = false;
    double witness_s = 0.0;
    double witness_value = 0.0;
    std::string note;
};

struct HypothesisReport {
    bool pass = false;
    std::vector<HypothesisClause> clauses;
    double sample_lo = 0.0, sample_hi = 0.0;
    int samples = 0;

    const HypothesisClause* find(const std::string& name) const {
        for (const auto& c : clauses)
            if (c.name == name) return &c;
        return nullptr;
    }
};

enum class HypothesisMode { thm1, thm2 };

// Samples g(s) = s (log phi)' on a logarithmic grid over [1e-4, 1e4] and
// checks, clause by clause: the band (-a <= g <= -1 for thm1, g <= -1 for
// thm2), monotonicity of g, the growth bound with (alpha, eps, s0), and
// unboundedness of Phi. Advisory: returns witnesses, never throws.
inline HypothesisReport check_hypotheses(const OrliczModel& m, int k, HypothesisMode mode,
                                         int samples = 240) {
    HypothesisReport rep;
    rep.sample_lo = 1e-4;
    rep.sample_hi = 1e4;
    rep.samples = std::max(samples, 200);

    std::vector<double> s(rep.samples), g(rep.samples);
    for (int i = 0; i < rep.samples; ++i) {
        double t = static_cast<double>(i) / (rep.samples - 1);
        s[i] = rep.sample_lo * std::pow(rep.sample_hi / rep.sample_lo, t);
        g[i] = log_slope(m, s[i]);
    }
    const double tol = 1e-9;

    {
        HypothesisClause c;
        c.name = "upper: g <= -1";
        c.pass = true;
        for (int i = 0; i < rep.samples; ++i)
            if (g[i] > -1.0 + tol) {
                c.pass = false;
                c.witness_s = s[i];
                c.witness_value = g[i];
                break;
            }
        rep.clauses.push_back(c);
    }
    if (mode == HypothesisMode::thm1) {
        HypothesisClause c;
        c.name = "lower: g >= -a";
        c.pass = true;
        for (int i = 0; i < rep.samples; ++i)
            if (g[i] < -m.a - tol) {
                c.pass = false;
                c.witness_s = s[i];
                c.witness_value = g[i];
                break;
            }
        c.note = "a = " + std::to_string(m.a);
        rep.clauses.push_back(c);
    }
    {
        HypothesisClause c;
        c.name = "monotone: g non-decreasing";
        c.pass = true;
        for (int i = 0; i + 1 < rep.samples; ++i) {
            double scale = std::max({1.0, std::abs(g[i]), std::abs(g[i + 1])});
            if (g[i + 1] < g[i] - 1e-7 * scale) {
                c.pass = false;
                c.witness_s = s[i + 1];
                c.witness_value = g[i + 1] - g[i];
                break;
            }
        }
        rep.clauses.push_back(c);
    }
    {
        // growth bound near zero: phi(s) > alpha s^(-k-eps) on (0, s0]
        HypothesisClause c;
        c.name = "growth: phi > alpha s^(-k-eps) on (0, s0]";
        c.pass = true;
        double eps = m.epsilon.value_or(
            m.kind == OrliczModel::Kind::power ? std::max(m.p - k - 1.0, 1e-6) : 0.5);
        c.note = "alpha = " + std::to_string(m.alpha) + ", eps = " + std::to_string(eps) +
                 ", s0 = " + std::to_string(m.s0);
        const int ns = 200;
        double lo = std::min(1e-6, m.s0 * 1e-4);
        for (int i = 0; i < ns; ++i) {
            double t = static_cast<double>(i) / (ns - 1);
            double si = lo * std::pow(m.s0 / lo, t);
            double bound = m.alpha * std::pow(si, -static_cast<double>(k) - eps);
            if (!(phi(m, si) > bound)) {
                c.pass = false;
                c.witness_s = si;
                c.witness_value = phi(m, si) - bound;
                break;
            }
        }
        rep.clauses.push_back(c);
    }
    {
        // unboundedness of Phi, by decade-increment extrapolation
        HypothesisClause c;
        c.name = "Phi unbounded at infinity";
        bool ok = true;
        double prev_inc = 0.0;
        double prev_val = 0.0;
        try {
            prev_val = phi_antiderivative(m, 1.0);
            for (int d = 1; d <= 4; ++d) {
                double v = phi_antiderivative(m, std::pow(10.0, d));
                double inc = v - prev_val;
                if (d >= 2 && inc < 0.5 * prev_inc) {
                    ok = false;  // increments shrinking: Phi looks bounded
                    c.witness_s = std::pow(10.0, d);
                    c.witness_value = inc;
                    break;
                }
                prev_inc = inc;
                prev_val = v;
            }
        } catch (const std::domain_error& e) {
            ok = false;
            c.note = e.what();
        }
        c.pass = ok;
        rep.clauses.push_back(c);
    }

    rep.pass = true;
    for (const auto& c : rep.clauses) rep.pass = rep.pass && c.pass;
    return rep;
}

}  // namespace ocmflow
