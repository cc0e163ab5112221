#pragma once

// Independent, slow, brute-force reference computations used to cross-check
// the main pipeline on small instances: a disjoint spectral implementation of
// the circle flow, an axisymmetric 1-D reduction of the sphere curvature, a
// two-variable second-order automatic-differentiation type for exact partial
// derivatives of closed-form fields, and Richardson-style refinement studies.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocmflow/orlicz.hpp"

namespace ocmflow {

struct OracleReport {
    std::string name;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    std::string resolution;
    bool pass = false;
    double tolerance = 0.0;
};

// --- second-order two-variable jets -------------------------------------------
// value and derivatives up to second order in (theta, phi); arithmetic and the
// elementary functions propagate them exactly.

struct Jet2 {
    double v = 0, dt = 0, dp = 0, dtt = 0, dtp = 0, dpp = 0;

    static Jet2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }
    static Jet2 var_theta(double th) { return {th, 1, 0, 0, 0, 0}; }
    static Jet2 var_phi(double ph) { return {ph, 0, 1, 0, 0, 0}; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.dt + b.dt, a.dp + b.dp, a.dtt + b.dtt, a.dtp + b.dtp,
            a.dpp + b.dpp};
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.dt - b.dt, a.dp - b.dp, a.dtt - b.dtt, a.dtp - b.dtp,
            a.dpp - b.dpp};
}
inline Jet2 operator*(double c, const Jet2& a) {
    return {c * a.v, c * a.dt, c * a.dp, c * a.dtt, c * a.dtp, c * a.dpp};
}
inline Jet2 operator+(const Jet2& a, double c) { return a + Jet2::constant(c); }
inline Jet2 operator+(double c, const Jet2& a) { return a + Jet2::constant(c); }
inline Jet2 operator-(const Jet2& a, double c) { return a - Jet2::constant(c); }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v * b.v;
    r.dt = a.dt * b.v + a.v * b.dt;
    r.dp = a.dp * b.v + a.v * b.dp;
    r.dtt = a.dtt * b.v + 2 * a.dt * b.dt + a.v * b.dtt;
    r.dtp = a.dtp * b.v + a.dt * b.dp + a.dp * b.dt + a.v * b.dtp;
    r.dpp = a.dpp * b.v + 2 * a.dp * b.dp + a.v * b.dpp;
    return r;
}

// chain rule for a scalar function with derivatives (f, f', f'') at a.v
inline Jet2 jet_chain(const Jet2& a, double f, double f1, double f2) {
    Jet2 r;
    r.v = f;
    r.dt = f1 * a.dt;
    r.dp = f1 * a.dp;
    r.dtt = f2 * a.dt * a.dt + f1 * a.dtt;
    r.dtp = f2 * a.dt * a.dp + f1 * a.dtp;
    r.dpp = f2 * a.dp * a.dp + f1 * a.dpp;
    return r;
}

inline Jet2 sin(const Jet2& a) {
    return jet_chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}
inline Jet2 cos(const Jet2& a) {
    return jet_chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}
inline Jet2 sqrt(const Jet2& a) {
    double s = std::sqrt(a.v);
    return jet_chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 pow(const Jet2& a, double e) {
    double v = std::pow(a.v, e);
    return jet_chain(a, v, e * v / a.v, e * (e - 1.0) * v / (a.v * a.v));
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * pow(b, -1.0); }

// exact frame-covariant derivatives at one point from a jet-evaluable field
struct PointDerivatives {
    double value = 0;
    double grad1 = 0, grad2 = 0;       // (d/dtheta, (1/sin) d/dphi)
    double hess11 = 0, hess12 = 0, hess22 = 0;
};

template <typename Field>
inline PointDerivatives exact_derivatives(const Field& field, double theta, double phi) {
    Jet2 th = Jet2::var_theta(theta);
    Jet2 ph = Jet2::var_phi(phi);
    Jet2 u = field(th, ph);
    PointDerivatives d;
    double st = std::sin(theta), ct = std::cos(theta);
    double cot = ct / st;
    d.value = u.v;
    d.grad1 = u.dt;
    d.grad2 = u.dp / st;
    d.hess11 = u.dtt;
    d.hess12 = (u.dtp - cot * u.dp) / st;
    d.hess22 = u.dpp / (st * st) + cot * u.dt;
    return d;
}

// --- circle reference flow -----------------------------------------------------
// S^1 flow with spectral (complex DFT) derivatives and a tiny fixed step;
// implementation path disjoint from the grid machinery.

struct CircleFlowConfig {
    OrliczModel model;
    std::vector<double> f;   // per node; empty means f = 1
    double dt = 1e-4;
    double t_end = 1.0;
    double tol_stationary = 0.0;   // 0 disables early stopping
    int record_every = 1;
};

struct CircleTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool stationary = false;
};

namespace circle_detail {

// dense second-derivative matrix assembled from the DFT diagonalization
// F^-1 diag(-m^2) F; row-major n x n
inline std::vector<double> dft_second_derivative_matrix(int n) {
    std::vector<double> mat(static_cast<std::size_t>(n) * n, 0.0);
    const double w = 2.0 * pi / n;
    for (int j = 0; j < n; ++j) {
        double* row = mat.data() + static_cast<std::size_t>(j) * n;
        for (int l = 0; l < n; ++l) {
            std::complex<double> acc{0.0, 0.0};
            for (int m = 0; m < n; ++m) {
                int freq = (m <= n / 2) ? m : m - n;  // signed frequency
                double m2 = static_cast<double>(freq) * freq;
                acc -= m2 *
                       std::complex<double>(std::cos(w * m * (j - l)),
                                            std::sin(w * m * (j - l)));
            }
            row[l] = acc.real() / n;
        }
        double rowsum = 0.0;
        for (int l = 0; l < n; ++l) rowsum += row[l];
        row[j] -= rowsum;  // derivatives of constants vanish exactly
    }
    return mat;
}

}  // namespace circle_detail

// Explicit RK4 with a caller-chosen tiny fixed dt; dt must stay below the
// spectral stability limit, roughly 2.7 / (n/2)^2.
inline CircleTrajectory circle_reference_flow(const std::vector<double>& h0,
                                              const CircleFlowConfig& cfg) {
    const int n = static_cast<int>(h0.size());
    if (n < 256)
        throw std::invalid_argument("circle_reference_flow: need >= 256 nodes");
    std::vector<double> f = cfg.f.empty() ? std::vector<double>(n, 1.0) : cfg.f;
    const double w = 2.0 * pi / n;
    const std::vector<double> d2 = circle_detail::dft_second_derivative_matrix(n);

    auto rhs = [&](const std::vector<double>& h) {
        std::vector<double> b(n, 0.0);
        for (int j = 0; j < n; ++j) {
            const double* row = d2.data() + static_cast<std::size_t>(j) * n;
            double acc = 0.0;
            for (int l = 0; l < n; ++l) acc += row[l] * (h[l] - h[j]);
            b[j] = acc;
        }
        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            b[j] += h[j];  // sigma_1 on S^1
            if (!(h[j] > 0.0))
                throw std::domain_error("circle flow: h non-positive at node " +
                                        std::to_string(j));
            if (!(b[j] > 0.0))
                throw std::domain_error("circle flow: convexity lost at node " +
                                        std::to_string(j));
            num += w * h[j] * f[j] / phi(cfg.model, h[j]);
            den += w * h[j] * b[j];
        }
        double eta_t = num / den;
        std::vector<double> out(n);
        for (int j = 0; j < n; ++j)
            out[j] = b[j] * phi(cfg.model, h[j]) * h[j] * eta_t / f[j] - h[j];
        return out;
    };

    CircleTrajectory traj;
    std::vector<double> h = h0;
    double t = 0.0;
    traj.times.push_back(t);
    traj.states.push_back(h);
    long steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt));
    for (long s = 0; s < steps; ++s) {
        std::vector<double> k1 = rhs(h);
        if (cfg.tol_stationary > 0.0) {
            double sup_r = sup_abs(k1), sup_h = sup_abs(h);
            if (sup_r <= cfg.tol_stationary * sup_h) {
                traj.stationary = true;
                break;
            }
        }
        std::vector<double> tmp(n), k2, k3, k4;
        for (int j = 0; j < n; ++j) tmp[j] = h[j] + 0.5 * cfg.dt * k1[j];
        k2 = rhs(tmp);
        for (int j = 0; j < n; ++j) tmp[j] = h[j] + 0.5 * cfg.dt * k2[j];
        k3 = rhs(tmp);
        for (int j = 0; j < n; ++j) tmp[j] = h[j] + cfg.dt * k3[j];
        k4 = rhs(tmp);
        for (int j = 0; j < n; ++j)
            h[j] += cfg.dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        t += cfg.dt;
        if ((s + 1) % cfg.record_every == 0 || s + 1 == steps) {
            traj.times.push_back(t);
            traj.states.push_back(h);
        }
    }
    return traj;
}

// --- axisymmetric reduction -----------------------------------------------------
// For h = h(theta) the principal radii are (h_tt + h, cot(theta) h_t + h);
// derivatives on the caller's fine uniform theta grid by wide centered
// stencils with even reflection across the poles.

inline std::vector<double> axisymmetric_sigma_k(const std::vector<double>& h_samples,
                                                int k) {
    const int m = static_cast<int>(h_samples.size());
    if (m < 32) throw std::invalid_argument("axisymmetric_sigma_k: need >= 32 samples");
    const double dth = pi / m;  // theta_i = (i + 1/2) pi / m
    auto value = [&](int i) {
        // even reflection: h(-t) = h(t), h(pi + t) = h(pi - t)
        if (i < 0) i = -1 - i;
        if (i >= m) i = 2 * m - 1 - i;
        return h_samples[i];
    };
    // 9-point centered first/second derivative weights on a uniform grid
    static const double c1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    static const double c2[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};

    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) {
        double theta = (i + 0.5) * dth;
        double v0 = h_samples[i];
        double d1 = 0.0, d2 = 0.0;
        for (int s = 1; s <= 4; ++s) {
            d1 += c1[s - 1] * (value(i + s) - value(i - s));
            // c2_0 = -2 sum c2[s], so pairing against the center value keeps
            // constants exactly in the kernel
            d2 += c2[s - 1] * ((value(i + s) - v0) + (value(i - s) - v0));
        }
        d1 /= dth;
        d2 /= dth * dth;
        double lam1 = d2 + h_samples[i];
        double lam2 = (std::cos(theta) / std::sin(theta)) * d1 + h_samples[i];
        out[i] = (k == 1) ? 0.5 * (lam1 + lam2) : lam1 * lam2;
    }
    return out;
}

// 7-point Lagrange interpolation from the uniform axisymmetric grid
inline double interpolate_axisymmetric(const std::vector<double>& samples, double theta) {
    const int m = static_cast<int>(samples.size());
    const double dth = pi / m;
    double x = theta / dth - 0.5;
    int c = static_cast<int>(std::lround(x));
    int lo = c - 3;
    auto value = [&](int i) {
        if (i < 0) i = -1 - i;
        if (i >= m) i = 2 * m - 1 - i;
        return samples[i];
    };
    double acc = 0.0;
    for (int a = 0; a < 7; ++a) {
        double w = 1.0;
        for (int b = 0; b < 7; ++b) {
            if (a == b) continue;
            w *= (x - (lo + b)) / static_cast<double>(a - b);
        }
        acc += w * value(lo + a);
    }
    return acc;
}

// --- refinement studies ----------------------------------------------------------

struct RefinementResult {
    std::vector<double> resolutions;
    std::vector<double> errors;
    std::vector<double> orders;    // pairwise observed orders
    double mean_order = 0.0;
    bool monotone = true;          // errors strictly decreasing
    bool at_rounding_floor = false;
};

inline RefinementResult refinement_study(const std::function<double(int)>& error_at,
                                         const std::vector<int>& resolutions,
                                         double floor = 1e-13) {
    if (resolutions.size() < 3)
        throw std::invalid_argument("refinement_study: need >= 3 resolutions");
    RefinementResult out;
    for (int r : resolutions) {
        out.resolutions.push_back(r);
        out.errors.push_back(error_at(r));
    }
    out.at_rounding_floor = true;
    for (double e : out.errors)
        if (e > floor) out.at_rounding_floor = false;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < out.errors.size(); ++i) {
        if (out.errors[i + 1] >= out.errors[i]) out.monotone = false;
        double ord = std::log(out.errors[i] / out.errors[i + 1]) /
                     std::log(out.resolutions[i + 1] / out.resolutions[i]);
        out.orders.push_back(ord);
        acc += ord;
    }
    out.mean_order = acc / static_cast<double>(out.orders.size());
    return out;
}

// barycentric polynomial interpolation in mu = cos(theta) at arbitrary nodes;
// used to carry converged Gauss-Legendre solutions onto oracle grids
struct BarycentricInterpolant {
    std::vector<double> x, w, y;

    BarycentricInterpolant(std::vector<double> nodes, std::vector<double> values)
        : x(std::move(nodes)), y(std::move(values)) {
        const std::size_t n = x.size();
        w.assign(n, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                w[i] /= (x[i] - x[j]);
            }
    }

    double operator()(double xq) const {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = xq - x[i];
            if (d == 0.0) return y[i];
            double t = w[i] / d;
            num += t * y[i];
            den += t;
        }
        return num / den;
    }
};

}  // namespace ocmflow
