#pragma once

// Pointwise convex-geometric quantities of a support field: the principal
// radii matrix b = hess(h) + h*I, its eigenvalues, the normalized elementary
// symmetric function sigma_k (sigma_k(1,...,1) = 1), the radial function and
// the inverse-Gauss-map embedding X = grad(h) + h*x.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ocmflow/grid.hpp"

namespace ocmflow {

struct CurvatureBundle {
    SymMatrixField b;               // principal radii matrix per node
    std::vector<double> radii_lo;   // smaller eigenvalue per node
    std::vector<double> radii_hi;   // larger eigenvalue (== radii_lo for dim 1)
    ScalarField sigma_k;
    int k = 0;
    double min_radius = 0.0;        // global min of radii_lo
};

struct BodyGeometry {
    ScalarField h;
    ScalarField rho;                 // sqrt(h^2 + |grad h|^2)
    std::vector<double> embedding;   // X per node, n_nodes * (dim+1)
};

// e_k(radii) / C(n-1, k) for a list of principal radii
inline double sigma_k_value(const std::vector<double>& radii, int k) {
    const int n = static_cast<int>(radii.size());
    if (k < 1 || k > n) throw std::invalid_argument("sigma_k_value: need 1 <= k <= n-1");
    // elementary symmetric polynomial via the product expansion
    std::vector<double> e(static_cast<std::size_t>(n) + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(i + 1, k); j >= 1; --j) e[j] += radii[i] * e[j - 1];
    double binom = 1.0;
    for (int j = 1; j <= k; ++j) binom = binom * (n - j + 1) / j;
    return e[k] / binom;
}

// d(sigma_k)/d(b_ij) for the shipped sizes (1x1 and 2x2)
inline std::array<double, 3> sigma_k_gradient(double b11, double b12, double b22,
                                              int size, int k) {
    if (size == 1) {
        if (k != 1) throw std::invalid_argument("sigma_k_gradient: 1x1 needs k = 1");
        return {1.0, 0.0, 0.0};
    }
    if (size != 2) throw std::invalid_argument("sigma_k_gradient: size must be 1 or 2");
    if (k == 1) return {0.5, 0.0, 0.5};
    if (k == 2) return {b22, -b12, b11};  // cofactors
    throw std::invalid_argument("sigma_k_gradient: 2x2 needs k in {1, 2}");
}

inline void sym2_eigenvalues(double a11, double a12, double a22, double& lo, double& hi) {
    double mean = 0.5 * (a11 + a22);
    double d = std::hypot(0.5 * (a11 - a22), a12);
    lo = mean - d;
    hi = mean + d;
}

inline CurvatureBundle curvature_bundle(const ScalarField& h, int k) {
    const SphericalGrid& g = *h.grid;
    if (k < 1 || k > g.dim)
        throw std::invalid_argument("curvature_bundle: need 1 <= k <= n-1");
    CurvatureBundle out;
    out.k = k;
    out.b = g.covariant_hessian(h);
    const std::size_t n = g.n_nodes();
    out.radii_lo.resize(n);
    out.radii_hi.resize(n);
    out.sigma_k = ScalarField(h.grid);
    double min_r = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
        out.b.a11[i] += h.values[i];
        if (g.dim == 1) {
            double lam = out.b.a11[i];
            out.radii_lo[i] = lam;
            out.radii_hi[i] = lam;
            out.sigma_k.values[i] = lam;
        } else {
            out.b.a22[i] += h.values[i];
            double lo, hi;
            sym2_eigenvalues(out.b.a11[i], out.b.a12[i], out.b.a22[i], lo, hi);
            out.radii_lo[i] = lo;
            out.radii_hi[i] = hi;
            out.sigma_k.values[i] =
                (k == 1) ? 0.5 * (out.b.a11[i] + out.b.a22[i])
                         : out.b.a11[i] * out.b.a22[i] - out.b.a12[i] * out.b.a12[i];
        }
        if (first || out.radii_lo[i] < min_r) {
            min_r = out.radii_lo[i];
            first = false;
        }
    }
    out.min_radius = min_r;
    return out;
}

inline BodyGeometry body_geometry(const ScalarField& h) {
    const SphericalGrid& g = *h.grid;
    BodyGeometry out;
    out.h = h;
    out.rho = ScalarField(h.grid);
    const int ad = g.ambient_dim();
    out.embedding.assign(g.n_nodes() * static_cast<std::size_t>(ad), 0.0);
    VectorField grad = g.gradient(h);
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
        double g1 = grad.comp1[i];
        double g2 = (g.dim == 2) ? grad.comp2[i] : 0.0;
        out.rho.values[i] = std::sqrt(h.values[i] * h.values[i] + g1 * g1 + g2 * g2);
        for (int c = 0; c < ad; ++c) {
            double x = g.node_x[i * ad + c];
            double e1 = g.frame_e1[i * ad + c];
            double e2 = (g.dim == 2) ? g.frame_e2[i * ad + c] : 0.0;
            out.embedding[i * ad + c] = h.values[i] * x + g1 * e1 + g2 * e2;
        }
    }
    return out;
}

struct ConvexityMargin {
    double min_radius;
    double h_min;
    std::size_t min_radius_node;
    std::size_t h_min_node;
    bool strictly_convex() const { return min_radius > 0.0 && h_min > 0.0; }
};

inline ConvexityMargin convexity_margin(const CurvatureBundle& bundle,
                                        const ScalarField& h) {
    ConvexityMargin m{};
    m.min_radius = bundle.radii_lo.empty() ? 0.0 : bundle.radii_lo[0];
    m.h_min = h.values.empty() ? 0.0 : h.values[0];
    m.min_radius_node = 0;
    m.h_min_node = 0;
    for (std::size_t i = 0; i < bundle.radii_lo.size(); ++i)
        if (bundle.radii_lo[i] < m.min_radius) {
            m.min_radius = bundle.radii_lo[i];
            m.min_radius_node = i;
        }
    for (std::size_t i = 0; i < h.values.size(); ++i)
        if (h.values[i] < m.h_min) {
            m.h_min = h.values[i];
            m.h_min_node = i;
        }
    return m;
}

}  // namespace ocmflow
