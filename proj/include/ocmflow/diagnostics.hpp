#pragma once

// Runtime monitors for the quantities the analysis controls: the conserved
// functional J = int Phi(h) f dx, the mixed volume V = int h sigma_k dx and
// its Holder gap, the stationary-equation residual c phi(h) sigma_k - f, the
// positivity condition on f, and the evolution identities for rho^2/2 and
// (for k = 1) the radii matrix b and its inverse.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ocmflow/calculus.hpp"
#include "ocmflow/convex_geometry.hpp"
#include "ocmflow/grid.hpp"
#include "ocmflow/orlicz.hpp"

namespace ocmflow {

struct DiagnosticsRecord {
    double t = 0, dt = 0;
    double J = 0, V = 0, eta = 0;
    double h_min = 0, h_max = 0, grad_h_max = 0;
    double rho_min = 0, rho_max = 0;
    double sigma_min = 0, sigma_max = 0;
    double min_radius = 0, kappa_max = 0;
    double residual_sup = 0, residual_l2 = 0;
    double holder_gap = 0;
};

inline double J_functional(const ScalarField& h, const ScalarField& f,
                           const OrliczModel& model) {
    ScalarField integrand(h.grid);
    for (std::size_t i = 0; i < h.size(); ++i)
        integrand.values[i] = phi_antiderivative(model, h.values[i]) * f.values[i];
    return integrate(integrand);
}

inline double V_functional(const ScalarField& h, int k) {
    CurvatureBundle cb = curvature_bundle(h, k);
    ScalarField integrand(h.grid);
    for (std::size_t i = 0; i < h.size(); ++i)
        integrand.values[i] = h.values[i] * cb.sigma_k.values[i];
    return integrate(integrand);
}

// eta(t) = int h f / phi(h) dx / int h sigma_k dx, with the denominator V
struct EtaParts {
    double numerator = 0;
    double denominator = 0;
    double value() const { return numerator / denominator; }
};

inline EtaParts eta_parts(const ScalarField& h, const ScalarField& f,
                          const OrliczModel& model, const ScalarField& sigma_k) {
    EtaParts out;
    const std::vector<double>& w = h.grid->weights;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double ph = phi(model, h.values[i]);
        out.numerator += w[i] * h.values[i] * f.values[i] / ph;
        out.denominator += w[i] * h.values[i] * sigma_k.values[i];
    }
    return out;
}

// (1/(k+1)) dV/dt as a Cauchy-Schwarz gap, divided by V; nonnegative up to
// quadrature rounding, zero exactly at solutions of c phi(h) sigma_k = f
inline double holder_gap(const ScalarField& h, const ScalarField& f,
                         const OrliczModel& model, int k) {
    CurvatureBundle cb = curvature_bundle(h, k);
    const std::vector<double>& w = h.grid->weights;
    double quad = 0, num = 0, V = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double ph = phi(model, h.values[i]);
        double s = cb.sigma_k.values[i];
        quad += w[i] * s * s * ph * h.values[i] / f.values[i];
        num += w[i] * h.values[i] * f.values[i] / ph;
        V += w[i] * h.values[i] * s;
    }
    return (quad * num - V * V) / V;
}

struct ResidualReport {
    double c_ls = 0;       // least-squares constant
    double c_eta = 0;      // eta at the same state
    double residual_sup = 0;
    double residual_l2 = 0;
};

inline ResidualReport residual(const ScalarField& h, const ScalarField& f,
                               const OrliczModel& model, int k) {
    CurvatureBundle cb = curvature_bundle(h, k);
    const std::vector<double>& w = h.grid->weights;
    double sf = 0, ss = 0, num = 0, V = 0;
    std::vector<double> phis(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        double ph = phi(model, h.values[i]);
        phis[i] = ph * cb.sigma_k.values[i];
        sf += w[i] * f.values[i] * phis[i];
        ss += w[i] * phis[i] * phis[i];
        num += w[i] * h.values[i] * f.values[i] / ph;
        V += w[i] * h.values[i] * cb.sigma_k.values[i];
    }
    ResidualReport rep;
    rep.c_ls = sf / ss;
    rep.c_eta = num / V;
    double l2 = 0, nf = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double r = rep.c_ls * phis[i] - f.values[i];
        rep.residual_sup = std::max(rep.residual_sup, std::abs(r) / f.values[i]);
        l2 += w[i] * r * r;
        nf += w[i] * f.values[i] * f.values[i];
    }
    rep.residual_l2 = std::sqrt(l2 / nf);
    return rep;
}

struct FConditionReport {
    double min_eigenvalue = 0;
    bool pass = false;
    std::size_t witness_node = 0;
};

// positivity of (k+1) f^(-1/(k+a)) I + (k+a) hess(f^(-1/(k+a)))
inline FConditionReport f_condition_check(const ScalarField& f, int k, double a) {
    ScalarField g(f.grid);
    double e = -1.0 / (k + a);
    for (std::size_t i = 0; i < f.size(); ++i) g.values[i] = std::pow(f.values[i], e);
    SymMatrixField hess = f.grid->covariant_hessian(g);
    FConditionReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        double m11 = (k + 1) * g.values[i] + (k + a) * hess.a11[i];
        double lo;
        if (f.grid->dim == 1) {
            lo = m11;
        } else {
            double m12 = (k + a) * hess.a12[i];
            double m22 = (k + 1) * g.values[i] + (k + a) * hess.a22[i];
            double hi;
            sym2_eigenvalues(m11, m12, m22, lo, hi);
        }
        if (lo < rep.min_eigenvalue) {
            rep.min_eigenvalue = lo;
            rep.witness_node = i;
        }
    }
    rep.pass = rep.min_eigenvalue > 0.0;
    return rep;
}

// one full monitor snapshot
inline DiagnosticsRecord make_record(const ScalarField& h, const ScalarField& f,
                                     const OrliczModel& model, int k, double t,
                                     double dt) {
    DiagnosticsRecord r;
    r.t = t;
    r.dt = dt;
    CurvatureBundle cb = curvature_bundle(h, k);
    BodyGeometry geo = body_geometry(h);
    VectorField grad = h.grid->gradient(h);
    const std::vector<double>& w = h.grid->weights;

    r.h_min = min_value(h.values);
    r.h_max = max_value(h.values);
    r.rho_min = min_value(geo.rho.values);
    r.rho_max = max_value(geo.rho.values);
    r.sigma_min = min_value(cb.sigma_k.values);
    r.sigma_max = max_value(cb.sigma_k.values);
    r.min_radius = cb.min_radius;
    r.kappa_max = cb.min_radius > 0 ? 1.0 / cb.min_radius
                                    : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h.size(); ++i) {
        double g1 = grad.comp1[i];
        double g2 = (h.grid->dim == 2) ? grad.comp2[i] : 0.0;
        r.grad_h_max = std::max(r.grad_h_max, std::sqrt(g1 * g1 + g2 * g2));
    }
    r.J = J_functional(h, f, model);

    double quad = 0, num = 0, V = 0, sf = 0, ss = 0;
    std::vector<double> phis(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        double ph = phi(model, h.values[i]);
        double s = cb.sigma_k.values[i];
        phis[i] = ph * s;
        quad += w[i] * s * s * ph * h.values[i] / f.values[i];
        num += w[i] * h.values[i] * f.values[i] / ph;
        V += w[i] * h.values[i] * s;
        sf += w[i] * f.values[i] * phis[i];
        ss += w[i] * phis[i] * phis[i];
    }
    r.V = V;
    r.eta = num / V;
    r.holder_gap = (quad * num - V * V) / V;
    double c_ls = sf / ss, l2 = 0, nf = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double res = c_ls * phis[i] - f.values[i];
        r.residual_sup = std::max(r.residual_sup, std::abs(res) / f.values[i]);
        l2 += w[i] * res * res;
        nf += w[i] * f.values[i] * f.values[i];
    }
    r.residual_l2 = std::sqrt(l2 / nf);
    return r;
}

// --- evolution identities -----------------------------------------------------
//
// Each check takes two consecutive accepted states h(t) and h(t+dt), forms the
// time derivative by the centered difference about t + dt/2, and evaluates all
// spatial terms at the averaged mid-state. The defect is O(dt + grid error).

namespace detail {

struct MidState {
    ScalarField h, N;
    CurvatureBundle cb;
    VectorField grad_h, grad_N;
    double eta;
};

inline MidState mid_state(const ScalarField& h0, const ScalarField& h1,
                          const ScalarField& f, const OrliczModel& model, int k) {
    MidState m;
    m.h = ScalarField(h0.grid);
    for (std::size_t i = 0; i < h0.size(); ++i)
        m.h.values[i] = 0.5 * (h0.values[i] + h1.values[i]);
    m.cb = curvature_bundle(m.h, k);
    m.N = ScalarField(h0.grid);
    for (std::size_t i = 0; i < h0.size(); ++i)
        m.N.values[i] = phi(model, m.h.values[i]) * m.h.values[i] / f.values[i];
    m.grad_h = h0.grid->gradient(m.h);
    m.grad_N = h0.grid->gradient(m.N);
    m.eta = eta_parts(m.h, f, model, m.cb.sigma_k).value();
    return m;
}

}  // namespace detail

// d/dt (rho^2/2) - N eta sigma_k^{ij} grad_ij (rho^2/2)
//   = (k+1) h N eta sigma_k - rho^2 + eta sigma_k grad h . grad N
//     - N eta sigma_k^{ij} b_mi b_mj
inline double identity_check_rho(const ScalarField& h0, const ScalarField& h1, double dt,
                                 const ScalarField& f, const OrliczModel& model, int k) {
    const SphericalGrid& g = *h0.grid;
    detail::MidState m = detail::mid_state(h0, h1, f, model, k);

    BodyGeometry g0 = body_geometry(h0);
    BodyGeometry g1 = body_geometry(h1);
    ScalarField half_rho2(h0.grid);
    BodyGeometry gm = body_geometry(m.h);
    for (std::size_t i = 0; i < h0.size(); ++i)
        half_rho2.values[i] = 0.5 * gm.rho.values[i] * gm.rho.values[i];
    SymMatrixField hess_r = g.covariant_hessian(half_rho2);

    double defect = 0.0;
    for (std::size_t i = 0; i < h0.size(); ++i) {
        double dt_rho = (0.5 * g1.rho.values[i] * g1.rho.values[i] -
                         0.5 * g0.rho.values[i] * g0.rho.values[i]) /
                        dt;
        double b11 = m.cb.b.a11[i], b12 = m.cb.b.a12[i], b22 = m.cb.b.a22[i];
        auto sg = sigma_k_gradient(b11, b12, b22, g.dim, k);
        double sig_hess_r, sig_bb, grad_dot;
        if (g.dim == 1) {
            sig_hess_r = sg[0] * hess_r.a11[i];
            sig_bb = sg[0] * b11 * b11;
            grad_dot = m.grad_h.comp1[i] * m.grad_N.comp1[i];
        } else {
            sig_hess_r = sg[0] * hess_r.a11[i] + 2.0 * sg[1] * hess_r.a12[i] +
                         sg[2] * hess_r.a22[i];
            // sigma^{ij} (b b)_{ij} with b symmetric
            double bb11 = b11 * b11 + b12 * b12;
            double bb12 = b12 * (b11 + b22);
            double bb22 = b22 * b22 + b12 * b12;
            sig_bb = sg[0] * bb11 + 2.0 * sg[1] * bb12 + sg[2] * bb22;
            grad_dot = m.grad_h.comp1[i] * m.grad_N.comp1[i] +
                       m.grad_h.comp2[i] * m.grad_N.comp2[i];
        }
        double sigma = m.cb.sigma_k.values[i];
        double N = m.N.values[i];
        double rho2 = gm.rho.values[i] * gm.rho.values[i];
        double lhs = dt_rho - N * m.eta * sig_hess_r;
        double rhs = (k + 1) * m.h.values[i] * N * m.eta * sigma - rho2 +
                     m.eta * sigma * grad_dot - N * m.eta * sig_bb;
        defect = std::max(defect, std::abs(lhs - rhs));
    }
    return defect;
}

// Evolution identity for b_ij, k = 1 only (the second-derivative term of
// sigma_1 vanishes). Returns the sup-norm defect over nodes and components.
inline double identity_check_b(const ScalarField& h0, const ScalarField& h1, double dt,
                               const ScalarField& f, const OrliczModel& model) {
    const SphericalGrid& g = *h0.grid;
    const int k = 1;
    detail::MidState m = detail::mid_state(h0, h1, f, model, k);

    CurvatureBundle cb0 = curvature_bundle(h0, k);
    CurvatureBundle cb1 = curvature_bundle(h1, k);
    TensorGradient tg = tensor_covariant_gradient(m.cb.b);
    TensorSecond ts = tensor_covariant_second(m.cb.b, tg);
    VectorField grad_sigma = g.gradient(m.cb.sigma_k);
    SymMatrixField hess_N = g.covariant_hessian(m.N);

    const int d = g.dim;
    double defect = 0.0;
    for (std::size_t n = 0; n < h0.size(); ++n) {
        double b[2][2] = {{m.cb.b.a11[n], d == 2 ? m.cb.b.a12[n] : 0.0},
                          {d == 2 ? m.cb.b.a12[n] : 0.0, d == 2 ? m.cb.b.a22[n] : 0.0}};
        auto sgv = sigma_k_gradient(b[0][0], b[0][1], b[1][1], d, k);
        double sg[2][2] = {{sgv[0], sgv[1]}, {sgv[1], sgv[2]}};
        double tr_sg = (d == 1) ? sg[0][0] : sg[0][0] + sg[1][1];
        double sigma = m.cb.sigma_k.values[n];
        double N = m.N.values[n];
        double eta = m.eta;
        double gs[2] = {grad_sigma.comp1[n], d == 2 ? grad_sigma.comp2[n] : 0.0};
        double gN[2] = {m.grad_N.comp1[n], d == 2 ? m.grad_N.comp2[n] : 0.0};
        double hN[2][2] = {{hess_N.a11[n], d == 2 ? hess_N.a12[n] : 0.0},
                           {d == 2 ? hess_N.a12[n] : 0.0, d == 2 ? hess_N.a22[n] : 0.0}};

        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double bt0 = (i == 0 && j == 0)   ? cb0.b.a11[n]
                             : (i == 1 && j == 1) ? cb0.b.a22[n]
                                                  : cb0.b.a12[n];
                double bt1 = (i == 0 && j == 0)   ? cb1.b.a11[n]
                             : (i == 1 && j == 1) ? cb1.b.a22[n]
                                                  : cb1.b.a12[n];
                double dt_b = (bt1 - bt0) / dt;

                double sig_hess_b = 0.0;
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q)
                        sig_hess_b += sg[p][q] * (d == 1 ? ts.at(0, 0, i, j, n)
                                                         : ts.at(p, q, i, j, n));
                double commut = 0.0;  // sigma^{ip} b_{jp} - sigma^{jp} b_{ip}
                for (int p = 0; p < d; ++p)
                    commut += sg[i][p] * b[j][p] - sg[j][p] * b[i][p];

                double lhs = dt_b - N * eta * sig_hess_b;
                double rhs = (k + 1) * N * eta * sigma * (i == j ? 1.0 : 0.0) -
                             N * eta * tr_sg * b[i][j] + N * eta * commut +
                             eta * (sigma * hN[i][j] + gs[j] * gN[i] + gs[i] * gN[j]) -
                             b[i][j];
                defect = std::max(defect, std::abs(lhs - rhs));
            }
    }
    return defect;
}

// Evolution identity for the inverse matrix b^{ij}, k = 1 only.
inline double identity_check_b_inverse(const ScalarField& h0, const ScalarField& h1,
                                       double dt, const ScalarField& f,
                                       const OrliczModel& model) {
    const SphericalGrid& g = *h0.grid;
    const int k = 1;
    const int d = g.dim;
    detail::MidState m = detail::mid_state(h0, h1, f, model, k);

    CurvatureBundle cb0 = curvature_bundle(h0, k);
    CurvatureBundle cb1 = curvature_bundle(h1, k);

    auto invert = [d](const SymMatrixField& b, std::size_t n, double inv[2][2]) {
        if (d == 1) {
            inv[0][0] = 1.0 / b.a11[n];
            inv[0][1] = inv[1][0] = inv[1][1] = 0.0;
        } else {
            double det = b.a11[n] * b.a22[n] - b.a12[n] * b.a12[n];
            inv[0][0] = b.a22[n] / det;
            inv[1][1] = b.a11[n] / det;
            inv[0][1] = inv[1][0] = -b.a12[n] / det;
        }
    };

    // inverse field of the mid state, as a symmetric matrix field
    SymMatrixField binv;
    binv.grid = h0.grid;
    binv.a11.assign(g.n_nodes(), 0.0);
    binv.a12.assign(g.n_nodes(), 0.0);
    binv.a22.assign(g.n_nodes(), 0.0);
    for (std::size_t n = 0; n < g.n_nodes(); ++n) {
        double inv[2][2];
        invert(m.cb.b, n, inv);
        binv.a11[n] = inv[0][0];
        if (d == 2) {
            binv.a12[n] = inv[0][1];
            binv.a22[n] = inv[1][1];
        }
    }

    TensorGradient tgb = tensor_covariant_gradient(m.cb.b);
    TensorGradient tgi = tensor_covariant_gradient(binv);
    TensorSecond tsi = tensor_covariant_second(binv, tgi);
    VectorField grad_sigma = g.gradient(m.cb.sigma_k);
    SymMatrixField hess_N = g.covariant_hessian(m.N);

    double defect = 0.0;
    for (std::size_t n = 0; n < g.n_nodes(); ++n) {
        double b[2][2] = {{m.cb.b.a11[n], d == 2 ? m.cb.b.a12[n] : 0.0},
                          {d == 2 ? m.cb.b.a12[n] : 0.0, d == 2 ? m.cb.b.a22[n] : 0.0}};
        double bi[2][2];
        invert(m.cb.b, n, bi);
        double bi0[2][2], bi1[2][2];
        invert(cb0.b, n, bi0);
        invert(cb1.b, n, bi1);

        auto sgv = sigma_k_gradient(b[0][0], b[0][1], b[1][1], d, k);
        double sg[2][2] = {{sgv[0], sgv[1]}, {sgv[1], sgv[2]}};
        double tr_sg = (d == 1) ? sg[0][0] : sg[0][0] + sg[1][1];
        double sigma = m.cb.sigma_k.values[n];
        double N = m.N.values[n];
        double eta = m.eta;
        double gs[2] = {grad_sigma.comp1[n], d == 2 ? grad_sigma.comp2[n] : 0.0};
        double gN[2] = {m.grad_N.comp1[n], d == 2 ? m.grad_N.comp2[n] : 0.0};
        double hN[2][2] = {{hess_N.a11[n], d == 2 ? hess_N.a12[n] : 0.0},
                           {d == 2 ? hess_N.a12[n] : 0.0, d == 2 ? hess_N.a22[n] : 0.0}};

        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double dt_bi = (bi1[i][j] - bi0[i][j]) / dt;

                double sig_hess = 0.0;
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q)
                        sig_hess += sg[p][q] * (d == 1 ? tsi.at(0, 0, i, j, n)
                                                       : tsi.at(p, q, i, j, n));

                double bibj = 0.0;  // b^{ip} b^{jp}
                for (int p = 0; p < d; ++p) bibj += bi[i][p] * bi[j][p];

                // b^{ip} b^{jq} (sigma^{rp} b_{rq} - sigma^{rq} b_{rp})
                double commut = 0.0;
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q) {
                        double inner = 0.0;
                        for (int r = 0; r < d; ++r)
                            inner += sg[r][p] * b[r][q] - sg[r][q] * b[r][p];
                        commut += bi[i][p] * bi[j][q] * inner;
                    }

                // b^{il} b^{js} (2 sigma^{pm} b^{nq}) nabla_l b_pq nabla_s b_mn
                double quad = 0.0;
                for (int l = 0; l < d; ++l)
                    for (int s = 0; s < d; ++s) {
                        double acc = 0.0;
                        for (int p = 0; p < d; ++p)
                            for (int q = 0; q < d; ++q)
                                for (int mm = 0; mm < d; ++mm)
                                    for (int nn = 0; nn < d; ++nn)
                                        acc += 2.0 * sg[p][mm] * bi[nn][q] *
                                               tgb.at(l, p, q, n) * tgb.at(s, mm, nn, n);
                        quad += bi[i][l] * bi[j][s] * acc;
                    }

                double grad_terms = 0.0;  // b^{ip} b^{jq} (sigma hess_N + grads)
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q)
                        grad_terms += bi[i][p] * bi[j][q] *
                                      (sigma * hN[p][q] + gs[q] * gN[p] + gs[p] * gN[q]);

                double lhs = dt_bi - N * eta * sig_hess;
                double rhs = -(k + 1) * N * eta * sigma * bibj +
                             N * eta * tr_sg * bi[i][j] - N * eta * commut -
                             N * eta * quad - eta * grad_terms + bi[i][j];
                defect = std::max(defect, std::abs(lhs - rhs));
            }
    }
    return defect;
}

}  // namespace ocmflow
