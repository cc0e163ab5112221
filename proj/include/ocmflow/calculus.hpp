#pragma once

// Covariant derivatives of symmetric 2-tensor fields in the fixed orthonormal
// frame (e1 = d/dtheta, e2 = (1/sin theta) d/dphi). The only nonzero
// connection coefficients on the sphere are
//   nabla_{e2} e1 =  cot(theta) e2,
//   nabla_{e2} e2 = -cot(theta) e1.
// Tensor components reflected across a pole pick up a sign (-1)^rank from the
// frame continuation, which is what the parity argument of theta_derivative
// encodes: even for scalars and 2-tensors, odd for 1- and 3-tensors.

#include <array>
#include <cstddef>

#include "ocmflow/grid.hpp"

namespace ocmflow {

// (nabla_a b)_{ij}, stored as one symmetric matrix field per frame direction
struct TensorGradient {
    SymMatrixField c1, c2;

    double at(int a, int i, int j, std::size_t node) const {
        const SymMatrixField& c = (a == 0) ? c1 : c2;
        if (i == 0 && j == 0) return c.a11[node];
        if (i == 1 && j == 1) return c.a22[node];
        return c.a12[node];
    }
};

inline TensorGradient tensor_covariant_gradient(const SymMatrixField& b) {
    const SphericalGrid& g = *b.grid;
    TensorGradient out;
    out.c1.grid = b.grid;
    out.c2.grid = b.grid;
    if (g.dim == 1) {
        out.c1.a11 = g.theta_derivative(b.a11, 1);
        out.c1.a12.assign(g.n_nodes(), 0.0);
        out.c1.a22.assign(g.n_nodes(), 0.0);
        out.c2 = out.c1;
        out.c2.a11.assign(g.n_nodes(), 0.0);
        return out;
    }
    out.c1.a11 = g.theta_derivative(b.a11, 1, +1.0);
    out.c1.a12 = g.theta_derivative(b.a12, 1, +1.0);
    out.c1.a22 = g.theta_derivative(b.a22, 1, +1.0);

    std::vector<double> dphi11 = g.lon_derivative(b.a11, 1);
    std::vector<double> dphi12 = g.lon_derivative(b.a12, 1);
    std::vector<double> dphi22 = g.lon_derivative(b.a22, 1);
    out.c2.a11.assign(g.n_nodes(), 0.0);
    out.c2.a12.assign(g.n_nodes(), 0.0);
    out.c2.a22.assign(g.n_nodes(), 0.0);
    for (int r = 0; r < g.n_lat; ++r) {
        double inv_sin = 1.0 / g.sin_theta[r];
        double cot = g.cot_theta[r];
        for (int j = 0; j < g.n_lon; ++j) {
            std::size_t i = g.node_index(r, j);
            out.c2.a11[i] = inv_sin * dphi11[i] - 2.0 * cot * b.a12[i];
            out.c2.a12[i] = inv_sin * dphi12[i] + cot * (b.a11[i] - b.a22[i]);
            out.c2.a22[i] = inv_sin * dphi22[i] + 2.0 * cot * b.a12[i];
        }
    }
    return out;
}

// (nabla_p nabla_q b)_{ij}; d[p][q] holds the ij components
struct TensorSecond {
    std::array<std::array<SymMatrixField, 2>, 2> d;

    double at(int p, int q, int i, int j, std::size_t node) const {
        const SymMatrixField& m = d[p][q];
        if (i == 0 && j == 0) return m.a11[node];
        if (i == 1 && j == 1) return m.a22[node];
        return m.a12[node];
    }
};

inline TensorSecond tensor_covariant_second(const SymMatrixField& b,
                                            const TensorGradient& grad) {
    const SphericalGrid& g = *b.grid;
    TensorSecond out;
    if (g.dim == 1) {
        out.d[0][0].grid = b.grid;
        out.d[0][0].a11 = g.theta_derivative(b.a11, 2);
        out.d[0][0].a12.assign(g.n_nodes(), 0.0);
        out.d[0][0].a22.assign(g.n_nodes(), 0.0);
        return out;
    }

    const SymMatrixField* cq[2] = {&grad.c1, &grad.c2};
    for (int q = 0; q < 2; ++q) {
        // p = 0: plain theta derivative of C_{q,ij}; rank-3 components are odd
        SymMatrixField& dq1 = out.d[0][q];
        dq1.grid = b.grid;
        dq1.a11 = g.theta_derivative(cq[q]->a11, 1, -1.0);
        dq1.a12 = g.theta_derivative(cq[q]->a12, 1, -1.0);
        dq1.a22 = g.theta_derivative(cq[q]->a22, 1, -1.0);

        // p = 1: e2 derivative plus connection corrections on all three slots
        SymMatrixField& dq2 = out.d[1][q];
        dq2.grid = b.grid;
        dq2.a11.assign(g.n_nodes(), 0.0);
        dq2.a12.assign(g.n_nodes(), 0.0);
        dq2.a22.assign(g.n_nodes(), 0.0);
        std::vector<double> f11 = g.lon_derivative(cq[q]->a11, 1);
        std::vector<double> f12 = g.lon_derivative(cq[q]->a12, 1);
        std::vector<double> f22 = g.lon_derivative(cq[q]->a22, 1);
        for (int r = 0; r < g.n_lat; ++r) {
            double inv_sin = 1.0 / g.sin_theta[r];
            double cot = g.cot_theta[r];
            for (int jj = 0; jj < g.n_lon; ++jj) {
                std::size_t n = g.node_index(r, jj);
                auto C = [&](int a, int i, int j) { return grad.at(a, i, j, n); };
                for (int i = 0; i < 2; ++i)
                    for (int j = i; j < 2; ++j) {
                        double e2C = inv_sin * ((i == 0 && j == 0)   ? f11[n]
                                                : (i == 1 && j == 1) ? f22[n]
                                                                     : f12[n]);
                        // slot q
                        double corr = (q == 0) ? cot * C(1, i, j) : -cot * C(0, i, j);
                        // slot i
                        corr += (i == 0) ? cot * C(q, 1, j) : -cot * C(q, 0, j);
                        // slot j
                        corr += (j == 0) ? cot * C(q, i, 1) : -cot * C(q, i, 0);
                        double val = e2C - corr;
                        if (i == 0 && j == 0)
                            dq2.a11[n] = val;
                        else if (i == 1 && j == 1)
                            dq2.a22[n] = val;
                        else
                            dq2.a12[n] = val;
                    }
            }
        }
    }
    return out;
}

}  // namespace ocmflow
