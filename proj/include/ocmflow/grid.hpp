#pragma once

// Discretization of S^(n-1) for n = 2 (circle) and n = 3 (sphere).
//
// Sphere nodes are Gauss-Legendre latitudes (in cos(theta)) times uniform
// longitudes, so constants integrate exactly, no node sits on a pole, and
// longitudinal derivatives can be taken spectrally. Latitudinal derivatives
// use high-order centered stencils with pole-crossing ghost rows (reflected
// latitude, longitude shifted by pi).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocmflow {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1, 1]

struct GaussLegendreRule {
    std::vector<double> x;  // ascending
    std::vector<double> w;  // sum = 2
};

inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendreRule rule;
    rule.x.assign(n, 0.0);
    rule.w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration on P_n, starting from the Chebyshev-like guess
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one clean-up iteration, then stop
                p0 = 1.0;
                p1 = x;
                for (int l = 2; l <= n; ++l) {
                    double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / dp;
                break;
            }
        }
        rule.x[i] = -x;  // guess walks from +1 side; store ascending
        rule.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.x[n / 2] = 0.0;
    return rule;
}

// ---------------------------------------------------------------------------
// Fornberg finite-difference weights: derivatives of order 0..m at x0 from
// arbitrary nodes. Returns weights[order][node].

inline std::vector<std::vector<double>> fornberg_weights(double x0,
                                                         const std::vector<double>& grid,
                                                         int max_order) {
    const int nd = static_cast<int>(grid.size()) - 1;
    const int m = max_order;
    std::vector<std::vector<std::vector<double>>> d(
        m + 1, std::vector<std::vector<double>>(nd + 1, std::vector<double>(nd + 1, 0.0)));
    d[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i <= nd; ++i) {
        double c2 = 1.0;
        for (int j = 0; j < i; ++j) {
            double c3 = grid[i] - grid[j];
            c2 *= c3;
            for (int k = 0; k <= std::min(i, m); ++k) {
                double prev = (k > 0) ? d[k - 1][i - 1][j] : 0.0;
                d[k][i][j] = ((grid[i] - x0) * d[k][i - 1][j] - k * prev) / c3;
            }
        }
        for (int k = 0; k <= std::min(i, m); ++k) {
            double prev = (k > 0) ? d[k - 1][i - 1][i - 1] : 0.0;
            d[k][i][i] = c1 / c2 * (k * prev - (grid[i - 1] - x0) * d[k][i - 1][i - 1]);
        }
        c1 = c2;
    }
    std::vector<std::vector<double>> w(m + 1, std::vector<double>(nd + 1, 0.0));
    for (int k = 0; k <= m; ++k)
        for (int j = 0; j <= nd; ++j) w[k][j] = d[k][nd][j];
    return w;
}

// ---------------------------------------------------------------------------
// Extra grid options. The zonal (polar) filter caps the
// longitudinal wavenumber near the poles at the isotropic resolution limit;
// without it an explicit integrator is throttled by the pole clustering of
// the latitude-longitude grid. Resolvable smooth fields are unaffected: their
// high-m content at colatitude theta decays past m ~ n_lat*sin(theta).

struct GridOptions {
    int stencil_halfwidth = 5;   // latitudinal stencil is 2*hw+1 points
    bool polar_filter = true;    // cap m <= ceil(1.5*n_lat*sin(theta)) + 4
    bool dealias = false;        // additionally drop the top 1/3 of m modes
    double filter_slope = 1.5;
    int filter_pad = 4;
};

class SphericalGrid;
using GridPtr = std::shared_ptr<const SphericalGrid>;

// Per-node real values on a grid (h, f, sigma_k, residual, ...).
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(GridPtr g);
    ScalarField(GridPtr g, double fill);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

// Tangent vector field, components in the local orthonormal frame
// (e_theta, e_phi/sin(theta)); comp2 unused for dim 1.
struct VectorField {
    GridPtr grid;
    std::vector<double> comp1, comp2;
};

// Symmetric matrix field (1x1 for S^1, 2x2 for S^2); a12/a22 unused for dim 1.
struct SymMatrixField {
    GridPtr grid;
    std::vector<double> a11, a12, a22;
};

class SphericalGrid : public std::enable_shared_from_this<SphericalGrid> {
public:
    int dim = 0;      // intrinsic dimension, 1 or 2
    int n_lat = 0;    // latitude rows (dim 2); 1 for dim 1
    int n_lon = 0;    // longitudes per row (dim 2); node count (dim 1)
    GridOptions options;

    std::vector<double> theta;      // per row (dim 2) or per node (dim 1)
    std::vector<double> phi;        // per longitude index (dim 2 only)
    std::vector<double> weights;    // per node
    std::vector<double> sin_theta;  // per row
    std::vector<double> cot_theta;  // per row
    std::vector<double> node_x;     // unit normals, n_nodes * (dim+1)
    std::vector<double> frame_e1;   // d/dtheta direction, n_nodes * (dim+1)
    std::vector<double> frame_e2;   // (1/sin theta) d/dphi direction (dim 2)

    std::size_t n_nodes() const { return weights.size(); }
    std::size_t node_index(int row, int j) const {
        return static_cast<std::size_t>(row) * n_lon + j;
    }
    int ambient_dim() const { return dim + 1; }
    double area() const { return dim == 1 ? 2.0 * pi : 4.0 * pi; }

    // spectral differentiation operators along the periodic direction, stored
    // as circulant coefficients: out[j] = sum_d c[d] * u[(j+d) mod N]. The
    // relative summation order makes every operator commute bitwise with
    // rotations by whole grid steps.
    std::vector<double> d1_lon, d2_lon;   // length n_lon
    // zonal filter per row (circulant); empty vector means identity
    std::vector<std::vector<double>> filter_lon;

    struct ThetaStencil {
        std::vector<int> src_row;
        std::vector<bool> lon_shift;   // read at phi + pi
        std::vector<double> w1, w2;
    };
    std::vector<ThetaStencil> theta_stencils;

    // dominant eigenvalue magnitude of the discrete Laplace-type operator
    // u -> -(hess_11 + hess_22) u, estimated by power iteration at build time;
    // the flow engine scales it to cap dt for explicit stepping
    double laplacian_spectral_bound = 0.0;

    // --- construction -------------------------------------------------------

    static GridPtr build(int dim, int n_lat, int n_lon, GridOptions opt = {}) {
        auto g = std::shared_ptr<SphericalGrid>(new SphericalGrid());
        g->options = opt;
        if (dim == 1) {
            if (n_lon < 16)
                throw std::invalid_argument("build_grid: dim 1 requires n_lon >= 16");
            g->init_circle(n_lon);
        } else if (dim == 2) {
            if (n_lat < 8 || n_lat % 2 != 0)
                throw std::invalid_argument("build_grid: dim 2 requires even n_lat >= 8");
            if (n_lon < 16 || n_lon % 2 != 0)
                throw std::invalid_argument("build_grid: dim 2 requires even n_lon >= 16");
            g->init_sphere(n_lat, n_lon, opt);
        } else {
            throw std::invalid_argument("build_grid: dim must be 1 or 2");
        }
        return g;
    }

    // --- quadrature ---------------------------------------------------------

    double integrate(const ScalarField& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i) s += weights[i] * f.values[i];
        return s;
    }

    // --- derivatives --------------------------------------------------------

    VectorField gradient(const ScalarField& u) const {
        Workspace ws;
        prepare(u, ws);
        VectorField g;
        g.grid = shared_from_this();
        g.comp1 = ws.du_dtheta;
        g.comp2.assign(n_nodes(), 0.0);
        if (dim == 2) {
            for (int r = 0; r < n_lat; ++r) {
                double inv_sin = 1.0 / sin_theta[r];
                for (int j = 0; j < n_lon; ++j) {
                    std::size_t i = node_index(r, j);
                    g.comp2[i] = ws.du_dphi[i] * inv_sin;
                }
            }
        }
        return g;
    }

    SymMatrixField covariant_hessian(const ScalarField& u) const {
        Workspace ws;
        prepare(u, ws);
        return hessian_from_workspace(ws);
    }

    struct Derivatives {
        VectorField grad;
        SymMatrixField hess;
    };

    Derivatives derivatives(const ScalarField& u) const {
        Workspace ws;
        prepare(u, ws);
        Derivatives d;
        d.grad.grid = shared_from_this();
        d.grad.comp1 = ws.du_dtheta;
        d.grad.comp2.assign(n_nodes(), 0.0);
        if (dim == 2) {
            for (int r = 0; r < n_lat; ++r) {
                double inv_sin = 1.0 / sin_theta[r];
                for (int j = 0; j < n_lon; ++j) {
                    std::size_t i = node_index(r, j);
                    d.grad.comp2[i] = ws.du_dphi[i] * inv_sin;
                }
            }
        }
        d.hess = hessian_from_workspace(ws);
        return d;
    }

    // theta-derivative of a per-node field whose ghost values across the pole
    // pick up the given parity (+1 for scalars and rank-2 frame components,
    // -1 for rank-1 and rank-3 frame components)
    std::vector<double> theta_derivative(const std::vector<double>& u, int order,
                                         double parity = 1.0) const {
        std::vector<double> out(n_nodes(), 0.0);
        if (dim == 1) {
            const std::vector<double>& d = (order == 1) ? d1_lon : d2_lon;
            apply_circulant(d, u, out);
            return out;
        }
        for (int r = 0; r < n_lat; ++r) {
            const ThetaStencil& st = theta_stencils[r];
            const std::vector<double>& w = (order == 1) ? st.w1 : st.w2;
            for (int j = 0; j < n_lon; ++j) {
                double center = u[node_index(r, j)];
                double acc = 0.0;
                for (std::size_t s = 0; s < st.src_row.size(); ++s) {
                    int jj = st.lon_shift[s] ? (j + n_lon / 2) % n_lon : j;
                    double v = u[node_index(st.src_row[s], jj)];
                    if (st.lon_shift[s]) v *= parity;
                    acc += w[s] * (v - center);
                }
                out[node_index(r, j)] = acc;
            }
        }
        return out;
    }

    // longitudinal derivative (spectral); order 1 or 2
    std::vector<double> lon_derivative(const std::vector<double>& u, int order) const {
        std::vector<double> out(n_nodes(), 0.0);
        apply_circulant(order == 1 ? d1_lon : d2_lon, u, out);
        return out;
    }

    // zonal filter applied row-wise; identity when no filtering is active
    std::vector<double> zonal_filter(const std::vector<double>& u) const {
        if (dim == 1 || filter_lon.empty()) return u;
        std::vector<double> out(u.size());
        std::vector<double> buf(static_cast<std::size_t>(n_lon) * 2);
        for (int r = 0; r < n_lat; ++r) {
            const std::vector<double>& F = filter_lon[r];
            const double* src = u.data() + node_index(r, 0);
            double* dst = out.data() + node_index(r, 0);
            if (F.empty()) {
                std::copy(src, src + n_lon, dst);
            } else {
                std::copy(src, src + n_lon, buf.begin());
                std::copy(src, src + n_lon, buf.begin() + n_lon);
                for (int j = 0; j < n_lon; ++j) {
                    const double* b = buf.data() + j;
                    double acc = 0.0;  // row sum of F is 1: filter = id + high cut
                    for (int d = 0; d < n_lon; ++d) acc += F[d] * (b[d] - b[0]);
                    dst[j] = b[0] + acc;
                }
            }
        }
        return out;
    }

    ScalarField rotate_lon(const ScalarField& u, int steps) const {
        ScalarField out(shared_from_this());
        int rows = (dim == 1) ? 1 : n_lat;
        for (int r = 0; r < rows; ++r)
            for (int j = 0; j < n_lon; ++j) {
                int jj = ((j - steps) % n_lon + n_lon) % n_lon;
                out.values[node_index(r, j)] = u.values[node_index(r, jj)];
            }
        return out;
    }

private:
    SphericalGrid() = default;

    struct Workspace {
        std::vector<double> filtered;
        std::vector<double> du_dtheta, d2u_dtheta2;
        std::vector<double> du_dphi, d2u_dphi2, d2u_dthetaphi;
    };

    void prepare(const ScalarField& u, Workspace& ws) const {
        if (!u.grid || u.grid.get() != this)
            throw std::invalid_argument("field does not belong to this grid");
        ws.filtered = zonal_filter(u.values);
        ws.du_dtheta = theta_derivative(ws.filtered, 1);
        ws.d2u_dtheta2 = theta_derivative(ws.filtered, 2);
        if (dim == 2) {
            ws.du_dphi.assign(n_nodes(), 0.0);
            ws.d2u_dphi2.assign(n_nodes(), 0.0);
            ws.d2u_dthetaphi.assign(n_nodes(), 0.0);
            apply_circulant(d1_lon, ws.filtered, ws.du_dphi);
            apply_circulant(d2_lon, ws.filtered, ws.d2u_dphi2);
            apply_circulant(d1_lon, ws.du_dtheta, ws.d2u_dthetaphi);
        }
    }

    SymMatrixField hessian_from_workspace(const Workspace& ws) const {
        SymMatrixField h;
        h.grid = shared_from_this();
        h.a11 = ws.d2u_dtheta2;
        h.a12.assign(n_nodes(), 0.0);
        h.a22.assign(n_nodes(), 0.0);
        if (dim == 2) {
            for (int r = 0; r < n_lat; ++r) {
                double inv_sin = 1.0 / sin_theta[r];
                double cot = cot_theta[r];
                for (int j = 0; j < n_lon; ++j) {
                    std::size_t i = node_index(r, j);
                    h.a12[i] = inv_sin * (ws.d2u_dthetaphi[i] - cot * ws.du_dphi[i]);
                    h.a22[i] = inv_sin * inv_sin * ws.d2u_dphi2[i] + cot * ws.du_dtheta[i];
                }
            }
        }
        return h;
    }

    void apply_circulant(const std::vector<double>& coef, const std::vector<double>& u,
                         std::vector<double>& out) const {
        int rows = (dim == 1) ? 1 : n_lat;
        if (out.size() != u.size()) out.assign(u.size(), 0.0);
        std::vector<double> buf(static_cast<std::size_t>(n_lon) * 2);
        for (int r = 0; r < rows; ++r) {
            const double* src = u.data() + static_cast<std::size_t>(r) * n_lon;
            double* dst = out.data() + static_cast<std::size_t>(r) * n_lon;
            std::copy(src, src + n_lon, buf.begin());
            std::copy(src, src + n_lon, buf.begin() + n_lon);
            for (int j = 0; j < n_lon; ++j) {
                const double* b = buf.data() + j;
                double acc = 0.0;  // row sum is 0: constants are annihilated
                for (int d = 0; d < n_lon; ++d) acc += coef[d] * (b[d] - b[0]);
                dst[j] = acc;
            }
        }
    }

    // circulant coefficients c[d] acting as out[j] = sum_d c[d] u[j+d]
    void build_lon_matrices(int N) {
        d1_lon.assign(N, 0.0);
        d2_lon.assign(N, 0.0);
        const double h = 2.0 * pi / N;
        if (N % 2 == 0) {
            d2_lon[0] = -N * N / 12.0 - 1.0 / 6.0;
            for (int d = 1; d < N; ++d) {
                double sgn = (d % 2 == 0) ? 1.0 : -1.0;
                double s = std::sin(0.5 * d * h);
                d1_lon[d] = -0.5 * sgn / std::tan(0.5 * d * h);
                d2_lon[d] = -sgn * 0.5 / (s * s);
            }
        } else {
            for (int d = 1; d < N; ++d) {
                double sgn = (d % 2 == 0) ? 1.0 : -1.0;
                d1_lon[d] = -0.5 * sgn / std::sin(0.5 * d * h);
            }
            // odd N: D1 is exact on the full trig space, so D2 = D1 (*) D1
            for (int d = 0; d < N; ++d) {
                double acc = 0.0;
                for (int e = 0; e < N; ++e) acc += d1_lon[e] * d1_lon[((d - e) % N + N) % N];
                d2_lon[d] = acc;
            }
        }
        // derivatives of constants vanish exactly
        double s1 = 0.0, s2 = 0.0;
        for (double c : d1_lon) s1 += c;
        for (double c : d2_lon) s2 += c;
        d1_lon[0] -= s1;
        d2_lon[0] -= s2;
    }

    void init_circle(int N) {
        dim = 1;
        n_lat = 1;
        n_lon = N;
        theta.resize(N);
        weights.assign(N, 2.0 * pi / N);
        node_x.resize(static_cast<std::size_t>(N) * 2);
        frame_e1.resize(static_cast<std::size_t>(N) * 2);
        sin_theta.assign(1, 1.0);
        cot_theta.assign(1, 0.0);
        for (int j = 0; j < N; ++j) {
            theta[j] = 2.0 * pi * j / N;
            node_x[2 * j] = std::cos(theta[j]);
            node_x[2 * j + 1] = std::sin(theta[j]);
            frame_e1[2 * j] = -std::sin(theta[j]);
            frame_e1[2 * j + 1] = std::cos(theta[j]);
        }
        build_lon_matrices(N);
        laplacian_spectral_bound = estimate_laplacian_bound();
    }

    void init_sphere(int R, int N, const GridOptions& opt) {
        dim = 2;
        n_lat = R;
        n_lon = N;
        GaussLegendreRule gl = gauss_legendre(R);
        theta.resize(R);
        sin_theta.resize(R);
        cot_theta.resize(R);
        // x = cos(theta) ascending  <=>  theta descending; store theta ascending
        for (int r = 0; r < R; ++r) theta[r] = std::acos(gl.x[R - 1 - r]);
        phi.resize(N);
        for (int j = 0; j < N; ++j) phi[j] = 2.0 * pi * j / N;

        weights.resize(static_cast<std::size_t>(R) * N);
        node_x.resize(static_cast<std::size_t>(R) * N * 3);
        frame_e1.resize(static_cast<std::size_t>(R) * N * 3);
        frame_e2.resize(static_cast<std::size_t>(R) * N * 3);
        const double wlon = 2.0 * pi / N;
        for (int r = 0; r < R; ++r) {
            double st = std::sin(theta[r]), ct = std::cos(theta[r]);
            sin_theta[r] = st;
            cot_theta[r] = ct / st;
            for (int j = 0; j < N; ++j) {
                std::size_t i = node_index(r, j);
                weights[i] = gl.w[R - 1 - r] * wlon;
                double cp = std::cos(phi[j]), sp = std::sin(phi[j]);
                node_x[3 * i] = st * cp;
                node_x[3 * i + 1] = st * sp;
                node_x[3 * i + 2] = ct;
                frame_e1[3 * i] = ct * cp;
                frame_e1[3 * i + 1] = ct * sp;
                frame_e1[3 * i + 2] = -st;
                frame_e2[3 * i] = -sp;
                frame_e2[3 * i + 1] = cp;
                frame_e2[3 * i + 2] = 0.0;
            }
        }

        build_lon_matrices(N);
        build_theta_stencils(opt.stencil_halfwidth);
        build_zonal_filter(opt);
        laplacian_spectral_bound = estimate_laplacian_bound();
    }

    // power iteration on u -> -(hess_11 + hess_22) u with a deterministic
    // start vector; returns a slight overestimate of the dominant eigenvalue
    double estimate_laplacian_bound() const {
        std::vector<double> u(n_nodes());
        std::uint64_t s = 0x9e3779b97f4a7c15ull;
        for (double& v : u) {
            s = s * 6364136223846793005ull + 1442695040888963407ull;
            v = static_cast<double>(static_cast<std::int64_t>(s >> 11)) / (1ll << 52);
        }
        double lam = 0.0;
        for (int it = 0; it < 60; ++it) {
            double norm = 0.0;
            for (double v : u) norm = std::max(norm, std::abs(v));
            for (double& v : u) v /= norm;
            // apply via the public pipeline so the filter is included
            ScalarField uf;
            uf.grid = shared_from_this();
            uf.values = u;
            SymMatrixField H = covariant_hessian(uf);
            double growth = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                u[i] = -(H.a11[i] + (dim == 2 ? H.a22[i] : 0.0));
                growth = std::max(growth, std::abs(u[i]));
            }
            if (it >= 40) lam = std::max(lam, growth);
        }
        return 1.1 * lam;
    }

    void build_theta_stencils(int hw) {
        if (hw < 2) hw = 2;
        if (hw > n_lat) hw = n_lat;
        theta_stencils.resize(n_lat);
        for (int r = 0; r < n_lat; ++r) {
            ThetaStencil st;
            std::vector<double> coords;
            for (int s = r - hw; s <= r + hw; ++s) {
                int src;
                double coord;
                bool shift;
                if (s < 0) {
                    src = -1 - s;
                    coord = -theta[src];
                    shift = true;
                } else if (s >= n_lat) {
                    src = 2 * n_lat - 1 - s;
                    coord = 2.0 * pi - theta[src];
                    shift = true;
                } else {
                    src = s;
                    coord = theta[s];
                    shift = false;
                }
                st.src_row.push_back(src);
                st.lon_shift.push_back(shift);
                coords.push_back(coord);
            }
            auto w = fornberg_weights(theta[r], coords, 2);
            st.w1 = w[1];
            st.w2 = w[2];
            // derivatives of constants vanish exactly
            double s1 = 0.0, s2 = 0.0;
            for (double x : st.w1) s1 += x;
            for (double x : st.w2) s2 += x;
            st.w1[hw] -= s1;
            st.w2[hw] -= s2;
            theta_stencils[r] = st;
        }
    }

    void build_zonal_filter(const GridOptions& opt) {
        filter_lon.clear();
        if (!opt.polar_filter && !opt.dealias) return;
        filter_lon.resize(n_lat);
        const int N = n_lon;
        const double h = 2.0 * pi / N;
        for (int r = 0; r < n_lat; ++r) {
            double mk = N / 2.0;
            if (opt.polar_filter)
                mk = std::min(mk, std::ceil(opt.filter_slope * n_lat * sin_theta[r]) +
                                      opt.filter_pad);
            if (opt.dealias) mk = std::min(mk, std::floor(N / 2.0 * 2.0 / 3.0));
            int K = static_cast<int>(mk);
            if (K >= N / 2) continue;  // identity row
            std::vector<double>& F = filter_lon[r];
            F.assign(N, 0.0);
            for (int d = 0; d < N; ++d) {
                double acc = 1.0;
                for (int m = 1; m <= K; ++m) acc += 2.0 * std::cos(m * d * h);
                F[d] = acc / N;
            }
            // constants pass through exactly
            double s = 0.0;
            for (double c : F) s += c;
            F[0] += 1.0 - s;
        }
        bool any = false;
        for (auto& F : filter_lon)
            if (!F.empty()) any = true;
        if (!any) filter_lon.clear();
    }
};

inline ScalarField::ScalarField(GridPtr g) : grid(std::move(g)) {
    values.assign(grid->n_nodes(), 0.0);
}
inline ScalarField::ScalarField(GridPtr g, double fill) : grid(std::move(g)) {
    values.assign(grid->n_nodes(), fill);
}

// --- free-function entry points ----------------------------------------------

inline GridPtr build_grid(int dim, int n_lat, int n_lon, GridOptions opt = {}) {
    return SphericalGrid::build(dim, n_lat, n_lon, opt);
}

inline double integrate(const ScalarField& f) {
    if (!f.grid) throw std::invalid_argument("integrate: field has no grid");
    return f.grid->integrate(f);
}

inline VectorField gradient(const ScalarField& f) { return f.grid->gradient(f); }

inline SymMatrixField covariant_hessian(const ScalarField& f) {
    return f.grid->covariant_hessian(f);
}

// small helpers shared by the flow engine and tests
inline ScalarField axpy(double a, const ScalarField& x, const ScalarField& y) {
    ScalarField out(x.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = a * x.values[i] + y.values[i];
    return out;
}

inline double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

inline double min_value(const std::vector<double>& v) {
    double s = v.empty() ? 0.0 : v[0];
    for (double x : v) s = std::min(s, x);
    return s;
}

inline double max_value(const std::vector<double>& v) {
    double s = v.empty() ? 0.0 : v[0];
    for (double x : v) s = std::max(s, x);
    return s;
}

}  // namespace ocmflow
