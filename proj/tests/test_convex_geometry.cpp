#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ocmflow/convex_geometry.hpp"
#include "ocmflow/grid.hpp"
#include "ocmflow/oracles.hpp"

using namespace ocmflow;

namespace {

ScalarField linear_field(GridPtr g, double v1, double v2, double v3) {
    ScalarField out(g);
    for (std::size_t i = 0; i < g->n_nodes(); ++i)
        out.values[i] = v1 * g->node_x[3 * i] + v2 * g->node_x[3 * i + 1] +
                        v3 * g->node_x[3 * i + 2];
    return out;
}

ScalarField random_convex_field(GridPtr g, std::mt19937& rng, double r0, double amp) {
    std::uniform_real_distribution<double> a(-1.0, 1.0), ph(0.0, 2.0 * pi);
    ScalarField out(g, r0);
    for (int m = 0; m <= 3; ++m) {
        double c = amp * a(rng), phase = ph(rng);
        int pc = static_cast<int>(rng() % 3);
        for (int r = 0; r < g->n_lat; ++r) {
            double s = std::sin(g->theta[r]), co = std::cos(g->theta[r]);
            double radial = std::pow(s, m) * std::pow(co, pc);
            for (int j = 0; j < g->n_lon; ++j)
                out.values[g->node_index(r, j)] +=
                    c * radial * std::cos(m * g->phi[j] + phase);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("sigma_k_value closed forms and normalization") {
    CHECK(sigma_k_value({1.0, 1.0}, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sigma_k_value({2.0, 4.0}, 1) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(sigma_k_value({2.0, 4.0}, 2) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(sigma_k_value({5.0}, 1) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(sigma_k_value({1.0, 1.0}, 3), std::invalid_argument);
}

TEST_CASE("sigma_k_gradient: closed forms and the Euler relation") {
    auto g1 = sigma_k_gradient(1.0, 0.0, 1.0, 2, 1);
    CHECK(g1[0] == doctest::Approx(0.5));
    CHECK(g1[1] == doctest::Approx(0.0));
    CHECK(g1[2] == doctest::Approx(0.5));
    // Euler: sigma^{ij} b_ij = k sigma_k for b = I, k = 1
    CHECK(g1[0] * 1.0 + 2 * g1[1] * 0.0 + g1[2] * 1.0 == doctest::Approx(1.0));

    auto g2 = sigma_k_gradient(2.0, 0.0, 4.0, 2, 2);
    CHECK(g2[0] == doctest::Approx(4.0));
    CHECK(g2[2] == doctest::Approx(2.0));
    CHECK(g2[0] * 2.0 + 2 * g2[1] * 0.0 + g2[2] * 4.0 == doctest::Approx(16.0));

    CHECK_THROWS_AS(sigma_k_gradient(1.0, 0.0, 1.0, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(sigma_k_gradient(1.0, 0.0, 0.0, 1, 2), std::invalid_argument);
}

TEST_CASE("sigma_k_gradient matches central differences of sigma_k_value") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto sigma_of = [](double b11, double b12, double b22, int k) {
        double lo, hi;
        sym2_eigenvalues(b11, b12, b22, lo, hi);
        return sigma_k_value({lo, hi}, k);
    };
    const double eps = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        double b11 = 2.0 + dist(rng), b12 = 0.5 * dist(rng), b22 = 2.0 + dist(rng);
        for (int k = 1; k <= 2; ++k) {
            auto grad = sigma_k_gradient(b11, b12, b22, 2, k);
            double d11 = (sigma_of(b11 + eps, b12, b22, k) -
                          sigma_of(b11 - eps, b12, b22, k)) /
                         (2 * eps);
            double d22 = (sigma_of(b11, b12, b22 + eps, k) -
                          sigma_of(b11, b12, b22 - eps, k)) /
                         (2 * eps);
            // perturbing b12 moves the symmetric pair: derivative is 2 sigma^{12}
            double d12 = (sigma_of(b11, b12 + eps, b22, k) -
                          sigma_of(b11, b12 - eps, b22, k)) /
                         (2 * eps);
            CHECK(std::abs(d11 - grad[0]) <= 1e-8);
            CHECK(std::abs(d22 - grad[2]) <= 1e-8);
            CHECK(std::abs(d12 - 2.0 * grad[1]) <= 1e-8);
        }
    }
}

TEST_CASE("curvature bundle of round spheres") {
    GridPtr g = build_grid(2, 16, 32);
    for (double r : {0.5, 1.0, 2.0}) {
        ScalarField h(g, r);
        CurvatureBundle b1 = curvature_bundle(h, 1);
        CurvatureBundle b2 = curvature_bundle(h, 2);
        CHECK(std::abs(b1.min_radius - r) < 1e-13);
        for (std::size_t i = 0; i < g->n_nodes(); ++i) {
            CHECK(std::abs(b1.sigma_k.values[i] - r) < 1e-13);
            CHECK(std::abs(b2.sigma_k.values[i] - r * r) < 1e-13);
        }
    }
}

TEST_CASE("translation leaves the bundle unchanged") {
    GridPtr g = build_grid(2, 32, 64);
    ScalarField h(g, 1.0);
    ScalarField ht = axpy(1.0, linear_field(g, 0.03, -0.05, 0.04), h);
    CurvatureBundle b0 = curvature_bundle(h, 1);
    CurvatureBundle bt = curvature_bundle(ht, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < g->n_nodes(); ++i)
        err = std::max({err, std::abs(b0.b.a11[i] - bt.b.a11[i]),
                        std::abs(b0.b.a12[i] - bt.b.a12[i]),
                        std::abs(b0.b.a22[i] - bt.b.a22[i])});
    CHECK(err <= 1e-10);
}

TEST_CASE("ellipsoid sigma_1 profile matches the axisymmetric oracle") {
    GridPtr g = build_grid(2, 64, 32);
    auto hfun = [](double th) {
        double s = std::sin(th), c = std::cos(th);
        return std::sqrt(s * s + 4.0 * c * c);
    };
    ScalarField h(g);
    for (int r = 0; r < g->n_lat; ++r)
        for (int j = 0; j < g->n_lon; ++j)
            h.values[g->node_index(r, j)] = hfun(g->theta[r]);
    CurvatureBundle cb = curvature_bundle(h, 1);

    const int m = 4096;
    std::vector<double> samples(m);
    for (int i = 0; i < m; ++i) samples[i] = hfun((i + 0.5) * pi / m);
    std::vector<double> sig = axisymmetric_sigma_k(samples, 1);
    double rel = 0.0;
    for (int r = 0; r < g->n_lat; ++r) {
        double ref = interpolate_axisymmetric(sig, g->theta[r]);
        double got = cb.sigma_k.values[g->node_index(r, 0)];
        rel = std::max(rel, std::abs(got - ref) / std::abs(ref));
    }
    CHECK(rel <= 1e-6);
}

TEST_CASE("body geometry: spheres, translates, and the support identity") {
    GridPtr g = build_grid(2, 32, 64);
    SUBCASE("round sphere") {
        ScalarField h(g, 1.5);
        BodyGeometry geo = body_geometry(h);
        for (std::size_t i = 0; i < g->n_nodes(); ++i) {
            CHECK(std::abs(geo.rho.values[i] - 1.5) < 1e-13);
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(geo.embedding[3 * i + c] - 1.5 * g->node_x[3 * i + c]) <
                      1e-13);
        }
    }
    SUBCASE("translated unit sphere: X = x + v") {
        double v[3] = {0.2, -0.1, 0.15};
        ScalarField h = axpy(1.0, linear_field(g, v[0], v[1], v[2]), ScalarField(g, 1.0));
        BodyGeometry geo = body_geometry(h);
        double err = 0.0, rho_err = 0.0;
        for (std::size_t i = 0; i < g->n_nodes(); ++i) {
            double expect_rho = 0.0;
            for (int c = 0; c < 3; ++c) {
                double xc = g->node_x[3 * i + c] + v[c];
                err = std::max(err, std::abs(geo.embedding[3 * i + c] - xc));
                expect_rho += xc * xc;
            }
            rho_err = std::max(rho_err,
                               std::abs(geo.rho.values[i] - std::sqrt(expect_rho)));
        }
        CHECK(err <= 1e-9);
        CHECK(rho_err <= 1e-9);
    }
    SUBCASE("rho^2 = h^2 + |grad h|^2 and <X, x> = h") {
        std::mt19937 rng(5);
        ScalarField h = random_convex_field(g, rng, 1.0, 0.05);
        BodyGeometry geo = body_geometry(h);
        VectorField grad = g->gradient(h);
        double rho_def = 0.0, supp_def = 0.0;
        for (std::size_t i = 0; i < g->n_nodes(); ++i) {
            double g2 = grad.comp1[i] * grad.comp1[i] + grad.comp2[i] * grad.comp2[i];
            rho_def = std::max(rho_def, std::abs(geo.rho.values[i] * geo.rho.values[i] -
                                                 h.values[i] * h.values[i] - g2));
            double dot = 0.0;
            for (int c = 0; c < 3; ++c)
                dot += geo.embedding[3 * i + c] * g->node_x[3 * i + c];
            supp_def = std::max(supp_def, std::abs(dot - h.values[i]));
        }
        CHECK(rho_def <= 1e-12);
        CHECK(supp_def <= 1e-10);
    }
}

TEST_CASE("embedding of the ellipsoid lies on the ellipsoid") {
    GridPtr g = build_grid(2, 64, 32);
    ScalarField h(g);
    for (int r = 0; r < g->n_lat; ++r) {
        double s = std::sin(g->theta[r]), c = std::cos(g->theta[r]);
        double v = std::sqrt(s * s + 4.0 * c * c);
        for (int j = 0; j < g->n_lon; ++j) h.values[g->node_index(r, j)] = v;
    }
    BodyGeometry geo = body_geometry(h);
    double err = 0.0;
    for (std::size_t i = 0; i < g->n_nodes(); ++i) {
        double X1 = geo.embedding[3 * i], X2 = geo.embedding[3 * i + 1],
               X3 = geo.embedding[3 * i + 2];
        err = std::max(err, std::abs(X1 * X1 + X2 * X2 + X3 * X3 / 4.0 - 1.0));
    }
    CHECK(err <= 1e-8);
}

TEST_CASE("convexity margin") {
    GridPtr g = build_grid(2, 32, 64);
    SUBCASE("unit sphere: (1, 1)") {
        ScalarField h(g, 1.0);
        ConvexityMargin m = convexity_margin(curvature_bundle(h, 1), h);
        CHECK(m.min_radius == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.h_min == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(m.strictly_convex());
    }
    SUBCASE("degenerate h = cos(theta): min_radius <= 0 reported, no exception") {
        ScalarField h(g);
        for (int r = 0; r < g->n_lat; ++r)
            for (int j = 0; j < g->n_lon; ++j)
                h.values[g->node_index(r, j)] = std::cos(g->theta[r]);
        ConvexityMargin m = convexity_margin(curvature_bundle(h, 1), h);
        CHECK(m.min_radius <= 1e-9);
        CHECK(!m.strictly_convex());
    }
    SUBCASE("quadratic perturbation vs dense eigenvalue sweep oracle") {
        ScalarField h(g);
        for (int r = 0; r < g->n_lat; ++r) {
            double c = std::cos(g->theta[r]);
            double v = 1.0 + 0.5 * (3.0 * c * c - 1.0) / 2.0;
            for (int j = 0; j < g->n_lon; ++j) h.values[g->node_index(r, j)] = v;
        }
        CurvatureBundle cb = curvature_bundle(h, 1);
        const int m = 8192;
        std::vector<double> samples(m);
        for (int i = 0; i < m; ++i) {
            double c = std::cos((i + 0.5) * pi / m);
            samples[i] = 1.0 + 0.5 * (3.0 * c * c - 1.0) / 2.0;
        }
        // dense sweep: reconstruct both radii branches from sigma_1, sigma_2
        // at the grid latitudes and take the node-set minimum
        std::vector<double> sig1 = axisymmetric_sigma_k(samples, 1);
        std::vector<double> sig2 = axisymmetric_sigma_k(samples, 2);
        double oracle_min = std::numeric_limits<double>::infinity();
        for (int r = 0; r < g->n_lat; ++r) {
            double s1 = interpolate_axisymmetric(sig1, g->theta[r]);
            double s2 = interpolate_axisymmetric(sig2, g->theta[r]);
            double disc = std::sqrt(std::max(0.0, s1 * s1 - s2));
            oracle_min = std::min(oracle_min, s1 - disc);
        }
        CHECK(std::abs(cb.min_radius - oracle_min) <= 1e-6);
    }
}

TEST_CASE("scaling law, Euler relation, eigenvalue consistency on random fields") {
    GridPtr g = build_grid(2, 16, 32);
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        ScalarField h = random_convex_field(g, rng, 1.0, 0.04);
        for (int k = 1; k <= 2; ++k) {
            CurvatureBundle cb = curvature_bundle(h, k);
            REQUIRE(cb.min_radius > 0.0);
            for (double c : {0.5, 2.0}) {
                ScalarField hc(g);
                for (std::size_t i = 0; i < h.size(); ++i)
                    hc.values[i] = c * h.values[i];
                CurvatureBundle cbc = curvature_bundle(hc, k);
                double err = 0.0;
                for (std::size_t i = 0; i < h.size(); ++i)
                    err = std::max(err, std::abs(cbc.sigma_k.values[i] -
                                                 std::pow(c, k) * cb.sigma_k.values[i]));
                CHECK(err <= 1e-10);
            }
            double euler = 0.0, eig = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                auto sg = sigma_k_gradient(cb.b.a11[i], cb.b.a12[i], cb.b.a22[i], 2, k);
                double contraction = sg[0] * cb.b.a11[i] + 2.0 * sg[1] * cb.b.a12[i] +
                                     sg[2] * cb.b.a22[i];
                euler = std::max(euler,
                                 std::abs(contraction - k * cb.sigma_k.values[i]));
                eig = std::max(
                    {eig,
                     std::abs(cb.radii_lo[i] + cb.radii_hi[i] - cb.b.a11[i] - cb.b.a22[i]),
                     std::abs(cb.radii_lo[i] * cb.radii_hi[i] -
                              (cb.b.a11[i] * cb.b.a22[i] - cb.b.a12[i] * cb.b.a12[i]))});
            }
            CHECK(euler <= 1e-10);
            CHECK(eig <= 1e-12);
        }
    }
}

TEST_CASE("circle bundle: b = h'' + h") {
    GridPtr g = build_grid(1, 0, 64);
    ScalarField h(g);
    for (int j = 0; j < g->n_lon; ++j)
        h.values[j] = 1.0 + 0.2 * std::cos(2.0 * g->theta[j]);
    CurvatureBundle cb = curvature_bundle(h, 1);
    double err = 0.0;
    for (int j = 0; j < g->n_lon; ++j) {
        double expected = 1.0 - 3.0 * 0.2 * std::cos(2.0 * g->theta[j]);
        err = std::max(err, std::abs(cb.sigma_k.values[j] - expected));
    }
    CHECK(err <= 1e-12);
    CHECK(cb.min_radius == doctest::Approx(0.4).epsilon(1e-10));
}
