#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <ramiperiod/meshgen.hpp>
#include <ramiperiod/weights.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ramiperiod;
using fixtures::pt;

namespace {

/// Plain Gauss-Legendre tensor rule on the ruled triangle, written out
/// independently of the library's quadrature; exact in s (the integrand is
/// linear in s) and converged in t by a high node count.
double gl_energy(Complex x, Complex y, Complex z, double ux, double uy, double uz) {
    static const auto nodes = [] {
        // 64-point Gauss-Legendre on [0,1] by Newton iteration on P_64.
        const int n = 64;
        std::vector<std::pair<double, double>> r;
        for (int i = 1; i <= n; ++i) {
            double t = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            r.push_back({0.5 * (t + 1.0), 1.0 / ((1.0 - t * t) * dp * dp)});
        }
        return r;
    }();
    const InvertedArc arc{y, z};
    double total = 0.0;
    for (const auto& [t, wt] : nodes)
        for (const auto& [s, ws] : nodes) {
            const Complex ps = arc(t) - x, pt_ = s * arc.derivative(t);
            const double det = ps.real() * pt_.imag() - pt_.real() * ps.imag();
            const double us = -ux + (1 - t) * uy + t * uz, ut = s * (uz - uy);
            const double gx = (us * pt_.imag() - ut * ps.imag()) / det;
            const double gy = (-us * pt_.real() + ut * ps.real()) / det;
            total += wt * ws * (gx * gx + gy * gy) * std::abs(det);
        }
    return total;
}

CoverMesh torus_mesh(int n, bool adapt = true) {
    MeshOptions o;
    o.n = n;
    o.adapt = adapt;
    return generate_mesh(fixtures::torus(), o);
}

}  // namespace

TEST(Cotan, EquilateralAndSquare) {
    const double s3 = std::sqrt(3.0) / 2.0;
    const auto a = half_cotans(std::array<Complex, 3>{Complex(0, 0), Complex(1, 0), Complex(0.5, s3)});
    const auto b = half_cotans(std::array<Complex, 3>{Complex(1, 0), Complex(0, 0), Complex(0.5, -s3)});
    // Edge (0,0)-(1,0) is opposite corner 2 in both.
    EXPECT_NEAR(a[2] + b[2], 1.0 / std::sqrt(3.0), 1e-15);
    const auto c = half_cotans(std::array<Complex, 3>{Complex(0, 0), Complex(1, 0), Complex(1, 1)});
    const auto d = half_cotans(std::array<Complex, 3>{Complex(0, 0), Complex(1, 1), Complex(0, 1)});
    EXPECT_NEAR(c[1] + d[2], 0.0, 1e-15);
    EXPECT_THROW(half_cotans(std::array<Complex, 3>{Complex(0, 0), Complex(1, 0), Complex(2, 0)}), Error);
}

TEST(Cotan, OuterEdgesMatchCircularArcAngles) {
    // Angle between the pulled-back arcs at a vertex, from their tangents,
    // equals the chart angle after 1/z (conformality).
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const Complex a = std::polar(3.0 + U(gen), 3.0 * U(gen));
        const Complex b = a + Complex(0.3 * U(gen), 0.3 * U(gen));
        const Complex c = a + Complex(0.3 * U(gen), 0.3 * U(gen));
        const double chart = corner_angle(1.0 / a, 1.0 / b, 1.0 / c);
        const Complex tb = InvertedArc{a, b}.derivative(0.0), tc = InvertedArc{a, c}.derivative(0.0);
        const double arcs = std::abs(std::arg(tc / tb));
        EXPECT_NEAR(chart, arcs, 1e-12);
    }
}

TEST(BoundaryWeights, StraightArcGivesEuclideanCotans) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const Complex x(U(gen), U(gen)), y(U(gen), U(gen)), z(U(gen), U(gen));
        if (std::abs(signed_area(x, y, z)) < 0.05) continue;
        const auto c = ruled_triangle_weights(x, StraightArc{y, z}, 1e-12);
        const auto hc = half_cotans(std::array<Complex, 3>{x, y, z});
        EXPECT_NEAR(c.xy, hc[2], 1e-11);
        EXPECT_NEAR(c.yz, hc[0], 1e-11);
        EXPECT_NEAR(c.zx, hc[1], 1e-11);
    }
}

TEST(BoundaryWeights, EnergyIdentityAgainstTensorQuadrature) {
    const auto shapes = oracles::boundary_shapes(40, 3);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int done = 0;
    for (const auto& s : shapes) {
        oracles::BoundaryTriangle t;
        if (!oracles::place(s, 0.3, 2.0, t)) continue;
        const double tol = 1e-10;
        const auto c = boundary_weights(t.x, t.y, t.z, 2.0, tol);
        const double ux = U(gen), uy = U(gen), uz = U(gen);
        const double form = c.xy * (ux - uy) * (ux - uy) + c.yz * (uy - uz) * (uy - uz) + c.zx * (uz - ux) * (uz - ux);
        const double ref = gl_energy(t.x, t.y, t.z, ux, uy, uz);
        EXPECT_NEAR(form, ref, 10.0 * tol * std::max(1.0, ref));
        if (++done == 20) break;
    }
    EXPECT_EQ(done, 20);
}

TEST(BoundaryWeights, RotationInvariant) {
    const auto c0 = boundary_weights({1.9, 0.1}, {2.1, -0.1}, {2.05, 0.3}, 2.0, 1e-12);
    const Complex r = std::polar(1.0, 2.1);
    const auto c1 = boundary_weights(r * Complex(1.9, 0.1), r * Complex(2.1, -0.1), r * Complex(2.05, 0.3), 2.0, 1e-12);
    EXPECT_NEAR(c0.xy, c1.xy, 1e-11);
    EXPECT_NEAR(c0.yz, c1.yz, 1e-11);
    EXPECT_NEAR(c0.zx, c1.zx, 1e-11);
}

TEST(BoundaryWeights, SmallTrianglesPerturbCotansByOrderH) {
    const auto shapes = oracles::boundary_shapes(30, 7);
    std::vector<double> ratio;
    for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
        double worst = 0.0;
        for (const auto& s : shapes) {
            oracles::BoundaryTriangle t;
            if (!oracles::place(s, h, 2.0, t)) continue;
            const auto c = boundary_weights(t.x, t.y, t.z, 2.0, 1e-12);
            const auto hc = half_cotans(std::array<Complex, 3>{t.x, t.y, t.z});
            worst = std::max({worst, std::abs(c.xy - hc[2]), std::abs(c.yz - hc[0]), std::abs(c.zx - hc[1])});
        }
        ratio.push_back(worst / h);
    }
    for (double r : ratio) {
        EXPECT_GT(r, 0.0);
        EXPECT_LE(r, 2.0 * ratio[0]);
    }
}

TEST(BoundaryWeights, WrongSidesIsDomainError) {
    try {
        boundary_weights({2.1, 0}, {2.2, 0.1}, {2.0, 0.3}, 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(SphericalChord, FlatLimitAndDegenerate) {
    const double eps = 1e-4, s3 = std::sqrt(3.0) / 2.0;
    auto on_sphere = [](double x, double y) { return Vec3{x, y, -std::sqrt(1.0 - x * x - y * y)}; };
    const auto hc = half_cotans(std::array<Vec3, 3>{on_sphere(0, 0), on_sphere(eps, 0), on_sphere(eps / 2, eps * s3)});
    for (double c : hc) EXPECT_NEAR(c, 1.0 / (2.0 * std::sqrt(3.0)), 1e-7);
    EXPECT_THROW(half_cotans(std::array<Vec3, 3>{Vec3{0, 0, 1}, Vec3{0, 0, -1}, Vec3{0, 0, 1}}), Error);
}

TEST(WeightSet, KindsPartitionEdgesAndMatchRegions) {
    const CoverMesh m = torus_mesh(2000);
    const WeightSet w = build_weight_set(m, WeightMode::chart);
    ASSERT_EQ(w.size(), m.n_edges());
    int counts[4] = {0, 0, 0, 0};
    const auto& t = m.topology();
    for (int e = 0; e < m.n_edges(); ++e) {
        ++counts[static_cast<int>(w.kind[e])];
        const int h = t.edge_halfedge(e);
        const Region a = m.region(HalfEdgeMesh::face_of(h)), b = m.region(HalfEdgeMesh::face_of(t.twin(h)));
        if (a == Region::inner && b == Region::inner) EXPECT_EQ(w.kind[e], WeightKind::interior_cotan);
        if (a == Region::outer && b == Region::outer) EXPECT_EQ(w.kind[e], WeightKind::inverted_cotan);
        if (a == Region::boundary || b == Region::boundary) EXPECT_EQ(w.kind[e], WeightKind::boundary_quadrature);
        EXPECT_TRUE(std::isfinite(w[e]));
    }
    EXPECT_EQ(counts[0] + counts[1] + counts[2], m.n_edges());
    EXPECT_GT(counts[0], 0);
    EXPECT_GT(counts[1], 0);
    EXPECT_GT(counts[2], 0);
}

TEST(WeightSet, DelaunayInnerEdgesNonNegative) {
    const CoverMesh m = torus_mesh(2000, false);
    const WeightSet w = build_weight_set(m, WeightMode::chart);
    for (int e = 0; e < m.n_edges(); ++e)
        if (w.kind[e] == WeightKind::interior_cotan) EXPECT_GE(w[e], -1e-12) << e;
}

TEST(WeightSet, SingleEdgeCotanMatchesAssembly) {
    const CoverMesh m = torus_mesh(1000);
    const WeightSet w = build_weight_set(m, WeightMode::chart);
    for (int e = 0; e < m.n_edges(); e += 7)
        if (w.kind[e] != WeightKind::boundary_quadrature) EXPECT_NEAR(cotan_weight(m, e), w[e], 1e-14);
}

TEST(WeightSet, SphericalCloseToChartWeights) {
    // |c^S - c| <= C h |c|: the fitted C must not grow under refinement.
    std::vector<double> C;
    for (int n : {1000, 4000}) {
        const CoverMesh m = torus_mesh(n, false);
        const WeightSet wc = build_weight_set(m, WeightMode::chart);
        const WeightSet ws = build_weight_set(m, WeightMode::spherical);
        for (int e = 0; e < m.n_edges(); ++e) EXPECT_EQ(ws.kind[e], WeightKind::spherical_chord);
        const double h = mesh_stats(m).h;
        double worst = 0.0;
        for (int e = 0; e < m.n_edges(); ++e)
            if (std::abs(wc[e]) > 0.2) worst = std::max(worst, std::abs(ws[e] - wc[e]) / (h * std::abs(wc[e])));
        C.push_back(worst);
    }
    EXPECT_LT(C[1], 1.5 * C[0]);
}

TEST(InterpolationEnergy, ConstantAndLinear) {
    const CoverMesh m = torus_mesh(600);
    const WeightSet w = build_weight_set(m, WeightMode::chart);
    std::vector<double> u(m.n_vertices(), 3.0);
    EXPECT_EQ(interpolation_energy(m, u), 0.0);
    EXPECT_EQ(weighted_energy(m, w, u), 0.0);
    // A linear function restricted to one inner face: gradient^2 * area.
    const auto c = half_cotans(std::array<Complex, 3>{Complex(0.1, 0.1), Complex(0.2, 0.12), Complex(0.13, 0.21)});
    const std::array<Complex, 3> p{Complex(0.1, 0.1), Complex(0.2, 0.12), Complex(0.13, 0.21)};
    std::array<double, 3> lin{};
    for (int i = 0; i < 3; ++i) lin[i] = 2.0 * p[i].real() - 0.5 * p[i].imag();
    const double area = signed_area(p[0], p[1], p[2]);
    const double cot_sum = c[2] * std::pow(lin[0] - lin[1], 2) + c[0] * std::pow(lin[1] - lin[2], 2) + c[1] * std::pow(lin[2] - lin[0], 2);
    EXPECT_NEAR(cot_sum, (4.0 + 0.25) * area, 1e-15);
}

TEST(InterpolationEnergy, MatchesWeightedSumOnTorus) {
    const CoverMesh m = torus_mesh(1000);
    const WeightSet w = build_weight_set(m, WeightMode::chart);
    std::mt19937_64 gen(12);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> u(m.n_vertices());
        for (auto& x : u) x = N(gen);
        const double a = interpolation_energy(m, u), b = weighted_energy(m, w, u);
        EXPECT_NEAR(a, b, 1e-8 * b);
    }
}
