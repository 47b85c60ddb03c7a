#pragma once

// Edge weights: cotan weights on inner faces (plane chart) and outer faces
// (after z -> 1/z), quadrature weights on boundary faces whose far edge is a
// circular arc, and the flat chord-triangle variant on the sphere. Also the
// Dirichlet energy of the interpolant, computed face by face, as an oracle.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace ramiperiod {

enum class WeightKind : std::uint8_t { interior_cotan, inverted_cotan, boundary_quadrature, spherical_chord };

inline const char* to_string(WeightKind k) {
    switch (k) {
    case WeightKind::interior_cotan: return "interior-cotan";
    case WeightKind::inverted_cotan: return "inverted-cotan";
    case WeightKind::boundary_quadrature: return "boundary-quadrature";
    case WeightKind::spherical_chord: return "spherical-chord";
    }
    return "?";
}

enum class WeightMode { chart, spherical };

struct WeightSet {
    std::vector<double> weight;     ///< by undirected edge id
    std::vector<WeightKind> kind;
    double quadrature_tol = 1e-10;

    int size() const { return static_cast<int>(weight.size()); }
    double operator[](int e) const { return weight[static_cast<std::size_t>(e)]; }
};

// ---------------------------------------------------------------------------
// Per-triangle contributions

/// Half cotangents of the three corner angles of a planar triangle: entry i
/// belongs to the edge opposite corner i, i.e. edge (i+1, i+2).
inline std::array<double, 3> half_cotans(const std::array<Complex, 3>& p) {
    const double area2 = std::abs(std::imag(std::conj(p[1] - p[0]) * (p[2] - p[0])));
    const double scale = std::max({std::norm(p[1] - p[0]), std::norm(p[2] - p[1]), std::norm(p[0] - p[2])});
    if (!(area2 > 1e-14 * scale)) fail(ErrorKind::degeneracy, "degenerate triangle (zero area in its chart)");
    return {0.5 * corner_cot(p[0], p[1], p[2]), 0.5 * corner_cot(p[1], p[2], p[0]), 0.5 * corner_cot(p[2], p[0], p[1])};
}

inline std::array<double, 3> half_cotans(const std::array<Vec3, 3>& p) {
    const double area2 = (p[1] - p[0]).cross(p[2] - p[0]).norm();
    const double scale = std::max({(p[1] - p[0]).dot(p[1] - p[0]), (p[2] - p[1]).dot(p[2] - p[1]), (p[0] - p[2]).dot(p[0] - p[2])});
    if (!(area2 > 1e-14 * scale)) fail(ErrorKind::degeneracy, "degenerate chord triangle (zero area)");
    return {0.5 * corner_cot(p[0], p[1], p[2]), 0.5 * corner_cot(p[1], p[2], p[0]), 0.5 * corner_cot(p[2], p[0], p[1])};
}

/// Far edge of a boundary triangle: the straight segment y->z of the 1/z
/// chart, pulled back. s(0) = y, s(1) = z.
struct InvertedArc {
    Complex y, z;
    Complex operator()(double t) const { return y * z / (z + t * (y - z)); }
    Complex derivative(double t) const {
        const Complex q = z + t * (y - z);
        return -y * z * (y - z) / (q * q);
    }
    // arc(t) - x without cancellation: arc(t) - y = t y (z - y) / q.
    Complex offset(Complex x, double t) const { return (y - x) + t * y * (z - y) / (z + t * (y - z)); }
};

/// Straight far edge, for the Euclidean limit.
struct StraightArc {
    Complex y, z;
    Complex operator()(double t) const { return y + t * (z - y); }
    Complex derivative(double) const { return z - y; }
    Complex offset(Complex x, double t) const { return (y - x) + t * (z - y); }
};

struct BoundaryTriple {
    double xy = 0.0, yz = 0.0, zx = 0.0;
};

/// Weights of the ruled triangle p(t, s) = x + s (arc(t) - x) carrying the
/// interpolant (1-s) u_x + s ((1-t) u_y + t u_z): the Dirichlet energy equals
/// C_xy (u_x-u_y)^2 + C_yz (u_y-u_z)^2 + C_zx (u_z-u_x)^2. Integrating out s
/// leaves, with w = arc(t) - x and J = |Im(conj(w) arc'(t))|,
///   C_xy = 1/2 int ((1-t)|arc'|^2 + Re(conj(w) arc')) / J
///   C_yz = 1/2 int (|w|^2 - t(1-t)|arc'|^2 + (1-2t) Re(conj(w) arc')) / J
///   C_zx = 1/2 int (t|arc'|^2 - Re(conj(w) arc')) / J
template <class Arc>
BoundaryTriple ruled_triangle_weights(Complex x, const Arc& arc, double rel_tol) {
    auto jac = [&](double t) {
        const Complex w = arc.offset(x, t);
        const double J = std::abs(std::imag(std::conj(w) * arc.derivative(t)));
        if (!(J > 0.0)) fail(ErrorKind::degeneracy, "boundary triangle degenerates (the far edge passes through x)");
        return J;
    };
    BoundaryTriple c;
    c.xy = 0.5 * integrate(
                     [&](double t) {
                         const Complex w = arc.offset(x, t), d = arc.derivative(t);
                         return ((1.0 - t) * std::norm(d) + std::real(std::conj(w) * d)) / jac(t);
                     },
                     0.0, 1.0, rel_tol);
    c.yz = 0.5 * integrate(
                     [&](double t) {
                         const Complex w = arc.offset(x, t), d = arc.derivative(t);
                         return (std::norm(w) - t * (1.0 - t) * std::norm(d) + (1.0 - 2.0 * t) * std::real(std::conj(w) * d)) / jac(t);
                     },
                     0.0, 1.0, rel_tol);
    c.zx = 0.5 * integrate(
                     [&](double t) {
                         const Complex w = arc.offset(x, t), d = arc.derivative(t);
                         return (t * std::norm(d) - std::real(std::conj(w) * d)) / jac(t);
                     },
                     0.0, 1.0, rel_tol);
    return c;
}

/// Boundary-triangle weights: x inside B_rho, y and z outside.
inline BoundaryTriple boundary_weights(Complex x, Complex y, Complex z, double rho, double rel_tol = 1e-10) {
    if (!(std::abs(x) < rho) || !(std::abs(y) >= rho) || !(std::abs(z) >= rho))
        fail(ErrorKind::domain, "boundary triangle needs x inside and y, z outside the circle |w| = rho");
    const double bound = std::max(rho / 2.0, 1.0);
    if (!(std::abs(x - y) < bound) || !(std::abs(y - z) < bound) || !(std::abs(z - x) < bound))
        fail(ErrorKind::domain, "boundary triangle edge not shorter than max(rho/2, 1)");
    return ruled_triangle_weights(x, InvertedArc{y, z}, rel_tol);
}

// ---------------------------------------------------------------------------
// Assembly

namespace detail {

/// Contribution of face f to each of its three edges, indexed by corner i
/// for the edge (i, i+1).
inline std::array<double, 3> face_edge_contributions(const CoverMesh& m, int f, WeightMode mode, double tol) {
    const auto& t = m.topology().face(f);
    std::array<double, 3> out{};
    if (mode == WeightMode::spherical) {
        const auto hc = half_cotans(std::array<Vec3, 3>{m.sphere_position(t[0]), m.sphere_position(t[1]), m.sphere_position(t[2])});
        // Edge (i, i+1) is opposite corner i+2.
        for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = hc[static_cast<std::size_t>((i + 2) % 3)];
        return out;
    }
    if (m.region(f) != Region::boundary) {
        const auto hc = half_cotans(m.chart_corners(f));
        for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = hc[static_cast<std::size_t>((i + 2) % 3)];
        return out;
    }
    int ix = 0;
    while (!m.in_disk(t[static_cast<std::size_t>(ix)])) ++ix;
    const int iy = (ix + 1) % 3, iz = (ix + 2) % 3;
    for (int i : {iy, iz})
        if (m.position(t[static_cast<std::size_t>(i)]).infinite)
            fail(ErrorKind::domain, "boundary triangle has a vertex at infinity");
    const BoundaryTriple c = boundary_weights(m.position(t[static_cast<std::size_t>(ix)]).z, m.position(t[static_cast<std::size_t>(iy)]).z,
                                              m.position(t[static_cast<std::size_t>(iz)]).z, m.rho(), tol);
    out[static_cast<std::size_t>(ix)] = c.xy;
    out[static_cast<std::size_t>(iy)] = c.yz;
    out[static_cast<std::size_t>(iz)] = c.zx;
    return out;
}

}  // namespace detail

inline WeightSet build_weight_set(const CoverMesh& m, WeightMode mode, const Config& cfg = default_config()) {
    const auto& topo = m.topology();
    WeightSet ws;
    ws.quadrature_tol = cfg.quadrature_tol;
    ws.weight.assign(static_cast<std::size_t>(topo.n_edges()), 0.0);
    ws.kind.assign(static_cast<std::size_t>(topo.n_edges()), WeightKind::interior_cotan);
    for (int f = 0; f < m.n_faces(); ++f) {
        std::array<double, 3> c{};
        try {
            c = detail::face_edge_contributions(m, f, mode, cfg.quadrature_tol);
        } catch (const Error& e) {
            fail(e.kind(), "face " + std::to_string(f) + ": " + e.message());
        }
        for (int i = 0; i < 3; ++i) ws.weight[static_cast<std::size_t>(topo.edge(3 * f + i))] += c[static_cast<std::size_t>(i)];
    }
    for (int e = 0; e < topo.n_edges(); ++e) {
        const int h = topo.edge_halfedge(e);
        const Region a = m.region(HalfEdgeMesh::face_of(h)), b = m.region(HalfEdgeMesh::face_of(topo.twin(h)));
        WeightKind k = WeightKind::interior_cotan;
        if (mode == WeightMode::spherical)
            k = WeightKind::spherical_chord;
        else if (a == Region::boundary || b == Region::boundary)
            k = WeightKind::boundary_quadrature;
        else if (a == Region::outer && b == Region::outer)
            k = WeightKind::inverted_cotan;
        else if (a != b)
            fail(ErrorKind::consistency, "edge " + std::to_string(e) + " joins an inner and an outer face");
        ws.kind[static_cast<std::size_t>(e)] = k;
        if (!std::isfinite(ws.weight[static_cast<std::size_t>(e)]))
            fail(ErrorKind::numeric, "edge " + std::to_string(e) + " received a non-finite weight");
    }
    return ws;
}

/// Chord-triangle cotan weights of the points on the sphere.
inline WeightSet spherical_chord_weights(const CoverMesh& m) { return build_weight_set(m, WeightMode::spherical); }

/// Single-edge cotan weight; both faces must be inner or both outer.
inline double cotan_weight(const CoverMesh& m, int e) {
    const auto& topo = m.topology();
    const int h = topo.edge_halfedge(e), g = topo.twin(h);
    const int f1 = HalfEdgeMesh::face_of(h), f2 = HalfEdgeMesh::face_of(g);
    const Region a = m.region(f1), b = m.region(f2);
    if (a == Region::boundary || b == Region::boundary || a != b)
        fail(ErrorKind::argument, "cotan_weight needs two inner or two outer faces");
    const auto c1 = detail::face_edge_contributions(m, f1, WeightMode::chart, 1e-10);
    const auto c2 = detail::face_edge_contributions(m, f2, WeightMode::chart, 1e-10);
    return c1[static_cast<std::size_t>(h % 3)] + c2[static_cast<std::size_t>(g % 3)];
}

// ---------------------------------------------------------------------------
// Interpolation energy oracle: integrates |grad I u|^2 face by face without
// going through the weights.

namespace detail {

/// |grad u|^2 * area for the linear interpolant on a planar triangle.
inline double linear_face_energy(const std::array<Complex, 3>& p, const std::array<double, 3>& u) {
    // Solve [e1; e2] g = [du1; du2] for the gradient g.
    const Complex e1 = p[1] - p[0], e2 = p[2] - p[0];
    const double det = e1.real() * e2.imag() - e1.imag() * e2.real();
    const double du1 = u[1] - u[0], du2 = u[2] - u[0];
    const double gx = (du1 * e2.imag() - du2 * e1.imag()) / det;
    const double gy = (e1.real() * du2 - e2.real() * du1) / det;
    return (gx * gx + gy * gy) * 0.5 * std::abs(det);
}

/// Energy of the ruled interpolant p(t, s) = x + s (arc(t) - x). The
/// gradient does not depend on s and the Jacobian is linear in s, so the s
/// integral is done by hand; only t is integrated numerically.
template <class Arc>
double ruled_face_energy(Complex x, const Arc& arc, double ux, double uy, double uz, double rel_tol) {
    if (ux == uy && uy == uz) return 0.0;  // a relative tolerance on pure roundoff would never be met
    auto dens = [&](double t) {
        const Complex ps = arc.offset(x, t);    // dp/ds
        const Complex pt = arc.derivative(t);  // dp/dt at s = 1
        const double a = ps.real(), b = pt.real(), c = ps.imag(), d = pt.imag();
        const double det = a * d - b * c;
        // Chain rule: [u_s, u_t] = grad u . [p_s, p_t].
        const double us = -ux + (1.0 - t) * uy + t * uz;
        const double ut = uz - uy;
        const double gx = (us * d - ut * c) / det;
        const double gy = (-us * b + ut * a) / det;
        return 0.5 * (gx * gx + gy * gy) * std::abs(det);
    };
    return integrate(dens, 0.0, 1.0, rel_tol);
}

}  // namespace detail

inline double interpolation_energy(const CoverMesh& m, const std::vector<double>& u, double rel_tol = 1e-11) {
    if (static_cast<int>(u.size()) != m.n_vertices()) fail(ErrorKind::argument, "vertex function has the wrong size");
    double total = 0.0;
    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& t = m.topology().face(f);
        const std::array<double, 3> uf{u[static_cast<std::size_t>(t[0])], u[static_cast<std::size_t>(t[1])], u[static_cast<std::size_t>(t[2])]};
        if (m.region(f) != Region::boundary) {
            total += detail::linear_face_energy(m.chart_corners(f), uf);
            continue;
        }
        int ix = 0;
        while (!m.in_disk(t[static_cast<std::size_t>(ix)])) ++ix;
        const int iy = (ix + 1) % 3, iz = (ix + 2) % 3;
        const InvertedArc arc{m.position(t[static_cast<std::size_t>(iy)]).z, m.position(t[static_cast<std::size_t>(iz)]).z};
        total += detail::ruled_face_energy(m.position(t[static_cast<std::size_t>(ix)]).z, arc, uf[static_cast<std::size_t>(ix)],
                                           uf[static_cast<std::size_t>(iy)], uf[static_cast<std::size_t>(iz)], rel_tol);
    }
    return total;
}

/// sum_e c(e) (u(head) - u(tail))^2 for a single-valued u.
inline double weighted_energy(const CoverMesh& m, const WeightSet& w, const std::vector<double>& u) {
    const auto& topo = m.topology();
    double total = 0.0;
    for (int e = 0; e < topo.n_edges(); ++e) {
        const int h = topo.edge_halfedge(e);
        const double d = u[static_cast<std::size_t>(topo.target(h))] - u[static_cast<std::size_t>(topo.origin(h))];
        total += w[e] * d * d;
    }
    return total;
}

}  // namespace ramiperiod
