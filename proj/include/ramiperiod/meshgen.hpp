#pragma once

// Mesh generation on the sphere and lifting to the covering surface:
// sampling, branch-point insertion, ring adaptation inside the disks about
// branch points, cut-based sheet gluing, and quality statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "covering.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "sphere.hpp"

namespace ramiperiod {

/// Triangulation of the base sphere. Positions are authoritative (branch
/// points keep their exact coordinates); sphere points are derived from them
/// except for sampled points. Faces are counterclockwise in the plane chart.
struct BaseMesh {
    std::vector<ExtComplex> positions;
    std::vector<Vec3> sphere;
    std::vector<std::array<int, 3>> faces;
    std::vector<int> branch_vertex;  ///< per branch point of the cover

    int n_vertices() const { return static_cast<int>(positions.size()); }
};

enum class Sampler { fibonacci, random };

/// Typical edge length of an n-point uniform sphere triangulation, as chord length.
inline double nominal_chord_spacing(int n) {
    return std::sqrt(8.0 * std::numbers::pi / (std::sqrt(3.0) * n));
}

/// Same, in the plane chart at O (the 1/z chart at infinity).
inline double local_plane_spacing(int n, const ExtComplex& O) {
    const double r = O.infinite ? 0.0 : std::abs(O.z);
    return nominal_chord_spacing(n) * (1.0 + r * r) / 2.0;
}

/// Default adaptation target for an n-point base: the finest local spacing
/// among the branch points.
inline double default_h_target(int n, const BranchedCover& cover) {
    double h = INFINITY;
    for (const auto& b : cover.branch_points) h = std::min(h, local_plane_spacing(n, b.position));
    return std::isfinite(h) ? h : nominal_chord_spacing(n);
}

namespace detail {

/// Distance in the chart of O (plain plane distance, or 1/z distance at infinity).
inline double chart_distance(const ExtComplex& z, const ExtComplex& O) {
    if (O.infinite) {
        if (z.infinite) return 0.0;
        if (z.z == Complex{}) return INFINITY;
        return 1.0 / std::abs(z.z);
    }
    if (z.infinite) return INFINITY;
    return std::abs(z.z - O.z);
}

inline BaseMesh triangulate(std::vector<ExtComplex> positions, std::vector<Vec3> sphere, std::vector<int> branch_vertex) {
    SphereTriangulation t = spherical_delaunay(sphere);
    BaseMesh b{std::move(positions), std::move(t.points), {}, std::move(branch_vertex)};
    b.faces.reserve(t.faces.size());
    // Hull faces are counterclockwise seen from outside, which is clockwise
    // in the stereographic plane.
    for (const auto& f : t.faces) b.faces.push_back({f[0], f[2], f[1]});
    return b;
}

}  // namespace detail

/// Sample n points, make every branch point a vertex (snapping the nearest
/// sample within half the local spacing onto it, inserting otherwise), and
/// triangulate.
inline BaseMesh sample_base(const BranchedCover& cover, Sampler sampler, int n, std::uint64_t seed = 0) {
    std::vector<Vec3> pts = sampler == Sampler::fibonacci ? fibonacci_points(n) : random_points(n, seed);
    std::vector<ExtComplex> pos;
    pos.reserve(pts.size() + cover.branch_points.size());
    for (const auto& p : pts) pos.push_back(stereographic(p));
    std::vector<int> bv(cover.branch_points.size(), -1);
    std::vector<char> taken(pts.size(), 0);
    for (std::size_t k = 0; k < cover.branch_points.size(); ++k) {
        const ExtComplex& O = cover.branch_points[k].position;
        const double snap = 0.5 * local_plane_spacing(n, O);
        int best = -1;
        double bestd = INFINITY;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (taken[i]) continue;
            const double d = detail::chart_distance(pos[i], O);
            if (d < bestd) bestd = d, best = static_cast<int>(i);
        }
        if (best >= 0 && bestd < snap) {
            pos[static_cast<std::size_t>(best)] = O;
            pts[static_cast<std::size_t>(best)] = inverse_stereographic(O);
            taken[static_cast<std::size_t>(best)] = 1;
            bv[k] = best;
        } else {
            bv[k] = static_cast<int>(pos.size());
            pos.push_back(O);
            pts.push_back(inverse_stereographic(O));
            taken.push_back(1);
        }
    }
    return detail::triangulate(std::move(pos), std::move(pts), std::move(bv));
}

/// Ring layout inside the disk about one branch point, in the chart w = g_O.
struct RingPlan {
    double radial_step = 0.0;      ///< chart distance between rings
    double tangential_max = 0.0;   ///< max chart spacing along a ring
    int rings = 0;
    std::vector<int> counts;       ///< base vertices per ring
};

/// Chart radial step 0.65 h and chart spacing along rings at most 0.75 h
/// keep every chart edge inside the disk below h; the outermost ring stays
/// half a step inside the disk boundary.
inline RingPlan plan_rings(double r_O, double gamma, double h_target) {
    RingPlan p;
    p.radial_step = 0.65 * h_target;
    p.tangential_max = 0.75 * h_target;
    const double R = std::pow(r_O, gamma);
    p.rings = std::max(0, static_cast<int>(std::floor(R / p.radial_step - 0.5)));
    for (int j = 1; j <= p.rings; ++j) {
        // A base ring of N points becomes N/gamma chart points on a circle of radius j*step.
        const double need = 2.0 * std::numbers::pi * j * p.radial_step * gamma / p.tangential_max;
        p.counts.push_back(std::max(3, static_cast<int>(std::ceil(need - 1e-9))));
    }
    return p;
}

/// Replace the samples inside every disk B_{r_O}(O) of a branch point with
/// concentric rings, uniform in the chart g_O, and re-triangulate. Branch
/// vertices are never moved or removed.
inline BaseMesh adapt_near_branch(const BaseMesh& base, const BranchedCover& cover, double h_target) {
    if (!(h_target > 0.0)) fail(ErrorKind::argument, "h_target must be positive");
    double rmin = INFINITY;
    for (const auto& b : cover.branch_points) rmin = std::min(rmin, b.r_O);
    const double limit = std::max({cover.rho / 4.0, std::isfinite(rmin) ? rmin / 4.0 : 0.0, 1.0});
    if (h_target >= limit)
        fail(ErrorKind::argument, "h_target " + detail::format_double(h_target) + " must be below " + detail::format_double(limit));
    if (cover.branch_points.empty()) return base;
    for (std::size_t k = 0; k < cover.branch_points.size(); ++k)
        if (k >= base.branch_vertex.size() || base.branch_vertex[k] < 0)
            fail(ErrorKind::argument, "branch point " + std::to_string(k) + " is not a vertex of the base mesh");

    std::vector<char> is_branch(base.positions.size(), 0);
    for (int v : base.branch_vertex) is_branch[static_cast<std::size_t>(v)] = 1;

    std::vector<ExtComplex> pos;
    std::vector<Vec3> sph;
    std::vector<int> bv(cover.branch_points.size(), -1);
    for (std::size_t i = 0; i < base.positions.size(); ++i) {
        bool drop = false;
        if (!is_branch[i])
            for (const auto& b : cover.branch_points)
                if (detail::chart_distance(base.positions[i], b.position) < b.r_O) drop = true;
        if (drop) continue;
        for (std::size_t k = 0; k < bv.size(); ++k)
            if (base.branch_vertex[k] == static_cast<int>(i)) bv[k] = static_cast<int>(pos.size());
        pos.push_back(base.positions[i]);
        sph.push_back(base.sphere[i]);
    }
    for (const auto& b : cover.branch_points) {
        const double gamma = b.gamma();
        const RingPlan plan = plan_rings(b.r_O, gamma, h_target);
        // Angles are offset from the cut direction so no ring point lies on a cut.
        const double cut_angle = b.position.infinite ? 0.0 : std::arg(b.position.z);
        for (int j = 1; j <= plan.rings; ++j) {
            const int N = plan.counts[static_cast<std::size_t>(j - 1)];
            const double r = std::pow(j * plan.radial_step, 1.0 / gamma);
            const double step = 2.0 * std::numbers::pi / N;
            const double shift = (j % 2 == 1 ? 0.5 : 0.0) + 0.3137;
            for (int k = 0; k < N; ++k) {
                const Complex w = std::polar(r, cut_angle + (k + shift) * step);
                const ExtComplex z = b.position.infinite ? ExtComplex::finite(1.0 / w) : ExtComplex::finite(b.position.z + w);
                pos.push_back(z);
                sph.push_back(inverse_stereographic(z));
            }
        }
    }
    return detail::triangulate(std::move(pos), std::move(sph), std::move(bv));
}

// ---------------------------------------------------------------------------
// Lifting. Each finite branch point p gets a cut along the ray {t p : t >= 1}
// (on the sphere, the meridian arc from p to the north pole). Crossing a cut
// counterclockwise about the origin moves sheet s to monodromy(s).

namespace detail {

struct ArcHit {
    double t;  // position along the path, for ordering
    int sign;
};

/// Signed crossing of great arcs a->b (path) and c->d (cut), or nullopt.
/// Sign +1 when the path crosses the cut from its right to its left in the
/// plane chart.
inline std::optional<int> arc_crossing(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, double* where) {
    const Vec3 n1 = a.cross(b), n2 = c.cross(d);
    const Vec3 w = n1.cross(n2);
    const double wn = w.norm();
    if (wn < 1e-300) return std::nullopt;
    for (double s : {1.0, -1.0}) {
        const Vec3 X = w * (s / wn);
        if (a.cross(X).dot(n1) >= 0.0 && X.cross(b).dot(n1) >= 0.0 && c.cross(X).dot(n2) >= 0.0 && X.cross(d).dot(n2) >= 0.0) {
            if (where) *where = std::atan2(a.cross(X).norm(), a.dot(X));
            return s > 0 ? 1 : -1;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Sheet transition across each base half-edge: face (f, s) is glued to
/// face (twin face, T[h](s)).
inline std::vector<Permutation> cut_transitions(const BaseMesh& base, const HalfEdgeMesh& topo, const BranchedCover& cover) {
    const int d = cover.degree;
    std::vector<Vec3> centroid(static_cast<std::size_t>(topo.n_faces()));
    for (int f = 0; f < topo.n_faces(); ++f) {
        const auto& t = topo.face(f);
        centroid[static_cast<std::size_t>(f)] =
            (base.sphere[static_cast<std::size_t>(t[0])] + base.sphere[static_cast<std::size_t>(t[1])] + base.sphere[static_cast<std::size_t>(t[2])]).normalized();
    }
    struct Cut { Vec3 from; const Permutation* sigma; Permutation inverse; };
    std::vector<Cut> cuts;
    for (const auto& b : cover.branch_points)
        if (!b.position.infinite) cuts.push_back({inverse_stereographic(b.position), &b.monodromy, b.monodromy.inverse()});

    std::vector<Permutation> T(static_cast<std::size_t>(topo.n_halfedges()));
    const Permutation id = Permutation::identity(d);
    for (int h = 0; h < topo.n_halfedges(); ++h) {
        const int g = topo.twin(h);
        if (g < h) {
            T[static_cast<std::size_t>(h)] = T[static_cast<std::size_t>(g)].inverse();
            continue;
        }
        const Vec3 a = centroid[static_cast<std::size_t>(HalfEdgeMesh::face_of(h))];
        const Vec3 c = centroid[static_cast<std::size_t>(HalfEdgeMesh::face_of(g))];
        const Vec3 m = (base.sphere[static_cast<std::size_t>(topo.origin(h))] + base.sphere[static_cast<std::size_t>(topo.target(h))]).normalized();
        std::vector<std::pair<double, Permutation>> hits;
        for (const auto& cut : cuts) {
            double t = 0.0;
            if (auto s = detail::arc_crossing(a, m, cut.from, north_pole, &t)) hits.push_back({t, *s > 0 ? *cut.sigma : cut.inverse});
            if (auto s = detail::arc_crossing(m, c, cut.from, north_pole, &t)) hits.push_back({10.0 + t, *s > 0 ? *cut.sigma : cut.inverse});
        }
        std::stable_sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        Permutation p = id;
        for (const auto& hit : hits) p = hit.second * p;
        T[static_cast<std::size_t>(h)] = p;
    }
    return T;
}

/// Glue d copies of the base triangulation along the cuts. Cover face
/// f*d + s is the copy of base face f on sheet s.
inline CoverMesh lift_to_cover(const BaseMesh& base, const BranchedCover& cover) {
    const int d = cover.degree;
    for (std::size_t k = 0; k < cover.branch_points.size(); ++k)
        if (k >= base.branch_vertex.size() || base.branch_vertex[k] < 0)
            fail(ErrorKind::argument, "branch point " + std::to_string(k) + " is not a vertex of the base mesh");
    const HalfEdgeMesh topo(base.n_vertices(), base.faces);
    std::vector<int> branch_of(base.positions.size(), -1);
    for (std::size_t k = 0; k < cover.branch_points.size(); ++k) branch_of[static_cast<std::size_t>(base.branch_vertex[k])] = static_cast<int>(k);
    for (int e = 0; e < topo.n_edges(); ++e) {
        const int h = topo.edge_halfedge(e);
        if (branch_of[static_cast<std::size_t>(topo.origin(h))] >= 0 && branch_of[static_cast<std::size_t>(topo.target(h))] >= 0)
            fail(ErrorKind::topology, "branch vertices " + std::to_string(topo.origin(h)) + " and " + std::to_string(topo.target(h)) +
                                          " are adjacent; refine the mesh");
    }
    const auto T = cut_transitions(base, topo, cover);

    std::vector<CoverVertex> verts;
    std::vector<int> corner(static_cast<std::size_t>(topo.n_faces()) * 3 * static_cast<std::size_t>(d), -1);
    for (int v = 0; v < topo.n_vertices(); ++v) {
        const auto fan = topo.outgoing(v);
        // S[j] maps sheets of the first fan face to sheets of face j.
        std::vector<Permutation> S;
        S.reserve(fan.size());
        S.push_back(Permutation::identity(d));
        for (std::size_t j = 0; j + 1 < fan.size(); ++j) S.push_back(T[static_cast<std::size_t>(HalfEdgeMesh::prev(fan[j]))] * S.back());
        const Permutation M = T[static_cast<std::size_t>(HalfEdgeMesh::prev(fan.back()))] * S.back();
        const int bk = branch_of[static_cast<std::size_t>(v)];
        if (bk < 0 && !M.is_identity())
            fail(ErrorKind::topology, "monodromy around non-branch vertex " + std::to_string(v) + " is not the identity");
        if (bk >= 0) {
            auto want = cover.branch_points[static_cast<std::size_t>(bk)].monodromy.cycles();
            auto got = M.cycles();
            std::vector<std::size_t> lw, lg;
            for (const auto& c : want) lw.push_back(c.size());
            for (const auto& c : got) lg.push_back(c.size());
            std::sort(lw.begin(), lw.end());
            std::sort(lg.begin(), lg.end());
            if (lw != lg)
                fail(ErrorKind::topology, "face fan around branch vertex " + std::to_string(v) + " does not match the monodromy of branch point " +
                                              std::to_string(bk));
        }
        std::vector<int> lift_of_sheet(static_cast<std::size_t>(d), -1);
        for (const auto& cyc : M.cycles()) {
            const int id = static_cast<int>(verts.size());
            verts.push_back({cyc.front(), base.positions[static_cast<std::size_t>(v)], bk});
            for (int s : cyc) lift_of_sheet[static_cast<std::size_t>(s)] = id;
        }
        for (std::size_t j = 0; j < fan.size(); ++j) {
            const int h = fan[j];
            const Permutation Sinv = S[j].inverse();
            for (int t = 0; t < d; ++t)
                corner[(static_cast<std::size_t>(h) * static_cast<std::size_t>(d)) + static_cast<std::size_t>(t)] =
                    lift_of_sheet[static_cast<std::size_t>(Sinv(t))];
        }
    }
    std::vector<std::array<int, 3>> faces;
    std::vector<int> sheets;
    faces.reserve(static_cast<std::size_t>(topo.n_faces() * d));
    for (int f = 0; f < topo.n_faces(); ++f)
        for (int s = 0; s < d; ++s) {
            std::array<int, 3> cf{};
            for (int i = 0; i < 3; ++i) cf[static_cast<std::size_t>(i)] = corner[static_cast<std::size_t>(3 * f + i) * static_cast<std::size_t>(d) + static_cast<std::size_t>(s)];
            faces.push_back(cf);
            sheets.push_back(s);
        }
    CoverMesh mesh(std::move(verts), std::move(faces), cover.rho, std::move(sheets));
    const long chi = mesh.topology().euler_characteristic();
    const long expect = 2 - 2 * static_cast<long>(genus(cover));
    if (chi != expect)
        fail(ErrorKind::topology, "lifted mesh has Euler characteristic " + std::to_string(chi) + ", expected " + std::to_string(expect));
    return mesh;
}

struct MeshOptions {
    Sampler sampler = Sampler::fibonacci;
    int n = 1000;
    std::uint64_t seed = 0;
    bool adapt = true;
    std::optional<double> h_target;
};

inline CoverMesh generate_mesh(const BranchedCover& cover, const MeshOptions& opt) {
    require_valid(cover);
    BaseMesh base = sample_base(cover, opt.sampler, opt.n, opt.seed);
    if (opt.adapt) base = adapt_near_branch(base, cover, opt.h_target.value_or(default_h_target(opt.n, cover)));
    return lift_to_cover(base, cover);
}

// ---------------------------------------------------------------------------
// Charts g_O on the cover. Branch positions and radii are recovered from the
// flagged vertices, using the default radius rule, so loaded meshes work too.

struct BranchChart {
    int vertex = -1;           ///< cover vertex of the branch point
    ExtComplex position;
    double r_O = 0.0;
    double gamma = 1.0;
    std::vector<int> members;  ///< cover vertices of C_O (including the centre)
};

struct ChartSystem {
    std::vector<BranchChart> charts;
    std::vector<int> chart_of;    ///< cover vertex -> chart index or -1
    std::vector<Complex> image;   ///< g_O image for members
};

inline ChartSystem branch_charts(const CoverMesh& m) {
    const auto& topo = m.topology();
    ChartSystem cs;
    cs.chart_of.assign(static_cast<std::size_t>(m.n_vertices()), -1);
    cs.image.assign(static_cast<std::size_t>(m.n_vertices()), Complex{});
    std::map<int, ExtComplex> branch_pos;
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.vertex(v).branch >= 0) branch_pos.emplace(m.vertex(v).branch, m.position(v));
    BranchedCover proxy;
    proxy.rho = m.rho();
    for (const auto& [k, p] : branch_pos) proxy.branch_points.push_back({p, Permutation::identity(1), 0.0});
    assign_default_radii(proxy);
    auto radius_of = [&](const ExtComplex& p) {
        for (const auto& b : proxy.branch_points)
            if (b.position == p) return b.r_O;
        return 0.0;
    };

    for (int o = 0; o < m.n_vertices(); ++o) {
        if (m.vertex(o).branch < 0) continue;
        BranchChart ch;
        ch.vertex = o;
        ch.position = m.position(o);
        ch.r_O = radius_of(ch.position);
        const auto out = topo.outgoing(o);
        // Cone angle from the neighbour ring, measured in the chart about O.
        std::vector<double> phi(static_cast<std::size_t>(m.n_vertices()), NAN);
        double acc = 0.0;
        double prev_arg = polar_about(m.position(topo.target(out[0])), ch.position).phi;
        phi[static_cast<std::size_t>(topo.target(out[0]))] = 0.0;
        for (std::size_t k = 1; k <= out.size(); ++k) {
            const int w = topo.target(out[k % out.size()]);
            const double a = polar_about(m.position(w), ch.position).phi;
            double da = a - prev_arg;
            while (da <= -std::numbers::pi) da += 2.0 * std::numbers::pi;
            while (da > std::numbers::pi) da -= 2.0 * std::numbers::pi;
            // The ring about O turns counterclockwise in the plane (clockwise in the 1/z chart).
            acc += da;
            prev_arg = a;
            if (k < out.size() && std::isnan(phi[static_cast<std::size_t>(w)])) phi[static_cast<std::size_t>(w)] = acc;
        }
        const double turns = std::abs(acc) / (2.0 * std::numbers::pi);
        ch.gamma = 1.0 / std::max(1.0, std::round(turns));
        const int idx = static_cast<int>(cs.charts.size());
        cs.chart_of[static_cast<std::size_t>(o)] = idx;
        cs.image[static_cast<std::size_t>(o)] = Complex{};
        ch.members.push_back(o);
        std::queue<int> q;
        for (int h : out) {
            const int w = topo.target(h);
            if (cs.chart_of[static_cast<std::size_t>(w)] >= 0 || polar_about(m.position(w), ch.position).r >= ch.r_O) continue;
            cs.chart_of[static_cast<std::size_t>(w)] = idx;
            ch.members.push_back(w);
            q.push(w);
        }
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            const double av = polar_about(m.position(v), ch.position).phi;
            for (int h : topo.outgoing(v)) {
                const int w = topo.target(h);
                if (w == o || (!std::isnan(phi[static_cast<std::size_t>(w)]) && cs.chart_of[static_cast<std::size_t>(w)] == idx)) continue;
                const auto pw = polar_about(m.position(w), ch.position);
                if (pw.r >= ch.r_O) continue;
                double da = pw.phi - av;
                while (da <= -std::numbers::pi) da += 2.0 * std::numbers::pi;
                while (da > std::numbers::pi) da -= 2.0 * std::numbers::pi;
                phi[static_cast<std::size_t>(w)] = phi[static_cast<std::size_t>(v)] + da;
                if (cs.chart_of[static_cast<std::size_t>(w)] != idx) {
                    cs.chart_of[static_cast<std::size_t>(w)] = idx;
                    ch.members.push_back(w);
                }
                q.push(w);
            }
        }
        const double orient = acc < 0.0 ? -1.0 : 1.0;
        for (int v : ch.members) {
            if (v == o) continue;
            const double r = polar_about(m.position(v), ch.position).r;
            cs.image[static_cast<std::size_t>(v)] = chart_image(ChartPolar{r, orient * phi[static_cast<std::size_t>(v)]}, ch.gamma);
        }
        cs.charts.push_back(std::move(ch));
    }
    return cs;
}

/// Largest g_O distance over edges with both ends in the same chart disk.
inline double max_chart_edge(const CoverMesh& m, const ChartSystem& cs) {
    double worst = 0.0;
    const auto& topo = m.topology();
    for (int e = 0; e < topo.n_edges(); ++e) {
        const int h = topo.edge_halfedge(e);
        const int a = topo.origin(h), b = topo.target(h);
        const int ca = cs.chart_of[static_cast<std::size_t>(a)];
        if (ca < 0 || ca != cs.chart_of[static_cast<std::size_t>(b)]) continue;
        worst = std::max(worst, std::abs(cs.image[static_cast<std::size_t>(a)] - cs.image[static_cast<std::size_t>(b)]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Statistics

struct MeshStats {
    double h = 0.0;                 ///< plane length inside/boundary, 1/z length outside
    double h_chart = 0.0;           ///< max g_O edge length inside the chart disks
    double min_angle = 0.0;
    double max_opposite_sum = 0.0;
    int max_local_density = 0;
    int n_vertices = 0, n_faces = 0, n_edges = 0;
    int n_inner = 0, n_outer = 0, n_boundary = 0;
    long euler = 0;
    double max_boundary_edge = 0.0;
    bool boundary_edges_ok = true;  ///< every boundary-face edge shorter than max(rho/2, 1)
};

namespace detail {

/// Corner positions used for angle measurements: g_O images when the whole
/// face lies in one chart disk, otherwise the region chart.
inline std::array<Complex, 3> angle_corners(const CoverMesh& m, const ChartSystem& cs, int f) {
    const auto& t = m.topology().face(f);
    const int c0 = cs.chart_of[static_cast<std::size_t>(t[0])];
    if (c0 >= 0 && c0 == cs.chart_of[static_cast<std::size_t>(t[1])] && c0 == cs.chart_of[static_cast<std::size_t>(t[2])])
        return {cs.image[static_cast<std::size_t>(t[0])], cs.image[static_cast<std::size_t>(t[1])], cs.image[static_cast<std::size_t>(t[2])]};
    return m.chart_corners(f);
}

inline double plane_or_inverse_distance(const ExtComplex& a, const ExtComplex& b, bool inverse) {
    if (inverse) {
        const ExtComplex ia = a.inverse(), ib = b.inverse();
        if (ia.infinite || ib.infinite) return INFINITY;
        return std::abs(ia.z - ib.z);
    }
    if (a.infinite || b.infinite) return INFINITY;
    return std::abs(a.z - b.z);
}

}  // namespace detail

inline MeshStats mesh_stats(const CoverMesh& m) {
    const auto& topo = m.topology();
    const ChartSystem cs = branch_charts(m);
    MeshStats s;
    s.n_vertices = m.n_vertices();
    s.n_faces = m.n_faces();
    s.n_edges = m.n_edges();
    s.euler = topo.euler_characteristic();
    s.min_angle = std::numbers::pi;
    const double bound = std::max(m.rho() / 2.0, 1.0);
    std::vector<std::array<double, 3>> angles(static_cast<std::size_t>(m.n_faces()));
    for (int f = 0; f < m.n_faces(); ++f) {
        const Region r = m.region(f);
        if (r == Region::inner) ++s.n_inner;
        if (r == Region::outer) ++s.n_outer;
        if (r == Region::boundary) ++s.n_boundary;
        const auto& t = topo.face(f);
        for (int i = 0; i < 3; ++i) {
            const double len = detail::plane_or_inverse_distance(m.position(t[static_cast<std::size_t>(i)]),
                                                                 m.position(t[static_cast<std::size_t>((i + 1) % 3)]), r == Region::outer);
            s.h = std::max(s.h, len);
            if (r == Region::boundary) {
                s.max_boundary_edge = std::max(s.max_boundary_edge, len);
                if (!(len < bound)) s.boundary_edges_ok = false;
            }
        }
        const auto c = detail::angle_corners(m, cs, f);
        for (int i = 0; i < 3; ++i) {
            const double a = corner_angle(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>((i + 1) % 3)], c[static_cast<std::size_t>((i + 2) % 3)]);
            angles[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)] = a;
            s.min_angle = std::min(s.min_angle, a);
        }
    }
    for (int e = 0; e < topo.n_edges(); ++e) {
        const int h = topo.edge_halfedge(e), g = topo.twin(h);
        // The angle opposite half-edge h sits at corner prev(h).
        const double a = angles[static_cast<std::size_t>(HalfEdgeMesh::face_of(h))][static_cast<std::size_t>(HalfEdgeMesh::prev(h) % 3)];
        const double b = angles[static_cast<std::size_t>(HalfEdgeMesh::face_of(g))][static_cast<std::size_t>(HalfEdgeMesh::prev(g) % 3)];
        s.max_opposite_sum = std::max(s.max_opposite_sum, a + b);
    }
    s.h_chart = max_chart_edge(m, cs);

    // (U): vertices within distance h of each vertex, found by a graph search
    // restricted to the disk. Inside a chart disk only its own vertices count,
    // at g_O distance; outside, only vertices outside every chart disk count.
    auto dist = [&](int c, int w) -> double {
        const int cc = cs.chart_of[static_cast<std::size_t>(c)];
        if (cc != cs.chart_of[static_cast<std::size_t>(w)]) return INFINITY;
        if (cc >= 0) return std::abs(cs.image[static_cast<std::size_t>(c)] - cs.image[static_cast<std::size_t>(w)]);
        return detail::plane_or_inverse_distance(m.position(c), m.position(w), !m.in_disk(c));
    };
    std::vector<int> stamp(static_cast<std::size_t>(m.n_vertices()), -1);
    std::vector<int> stack;
    for (int c = 0; c < m.n_vertices(); ++c) {
        int count = 0;
        stack.assign(1, c);
        stamp[static_cast<std::size_t>(c)] = c;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            ++count;
            for (int h : topo.outgoing(v)) {
                const int w = topo.target(h);
                if (stamp[static_cast<std::size_t>(w)] == c) continue;
                stamp[static_cast<std::size_t>(w)] = c;
                if (dist(c, w) <= s.h) stack.push_back(w);
            }
        }
        s.max_local_density = std::max(s.max_local_density, count);
    }
    return s;
}

}  // namespace ramiperiod
