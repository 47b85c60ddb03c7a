#pragma once

// Homology bases on the cover as closed edge loops, and the crossing cochains
// that turn a single-valued vertex function into a multi-valued one.
//
// A cycle is a formal sum of closed loops; each loop is a vertex sequence
// v0 v1 ... v(k-1) with consecutive vertices (cyclically) joined by edges.
// Coefficients are realized by repetition and reversal.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "covering.hpp"
#include "error.hpp"
#include "mesh.hpp"

namespace ramiperiod {

using Loop = std::vector<int>;

struct Cycle {
    std::vector<Loop> loops;
};

struct CutSystem {
    int genus = 0;
    std::vector<Cycle> cycles;                  ///< alpha_1..alpha_g, beta_1..beta_g
    std::vector<std::vector<int>> crossing;     ///< per cycle, per half-edge
    std::vector<std::vector<int>> traversal;    ///< per cycle, per half-edge: forward minus backward uses
    std::vector<std::vector<int>> intersection; ///< intersection[a][b] = alpha/beta pairing
    bool experimental = false;                  ///< built by the generic tree-cotree route

    /// Cochain carrying the k-th period (k < g: Re A_k, else Re B_(k-g)): its
    /// sum along cycle a is delta_{ak}.
    int period_cochain(int k, int h) const {
        const int g = genus;
        if (k < g) return -crossing[static_cast<std::size_t>(g + k)][static_cast<std::size_t>(h)];
        return crossing[static_cast<std::size_t>(k - g)][static_cast<std::size_t>(h)];
    }
};

// ---------------------------------------------------------------------------
// Paths

/// Half-edges of a closed loop; argument error if the loop is not closed.
inline std::vector<int> loop_halfedges(const HalfEdgeMesh& t, const Loop& loop) {
    if (loop.size() < 3) fail(ErrorKind::argument, "a closed loop needs at least 3 vertices");
    std::vector<int> out;
    out.reserve(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const int a = loop[i], b = loop[(i + 1) % loop.size()];
        if (a < 0 || a >= t.n_vertices() || b < 0 || b >= t.n_vertices())
            fail(ErrorKind::argument, "loop vertex out of range");
        const int h = t.find_halfedge(a, b);
        if (h < 0) fail(ErrorKind::argument, "loop is not closed: no edge " + std::to_string(a) + "->" + std::to_string(b));
        out.push_back(h);
    }
    return out;
}

inline bool is_simple(const Loop& loop) {
    std::vector<int> s(loop);
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
}

inline Loop reversed(Loop l) {
    std::reverse(l.begin(), l.end());
    return l;
}

namespace detail {

/// Cochain of one simple loop: chi(a->b) = R_b(e) - R_a(e), where R_v marks
/// edges leaving v strictly inside the wedge swept counterclockwise from the
/// incoming direction to the outgoing one (the right-hand side of the loop).
/// A path stepping from the right side onto the loop picks up +1.
inline void add_simple_loop_cochain(const HalfEdgeMesh& t, const Loop& loop, int coeff, std::vector<int>& chi) {
    if (!is_simple(loop)) fail(ErrorKind::argument, "crossing cochain needs simple loops");
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int v = loop[i], prev = loop[(i + n - 1) % n], next = loop[(i + 1) % n];
        const int h_prev = t.find_halfedge(v, prev);
        const int h_next = t.find_halfedge(v, next);
        if (h_prev < 0 || h_next < 0) fail(ErrorKind::argument, "loop is not closed at vertex " + std::to_string(v));
        for (int h = t.rotate_ccw(h_prev); h != h_next; h = t.rotate_ccw(h)) {
            chi[static_cast<std::size_t>(h)] -= coeff;
            chi[static_cast<std::size_t>(t.twin(h))] += coeff;
        }
    }
}

}  // namespace detail

/// Signed crossing counts of every half-edge through the cut dual to the cycle.
/// Summing along a closed path c gives the intersection number cycle . c.
inline std::vector<int> crossing_cochain(const CoverMesh& m, const Cycle& c) {
    const auto& t = m.topology();
    std::vector<int> chi(static_cast<std::size_t>(t.n_halfedges()), 0);
    for (const auto& l : c.loops) detail::add_simple_loop_cochain(t, l, 1, chi);
    return chi;
}

/// Forward minus backward traversals of each half-edge.
inline std::vector<int> traversal_chain(const CoverMesh& m, const Cycle& c) {
    const auto& t = m.topology();
    std::vector<int> out(static_cast<std::size_t>(t.n_halfedges()), 0);
    for (const auto& l : c.loops)
        for (int h : loop_halfedges(t, l)) {
            ++out[static_cast<std::size_t>(h)];
            --out[static_cast<std::size_t>(t.twin(h))];
        }
    return out;
}

/// Pairing of a closed path with a cochain.
inline long pairing(const CoverMesh& m, const Cycle& c, const std::vector<int>& chi) {
    long s = 0;
    for (const auto& l : c.loops)
        for (int h : loop_halfedges(m.topology(), l)) s += chi[static_cast<std::size_t>(h)];
    return s;
}

/// Algebraic intersection number c1 . c2 (x-axis . y-axis = +1).
inline int intersection_number(const CoverMesh& m, const Cycle& c1, const Cycle& c2) {
    return static_cast<int>(pairing(m, c2, crossing_cochain(m, c1)));
}

/// Every loop is a closed walk in the mesh.
inline void require_closed(const CoverMesh& m, const Cycle& c) {
    if (c.loops.empty()) fail(ErrorKind::argument, "empty cycle");
    for (const auto& l : c.loops) loop_halfedges(m.topology(), l);
}

// ---------------------------------------------------------------------------
// Symplectic reduction of a set of 2g cycles with unimodular intersection form

namespace detail {

using IntVec = std::vector<long>;

inline long omega(const std::vector<std::vector<int>>& I, const IntVec& x, const IntVec& y) {
    long s = 0;
    for (std::size_t a = 0; a < x.size(); ++a)
        if (x[a])
            for (std::size_t b = 0; b < y.size(); ++b) s += x[a] * I[a][b] * y[b];
    return s;
}

inline IntVec axpy(long a, const IntVec& x, const IntVec& y) {
    IntVec r(y);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * x[i];
    return r;
}

/// Greedy symplectic Gram-Schmidt: returns coefficient vectors alpha_1..g, beta_1..g.
/// When no partner pairs to +-1 directly, one is assembled by extended gcd.
inline std::vector<IntVec> symplectic_reduce(const std::vector<std::vector<int>>& I) {
    const std::size_t n = I.size();
    std::vector<IntVec> rest;
    for (std::size_t i = 0; i < n; ++i) {
        IntVec e(n, 0);
        e[i] = 1;
        rest.push_back(e);
    }
    std::vector<IntVec> alphas, betas;
    while (!rest.empty()) {
        const IntVec x = rest.front();
        rest.erase(rest.begin());
        // Combine the remaining vectors into y with omega(x, y) = 1.
        IntVec y(n, 0);
        long gy = 0;
        int partner = -1;
        for (std::size_t j = 0; j < rest.size(); ++j) {
            const long w = omega(I, x, rest[j]);
            if (w == 0) continue;
            if (partner < 0) {
                y = rest[j];
                gy = w;
                partner = static_cast<int>(j);
                if (std::abs(gy) == 1) break;
                continue;
            }
            // Extended gcd on (gy, w).
            long a0 = 1, b0 = 0, a1 = 0, b1 = 1, r0 = gy, r1 = w;
            while (r1 != 0) {
                const long q = r0 / r1;
                std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
                std::tie(a0, a1) = std::make_pair(a1, a0 - q * a1);
                std::tie(b0, b1) = std::make_pair(b1, b0 - q * b1);
            }
            IntVec ny(n, 0);
            for (std::size_t i = 0; i < n; ++i) ny[i] = a0 * y[i] + b0 * rest[j][i];
            y = ny;
            gy = r0;
            if (std::abs(gy) == 1) break;
        }
        if (partner < 0 || std::abs(gy) != 1)
            fail(ErrorKind::consistency, "cycle intersection form is not unimodular; cannot build a symplectic basis");
        if (gy < 0)
            for (auto& c : y) c = -c;
        // Drop the partner, project the others off span(x, y).
        rest.erase(rest.begin() + partner);
        for (auto& z : rest) {
            const long zb = omega(I, z, y), za = omega(I, z, x);
            z = axpy(-zb, x, z);
            z = axpy(za, y, z);
        }
        alphas.push_back(x);
        betas.push_back(y);
        // Remove vectors that became zero (they were dependent on x, y).
        rest.erase(std::remove_if(rest.begin(), rest.end(),
                                  [](const IntVec& v) { return std::all_of(v.begin(), v.end(), [](long c) { return c == 0; }); }),
                   rest.end());
    }
    std::vector<IntVec> out(alphas);
    out.insert(out.end(), betas.begin(), betas.end());
    return out;
}

inline Cycle combine(const std::vector<Cycle>& gens, const IntVec& coeff) {
    Cycle c;
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (long k = 0; k < std::abs(coeff[i]); ++k)
            for (const auto& l : gens[i].loops) c.loops.push_back(coeff[i] > 0 ? l : reversed(l));
    return c;
}

inline std::vector<std::vector<int>> intersection_matrix(const CoverMesh& m, const std::vector<Cycle>& cycles,
                                                         const std::vector<std::vector<int>>& crossing) {
    const std::size_t n = cycles.size();
    std::vector<std::vector<int>> I(n, std::vector<int>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) I[a][b] = static_cast<int>(pairing(m, cycles[b], crossing[a]));
    return I;
}

inline CutSystem finish(const CoverMesh& m, int g, const std::vector<Cycle>& gens, bool experimental) {
    std::vector<std::vector<int>> gx;
    for (const auto& c : gens) gx.push_back(crossing_cochain(m, c));
    const auto I0 = intersection_matrix(m, gens, gx);
    const auto coeffs = symplectic_reduce(I0);
    if (static_cast<int>(coeffs.size()) != 2 * g)
        fail(ErrorKind::consistency, "symplectic reduction produced " + std::to_string(coeffs.size()) + " cycles, expected " +
                                         std::to_string(2 * g));
    CutSystem cs;
    cs.genus = g;
    cs.experimental = experimental;
    for (const auto& k : coeffs) {
        cs.cycles.push_back(combine(gens, k));
        // Cochains are linear in the cycle, so combine rather than recompute.
        std::vector<int> chi(static_cast<std::size_t>(m.topology().n_halfedges()), 0);
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (k[i])
                for (std::size_t h = 0; h < chi.size(); ++h) chi[h] += static_cast<int>(k[i]) * gx[i][h];
        cs.crossing.push_back(std::move(chi));
        cs.traversal.push_back(traversal_chain(m, cs.cycles.back()));
    }
    cs.intersection = intersection_matrix(m, cs.cycles, cs.crossing);
    for (int a = 0; a < 2 * g; ++a)
        for (int b = 0; b < 2 * g; ++b) {
            const int want = (b == a + g) ? 1 : (a == b + g ? -1 : 0);
            if (cs.intersection[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] != want)
                fail(ErrorKind::consistency, "homology basis is not symplectic");
        }
    return cs;
}

inline int mesh_genus(const CoverMesh& m) {
    const long chi = m.topology().euler_characteristic();
    if (chi > 2 || (2 - chi) % 2 != 0) fail(ErrorKind::topology, "mesh Euler characteristic " + std::to_string(chi) + " is not that of a closed orientable surface");
    return static_cast<int>((2 - chi) / 2);
}

/// Boundary of a face set, decomposed into closed loops. Returns false when the
/// boundary is pinched (a vertex with two outgoing boundary half-edges).
inline bool boundary_loops(const CoverMesh& m, const std::vector<char>& in, std::vector<Loop>& loops) {
    const auto& t = m.topology();
    std::map<int, int> out_of;  // origin -> boundary half-edge
    for (int h = 0; h < t.n_halfedges(); ++h) {
        if (!in[static_cast<std::size_t>(HalfEdgeMesh::face_of(h))] || in[static_cast<std::size_t>(HalfEdgeMesh::face_of(t.twin(h)))]) continue;
        if (!out_of.emplace(t.origin(h), h).second) return false;
    }
    loops.clear();
    std::set<int> used;
    for (const auto& [v0, h0] : out_of) {
        if (used.count(v0)) continue;
        Loop l;
        int v = v0;
        do {
            used.insert(v);
            l.push_back(v);
            const auto it = out_of.find(t.target(out_of.at(v)));
            if (it == out_of.end()) return false;
            v = it->first;
        } while (v != v0 && l.size() <= out_of.size());
        if (v != v0) return false;
        loops.push_back(std::move(l));
    }
    return true;
}

inline double segment_distance(Complex p, Complex a, Complex b) {
    const Complex d = b - a;
    const double t = std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hyperelliptic basis

/// Branch positions of a mesh by branch index (from the vertex flags).
inline std::vector<ExtComplex> mesh_branch_positions(const CoverMesh& m) {
    std::map<int, ExtComplex> by_index;
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.vertex(v).branch >= 0) by_index[m.vertex(v).branch] = m.position(v);
    std::vector<ExtComplex> out;
    for (const auto& [k, p] : by_index) {
        if (k != static_cast<int>(out.size())) fail(ErrorKind::validation, "branch indices on the mesh are not contiguous");
        out.push_back(p);
    }
    return out;
}

/// True if the mesh is a double cover with 2g+2 simple branch vertices.
inline bool is_hyperelliptic_mesh(const CoverMesh& m) {
    const int g = detail::mesh_genus(m);
    if (g < 1) return false;
    const auto bp = project_to_base(m);
    if (bp.degree != 2) return false;
    const auto pos = mesh_branch_positions(m);
    if (static_cast<int>(pos.size()) != 2 * g + 2) return false;
    for (std::size_t b = 0; b < bp.lifts.size(); ++b)
        if (bp.base_branch[b] >= 0 && bp.lifts[b].size() != 1) return false;
    return true;
}

/// Loop c_i: counterclockwise around the planar segment [e_i, e_(i+1)], as the
/// boundary of the faces whose centroid lies within a stadium about the
/// segment. On the double cover the region is an annulus whose boundary is
/// two lifts of the planar loop; the lift through the lowest vertex id is kept.
inline Loop stadium_loop(const CoverMesh& m, const std::vector<ExtComplex>& branch, int i) {
    const auto& t = m.topology();
    const Complex a = branch[static_cast<std::size_t>(i)].z, b = branch[static_cast<std::size_t>(i + 1)].z;
    double clearance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < branch.size(); ++j) {
        if (static_cast<int>(j) == i || static_cast<int>(j) == i + 1) continue;
        clearance = std::min(clearance, branch[j].infinite ? std::numeric_limits<double>::infinity()
                                                           : detail::segment_distance(branch[j].z, a, b));
    }
    if (!std::isfinite(clearance)) clearance = std::abs(b - a);
    for (double frac : {0.4, 0.32, 0.25, 0.18, 0.12}) {
        const double r = frac * clearance;
        std::vector<char> in(static_cast<std::size_t>(t.n_faces()), 0);
        for (int f = 0; f < t.n_faces(); ++f) {
            const auto& F = t.face(f);
            Complex c = 0.0;
            bool finite = true;
            for (int v : F) {
                if (m.position(v).infinite) finite = false;
                else c += m.position(v).z;
            }
            if (finite && detail::segment_distance(c / 3.0, a, b) < r) in[static_cast<std::size_t>(f)] = 1;
        }
        std::vector<Loop> loops;
        if (!detail::boundary_loops(m, in, loops) || loops.size() != 2) continue;
        bool ok = true;
        for (const auto& l : loops)
            for (int v : l)
                if (m.vertex(v).branch >= 0) ok = false;
        // Both branch vertices strictly inside.
        for (int v = 0; v < m.n_vertices() && ok; ++v) {
            const int k = m.vertex(v).branch;
            if (k != i && k != i + 1) continue;
            for (int h : t.outgoing(v))
                if (!in[static_cast<std::size_t>(HalfEdgeMesh::face_of(h))]) ok = false;
        }
        if (!ok) continue;
        const auto lowest = [](const Loop& l) { return *std::min_element(l.begin(), l.end()); };
        return lowest(loops[0]) < lowest(loops[1]) ? loops[0] : loops[1];
    }
    fail(ErrorKind::resolution, "mesh too coarse to separate a loop around branch points " + std::to_string(i) + " and " +
                                    std::to_string(i + 1) + " from the others; use a smaller h");
}

/// Canonical basis of a hyperelliptic double cover: loops c_1..c_2g around
/// consecutive branch-point pairs, signed so that c_i . c_(i+1) = +1, then
/// symplectically reduced (alpha_1 = c_1, beta_1 = c_2, alpha_2 = c_1 + c_3, ...).
inline CutSystem hyperelliptic_basis(const CoverMesh& m) {
    if (!is_hyperelliptic_mesh(m)) fail(ErrorKind::argument, "hyperelliptic basis needs a double cover with 2g+2 simple branch points");
    const int g = detail::mesh_genus(m);
    const auto branch = mesh_branch_positions(m);
    for (int i = 0; i < 2 * g + 1; ++i)
        if (branch[static_cast<std::size_t>(i)].infinite)
            fail(ErrorKind::argument, "hyperelliptic basis needs e_1..e_(2g+1) finite");
    std::vector<Cycle> c;
    for (int i = 0; i < 2 * g; ++i) c.push_back(Cycle{{stadium_loop(m, branch, i)}});
    for (int i = 0; i + 1 < 2 * g; ++i) {
        const int s = intersection_number(m, c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i + 1)]);
        if (std::abs(s) != 1)
            fail(ErrorKind::resolution, "loops around consecutive branch pairs meet " + std::to_string(s) + " times; use a smaller h");
        if (s < 0) c[static_cast<std::size_t>(i + 1)].loops[0] = reversed(c[static_cast<std::size_t>(i + 1)].loops[0]);
    }
    return detail::finish(m, g, c, false);
}

inline CutSystem hyperelliptic_basis(const CoverMesh& m, const BranchedCover& cover) {
    if (cover.degree != 2) fail(ErrorKind::argument, "hyperelliptic basis needs degree 2");
    for (const auto& b : cover.branch_points)
        if (b.monodromy.size() != 2 || b.monodromy.is_identity())
            fail(ErrorKind::argument, "hyperelliptic basis needs every monodromy to be the transposition");
    const auto pos = mesh_branch_positions(m);
    if (pos.size() != cover.branch_points.size()) fail(ErrorKind::argument, "mesh does not belong to this cover");
    for (std::size_t i = 0; i < pos.size(); ++i)
        if (!(pos[i] == cover.branch_points[i].position)) fail(ErrorKind::argument, "mesh does not belong to this cover");
    return hyperelliptic_basis(m);
}

// ---------------------------------------------------------------------------
// Generic fallback

/// Tree-cotree generators (BFS tree on vertices, spanning tree of the dual
/// over the remaining edges; each leftover edge closes one loop), reduced to a
/// symplectic basis. Experimental: loops are long and arbitrary.
inline CutSystem tree_cotree_basis(const CoverMesh& m) {
    const auto& t = m.topology();
    const int g = detail::mesh_genus(m);
    if (g < 1) fail(ErrorKind::argument, "surface has genus 0; no homology basis");
    std::vector<int> parent_he(static_cast<std::size_t>(t.n_vertices()), -1), depth(static_cast<std::size_t>(t.n_vertices()), -1);
    std::vector<char> tree_edge(static_cast<std::size_t>(t.n_edges()), 0);
    std::queue<int> q;
    depth[0] = 0;
    q.push(0);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int h : t.outgoing(v)) {
            const int w = t.target(h);
            if (depth[static_cast<std::size_t>(w)] >= 0) continue;
            depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(v)] + 1;
            parent_he[static_cast<std::size_t>(w)] = h;  // parent -> w
            tree_edge[static_cast<std::size_t>(t.edge(h))] = 1;
            q.push(w);
        }
    }
    std::vector<char> face_seen(static_cast<std::size_t>(t.n_faces()), 0), cotree_edge(static_cast<std::size_t>(t.n_edges()), 0);
    face_seen[0] = 1;
    q.push(0);
    while (!q.empty()) {
        const int f = q.front();
        q.pop();
        for (int i = 0; i < 3; ++i) {
            const int h = 3 * f + i;
            if (tree_edge[static_cast<std::size_t>(t.edge(h))]) continue;
            const int g2 = HalfEdgeMesh::face_of(t.twin(h));
            if (face_seen[static_cast<std::size_t>(g2)]) continue;
            face_seen[static_cast<std::size_t>(g2)] = 1;
            cotree_edge[static_cast<std::size_t>(t.edge(h))] = 1;
            q.push(g2);
        }
    }
    std::vector<Cycle> gens;
    for (int e = 0; e < t.n_edges(); ++e) {
        if (tree_edge[static_cast<std::size_t>(e)] || cotree_edge[static_cast<std::size_t>(e)]) continue;
        const int h = t.edge_halfedge(e);
        int a = t.origin(h), b = t.target(h);
        // Loop: a -> b, then b up to the common ancestor and down to a.
        std::vector<int> up_b{b}, up_a{a};
        while (a != b) {
            if (depth[static_cast<std::size_t>(a)] >= depth[static_cast<std::size_t>(b)]) {
                a = t.origin(parent_he[static_cast<std::size_t>(a)]);
                up_a.push_back(a);
            } else {
                b = t.origin(parent_he[static_cast<std::size_t>(b)]);
                up_b.push_back(b);
            }
        }
        // up_b ends at the ancestor, as does up_a.
        Loop l(up_b.begin(), up_b.end());
        for (auto it = up_a.rbegin() + 1; it != up_a.rend(); ++it) l.push_back(*it);
        // l = b ... lca ... a; the closing edge a -> b completes it.
        gens.push_back(Cycle{{l}});
    }
    if (static_cast<int>(gens.size()) != 2 * g)
        fail(ErrorKind::topology, "tree-cotree produced " + std::to_string(gens.size()) + " generators, expected " + std::to_string(2 * g));
    return detail::finish(m, g, gens, true);
}

/// Hyperelliptic basis when applicable, otherwise the generic fallback.
inline CutSystem homology_basis(const CoverMesh& m) {
    if (is_hyperelliptic_mesh(m)) return hyperelliptic_basis(m);
    return tree_cotree_basis(m);
}

}  // namespace ramiperiod
