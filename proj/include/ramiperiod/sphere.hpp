#pragma once

// Point sets on the unit sphere and their Delaunay triangulation, computed as
// the boundary of the 3D convex hull.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

namespace ramiperiod {

/// Fibonacci spiral: point k has height 1 - 2(k + 1/2)/n and azimuth 2 pi k / golden ratio.
inline std::vector<Vec3> fibonacci_points(int n) {
    if (n < 4) fail(ErrorKind::argument, "fibonacci_points needs n >= 4, got " + std::to_string(n));
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n));
    const double phi = std::numbers::phi;
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double az = 2.0 * std::numbers::pi * std::fmod(k / phi, 1.0);
        pts.push_back({r * std::cos(az), r * std::sin(az), z});
    }
    return pts;
}

/// Uniform i.i.d. points from mt19937_64. Raw 64-bit draws are mapped to
/// doubles by hand so sequences are identical across standard libraries.
inline std::vector<Vec3> random_points(int n, std::uint64_t seed) {
    if (n < 4) fail(ErrorKind::argument, "random_points needs n >= 4, got " + std::to_string(n));
    std::mt19937_64 gen(seed);
    auto unit = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double z = 2.0 * unit() - 1.0;
        const double az = 2.0 * std::numbers::pi * unit();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts.push_back({r * std::cos(az), r * std::sin(az), z});
    }
    return pts;
}

/// Triangulation of the sphere by point indices; faces counterclockwise seen from outside.
struct SphereTriangulation {
    std::vector<Vec3> points;
    std::vector<std::array<int, 3>> faces;

    std::size_t edge_count() const { return faces.size() * 3 / 2; }
    long euler_characteristic() const {
        return static_cast<long>(points.size()) - static_cast<long>(edge_count()) + static_cast<long>(faces.size());
    }
};

namespace detail {

class IncrementalHull {
public:
    explicit IncrementalHull(const std::vector<Vec3>& pts) : p_(pts) {}

    std::vector<std::array<int, 3>> run() {
        const int n = static_cast<int>(p_.size());
        reject_duplicates();
        const auto tet = initial_tetrahedron();
        std::vector<char> used(static_cast<std::size_t>(n), 0);
        for (int v : tet) used[static_cast<std::size_t>(v)] = 1;
        interior_ = (p_[tet[0]] + p_[tet[1]] + p_[tet[2]] + p_[tet[3]]) * 0.25;
        build_tetrahedron(tet);
        for (int i = 0; i < n; ++i)
            if (!used[static_cast<std::size_t>(i)]) insert(i);
        std::vector<std::array<int, 3>> out;
        for (const auto& f : faces_)
            if (f.alive) out.push_back(f.v);
        return out;
    }

private:
    struct Face {
        std::array<int, 3> v{};
        std::array<int, 3> nb{};  // nb[i] across edge (v[i], v[i+1])
        bool alive = true;
        int mark = -1;
    };

    const std::vector<Vec3>& p_;
    std::vector<Face> faces_;
    Vec3 interior_;
    int last_ = 0;
    std::uint64_t walk_state_ = 0x9e3779b97f4a7c15ULL;

    void reject_duplicates() const {
        std::vector<int> idx(p_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        auto key = [&](int i) { return std::array<double, 3>{p_[i].x, p_[i].y, p_[i].z}; };
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
        for (std::size_t k = 1; k < idx.size(); ++k)
            if (key(idx[k]) == key(idx[k - 1]))
                fail(ErrorKind::degeneracy, "duplicate points " + std::to_string(idx[k - 1]) + " and " + std::to_string(idx[k]));
    }

    std::array<int, 4> initial_tetrahedron() const {
        const int n = static_cast<int>(p_.size());
        if (n < 4) fail(ErrorKind::degeneracy, "need at least 4 points for a spherical triangulation");
        int a = 0, b = -1, c = -1, d = -1;
        double best = -1.0;
        for (int i = 1; i < n; ++i) {
            const double dd = (p_[i] - p_[a]).norm();
            if (dd > best) best = dd, b = i;
        }
        best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (i == a || i == b) continue;
            const double dd = (p_[b] - p_[a]).cross(p_[i] - p_[a]).norm();
            if (dd > best) best = dd, c = i;
        }
        if (c < 0 || best <= 0.0) fail(ErrorKind::degeneracy, "all points are collinear");
        best = -1.0;
        const Vec3 nrm = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
        for (int i = 0; i < n; ++i) {
            if (i == a || i == b || i == c) continue;
            const double dd = std::abs(nrm.dot(p_[i] - p_[a]));
            if (dd > best) best = dd, d = i;
        }
        if (d < 0 || orient3d(p_[a], p_[b], p_[c], p_[d]) == 0)
            fail(ErrorKind::degeneracy, "all points are coplanar (points " + std::to_string(a) + ", " + std::to_string(b) +
                                            ", " + std::to_string(c) + " span the common plane)");
        return {a, b, c, d};
    }

    void build_tetrahedron(std::array<int, 4> t) {
        if (orient3d(p_[t[0]], p_[t[1]], p_[t[2]], p_[t[3]]) > 0) std::swap(t[1], t[2]);
        // Now t3 lies below (t0, t1, t2): that face is outward-oriented.
        const int a = t[0], b = t[1], c = t[2], d = t[3];
        faces_ = {Face{{a, b, c}, {}}, Face{{a, d, b}, {}}, Face{{b, d, c}, {}}, Face{{c, d, a}, {}}};
        // Neighbors by matching reversed edges.
        for (int f = 0; f < 4; ++f)
            for (int i = 0; i < 3; ++i) {
                const int u = faces_[f].v[i], w = faces_[f].v[(i + 1) % 3];
                for (int g = 0; g < 4; ++g)
                    for (int j = 0; j < 3; ++j)
                        if (faces_[g].v[j] == w && faces_[g].v[(j + 1) % 3] == u) faces_[f].nb[i] = g;
            }
        last_ = 0;
    }

    int next_random(int m) {
        walk_state_ ^= walk_state_ << 13;
        walk_state_ ^= walk_state_ >> 7;
        walk_state_ ^= walk_state_ << 17;
        return static_cast<int>(walk_state_ % static_cast<std::uint64_t>(m));
    }

    /// Face whose cone from the interior point contains the ray through p.
    int locate(const Vec3& q) {
        int f = last_;
        const std::size_t cap = 4 * faces_.size() + 100;
        for (std::size_t step = 0; step < cap; ++step) {
            const Face& F = faces_[static_cast<std::size_t>(f)];
            const int start = next_random(3);
            int cross = -1;
            for (int k = 0; k < 3; ++k) {
                const int i = (start + k) % 3;
                if (orient3d(interior_, p_[F.v[i]], p_[F.v[(i + 1) % 3]], q) < 0) {
                    cross = i;
                    break;
                }
            }
            if (cross < 0) return f;
            f = F.nb[cross];
        }
        fail(ErrorKind::numeric, "point location walk did not terminate");
    }

    void insert(int pi) {
        const Vec3& q = p_[pi];
        const int f0 = locate(q);
        auto visible = [&](int f) {
            const auto& v = faces_[static_cast<std::size_t>(f)].v;
            return orient3d(p_[v[0]], p_[v[1]], p_[v[2]], q) > 0;
        };
        if (!visible(f0)) {
            const auto& v = faces_[static_cast<std::size_t>(f0)].v;
            fail(ErrorKind::degeneracy, "point " + std::to_string(pi) + " is not outside the hull (coplanar with points " +
                                            std::to_string(v[0]) + ", " + std::to_string(v[1]) + ", " + std::to_string(v[2]) +
                                            " or not on the sphere)");
        }
        std::vector<int> vis{f0};
        faces_[static_cast<std::size_t>(f0)].mark = pi;
        struct Horizon { int a, b, outside; };
        std::vector<Horizon> horizon;
        for (std::size_t k = 0; k < vis.size(); ++k) {
            const int f = vis[k];
            for (int i = 0; i < 3; ++i) {
                const int g = faces_[static_cast<std::size_t>(f)].nb[i];
                if (faces_[static_cast<std::size_t>(g)].mark == pi) continue;
                if (visible(g)) {
                    faces_[static_cast<std::size_t>(g)].mark = pi;
                    vis.push_back(g);
                }
            }
        }
        for (int f : vis) {
            const Face& F = faces_[static_cast<std::size_t>(f)];
            for (int i = 0; i < 3; ++i) {
                const int g = F.nb[i];
                if (faces_[static_cast<std::size_t>(g)].mark != pi) horizon.push_back({F.v[i], F.v[(i + 1) % 3], g});
            }
        }
        for (int f : vis) faces_[static_cast<std::size_t>(f)].alive = false;
        std::unordered_map<int, int> by_start;
        by_start.reserve(horizon.size() * 2);
        const int base = static_cast<int>(faces_.size());
        for (std::size_t k = 0; k < horizon.size(); ++k) {
            const auto& h = horizon[k];
            const int id = base + static_cast<int>(k);
            Face nf;
            nf.v = {h.a, h.b, pi};
            nf.nb[0] = h.outside;
            auto& out = faces_[static_cast<std::size_t>(h.outside)];
            for (int j = 0; j < 3; ++j)
                if (out.v[j] == h.b && out.v[(j + 1) % 3] == h.a) out.nb[j] = id;
            by_start[h.a] = id;
            faces_.push_back(nf);
        }
        for (std::size_t k = 0; k < horizon.size(); ++k) {
            const int id = base + static_cast<int>(k);
            const auto& h = horizon[k];
            const auto it = by_start.find(h.b);
            if (it == by_start.end()) fail(ErrorKind::numeric, "hull horizon is not a closed cycle");
            faces_[static_cast<std::size_t>(id)].nb[1] = it->second;
            faces_[static_cast<std::size_t>(it->second)].nb[2] = id;
        }
        last_ = base;
    }
};

}  // namespace detail

/// Delaunay triangulation of points on the unit sphere (= convex hull boundary).
/// Co-circular ties are resolved by insertion order: a point coplanar with an
/// existing face never sees that face.
inline SphereTriangulation spherical_delaunay(std::vector<Vec3> points) {
    if (points.size() < 4) fail(ErrorKind::argument, "spherical_delaunay needs at least 4 points");
    detail::IncrementalHull hull(points);
    auto faces = hull.run();
    SphereTriangulation t{std::move(points), std::move(faces)};
    if (t.euler_characteristic() != 2) fail(ErrorKind::degeneracy, "hull is not a sphere (some points are not on the hull)");
    return t;
}

/// Brute-force empty-circumcap check: every face's plane has all points on or below it.
inline bool empty_circumcap(const SphereTriangulation& t) {
    for (const auto& f : t.faces)
        for (std::size_t q = 0; q < t.points.size(); ++q)
            if (orient3d(t.points[f[0]], t.points[f[1]], t.points[f[2]], t.points[q]) > 0) return false;
    return true;
}

}  // namespace ramiperiod
