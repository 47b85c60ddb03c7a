#pragma once

// Half-edge triangle meshes of closed oriented surfaces, the multi-sheeted
// cover mesh with its region classification, and the ".rpm" cache format.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covering.hpp"
#include "error.hpp"
#include "geometry.hpp"

namespace ramiperiod {

/// Half-edge connectivity over a triangle list. Half-edge 3f+i runs from
/// corner i to corner i+1 of face f.
class HalfEdgeMesh {
public:
    HalfEdgeMesh() = default;

    HalfEdgeMesh(int n_vertices, std::vector<std::array<int, 3>> faces) : faces_(std::move(faces)) {
        const std::size_t nh = faces_.size() * 3;
        twin_.assign(nh, -1);
        edge_.assign(nh, -1);
        vertex_he_.assign(static_cast<std::size_t>(n_vertices), -1);
        std::unordered_map<std::uint64_t, int> directed;
        directed.reserve(nh * 2);
        auto key = [](int a, int b) { return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b); };
        for (std::size_t h = 0; h < nh; ++h) {
            const int a = origin(static_cast<int>(h)), b = target(static_cast<int>(h));
            if (a < 0 || a >= n_vertices || b < 0 || b >= n_vertices)
                fail(ErrorKind::topology, "face references a vertex id out of range");
            if (a == b) fail(ErrorKind::topology, "degenerate face with a repeated vertex");
            if (!directed.emplace(key(a, b), static_cast<int>(h)).second)
                fail(ErrorKind::topology, "directed edge " + std::to_string(a) + "->" + std::to_string(b) +
                                              " appears twice (non-manifold or inconsistently oriented)");
            if (vertex_he_[static_cast<std::size_t>(a)] < 0) vertex_he_[static_cast<std::size_t>(a)] = static_cast<int>(h);
        }
        for (std::size_t h = 0; h < nh; ++h) {
            const auto it = directed.find(key(target(static_cast<int>(h)), origin(static_cast<int>(h))));
            if (it == directed.end())
                fail(ErrorKind::topology, "edge " + std::to_string(origin(static_cast<int>(h))) + "-" +
                                              std::to_string(target(static_cast<int>(h))) + " has no twin: surface is not closed");
            twin_[h] = it->second;
        }
        for (std::size_t h = 0; h < nh; ++h) {
            if (edge_[h] >= 0) continue;
            const int e = static_cast<int>(edge_he_.size());
            edge_he_.push_back(static_cast<int>(h));
            edge_[h] = e;
            edge_[static_cast<std::size_t>(twin_[h])] = e;
        }
        for (std::size_t v = 0; v < vertex_he_.size(); ++v)
            if (vertex_he_[v] < 0) fail(ErrorKind::topology, "vertex " + std::to_string(v) + " is not used by any face");
        check_vertex_links();
    }

    int n_vertices() const { return static_cast<int>(vertex_he_.size()); }
    int n_faces() const { return static_cast<int>(faces_.size()); }
    int n_edges() const { return static_cast<int>(edge_he_.size()); }
    int n_halfedges() const { return static_cast<int>(twin_.size()); }
    long euler_characteristic() const { return static_cast<long>(n_vertices()) - n_edges() + n_faces(); }

    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::array<int, 3>& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }

    static int face_of(int h) { return h / 3; }
    static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
    static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
    int twin(int h) const { return twin_[static_cast<std::size_t>(h)]; }
    int origin(int h) const { return faces_[static_cast<std::size_t>(h / 3)][static_cast<std::size_t>(h % 3)]; }
    int target(int h) const { return origin(next(h)); }
    /// Vertex opposite to half-edge h in its face.
    int opposite(int h) const { return origin(prev(h)); }
    int edge(int h) const { return edge_[static_cast<std::size_t>(h)]; }
    /// Canonical half-edge of an undirected edge.
    int edge_halfedge(int e) const { return edge_he_[static_cast<std::size_t>(e)]; }
    int vertex_halfedge(int v) const { return vertex_he_[static_cast<std::size_t>(v)]; }
    /// Next outgoing half-edge counterclockwise about origin(h).
    int rotate_ccw(int h) const { return twin(prev(h)); }
    /// Next outgoing half-edge clockwise about origin(h).
    int rotate_cw(int h) const { return next(twin(h)); }

    /// Outgoing half-edges of v in counterclockwise order, starting at vertex_halfedge(v).
    std::vector<int> outgoing(int v) const {
        std::vector<int> out;
        const int h0 = vertex_halfedge(v);
        int h = h0;
        do {
            out.push_back(h);
            h = rotate_ccw(h);
        } while (h != h0);
        return out;
    }

    /// Half-edge from a to b, or -1.
    int find_halfedge(int a, int b) const {
        for (int h : outgoing(a))
            if (target(h) == b) return h;
        return -1;
    }

private:
    std::vector<std::array<int, 3>> faces_;
    std::vector<int> twin_;
    std::vector<int> edge_;
    std::vector<int> edge_he_;
    std::vector<int> vertex_he_;

    // Every vertex link must be a single cycle (no pinched vertices).
    void check_vertex_links() const {
        std::vector<int> degree(vertex_he_.size(), 0);
        for (std::size_t h = 0; h < twin_.size(); ++h) ++degree[static_cast<std::size_t>(origin(static_cast<int>(h)))];
        for (int v = 0; v < n_vertices(); ++v) {
            int count = 0;
            const int h0 = vertex_halfedge(v);
            int h = h0;
            do {
                ++count;
                h = rotate_ccw(h);
            } while (h != h0 && count <= degree[static_cast<std::size_t>(v)]);
            if (count != degree[static_cast<std::size_t>(v)])
                fail(ErrorKind::topology, "vertex " + std::to_string(v) + " has a pinched (non-disk) neighbourhood");
        }
    }
};

enum class Region : std::uint8_t { inner, outer, boundary };

inline const char* to_string(Region r) {
    switch (r) {
    case Region::inner: return "inner";
    case Region::outer: return "outer";
    case Region::boundary: return "boundary";
    }
    return "?";
}

struct CoverVertex {
    int sheet = 0;
    ExtComplex position;
    int branch = -1;  ///< index of the branch point this vertex lies over, or -1
};

/// Triangulation of the covering surface: every face lies in one sheet,
/// faces are counterclockwise in the plane chart.
class CoverMesh {
public:
    CoverMesh() = default;

    CoverMesh(std::vector<CoverVertex> vertices, std::vector<std::array<int, 3>> faces, double rho,
              std::vector<int> face_sheets = {})
        : vertices_(std::move(vertices)),
          topo_(static_cast<int>(vertices_.size()), std::move(faces)),
          rho_(rho),
          face_sheet_(std::move(face_sheets)) {
        if (!(rho_ > 0.0)) fail(ErrorKind::validation, "mesh rho must be positive");
        sphere_.reserve(vertices_.size());
        for (const auto& v : vertices_) sphere_.push_back(inverse_stereographic(v.position));
        region_.reserve(static_cast<std::size_t>(topo_.n_faces()));
        for (const auto& f : topo_.faces()) {
            int inside = 0;
            for (int v : f)
                if (in_disk(v)) ++inside;
            region_.push_back(inside >= 2 ? Region::inner : (inside == 0 ? Region::outer : Region::boundary));
        }
    }

    const HalfEdgeMesh& topology() const { return topo_; }
    const std::vector<CoverVertex>& vertices() const { return vertices_; }
    const CoverVertex& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    const ExtComplex& position(int v) const { return vertices_[static_cast<std::size_t>(v)].position; }
    const Vec3& sphere_position(int v) const { return sphere_[static_cast<std::size_t>(v)]; }
    double rho() const { return rho_; }
    Region region(int f) const { return region_[static_cast<std::size_t>(f)]; }
    const std::vector<Region>& regions() const { return region_; }
    /// Sheet of each face when known (meshes built by lifting); empty after loading a cache file.
    const std::vector<int>& face_sheets() const { return face_sheet_; }

    int n_vertices() const { return topo_.n_vertices(); }
    int n_faces() const { return topo_.n_faces(); }
    int n_edges() const { return topo_.n_edges(); }

    /// In the open disk B_rho(0).
    bool in_disk(int v) const {
        const auto& p = position(v);
        return !p.infinite && std::abs(p.z) < rho_;
    }

    /// Chart coordinates of the corners of face f: the plane for inner and
    /// boundary faces, the 1/z image for outer faces.
    std::array<Complex, 3> chart_corners(int f) const {
        const auto& t = topo_.face(f);
        std::array<Complex, 3> out{};
        const bool outer = region(f) == Region::outer;
        for (int i = 0; i < 3; ++i) {
            const auto& p = position(t[static_cast<std::size_t>(i)]);
            if (outer) {
                const ExtComplex w = p.inverse();
                if (w.infinite) fail(ErrorKind::degeneracy, "outer face contains the origin");
                out[static_cast<std::size_t>(i)] = w.z;
            } else {
                if (p.infinite) fail(ErrorKind::degeneracy, "face with a vertex in B_rho contains infinity");
                out[static_cast<std::size_t>(i)] = p.z;
            }
        }
        return out;
    }

private:
    std::vector<CoverVertex> vertices_;
    HalfEdgeMesh topo_;
    std::vector<Vec3> sphere_;
    double rho_ = 2.0;
    std::vector<Region> region_;
    std::vector<int> face_sheet_;
};

// ---------------------------------------------------------------------------
// Projection of the cover onto the base triangulation of the sphere. Vertices
// lying over the same point share bit-identical positions, so the projection
// can be recovered from the cover alone (e.g. after loading a cache file).

struct BaseProjection {
    std::vector<int> base_of;                     ///< cover vertex -> base vertex
    std::vector<std::vector<int>> lifts;          ///< base vertex -> cover vertices
    std::vector<ExtComplex> base_position;
    std::vector<int> base_branch;                 ///< base vertex -> branch index or -1
    std::vector<std::array<int, 3>> base_faces;   ///< one per distinct projected face
    int degree = 1;
};

inline BaseProjection project_to_base(const CoverMesh& m) {
    BaseProjection bp;
    bp.base_of.assign(static_cast<std::size_t>(m.n_vertices()), -1);
    std::map<std::pair<double, double>, int> finite_ids;
    int inf_id = -1;
    for (int v = 0; v < m.n_vertices(); ++v) {
        const auto& p = m.position(v);
        int id = -1;
        if (p.infinite) {
            if (inf_id < 0) {
                inf_id = static_cast<int>(bp.lifts.size());
                bp.lifts.emplace_back();
                bp.base_position.push_back(p);
                bp.base_branch.push_back(m.vertex(v).branch);
            }
            id = inf_id;
        } else {
            const auto [it, fresh] = finite_ids.emplace(std::make_pair(p.z.real(), p.z.imag()), static_cast<int>(bp.lifts.size()));
            if (fresh) {
                bp.lifts.emplace_back();
                bp.base_position.push_back(p);
                bp.base_branch.push_back(m.vertex(v).branch);
            }
            id = it->second;
        }
        bp.base_of[static_cast<std::size_t>(v)] = id;
        bp.lifts[static_cast<std::size_t>(id)].push_back(v);
    }
    std::map<std::array<int, 3>, int> seen;
    for (const auto& f : m.topology().faces()) {
        std::array<int, 3> b{bp.base_of[static_cast<std::size_t>(f[0])], bp.base_of[static_cast<std::size_t>(f[1])],
                             bp.base_of[static_cast<std::size_t>(f[2])]};
        // Rotate so the smallest id leads; orientation is preserved.
        while (b[0] > b[1] || b[0] > b[2]) b = {b[1], b[2], b[0]};
        if (seen.emplace(b, 1).second) bp.base_faces.push_back(b);
    }
    bp.degree = bp.base_faces.empty() ? 1 : m.n_faces() / static_cast<int>(bp.base_faces.size());
    return bp;
}

// ---------------------------------------------------------------------------
// ".rpm" mesh cache:
//   RPM 1
//   RHO <float>
//   V <count>
//   <id> <sheet> <re> <im> <flags>     ("inf" and an empty im field for infinity;
//                                        flags "B:<branch-index>" or "-")
//   F <count>
//   <v0> <v1> <v2>                     (counterclockwise in the chart)
// Region tags and statistics are recomputed on load.

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

inline void write_rpm(std::ostream& os, const CoverMesh& m) {
    os << "RPM 1\n";
    os << "RHO " << detail::format_double(m.rho()) << "\n";
    os << "V " << m.n_vertices() << "\n";
    for (int v = 0; v < m.n_vertices(); ++v) {
        const auto& cv = m.vertex(v);
        os << v << ' ' << cv.sheet << ' ';
        if (cv.position.infinite)
            os << "inf  ";
        else
            os << detail::format_double(cv.position.z.real()) << ' ' << detail::format_double(cv.position.z.imag()) << ' ';
        if (cv.branch >= 0)
            os << "B:" << cv.branch;
        else
            os << '-';
        os << '\n';
    }
    os << "F " << m.n_faces() << "\n";
    for (const auto& f : m.topology().faces()) os << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

inline void save_rpm(const std::string& path, const CoverMesh& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
    write_rpm(os, m);
    if (!os) fail(ErrorKind::io, "write to '" + path + "' failed");
}

inline CoverMesh read_rpm(std::istream& is) {
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(is, line)) fail(ErrorKind::io, std::string("unexpected end of mesh file reading ") + what);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    if (next_line("header") != "RPM 1") fail(ErrorKind::io, "not an RPM 1 mesh file");
    double rho = 0.0;
    {
        std::istringstream ss(next_line("RHO"));
        std::string tag;
        if (!(ss >> tag >> rho) || tag != "RHO") fail(ErrorKind::io, "malformed RHO line");
    }
    long nv = 0;
    {
        std::istringstream ss(next_line("V"));
        std::string tag;
        if (!(ss >> tag >> nv) || tag != "V" || nv < 0) fail(ErrorKind::io, "malformed V line");
    }
    std::vector<CoverVertex> verts(static_cast<std::size_t>(nv));
    std::vector<char> seen(static_cast<std::size_t>(nv), 0);
    for (long k = 0; k < nv; ++k) {
        std::istringstream ss(next_line("vertex"));
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        CoverVertex cv;
        std::string flags;
        long id = -1;
        try {
            if (tok.size() == 4 && tok[2] == "inf") {
                id = std::stol(tok[0]);
                cv.sheet = std::stoi(tok[1]);
                cv.position = ExtComplex::inf();
                flags = tok[3];
            } else if (tok.size() == 5) {
                id = std::stol(tok[0]);
                cv.sheet = std::stoi(tok[1]);
                cv.position = ExtComplex::finite({std::stod(tok[2]), std::stod(tok[3])});
                flags = tok[4];
            } else {
                fail(ErrorKind::io, "malformed vertex line: '" + line + "'");
            }
        } catch (const std::logic_error&) {
            fail(ErrorKind::io, "malformed vertex line: '" + line + "'");
        }
        if (id < 0 || id >= nv || seen[static_cast<std::size_t>(id)]) fail(ErrorKind::io, "bad or repeated vertex id in '" + line + "'");
        seen[static_cast<std::size_t>(id)] = 1;
        if (flags.rfind("B:", 0) == 0) {
            try {
                cv.branch = std::stoi(flags.substr(2));
            } catch (const std::logic_error&) {
                fail(ErrorKind::io, "malformed branch flag '" + flags + "'");
            }
        } else if (flags != "-") {
            fail(ErrorKind::io, "unknown vertex flag '" + flags + "'");
        }
        verts[static_cast<std::size_t>(id)] = cv;
    }
    long nf = 0;
    {
        std::istringstream ss(next_line("F"));
        std::string tag;
        if (!(ss >> tag >> nf) || tag != "F" || nf < 0) fail(ErrorKind::io, "malformed F line");
    }
    std::vector<std::array<int, 3>> faces(static_cast<std::size_t>(nf));
    for (long k = 0; k < nf; ++k) {
        std::istringstream ss(next_line("face"));
        auto& f = faces[static_cast<std::size_t>(k)];
        if (!(ss >> f[0] >> f[1] >> f[2])) fail(ErrorKind::io, "malformed face line: '" + line + "'");
    }
    return CoverMesh(std::move(verts), std::move(faces), rho);
}

inline CoverMesh load_rpm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open mesh file '" + path + "'");
    return read_rpm(is);
}

}  // namespace ramiperiod
