#pragma once

// Multi-valued discrete harmonic functions. A function with real periods P is
// stored as a single-valued u0 plus the jump sum_k P_k chi_k(e) on every edge,
// chi_k being the period cochains of the cut system; harmonicity of the
// well-defined differences is a linear system for u0 with one vertex pinned.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "config.hpp"
#include "error.hpp"
#include "homology.hpp"
#include "mesh.hpp"
#include "weights.hpp"

namespace ramiperiod {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct MultiValuedVertexFunction {
    std::vector<double> base;     ///< u0, zero at the gauge vertex
    std::vector<double> periods;  ///< Re A_1..Re A_g, Re B_1..Re B_g
    std::vector<double> delta;    ///< well-defined difference u(head) - u(tail) along edge_halfedge(e)
    int gauge_vertex = 0;
    double residual = 0.0;        ///< max_x |sum_y c (u(y) - u(x))|
    double rhs_norm = 0.0;        ///< max norm of the right-hand side

    /// u(target(h)) - u(origin(h)).
    double difference(const HalfEdgeMesh& t, int h) const {
        const int e = t.edge(h);
        const double d = delta[static_cast<std::size_t>(e)];
        return t.edge_halfedge(e) == h ? d : -d;
    }
};

/// Function on faces, multi-valued through the traversal chains of the cut
/// cycles: v(l_e) - v(r_e) = v0(l_e) - v0(r_e) + sum_k Q_k tau_k(e).
struct FaceFunction {
    std::vector<double> values;       ///< v0, zero at the gauge face
    std::vector<double> coefficients; ///< Q
    std::vector<double> periods;      ///< increments along alpha_1..g, beta_1..g
    std::vector<double> dual;         ///< v(left) - v(right) across edge_halfedge(e)
    int gauge_face = 0;
    double defect = 0.0;              ///< max_e |dual(e) - c(e) delta(e)|
};

// ---------------------------------------------------------------------------
// Operator

/// (L u)(x) = sum over edges [x,y] of c (u(x) - u(y)).
inline SparseMatrix assemble_laplacian(const CoverMesh& m, const WeightSet& w) {
    const auto& t = m.topology();
    if (w.size() != t.n_edges())
        fail(ErrorKind::argument, "weight set has " + std::to_string(w.size()) + " entries for " + std::to_string(t.n_edges()) + " edges");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(4 * t.n_edges()));
    for (int e = 0; e < t.n_edges(); ++e) {
        const int h = t.edge_halfedge(e);
        const int a = t.origin(h), b = t.target(h);
        const double c = w[e];
        if (!std::isfinite(c)) fail(ErrorKind::argument, "edge " + std::to_string(e) + " has no finite weight");
        trip.emplace_back(a, a, c);
        trip.emplace_back(b, b, c);
        trip.emplace_back(a, b, -c);
        trip.emplace_back(b, a, -c);
    }
    SparseMatrix L(t.n_vertices(), t.n_vertices());
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

/// Jump sum_k P_k chi_k along edge_halfedge(e), for every edge.
inline std::vector<double> period_jumps(const CoverMesh& m, const CutSystem& cuts, const std::vector<double>& P) {
    const auto& t = m.topology();
    if (static_cast<int>(P.size()) != 2 * cuts.genus)
        fail(ErrorKind::argument, "period vector has " + std::to_string(P.size()) + " entries, expected " + std::to_string(2 * cuts.genus));
    std::vector<double> s(static_cast<std::size_t>(t.n_edges()), 0.0);
    for (int e = 0; e < t.n_edges(); ++e) {
        const int h = t.edge_halfedge(e);
        double acc = 0.0;
        for (int k = 0; k < 2 * cuts.genus; ++k)
            if (P[static_cast<std::size_t>(k)] != 0.0) acc += P[static_cast<std::size_t>(k)] * cuts.period_cochain(k, h);
        s[static_cast<std::size_t>(e)] = acc;
    }
    return s;
}

/// Per-vertex sum_y c(x,y) (u(y) - u(x)) of the well-defined differences.
inline std::vector<double> harmonic_defect(const CoverMesh& m, const WeightSet& w, const std::vector<double>& delta) {
    const auto& t = m.topology();
    std::vector<double> r(static_cast<std::size_t>(t.n_vertices()), 0.0);
    for (int e = 0; e < t.n_edges(); ++e) {
        const int h = t.edge_halfedge(e);
        const double f = w[e] * delta[static_cast<std::size_t>(e)];
        r[static_cast<std::size_t>(t.origin(h))] += f;
        r[static_cast<std::size_t>(t.target(h))] -= f;
    }
    return r;
}

/// Solver for multi-valued harmonic functions on one mesh; the direct
/// factorization is computed once and shared by all period vectors.
class HarmonicSolver {
public:
    HarmonicSolver(const CoverMesh& m, const WeightSet& w, const CutSystem& cuts, int gauge_vertex = 0,
                   const Config& cfg = default_config())
        : m_(m), w_(w), cuts_(cuts), gauge_(gauge_vertex), cfg_(cfg) {
        if (cuts.genus < 1) fail(ErrorKind::argument, "harmonic functions with periods need genus >= 1");
        const int n = m.n_vertices();
        if (gauge_ < 0 || gauge_ >= n) fail(ErrorKind::argument, "gauge vertex out of range");
        const SparseMatrix L = assemble_laplacian(m, w);
        // Drop the gauge row and column.
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(L.nonZeros()));
        for (int k = 0; k < L.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(L, k); it; ++it) {
                if (it.row() == gauge_ || it.col() == gauge_) continue;
                trip.emplace_back(reduce(static_cast<int>(it.row())), reduce(static_cast<int>(it.col())), it.value());
            }
        A_.resize(n - 1, n - 1);
        A_.setFromTriplets(trip.begin(), trip.end());
        use_cg_ = cfg.solver == SolverKind::cg;
        if (!use_cg_) {
            ldlt_.compute(A_);
            if (ldlt_.info() != Eigen::Success) fail(ErrorKind::numeric, "sparse LDLT factorization failed (is the mesh connected?)");
        }
    }

    const CoverMesh& mesh() const { return m_; }
    const WeightSet& weights() const { return w_; }
    const CutSystem& cuts() const { return cuts_; }
    int gauge_vertex() const { return gauge_; }

    MultiValuedVertexFunction solve(const std::vector<double>& P) const {
        const auto& t = m_.topology();
        const int n = m_.n_vertices();
        const std::vector<double> jump = period_jumps(m_, cuts_, P);
        // Harmonicity: sum_y c (u0(y) - u0(x) + jump(x->y)) = 0, i.e. L u0 = b with
        // b(x) = sum_y c jump(x->y).
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        for (int e = 0; e < t.n_edges(); ++e) {
            const int h = t.edge_halfedge(e);
            const double f = w_[e] * jump[static_cast<std::size_t>(e)];
            b[t.origin(h)] += f;
            b[t.target(h)] -= f;
        }
        Eigen::VectorXd br(n - 1);
        for (int v = 0; v < n; ++v)
            if (v != gauge_) br[reduce(v)] = b[v];
        Eigen::VectorXd x;
        if (use_cg_) {
            Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
            cg.setTolerance(cfg_.cg_rel_tol);
            const auto cap = static_cast<Eigen::Index>(std::ceil(cfg_.cg_iter_factor * std::sqrt(static_cast<double>(n))));
            cg.setMaxIterations(cap);
            cg.compute(A_);
            x = cg.solve(br);
            if (cg.info() != Eigen::Success)
                fail(ErrorKind::numeric, "conjugate gradient did not converge in " + std::to_string(cap) +
                                             " iterations (relative residual " + std::to_string(cg.error()) + ")");
        } else {
            x = ldlt_.solve(br);
            if (ldlt_.info() != Eigen::Success) fail(ErrorKind::numeric, "sparse LDLT solve failed");
        }
        MultiValuedVertexFunction u;
        u.gauge_vertex = gauge_;
        u.periods = P;
        u.base.assign(static_cast<std::size_t>(n), 0.0);
        for (int v = 0; v < n; ++v)
            if (v != gauge_) u.base[static_cast<std::size_t>(v)] = x[reduce(v)];
        u.delta.resize(static_cast<std::size_t>(t.n_edges()));
        for (int e = 0; e < t.n_edges(); ++e) {
            const int h = t.edge_halfedge(e);
            u.delta[static_cast<std::size_t>(e)] =
                u.base[static_cast<std::size_t>(t.target(h))] - u.base[static_cast<std::size_t>(t.origin(h))] + jump[static_cast<std::size_t>(e)];
        }
        const auto r = harmonic_defect(m_, w_, u.delta);
        for (double x_ : r) u.residual = std::max(u.residual, std::abs(x_));
        u.rhs_norm = b.cwiseAbs().maxCoeff();
        return u;
    }

private:
    const CoverMesh& m_;
    const WeightSet& w_;
    const CutSystem& cuts_;
    int gauge_;
    Config cfg_;
    SparseMatrix A_;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
    bool use_cg_ = false;

    int reduce(int v) const { return v < gauge_ ? v : v - 1; }
};

inline MultiValuedVertexFunction solve_multivalued_harmonic(const CoverMesh& m, const WeightSet& w, const CutSystem& cuts,
                                                            const std::vector<double>& P, int gauge_vertex = 0,
                                                            const Config& cfg = default_config()) {
    return HarmonicSolver(m, w, cuts, gauge_vertex, cfg).solve(P);
}

// ---------------------------------------------------------------------------
// Energies

inline double vertex_energy(const MultiValuedVertexFunction& u, const WeightSet& w) {
    double s = 0.0;
    for (int e = 0; e < w.size(); ++e) s += w[e] * u.delta[static_cast<std::size_t>(e)] * u.delta[static_cast<std::size_t>(e)];
    return s;
}

inline void require_nonzero_weights(const WeightSet& w, const Config& cfg = default_config()) {
    std::string bad;
    int count = 0;
    for (int e = 0; e < w.size(); ++e)
        if (std::abs(w[e]) <= cfg.zero_weight_eps) {
            if (count < 10) bad += (count ? ", " : "") + std::to_string(e);
            ++count;
        }
    if (count) fail(ErrorKind::zero_weight, std::to_string(count) + " edge(s) with zero weight: " + bad + (count > 10 ? ", ..." : ""));
}

/// sum_e (v(l_e) - v(r_e))^2 / c(e).
inline double face_energy(const FaceFunction& v, const WeightSet& w, const Config& cfg = default_config()) {
    require_nonzero_weights(w, cfg);
    double s = 0.0;
    for (int e = 0; e < w.size(); ++e) s += v.dual[static_cast<std::size_t>(e)] * v.dual[static_cast<std::size_t>(e)] / w[e];
    return s;
}

// ---------------------------------------------------------------------------
// Conjugate function

namespace detail {

/// Increment of the face function along the strip of faces on the right of a
/// cycle, for dual differences d (per edge): every edge leaving the cycle to
/// the right is crossed once, counterclockwise about its cycle vertex.
inline double right_strip_sum(const HalfEdgeMesh& t, const std::vector<int>& chi, const std::vector<double>& d) {
    double s = 0.0;
    for (int e = 0; e < t.n_edges(); ++e) {
        const int c = chi[static_cast<std::size_t>(t.edge_halfedge(e))];
        if (c) s -= c * d[static_cast<std::size_t>(e)];
    }
    return s;
}

}  // namespace detail

/// Face function v with v(l_e) - v(r_e) = c(e) (u(h_e) - u(t_e)), integrated
/// over a dual spanning tree from gauge_face. Its periods along the cut cycles
/// are returned with it. tree_seed shuffles the tree (for testing).
inline FaceFunction conjugate_function(const MultiValuedVertexFunction& u, const CoverMesh& m, const WeightSet& w,
                                       const CutSystem& cuts, int gauge_face = 0, const Config& cfg = default_config(),
                                       std::optional<std::uint64_t> tree_seed = std::nullopt) {
    const auto& t = m.topology();
    const int g = cuts.genus;
    if (gauge_face < 0 || gauge_face >= t.n_faces()) fail(ErrorKind::argument, "gauge face out of range");
    // Harmonicity is what makes the construction well defined.
    const auto r = harmonic_defect(m, w, u.delta);
    double scale = 0.0;
    for (int e = 0; e < t.n_edges(); ++e) scale = std::max(scale, std::abs(w[e] * u.delta[static_cast<std::size_t>(e)]));
    int worst = 0;
    for (int v = 0; v < t.n_vertices(); ++v)
        if (std::abs(r[static_cast<std::size_t>(v)]) > std::abs(r[static_cast<std::size_t>(worst)])) worst = v;
    const double tol = cfg.harmonic_check_rel * std::max(scale, 1e-300);
    if (std::abs(r[static_cast<std::size_t>(worst)]) > tol)
        fail(ErrorKind::consistency, "function is not discrete harmonic: defect " + std::to_string(std::abs(r[static_cast<std::size_t>(worst)])) +
                                         " at vertex " + std::to_string(worst));

    std::vector<double> target(static_cast<std::size_t>(t.n_edges()));
    for (int e = 0; e < t.n_edges(); ++e) target[static_cast<std::size_t>(e)] = w[e] * u.delta[static_cast<std::size_t>(e)];

    FaceFunction v;
    v.gauge_face = gauge_face;
    // Periods of v from the Cauchy-Riemann increments, then the coefficients Q
    // of the traversal chains that reproduce them.
    v.periods.resize(static_cast<std::size_t>(2 * g));
    std::vector<std::vector<double>> tau(static_cast<std::size_t>(2 * g), std::vector<double>(static_cast<std::size_t>(t.n_edges())));
    for (int k = 0; k < 2 * g; ++k)
        for (int e = 0; e < t.n_edges(); ++e)
            tau[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)] =
                cuts.traversal[static_cast<std::size_t>(k)][static_cast<std::size_t>(t.edge_halfedge(e))];
    Eigen::MatrixXd G(2 * g, 2 * g);
    Eigen::VectorXd Y(2 * g);
    for (int a = 0; a < 2 * g; ++a) {
        const auto& chi = cuts.crossing[static_cast<std::size_t>(a)];
        v.periods[static_cast<std::size_t>(a)] = detail::right_strip_sum(t, chi, target);
        Y[a] = v.periods[static_cast<std::size_t>(a)];
        for (int k = 0; k < 2 * g; ++k) G(a, k) = detail::right_strip_sum(t, chi, tau[static_cast<std::size_t>(k)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible()) fail(ErrorKind::consistency, "cut cycles do not detect their own traversals");
    const Eigen::VectorXd Q = lu.solve(Y);
    v.coefficients.assign(Q.data(), Q.data() + Q.size());
    // The remainder is single valued; integrate it over a dual spanning tree.
    std::vector<double> rest(target);
    for (int k = 0; k < 2 * g; ++k)
        for (int e = 0; e < t.n_edges(); ++e) rest[static_cast<std::size_t>(e)] -= Q[k] * tau[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)];
    v.values.assign(static_cast<std::size_t>(t.n_faces()), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(t.n_faces()), 0);
    std::mt19937_64 gen(tree_seed.value_or(0));
    std::deque<int> q{gauge_face};
    seen[static_cast<std::size_t>(gauge_face)] = 1;
    while (!q.empty()) {
        if (tree_seed && q.size() > 1) {
            // Random pick from the frontier gives a random spanning tree shape.
            const std::size_t k = static_cast<std::size_t>(gen() % q.size());
            std::swap(q[k], q.front());
        }
        const int f = q.front();
        q.pop_front();
        for (int i = 0; i < 3; ++i) {
            const int h = 3 * f + i;
            const int g2 = HalfEdgeMesh::face_of(t.twin(h));
            if (seen[static_cast<std::size_t>(g2)]) continue;
            seen[static_cast<std::size_t>(g2)] = 1;
            // f is left of h, g2 right of it.
            const int e = t.edge(h);
            const double d = t.edge_halfedge(e) == h ? rest[static_cast<std::size_t>(e)] : -rest[static_cast<std::size_t>(e)];
            v.values[static_cast<std::size_t>(g2)] = v.values[static_cast<std::size_t>(f)] - d;
            q.push_back(g2);
        }
    }
    v.dual.resize(static_cast<std::size_t>(t.n_edges()));
    for (int e = 0; e < t.n_edges(); ++e) {
        const int h = t.edge_halfedge(e);
        double d = v.values[static_cast<std::size_t>(HalfEdgeMesh::face_of(h))] - v.values[static_cast<std::size_t>(HalfEdgeMesh::face_of(t.twin(h)))];
        for (int k = 0; k < 2 * g; ++k) d += Q[k] * tau[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)];
        v.dual[static_cast<std::size_t>(e)] = d;
        v.defect = std::max(v.defect, std::abs(d - target[static_cast<std::size_t>(e)]));
    }
    if (v.defect > tol * 10.0)
        fail(ErrorKind::consistency, "conjugate function does not close up: defect " + std::to_string(v.defect));
    return v;
}

}  // namespace ramiperiod
