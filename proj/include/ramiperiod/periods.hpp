#pragma once

// Period matrices of the triangulated surface: the holomorphic integrals
// normalized on the alpha-cycles, the dual matrix, the energy form of the
// harmonic minimizers, and comparison against reference matrices.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "config.hpp"
#include "error.hpp"
#include "harmonic.hpp"
#include "homology.hpp"
#include "meshgen.hpp"
#include "weights.hpp"

namespace ramiperiod {

using CMatrix = Eigen::MatrixXcd;

enum class PeriodMethod { direct, energy };

inline const char* to_string(PeriodMethod m) { return m == PeriodMethod::direct ? "direct" : "energy"; }

struct PeriodResult {
    CMatrix pi;
    CMatrix pi_dual;
    Eigen::MatrixXd energy_matrix;
    MeshStats stats;
    PeriodMethod method = PeriodMethod::direct;
    double symmetry_defect = 0.0;  ///< ||Pi - Pi^T||_F
    double cross_difference = 0.0; ///< ||Pi_direct - Pi_energy||_F
};

struct HolomorphicIntegral {
    MultiValuedVertexFunction u;  ///< real part
    FaceFunction v;               ///< imaginary part, on faces
    std::vector<Complex> A, B;
};

// ---------------------------------------------------------------------------
// Probe solves: the conjugate periods of the 2g basis functions

/// Y(a, i): increment of the conjugate of u_i (the minimizer with P = e_i)
/// along cycle a. The conjugate periods of any P are Y P.
struct ConjugateProbe {
    int g = 0;
    Eigen::MatrixXd Y;
    std::vector<MultiValuedVertexFunction> basis;
};

inline ConjugateProbe conjugate_probe(const HarmonicSolver& S) {
    const auto& t = S.mesh().topology();
    const int g = S.cuts().genus;
    ConjugateProbe p;
    p.g = g;
    p.Y.resize(2 * g, 2 * g);
    for (int i = 0; i < 2 * g; ++i) {
        std::vector<double> P(static_cast<std::size_t>(2 * g), 0.0);
        P[static_cast<std::size_t>(i)] = 1.0;
        p.basis.push_back(S.solve(P));
        std::vector<double> flux(static_cast<std::size_t>(t.n_edges()));
        for (int e = 0; e < t.n_edges(); ++e) flux[static_cast<std::size_t>(e)] = S.weights()[e] * p.basis.back().delta[static_cast<std::size_t>(e)];
        for (int a = 0; a < 2 * g; ++a) p.Y(a, i) = detail::right_strip_sum(t, S.cuts().crossing[static_cast<std::size_t>(a)], flux);
    }
    return p;
}

namespace detail {

inline Eigen::MatrixXd block(const Eigen::MatrixXd& M, int r, int c, int g) { return M.block(r * g, c * g, g, g); }

inline Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& M, const char* what) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible() || std::abs(lu.rcond()) < 1e-13) fail(ErrorKind::degeneracy, std::string(what) + " is singular");
    return lu.inverse();
}

/// Real periods (e_l, b) whose conjugate has vanishing alpha-periods.
inline Eigen::VectorXd normalized_periods(const ConjugateProbe& p, int l) {
    const int g = p.g;
    const Eigen::MatrixXd YaA = block(p.Y, 0, 0, g), YaB = block(p.Y, 0, 1, g);
    const Eigen::VectorXd b = -checked_inverse(YaB, "alpha-period system") * YaA.col(l);
    Eigen::VectorXd P = Eigen::VectorXd::Zero(2 * g);
    P[l] = 1.0;
    P.tail(g) = b;
    return P;
}

}  // namespace detail

/// phi^l = u + i v with A_k = delta_kl: Re B is solved for so that v has no
/// alpha-periods, Im B is read off the beta-periods of v.
inline HolomorphicIntegral holomorphic_integral(const HarmonicSolver& S, const ConjugateProbe& probe, int l,
                                                const Config& cfg = default_config()) {
    const int g = probe.g;
    if (l < 0 || l >= g) fail(ErrorKind::argument, "holomorphic integral index out of range");
    const Eigen::VectorXd P = detail::normalized_periods(probe, l);
    HolomorphicIntegral phi;
    phi.u = S.solve(std::vector<double>(P.data(), P.data() + P.size()));
    phi.v = conjugate_function(phi.u, S.mesh(), S.weights(), S.cuts(), 0, cfg);
    for (int k = 0; k < g; ++k) {
        phi.A.emplace_back(P[k], phi.v.periods[static_cast<std::size_t>(k)]);
        phi.B.emplace_back(P[g + k], phi.v.periods[static_cast<std::size_t>(g + k)]);
    }
    return phi;
}

inline HolomorphicIntegral holomorphic_integral(const CoverMesh& m, const WeightSet& w, const CutSystem& cuts, int l,
                                                const Config& cfg = default_config()) {
    const HarmonicSolver S(m, w, cuts, 0, cfg);
    return holomorphic_integral(S, conjugate_probe(S), l, cfg);
}

/// Pi_T: column l holds the B-periods of phi^l.
inline CMatrix direct_period_matrix(const ConjugateProbe& p) {
    const int g = p.g;
    CMatrix pi(g, g);
    for (int l = 0; l < g; ++l) {
        const Eigen::VectorXd P = detail::normalized_periods(p, l);
        const Eigen::VectorXd vb = detail::block(p.Y, 1, 0, g) * P.head(g) + detail::block(p.Y, 1, 1, g) * P.tail(g);
        for (int k = 0; k < g; ++k) pi(k, l) = Complex(P[g + k], vb[k]);
    }
    return pi;
}

/// Pi_T*: roles of u and v exchanged. Re A = 0 and the conjugate's alpha-periods
/// are delta_kl; column l holds the B-periods divided by i.
inline CMatrix direct_dual_matrix(const ConjugateProbe& p) {
    const int g = p.g;
    const Eigen::MatrixXd YaB = detail::block(p.Y, 0, 1, g), YbB = detail::block(p.Y, 1, 1, g);
    const Eigen::MatrixXd Binv = detail::checked_inverse(YaB, "alpha-period system");
    CMatrix pd(g, g);
    for (int l = 0; l < g; ++l) {
        const Eigen::VectorXd b = Binv.col(l);
        const Eigen::VectorXd im = YbB * b;
        // B_k = b_k + i im_k; divided by i.
        for (int k = 0; k < g; ++k) pd(k, l) = Complex(im[k], -b[k]);
    }
    return pd;
}

// ---------------------------------------------------------------------------
// Energy form

/// E_T by polarization: E_ij = (Q(e_i + e_j) - Q(e_i) - Q(e_j)) / 2 with
/// Q(P) the energy of the harmonic minimizer with periods P.
inline Eigen::MatrixXd energy_block_matrix(const HarmonicSolver& S) {
    const int n = 2 * S.cuts().genus;
    auto Q = [&](int i, int j) {
        std::vector<double> P(static_cast<std::size_t>(n), 0.0);
        P[static_cast<std::size_t>(i)] += 1.0;
        if (j >= 0) P[static_cast<std::size_t>(j)] += 1.0;
        return vertex_energy(S.solve(P), S.weights());
    };
    std::vector<double> diag(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = Q(i, -1);
    Eigen::MatrixXd E(n, n);
    for (int i = 0; i < n; ++i) {
        E(i, i) = diag[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) E(i, j) = E(j, i) = 0.5 * (Q(i, j) - diag[static_cast<std::size_t>(i)] - diag[static_cast<std::size_t>(j)]);
    }
    return E;
}

inline Eigen::MatrixXd energy_block_matrix(const CoverMesh& m, const WeightSet& w, const CutSystem& cuts,
                                          const Config& cfg = default_config()) {
    return energy_block_matrix(HarmonicSolver(m, w, cuts, 0, cfg));
}

struct PeriodPair {
    CMatrix pi, pi_dual;
};

/// Inverts the block form of E (P = (Re A, Re B), E12 pairs A with B):
/// Im Pi* = E22^-1, Re Pi* = -E12 E22^-1, Re Pi = -E22^-1 E21,
/// Im Pi = E11 - E12 E22^-1 E21.
inline PeriodPair period_matrices_from_energy(const Eigen::MatrixXd& E) {
    if (E.rows() != E.cols() || E.rows() % 2 != 0 || E.rows() == 0) fail(ErrorKind::argument, "energy matrix must be 2g x 2g");
    const int g = static_cast<int>(E.rows() / 2);
    const Eigen::MatrixXd E11 = detail::block(E, 0, 0, g), E12 = detail::block(E, 0, 1, g), E21 = detail::block(E, 1, 0, g),
                          E22 = detail::block(E, 1, 1, g);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (E22 + E22.transpose()));
    if (llt.info() != Eigen::Success) fail(ErrorKind::degeneracy, "E22 block is not positive definite");
    const Eigen::MatrixXd E22i = detail::checked_inverse(E22, "E22 block");
    PeriodPair r;
    r.pi_dual = CMatrix(g, g);
    r.pi = CMatrix(g, g);
    r.pi_dual.real() = -E12 * E22i;
    r.pi_dual.imag() = E22i;
    r.pi.real() = -E22i * E21;
    r.pi.imag() = E11 - E12 * E22i * E21;
    return r;
}

/// Forward block form: E22 = (Im Pi*)^-1, E12 = -Re Pi* E22, E21 = -E22 Re Pi,
/// E11 = Im Pi + Re Pi* (Im Pi*)^-1 Re Pi.
inline Eigen::MatrixXd energy_from_period_matrices(const CMatrix& pi, const CMatrix& pi_dual) {
    const int g = static_cast<int>(pi.rows());
    if (pi.cols() != g || pi_dual.rows() != g || pi_dual.cols() != g) fail(ErrorKind::argument, "period matrices must be g x g");
    const Eigen::MatrixXd E22 = detail::checked_inverse(pi_dual.imag(), "Im of the dual period matrix");
    Eigen::MatrixXd E(2 * g, 2 * g);
    E.block(g, g, g, g) = E22;
    E.block(0, g, g, g) = -pi_dual.real() * E22;
    E.block(g, 0, g, g) = -E22 * pi.real();
    E.block(0, 0, g, g) = pi.imag() + pi_dual.real() * E22 * pi.real();
    return E;
}

// ---------------------------------------------------------------------------
// Full pipeline

inline bool imaginary_part_positive_definite(const CMatrix& pi) {
    const Eigen::MatrixXd im = 0.5 * (pi.imag() + pi.imag().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im);
    return es.eigenvalues().minCoeff() > 0.0;
}

/// Both pipelines run; `method` picks the one reported. Disagreement beyond
/// cross_tol_rel * ||Pi|| is a consistency error.
inline PeriodResult period_matrix(const CoverMesh& m, const WeightSet& w, const CutSystem& cuts, PeriodMethod method,
                                  const Config& cfg = default_config()) {
    if (cuts.genus < 1) fail(ErrorKind::argument, "period matrix needs genus >= 1");
    const HarmonicSolver S(m, w, cuts, 0, cfg);
    const ConjugateProbe probe = conjugate_probe(S);
    PeriodResult r;
    r.method = method;
    r.stats = mesh_stats(m);
    r.energy_matrix = energy_block_matrix(S);
    const CMatrix pd = direct_period_matrix(probe), pdd = direct_dual_matrix(probe);
    const PeriodPair pe = period_matrices_from_energy(r.energy_matrix);
    r.cross_difference = (pd - pe.pi).norm();
    if (r.cross_difference > cfg.cross_tol_rel * pd.norm())
        fail(ErrorKind::consistency, "direct and energy period matrices differ by " + std::to_string(r.cross_difference));
    r.pi = method == PeriodMethod::direct ? pd : pe.pi;
    r.pi_dual = method == PeriodMethod::direct ? pdd : pe.pi_dual;
    r.symmetry_defect = (r.pi - r.pi.transpose()).norm();
    if (!imaginary_part_positive_definite(r.pi)) fail(ErrorKind::consistency, "Im of the period matrix is not positive definite");
    return r;
}

// ---------------------------------------------------------------------------
// Genus-1 modular reduction

struct ModularReduction {
    Complex tau;                 ///< reduced value
    std::array<long, 4> matrix;  ///< (a, b, c, d) with tau = (a t + b) / (c t + d)
};

/// SL(2,Z) reduction into |Re| <= 1/2, |tau| >= 1; boundary points are mapped
/// to the side Re <= 0.
inline ModularReduction modular_reduce_genus1(Complex tau) {
    if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
        fail(ErrorKind::domain, "modular reduction needs Im tau > 0");
    constexpr double eps = 1e-12;
    long a = 1, b = 0, c = 0, d = 1;
    for (int it = 0; it < 10000; ++it) {
        const double n = std::floor(tau.real() + 0.5);
        if (n != 0.0) {
            tau -= n;
            const long k = static_cast<long>(n);
            a -= k * c;
            b -= k * d;
        }
        if (std::norm(tau) < 1.0 - eps) {
            tau = -1.0 / tau;
            std::tie(a, b, c, d) = std::make_tuple(-c, -d, a, b);
            continue;
        }
        break;
    }
    if (tau.real() > 0.5 - eps) {
        tau -= 1.0;
        a -= c;
        b -= d;
    }
    if (std::abs(std::norm(tau) - 1.0) <= eps && tau.real() > 0.0) {
        tau = -1.0 / tau;
        std::tie(a, b, c, d) = std::make_tuple(-c, -d, a, b);
    }
    return {tau, {a, b, c, d}};
}

// ---------------------------------------------------------------------------
// Comparison

/// Image of z under short words in S, T, T^-1 (length <= 4) closest to target.
/// Two reduced values on opposite sides of the domain boundary are close in
/// the half plane but not as reduced numbers; this recovers the true distance.
inline Complex nearest_image(Complex z, Complex target) {
    std::vector<Complex> layer{z};
    Complex best = z;
    for (int len = 0; len <= 4; ++len) {
        std::vector<Complex> next;
        for (Complex w : layer) {
            if (std::abs(w - target) < std::abs(best - target)) best = w;
            if (len < 4) {
                next.push_back(-1.0 / w);
                next.push_back(w + 1.0);
                next.push_back(w - 1.0);
            }
        }
        layer.swap(next);
    }
    return best;
}


enum class CompareMode { direct, modular_g1, signed_permutation };

inline CMatrix to_matrix(const std::vector<std::vector<Complex>>& rows) {
    const auto g = static_cast<Eigen::Index>(rows.size());
    CMatrix M(g, g);
    for (Eigen::Index i = 0; i < g; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != g) fail(ErrorKind::argument, "reference matrix is not square");
        for (Eigen::Index j = 0; j < g; ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return M;
}

/// Frobenius error against a reference. modular_g1 reduces both sides first
/// (then takes the nearest image of the reference across the domain boundary);
/// signed_permutation minimizes over simultaneous signed permutations of the
/// basis (alpha_k, beta_k) -> s_k (alpha_p(k), beta_p(k)), which are symplectic.
inline double compare(const CMatrix& pi, const CMatrix& reference, CompareMode mode) {
    if (pi.rows() != reference.rows() || pi.cols() != reference.cols()) fail(ErrorKind::argument, "period matrix dimensions differ");
    const int g = static_cast<int>(pi.rows());
    if (!imaginary_part_positive_definite(reference)) fail(ErrorKind::argument, "reference period matrix must have Im positive definite");
    switch (mode) {
    case CompareMode::direct: return (pi - reference).norm();
    case CompareMode::modular_g1:
        if (g != 1) fail(ErrorKind::argument, "modular comparison is for genus 1");
        return std::abs(modular_reduce_genus1(pi(0, 0)).tau - nearest_image(modular_reduce_genus1(reference(0, 0)).tau,
                                                                            modular_reduce_genus1(pi(0, 0)).tau));
    case CompareMode::signed_permutation: {
        std::vector<int> perm(static_cast<std::size_t>(g));
        std::iota(perm.begin(), perm.end(), 0);
        double best = INFINITY;
        do {
            for (int signs = 0; signs < (1 << g); ++signs) {
                CMatrix q(g, g);
                for (int i = 0; i < g; ++i)
                    for (int j = 0; j < g; ++j) {
                        const double s = ((signs >> i) & 1 ? -1.0 : 1.0) * ((signs >> j) & 1 ? -1.0 : 1.0);
                        q(i, j) = s * pi(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
                    }
                best = std::min(best, (q - reference).norm());
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    }
    return INFINITY;
}

inline double compare(const PeriodResult& r, const CMatrix& reference, CompareMode mode) { return compare(r.pi, reference, mode); }

/// Reference expressed in the basis of a computed genus-1 result: both values
/// are reduced, and the computed side's reduction is undone on the reference.
inline Complex align_genus1(Complex reference, Complex computed) {
    const auto rr = modular_reduce_genus1(reference), rc = modular_reduce_genus1(computed);
    const auto& m = rc.matrix;  // computed -> reduced; invert (d, -b, -c, a)
    const Complex t = nearest_image(rr.tau, rc.tau);
    return (static_cast<double>(m[3]) * t - static_cast<double>(m[1])) / (-static_cast<double>(m[2]) * t + static_cast<double>(m[0]));
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json matrix_json(const CMatrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back({{"re", M(i, j).real()}, {"im", M(i, j).imag()}});
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json result_json(const PeriodResult& r, const std::string& curve, std::optional<double> error_vs_reference = std::nullopt) {
    nlohmann::json j;
    j["curve"] = curve;
    j["method"] = to_string(r.method);
    j["h"] = r.stats.h;
    j["n_vertices"] = r.stats.n_vertices;
    j["pi"] = matrix_json(r.pi);
    j["pi_dual"] = matrix_json(r.pi_dual);
    j["symmetry_defect"] = r.symmetry_defect;
    if (error_vs_reference) j["error_vs_reference"] = *error_vs_reference;
    return j;
}

}  // namespace ramiperiod
