#include <gtest/gtest.h>

#include <random>

#include <ramiperiod/periods.hpp>

#include "fixtures.hpp"

using namespace ramiperiod;

namespace {

struct Case {
    CoverMesh mesh;
    WeightSet w;
    CutSystem cuts;
};

Case make(const BranchedCover& c, int n) {
    MeshOptions o;
    o.n = n;
    Case s{generate_mesh(c, o), {}, {}};
    s.w = build_weight_set(s.mesh, WeightMode::chart);
    s.cuts = homology_basis(s.mesh);
    return s;
}

// about 2000 cover vertices
const Case& torus() {
    static const Case s = make(fixtures::torus(), 850);
    return s;
}

const Case& lawson() {
    static const Case s = make(fixtures::lawson(), 2000);
    return s;
}

Eigen::MatrixXd random_spd(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = u(gen);
    return A * A.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = u(gen);
    return A;
}

}  // namespace

TEST(HolomorphicIntegral, APeriodsAreNormalized) {
    const auto& s = torus();
    EXPECT_GE(s.mesh.n_vertices(), 1800);
    const auto phi = holomorphic_integral(s.mesh, s.w, s.cuts, 0);
    ASSERT_EQ(phi.A.size(), 1u);
    EXPECT_LE(std::abs(phi.A[0] - Complex(1.0, 0.0)), 1e-8);
}

TEST(HolomorphicIntegral, ConjugateEnergyIdentity) {
    for (const Case* s : {&torus(), &lawson()}) {
        for (int l = 0; l < s->cuts.genus; ++l) {
            const auto phi = holomorphic_integral(s->mesh, s->w, s->cuts, l);
            const double eu = vertex_energy(phi.u, s->w), ev = face_energy(phi.v, s->w);
            EXPECT_NEAR(eu, ev, 1e-8 * eu);
        }
    }
}

TEST(HolomorphicIntegral, LawsonAPeriodsAndEdgeAudit) {
    const auto& s = lawson();
    for (int l = 0; l < 2; ++l) {
        const auto phi = holomorphic_integral(s.mesh, s.w, s.cuts, l);
        for (int k = 0; k < 2; ++k) EXPECT_LE(std::abs(phi.A[static_cast<std::size_t>(k)] - Complex(k == l ? 1.0 : 0.0, 0.0)), 1e-8);
        double scale = 0.0;
        for (int e = 0; e < s.w.size(); ++e) scale = std::max(scale, std::abs(s.w[e] * phi.u.delta[static_cast<std::size_t>(e)]));
        for (int e = 0; e < s.w.size(); ++e)
            ASSERT_NEAR(phi.v.dual[static_cast<std::size_t>(e)], s.w[e] * phi.u.delta[static_cast<std::size_t>(e)], 1e-9 * scale);
    }
}

TEST(HolomorphicIntegral, IndexOutOfRange) {
    const auto& s = torus();
    EXPECT_THROW(holomorphic_integral(s.mesh, s.w, s.cuts, 1), Error);
}

TEST(EnergyMatrix, SymmetricPositiveDefinite) {
    const auto& s = torus();
    const Eigen::MatrixXd E = energy_block_matrix(s.mesh, s.w, s.cuts);
    ASSERT_EQ(E.rows(), 2);
    EXPECT_EQ(E(0, 1), E(1, 0));
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(E).info(), Eigen::Success);
}

TEST(EnergyMatrix, PredictsEnergyOfRandomPeriods) {
    const auto& s = lawson();
    const HarmonicSolver S(s.mesh, s.w, s.cuts);
    const Eigen::MatrixXd E = energy_block_matrix(S);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd P(4);
        for (int i = 0; i < 4; ++i) P[i] = nd(gen);
        const double q = vertex_energy(S.solve(std::vector<double>(P.data(), P.data() + 4)), s.w);
        EXPECT_NEAR(q, P.dot(E * P), 1e-7 * q);
    }
}

TEST(BlockForm, IdentityGivesI) {
    const PeriodPair p = period_matrices_from_energy(Eigen::MatrixXd::Identity(2, 2));
    EXPECT_LE(std::abs(p.pi(0, 0) - Complex(0, 1)), 1e-15);
    EXPECT_LE(std::abs(p.pi_dual(0, 0) - Complex(0, 1)), 1e-15);
    EXPECT_LE((energy_from_period_matrices(p.pi, p.pi_dual) - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-15);
}

TEST(BlockForm, SyntheticRoundTrip) {
    std::mt19937_64 gen(17);
    for (int g : {1, 2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
            // Compatible data: Im Pi* SPD, Re Pi* = Re Pi^T (so that E is symmetric).
            const Eigen::MatrixXd re = random_matrix(g, gen);
            CMatrix pi(g, g), pd(g, g);
            pi.real() = re;
            pi.imag() = random_spd(g, gen);
            pd.real() = re.transpose();
            pd.imag() = random_spd(g, gen);
            const Eigen::MatrixXd E = energy_from_period_matrices(pi, pd);
            EXPECT_LE((E - E.transpose()).norm(), 1e-12);
            const PeriodPair back = period_matrices_from_energy(E);
            EXPECT_LE((back.pi - pi).norm(), 1e-12);
            EXPECT_LE((back.pi_dual - pd).norm(), 1e-12);
            EXPECT_LE((energy_from_period_matrices(back.pi, back.pi_dual) - E).norm(), 1e-12 * E.norm());
        }
    }
}

TEST(BlockForm, SingularE22IsDegenerate) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Identity(2, 2);
    E(1, 1) = 0.0;
    try {
        period_matrices_from_energy(E);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degeneracy);
    }
}

TEST(PeriodMatrix, TorusMatchesReferenceAfterReduction) {
    const auto& s = torus();
    const PeriodResult r = period_matrix(s.mesh, s.w, s.cuts, PeriodMethod::direct);
    EXPECT_TRUE(imaginary_part_positive_definite(r.pi));
    EXPECT_LE(r.cross_difference, 1e-6 * r.pi.norm());
    const CMatrix ref = CMatrix::Constant(1, 1, Complex(0.836, 0.955));
    EXPECT_LE(compare(r, ref, CompareMode::modular_g1), 0.02);
    EXPECT_EQ(r.symmetry_defect, 0.0);
}

TEST(PeriodMatrix, EnergyPathAgreesOnLawson) {
    const auto& s = lawson();
    const PeriodResult d = period_matrix(s.mesh, s.w, s.cuts, PeriodMethod::direct);
    const PeriodResult e = period_matrix(s.mesh, s.w, s.cuts, PeriodMethod::energy);
    EXPECT_LE((d.pi - e.pi).norm(), 1e-6 * d.pi.norm());
    EXPECT_LE((d.pi_dual - e.pi_dual).norm(), 1e-6 * d.pi.norm());
    EXPECT_EQ(e.method, PeriodMethod::energy);
    EXPECT_TRUE(imaginary_part_positive_definite(d.pi));
    EXPECT_LE(compare(d, to_matrix(fixtures::lawson_pi()), CompareMode::direct), 0.05);
}

TEST(PeriodMatrix, LawsonSymmetryDefectShrinks) {
    const Case coarse = make(fixtures::lawson(), 700);
    const double a = period_matrix(coarse.mesh, coarse.w, coarse.cuts, PeriodMethod::direct).symmetry_defect;
    const auto& s = lawson();
    const double b = period_matrix(s.mesh, s.w, s.cuts, PeriodMethod::direct).symmetry_defect;
    EXPECT_LT(b, a);
}

TEST(PeriodMatrix, BasisChangeActsModularly) {
    const auto& s = torus();
    const PeriodResult r = period_matrix(s.mesh, s.w, s.cuts, PeriodMethod::direct);
    // beta -> beta + alpha
    Cycle b2 = s.cuts.cycles[1];
    for (const auto& l : s.cuts.cycles[0].loops) b2.loops.push_back(l);
    const CutSystem shifted = detail::finish(s.mesh, 1, {s.cuts.cycles[0], b2}, false);
    const PeriodResult q = period_matrix(s.mesh, s.w, shifted, PeriodMethod::direct);
    EXPECT_LE(std::abs(q.pi(0, 0) - (r.pi(0, 0) + 1.0)), 1e-8);
    EXPECT_LE(std::abs(modular_reduce_genus1(q.pi(0, 0)).tau - modular_reduce_genus1(r.pi(0, 0)).tau), 1e-8);
}

// ---------------------------------------------------------------------------
// Modular reduction

namespace {

// Brute-force orbit test over words in S, T, T^-1.
bool same_orbit(Complex from, Complex to, int max_len) {
    std::vector<Complex> layer{from};
    for (int len = 0; len <= max_len; ++len) {
        for (Complex z : layer)
            if (std::abs(z - to) < 1e-9) return true;
        if (len == max_len) break;
        std::vector<Complex> next;
        next.reserve(layer.size() * 3);
        for (Complex z : layer) {
            next.push_back(-1.0 / z);
            next.push_back(z + 1.0);
            next.push_back(z - 1.0);
        }
        layer.swap(next);
    }
    return false;
}

}  // namespace

TEST(Modular, TranslationInvariant) {
    const Complex t(0.836, 0.955);
    EXPECT_LE(std::abs(modular_reduce_genus1(t + 5.0).tau - modular_reduce_genus1(t).tau), 1e-12);
    EXPECT_LE(std::abs(modular_reduce_genus1(t - 3.0).tau - modular_reduce_genus1(t).tau), 1e-12);
}

TEST(Modular, InversionStaysInOrbit) {
    const Complex t(0.3, 2.0);
    const Complex r = modular_reduce_genus1(-1.0 / t).tau;
    EXPECT_LE(std::abs(r - t), 1e-12);
    EXPECT_TRUE(same_orbit(-1.0 / t, r, 10));
}

TEST(Modular, ReducedValueUnchanged) {
    const Complex t(0.2, 1.5);
    const auto r = modular_reduce_genus1(t);
    EXPECT_EQ(r.tau, t);
    EXPECT_EQ(r.matrix, (std::array<long, 4>{1, 0, 0, 1}));
}

TEST(Modular, MatrixReproducesTheMap) {
    for (Complex t : {Complex(3.7, 0.05), Complex(-0.16, 0.963), Complex(0.49, 0.2)}) {
        const auto r = modular_reduce_genus1(t);
        const auto& m = r.matrix;
        EXPECT_EQ(m[0] * m[3] - m[1] * m[2], 1);
        const Complex z = (double(m[0]) * t + double(m[1])) / (double(m[2]) * t + double(m[3]));
        EXPECT_LE(std::abs(z - r.tau), 1e-9);
        EXPECT_LE(std::abs(r.tau.real()), 0.5 + 1e-12);
        EXPECT_GE(std::abs(r.tau), 1.0 - 1e-12);
    }
}

TEST(Modular, BoundaryTiesGoLeft) {
    EXPECT_LE(std::abs(modular_reduce_genus1(Complex(0.5, 2.0)).tau - Complex(-0.5, 2.0)), 1e-12);
    const Complex w = std::polar(1.0, 1.2);  // on the unit circle, Re > 0
    EXPECT_LE(modular_reduce_genus1(w).tau.real(), 0.0);
}

TEST(Modular, LowerHalfPlaneIsDomainError) {
    try {
        modular_reduce_genus1(Complex(0.1, -1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
    EXPECT_THROW(modular_reduce_genus1(Complex(0.1, 0.0)), Error);
}

TEST(Modular, AlignMapsReferenceIntoComputedBasis) {
    const Complex ref = fixtures::torus_tau_precise;
    const Complex computed(-0.1638, 0.963);
    const Complex a = align_genus1(ref, computed);
    EXPECT_LE(std::abs(a - (ref - 1.0)), 1e-10);
}

// ---------------------------------------------------------------------------
// Comparison

TEST(Compare, EqualGivesZero) {
    const CMatrix L = to_matrix(fixtures::lawson_pi());
    EXPECT_EQ(compare(L, L, CompareMode::direct), 0.0);
    EXPECT_EQ(compare(L, L, CompareMode::signed_permutation), 0.0);
    const CMatrix t = CMatrix::Constant(1, 1, Complex(0.836, 0.955));
    EXPECT_EQ(compare(t, t, CompareMode::modular_g1), 0.0);
}

TEST(Compare, SignedPermutationUndoesRelabeling) {
    CMatrix A(2, 2);
    A << Complex(0.1, 1.2), Complex(0.2, -0.4), Complex(0.2, -0.4), Complex(-0.3, 0.9);
    CMatrix B(2, 2);  // swap the two handles and flip the sign of one
    B << A(1, 1), -A(1, 0), -A(0, 1), A(0, 0);
    EXPECT_GT(compare(B, A, CompareMode::direct), 0.1);
    EXPECT_LE(compare(B, A, CompareMode::signed_permutation), 1e-15);
}

TEST(Compare, ArgumentErrors) {
    const CMatrix L = to_matrix(fixtures::lawson_pi());
    const CMatrix t = CMatrix::Constant(1, 1, Complex(0.0, 1.0));
    EXPECT_THROW(compare(L, t, CompareMode::direct), Error);
    EXPECT_THROW(compare(L, L, CompareMode::modular_g1), Error);
    EXPECT_THROW(to_matrix({{Complex(1, 1)}, {Complex(1, 1), Complex(0, 1)}}), Error);
}

TEST(Json, ResultLayout) {
    PeriodResult r;
    r.pi = CMatrix::Constant(1, 1, Complex(0.25, 1.5));
    r.pi_dual = r.pi;
    r.stats.h = 0.1;
    r.stats.n_vertices = 10;
    const auto j = result_json(r, "torus", 0.01);
    EXPECT_EQ(j["curve"], "torus");
    EXPECT_EQ(j["method"], "direct");
    EXPECT_EQ(j["pi"][0][0]["re"], 0.25);
    EXPECT_EQ(j["pi"][0][0]["im"], 1.5);
    EXPECT_EQ(j["n_vertices"], 10);
    EXPECT_EQ(j["error_vs_reference"], 0.01);
    EXPECT_FALSE(result_json(r, "torus").contains("error_vs_reference"));
}
