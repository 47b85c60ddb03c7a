#include <gtest/gtest.h>

#include <random>

#include <ramiperiod/homology.hpp>
#include <ramiperiod/meshgen.hpp>

#include "fixtures.hpp"

using namespace ramiperiod;

namespace {

CoverMesh mesh_for(const BranchedCover& c, int n, bool adapt = true) {
    MeshOptions o;
    o.n = n;
    o.adapt = adapt;
    return generate_mesh(c, o);
}

const CoverMesh& torus_mesh() {
    static const CoverMesh m = mesh_for(fixtures::torus(), 1500);
    return m;
}

const CoverMesh& lawson_mesh() {
    static const CoverMesh m = mesh_for(fixtures::lawson(), 1500);
    return m;
}

std::vector<std::vector<int>> J(int g) {
    std::vector<std::vector<int>> j(static_cast<std::size_t>(2 * g), std::vector<int>(static_cast<std::size_t>(2 * g), 0));
    for (int k = 0; k < g; ++k) {
        j[static_cast<std::size_t>(k)][static_cast<std::size_t>(k + g)] = 1;
        j[static_cast<std::size_t>(k + g)][static_cast<std::size_t>(k)] = -1;
    }
    return j;
}

void expect_cochain_invariants(const CoverMesh& m, const std::vector<int>& chi) {
    const auto& t = m.topology();
    for (int h = 0; h < t.n_halfedges(); ++h) ASSERT_EQ(chi[static_cast<std::size_t>(h)], -chi[static_cast<std::size_t>(t.twin(h))]);
    for (int f = 0; f < t.n_faces(); ++f)
        ASSERT_EQ(chi[static_cast<std::size_t>(3 * f)] + chi[static_cast<std::size_t>(3 * f + 1)] + chi[static_cast<std::size_t>(3 * f + 2)], 0) << f;
}

}  // namespace

TEST(Basis, TorusIsCanonical) {
    const CutSystem cs = hyperelliptic_basis(torus_mesh(), fixtures::torus());
    EXPECT_EQ(cs.genus, 1);
    ASSERT_EQ(cs.cycles.size(), 2u);
    EXPECT_EQ(cs.intersection, J(1));
    EXPECT_EQ(intersection_number(torus_mesh(), cs.cycles[0], cs.cycles[1]), 1);
    EXPECT_FALSE(cs.experimental);
}

TEST(Basis, LawsonIsCanonical) {
    const CutSystem cs = hyperelliptic_basis(lawson_mesh(), fixtures::lawson());
    EXPECT_EQ(cs.genus, 2);
    EXPECT_EQ(cs.intersection, J(2));
    EXPECT_EQ(intersection_number(lawson_mesh(), cs.cycles[0], cs.cycles[1]), 0);
    // alpha_1 = c_1 and alpha_2 = c_1 + c_3: two loops, the first shared.
    EXPECT_EQ(cs.cycles[0].loops.size(), 1u);
    ASSERT_EQ(cs.cycles[1].loops.size(), 2u);
    EXPECT_EQ(cs.cycles[1].loops[0], cs.cycles[0].loops[0]);
}

TEST(Basis, CyclesAreClosedWalksOnTheirSheets) {
    for (const CoverMesh* m : {&torus_mesh(), &lawson_mesh()}) {
        const CutSystem cs = homology_basis(*m);
        const auto bp = project_to_base(*m);
        for (const auto& c : cs.cycles) {
            EXPECT_NO_THROW(require_closed(*m, c));
            for (const auto& l : c.loops) {
                // Projected to the base, each loop winds once around two branch points,
                // so it must avoid them and have distinct vertices.
                EXPECT_TRUE(is_simple(l));
                for (int v : l) EXPECT_LT(bp.base_branch[static_cast<std::size_t>(bp.base_of[static_cast<std::size_t>(v)])], 0);
            }
        }
    }
}

TEST(Basis, SelfIntersectionZero) {
    const CutSystem cs = homology_basis(lawson_mesh());
    for (const auto& c : cs.cycles) EXPECT_EQ(intersection_number(lawson_mesh(), c, c), 0);
}

TEST(Basis, DeterministicAndLowestLift) {
    const CutSystem a = homology_basis(torus_mesh()), b = homology_basis(torus_mesh());
    EXPECT_EQ(a.cycles[0].loops, b.cycles[0].loops);
    EXPECT_EQ(a.crossing, b.crossing);
}

TEST(Basis, SwappingFirstTwoBranchPointsKeepsAlphaClass) {
    // e_1 <-> e_2 leaves the loop around {e_1, e_2} in the same class up to
    // sign; the sign normalization restores the pairing +1.
    auto swapped = fixtures::torus();
    std::swap(swapped.branch_points[0], swapped.branch_points[1]);
    const CoverMesh m = mesh_for(swapped, 1500);
    const CutSystem cs = hyperelliptic_basis(m, swapped);
    EXPECT_EQ(cs.intersection, J(1));
}

TEST(Crossing, AntisymmetricAndClosedOnFaces) {
    for (const CoverMesh* m : {&torus_mesh(), &lawson_mesh()}) {
        const CutSystem cs = homology_basis(*m);
        for (const auto& chi : cs.crossing) expect_cochain_invariants(*m, chi);
    }
}

TEST(Crossing, FaceBoundaryIsCoboundary) {
    const CoverMesh& m = lawson_mesh();
    const CutSystem cs = homology_basis(m);
    const auto& f = m.topology().face(17);
    const Cycle tri{{Loop{f[0], f[1], f[2]}}};
    const auto chi = crossing_cochain(m, tri);
    expect_cochain_invariants(m, chi);
    for (const auto& c : cs.cycles) EXPECT_EQ(pairing(m, c, chi), 0);
}

TEST(Crossing, DualToIntersectionForm) {
    const CoverMesh& m = lawson_mesh();
    const CutSystem cs = homology_basis(m);
    // alpha_1 cochain against the beta_1 path.
    EXPECT_EQ(pairing(m, cs.cycles[2], cs.crossing[0]), 1);
    // Period cochains are dual to the basis.
    const auto& t = m.topology();
    for (int k = 0; k < 4; ++k)
        for (int a = 0; a < 4; ++a) {
            long s = 0;
            for (const auto& l : cs.cycles[static_cast<std::size_t>(a)].loops)
                for (int h : loop_halfedges(t, l)) s += cs.period_cochain(k, h);
            EXPECT_EQ(s, a == k ? 1 : 0) << k << " " << a;
        }
}

TEST(Crossing, NonClosedPathRejected) {
    const CoverMesh& m = torus_mesh();
    const auto& f0 = m.topology().face(0);
    const auto& f1 = m.topology().face(m.n_faces() / 2);
    const Cycle bad{{Loop{f0[0], f0[1], f1[2]}}};
    try {
        intersection_number(m, bad, bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::argument);
    }
}

TEST(TreeCotree, GivesSymplecticBasis) {
    for (const CoverMesh* m : {&torus_mesh(), &lawson_mesh()}) {
        const CutSystem cs = tree_cotree_basis(*m);
        EXPECT_TRUE(cs.experimental);
        EXPECT_EQ(cs.intersection, J(cs.genus));
        for (const auto& chi : cs.crossing) expect_cochain_invariants(*m, chi);
    }
}

TEST(Basis, TooCoarseIsResolutionError) {
    const CoverMesh m = mesh_for(fixtures::torus(), 100, false);
    try {
        hyperelliptic_basis(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resolution);
    }
}
