#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <ramiperiod/covering.hpp>

#include "fixtures.hpp"

using namespace ramiperiod;
using fixtures::pt;

namespace {

BranchedCover simple_cover(int n_points) {
    std::vector<ExtComplex> p;
    for (int k = 0; k < n_points; ++k) p.push_back(ExtComplex::finite(std::polar(0.4, 0.3 + 2.0 * std::numbers::pi * k / n_points)));
    return hyperelliptic_cover("c", p);
}

bool contains(const std::vector<std::string>& report, const std::string& needle) {
    for (const auto& s : report)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Permutation, CompositionAppliesRightOperandFirst) {
    const Permutation a({1, 2, 0});
    const Permutation b = Permutation::transposition(3, 0, 1);
    const Permutation ab = a * b;
    EXPECT_EQ(ab(0), a(b(0)));
    EXPECT_EQ(ab(0), 2);
    EXPECT_TRUE((a * a.inverse()).is_identity());
    EXPECT_EQ(a.cycles().size(), 1u);
    EXPECT_EQ(b.cycles().size(), 2u);
}

TEST(Genus, RiemannHurwitzExamples) {
    EXPECT_EQ(genus(simple_cover(4)), 1);
    EXPECT_EQ(genus(simple_cover(6)), 2);
    EXPECT_EQ(genus(simple_cover(2)), 0);
    EXPECT_EQ(genus(fixtures::torus()), 1);
    EXPECT_EQ(genus(fixtures::lawson()), 2);
}

TEST(Genus, InconsistentMonodromyIsValidationError) {
    BranchedCover c = simple_cover(3);
    try {
        genus(c);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::validation);
    }
}

TEST(Genus, InvariantUnderSheetRelabelling) {
    // Three sheets: monodromies (0 1), (1 2), (0 1), (1 2) close up (product identity) in this order.
    BranchedCover c;
    c.degree = 3;
    c.rho = 2.0;
    const std::vector<Permutation> mono{Permutation::transposition(3, 0, 1), Permutation::transposition(3, 1, 2),
                                        Permutation::transposition(3, 1, 2), Permutation::transposition(3, 0, 1)};
    for (int k = 0; k < 4; ++k) c.branch_points.push_back({ExtComplex::finite(std::polar(0.5, 0.2 + k * 1.5)), mono[k], 0.1});
    const int g = genus(c);
    EXPECT_EQ(g, 0);
    const Permutation relabel({2, 0, 1});
    for (auto& b : c.branch_points) b.monodromy = relabel * b.monodromy * relabel.inverse();
    EXPECT_EQ(genus(c), g);
}

TEST(Chart, Examples) {
    BranchPoint O{pt(0.0), Permutation::transposition(2, 0, 1), 10.0};
    EXPECT_EQ(chart_image(ChartPolar{0.0, 1.0}, 0.5), Complex(0.0, 0.0));
    const Complex a = chart_image(ChartPolar{4.0, 0.0}, 0.5);
    EXPECT_NEAR(a.real(), 2.0, 1e-15);
    EXPECT_NEAR(a.imag(), 0.0, 1e-15);
    const Complex b = chart_image(ChartPolar{4.0, 2.0 * std::numbers::pi}, 0.5);
    EXPECT_NEAR(b.real(), -2.0, 1e-14);
    EXPECT_NEAR(b.imag(), 0.0, 1e-14);
    // z = O maps to 0; second lift of the positive ray maps to the negative ray.
    EXPECT_EQ(chart_image(pt(0.0), 0, O, 0.5), Complex(0.0, 0.0));
    EXPECT_NEAR(chart_image(pt(4.0), 1, O, 0.5).real(), -2.0, 1e-14);
}

TEST(Chart, OutsideDiskIsDomainError) {
    BranchPoint O{pt(0.5, 0.4), Permutation::transposition(2, 0, 1), 0.1};
    try {
        chart_image(pt(0.9, 0.4), 0, O, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(Chart, InfinityUsesInverseCoordinate) {
    BranchPoint O{ExtComplex::inf(), Permutation::transposition(2, 0, 1), 0.25};
    // |1/z| = 1/16, angle of 1/z = 0 -> (1/16)^(1/2) = 1/4.
    EXPECT_NEAR(chart_image(pt(16.0), 0, O, 0.5).real(), 0.25, 1e-15);
    EXPECT_EQ(chart_image(ExtComplex::inf(), 0, O, 0.5), Complex(0.0, 0.0));
}

TEST(Chart, FullApertureCoversTheCircleOnce) {
    // phi in [0, 2 pi / gamma) maps onto angles [0, 2 pi) injectively.
    const double gamma = 1.0 / 3.0;
    std::vector<double> args;
    for (int k = 0; k < 30; ++k) {
        const double phi = 2.0 * std::numbers::pi / gamma * k / 30.0;
        const Complex w = chart_image(ChartPolar{1.0, phi}, gamma);
        double a = std::arg(w);
        if (a < -1e-12) a += 2.0 * std::numbers::pi;
        args.push_back(a);
    }
    for (int k = 1; k < 30; ++k) EXPECT_GT(args[k], args[k - 1]);
    EXPECT_LT(args.back(), 2.0 * std::numbers::pi);
}

TEST(Validate, TorusSpecWithRhoTwoIsClean) {
    const auto report = validate(fixtures::torus(2.0));
    EXPECT_TRUE(report.empty()) << report.front();
}

TEST(Validate, RhoBelowOne) {
    BranchedCover c = fixtures::torus(2.0);
    c.rho = 0.9;
    EXPECT_TRUE(contains(validate(c), "rho must exceed 1"));
}

TEST(Validate, BranchPointOutsideHalfDisk) {
    BranchedCover c = fixtures::torus(2.0);
    c.branch_points[0].position = pt(1.5);
    EXPECT_TRUE(contains(validate(c), "branch point outside B_{rho/2}"));
}

TEST(Validate, RejectsIdentityAndOverlaps) {
    BranchedCover c = fixtures::torus(2.0);
    c.branch_points[1].monodromy = Permutation::identity(2);
    c.branch_points[2].r_O = 1.0;
    const auto report = validate(c);
    EXPECT_TRUE(contains(report, "identity monodromy"));
    EXPECT_TRUE(contains(report, "overlap"));
    EXPECT_TRUE(contains(report, "not the identity"));
}

TEST(Validate, HyperellipticNeedsEvenCount) {
    EXPECT_FALSE(validate(simple_cover(5)).empty());
    EXPECT_TRUE(validate(simple_cover(6)).empty());
}

TEST(Defaults, RhoAndRadii) {
    const BranchedCover t = fixtures::torus();
    EXPECT_DOUBLE_EQ(t.rho, 1.3);
    EXPECT_NEAR(t.branch_points[0].r_O, std::sqrt(0.08) / 3.0, 1e-15);
    const BranchedCover l = fixtures::lawson();
    EXPECT_DOUBLE_EQ(l.rho, 2.0);
    EXPECT_NEAR(l.branch_points[0].r_O, 1.0 / 3.0, 1e-12);
    BranchedCover inf = hyperelliptic_cover("i", {pt(0.3), pt(0.0, 0.3), pt(-0.3), ExtComplex::inf()});
    EXPECT_DOUBLE_EQ(inf.branch_points[3].r_O, 1.0 / (2.0 * inf.rho));
    EXPECT_EQ(genus(inf), 1);
}
