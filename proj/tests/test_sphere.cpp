#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <ramiperiod/sphere.hpp>

using namespace ramiperiod;

namespace {

double min_pairwise_chord(const std::vector<Vec3>& p) {
    double best = INFINITY;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) best = std::min(best, (p[i] - p[j]).norm());
    return best;
}

}  // namespace

TEST(Fibonacci, SmallAndDeterministic) {
    const auto p4 = fibonacci_points(4);
    ASSERT_EQ(p4.size(), 4u);
    EXPECT_GT(min_pairwise_chord(p4), 0.0);
    for (const auto& p : p4) EXPECT_NEAR(p.norm(), 1.0, 1e-15);
    EXPECT_EQ(fibonacci_points(1000), fibonacci_points(1000));
    EXPECT_NEAR(fibonacci_points(10)[0].z, 0.9, 1e-15);
}

TEST(Fibonacci, SpacingScalesWithSqrtN) {
    const double d1000 = min_pairwise_chord(fibonacci_points(1000));
    const double c = 2.0 * min_pairwise_chord(fibonacci_points(4000));
    EXPECT_GE(d1000, 0.5 * c);
    EXPECT_LE(d1000, 2.0 * c);
}

TEST(Fibonacci, RejectsTinyN) {
    try {
        fibonacci_points(3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::argument);
    }
}

TEST(RandomPoints, SeededAndUniform) {
    EXPECT_EQ(random_points(100, 7), random_points(100, 7));
    EXPECT_NE(random_points(100, 7), random_points(100, 8));
    const auto p = random_points(10000, 1);
    Vec3 mean;
    for (const auto& q : p) mean = mean + q;
    mean = mean * (1.0 / p.size());
    EXPECT_LT(mean.norm(), 0.05);
    EXPECT_THROW(random_points(2, 1), Error);
}

TEST(Delaunay, Tetrahedron) {
    const std::vector<Vec3> p{Vec3{0, 0, 1}, Vec3{0.9428, 0, -1.0 / 3}.normalized(), Vec3{-0.4714, 0.8165, -1.0 / 3}.normalized(),
                              Vec3{-0.4714, -0.8165, -1.0 / 3}.normalized()};
    const auto t = spherical_delaunay(p);
    EXPECT_EQ(t.faces.size(), 4u);
    EXPECT_EQ(t.edge_count(), 6u);
    EXPECT_TRUE(empty_circumcap(t));
}

TEST(Delaunay, Octahedron) {
    const std::vector<Vec3> p{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const auto t = spherical_delaunay(p);
    EXPECT_EQ(t.faces.size(), 8u);
    EXPECT_EQ(t.euler_characteristic(), 2);
    EXPECT_TRUE(empty_circumcap(t));
}

TEST(Delaunay, FacesOrientedOutward) {
    const auto t = spherical_delaunay(fibonacci_points(200));
    for (const auto& f : t.faces) EXPECT_LT(orient3d(t.points[f[0]], t.points[f[1]], t.points[f[2]], Vec3{}), 0);
}

TEST(Delaunay, RandomEmptyCircumcap) {
    const auto t = spherical_delaunay(random_points(500, 3));
    EXPECT_EQ(t.euler_characteristic(), 2);
    EXPECT_EQ(t.faces.size(), 2u * 500 - 4);
    EXPECT_TRUE(empty_circumcap(t));
}

TEST(Delaunay, DegenerateInputs) {
    auto kind_of = [](std::vector<Vec3> p) {
        try {
            spherical_delaunay(std::move(p));
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    const std::string dup = kind_of({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, -1}, {1, 0, 0}});
    EXPECT_NE(dup.find("degeneracy"), std::string::npos);
    EXPECT_NE(dup.find("0 and 4"), std::string::npos);
    const double s = std::sqrt(0.5);
    const std::string planar = kind_of({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {s, s, 0}});
    EXPECT_NE(planar.find("coplanar"), std::string::npos);
}
