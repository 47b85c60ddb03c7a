#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "covering.hpp"

namespace ramiperiod {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    friend Vec3 operator*(double s, const Vec3& v) { return v * s; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const { return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x}; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const { return *this * (1.0 / norm()); }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline constexpr Vec3 north_pole{0.0, 0.0, 1.0};

/// Stereographic projection from the north pole: S^2 -> C-hat, north pole -> infinity.
inline ExtComplex stereographic(const Vec3& p) {
    const double denom = 1.0 - p.z;
    if (denom <= 0.0) return ExtComplex::inf();
    return ExtComplex::finite({p.x / denom, p.y / denom});
}

inline Vec3 inverse_stereographic(const ExtComplex& w) {
    if (w.infinite) return north_pole;
    const double n2 = std::norm(w.z);
    const double s = 1.0 / (n2 + 1.0);
    return {2.0 * w.z.real() * s, 2.0 * w.z.imag() * s, (n2 - 1.0) * s};
}

/// Euclidean angle at `a` in the planar triangle (a, b, c).
inline double corner_angle(Complex a, Complex b, Complex c) {
    const Complex u = b - a, v = c - a;
    return std::abs(std::atan2(std::imag(std::conj(u) * v), std::real(std::conj(u) * v)));
}

inline double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = b - a, v = c - a;
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

/// cot of the angle at `a` in the planar triangle (a, b, c), signed area free.
inline double corner_cot(Complex a, Complex b, Complex c) {
    const Complex u = b - a, v = c - a;
    const double cr = std::abs(std::imag(std::conj(u) * v));
    return std::real(std::conj(u) * v) / cr;
}

inline double corner_cot(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = b - a, v = c - a;
    return u.dot(v) / u.cross(v).norm();
}

inline double signed_area(Complex a, Complex b, Complex c) {
    return 0.5 * std::imag(std::conj(b - a) * (c - a));
}

// ---------------------------------------------------------------------------
// orient3d: sign of det[b-a, c-a, d-a]. Positive when d lies on the side of
// plane (a,b,c) that the normal (b-a)x(c-a) points to. Filtered floating
// point with an exact rational fallback.

namespace detail {

inline int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    using Q = boost::multiprecision::cpp_rational;
    auto q = [](double v) { return Q(v); };
    const Q bx = q(b.x) - q(a.x), by = q(b.y) - q(a.y), bz = q(b.z) - q(a.z);
    const Q cx = q(c.x) - q(a.x), cy = q(c.y) - q(a.y), cz = q(c.z) - q(a.z);
    const Q dx = q(d.x) - q(a.x), dy = q(d.y) - q(a.y), dz = q(d.z) - q(a.z);
    const Q det = bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) + bz * (cx * dy - cy * dx);
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

}  // namespace detail

inline int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const double bx = b.x - a.x, by = b.y - a.y, bz = b.z - a.z;
    const double cx = c.x - a.x, cy = c.y - a.y, cz = c.z - a.z;
    const double dx = d.x - a.x, dy = d.y - a.y, dz = d.z - a.z;
    const double m1 = cy * dz - cz * dy, m2 = cx * dz - cz * dx, m3 = cx * dy - cy * dx;
    const double det = bx * m1 - by * m2 + bz * m3;
    const double perm = std::abs(bx) * (std::abs(cy * dz) + std::abs(cz * dy)) +
                        std::abs(by) * (std::abs(cx * dz) + std::abs(cz * dx)) +
                        std::abs(bz) * (std::abs(cx * dy) + std::abs(cy * dx));
    // Shewchuk's o3derrboundA with a safety factor for the unrounded differences.
    constexpr double eps = std::numeric_limits<double>::epsilon() * 0.5;
    const double bound = (16.0 * eps) * perm;
    if (det > bound) return 1;
    if (det < -bound) return -1;
    return detail::orient3d_exact(a, b, c, d);
}

}  // namespace ramiperiod
