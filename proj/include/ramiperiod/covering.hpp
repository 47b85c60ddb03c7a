#pragma once

// Branched coverings of the Riemann sphere: branch points with monodromy,
// Riemann-Hurwitz genus, local charts about branch points, and validation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace ramiperiod {

using Complex = std::complex<double>;

/// A point of the extended complex plane.
struct ExtComplex {
    Complex z{0.0, 0.0};
    bool infinite = false;

    static ExtComplex finite(Complex w) { return {w, false}; }
    static ExtComplex inf() { return {Complex{}, true}; }

    double abs() const { return infinite ? INFINITY : std::abs(z); }
    /// Image under w -> 1/w (0 <-> infinity).
    ExtComplex inverse() const {
        if (infinite) return finite({0.0, 0.0});
        if (z == Complex{}) return inf();
        return finite(1.0 / z);
    }
    friend bool operator==(const ExtComplex& a, const ExtComplex& b) {
        return a.infinite == b.infinite && (a.infinite || a.z == b.z);
    }
};

// ---------------------------------------------------------------------------
// Permutations in one-line notation on {0..d-1}.

class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> image) : map_(std::move(image)) {}

    static Permutation identity(int d) {
        std::vector<int> m(static_cast<std::size_t>(d));
        std::iota(m.begin(), m.end(), 0);
        return Permutation(std::move(m));
    }
    /// The transposition (a b) on d letters.
    static Permutation transposition(int d, int a, int b) {
        Permutation p = identity(d);
        std::swap(p.map_[static_cast<std::size_t>(a)], p.map_[static_cast<std::size_t>(b)]);
        return p;
    }

    int size() const { return static_cast<int>(map_.size()); }
    int operator()(int i) const { return map_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& image() const { return map_; }

    bool valid() const {
        std::vector<char> seen(map_.size(), 0);
        for (int v : map_) {
            if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)]) return false;
            seen[static_cast<std::size_t>(v)] = 1;
        }
        return true;
    }
    bool is_identity() const {
        for (int i = 0; i < size(); ++i)
            if (map_[static_cast<std::size_t>(i)] != i) return false;
        return true;
    }
    Permutation inverse() const {
        std::vector<int> inv(map_.size());
        for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(map_[static_cast<std::size_t>(i)])] = i;
        return Permutation(std::move(inv));
    }
    /// (this * other)(i) = this(other(i)): apply `other` first.
    Permutation operator*(const Permutation& other) const {
        std::vector<int> out(map_.size());
        for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = (*this)(other(i));
        return Permutation(std::move(out));
    }
    /// Disjoint cycles, each starting at its smallest element, ordered by that element.
    std::vector<std::vector<int>> cycles() const {
        std::vector<std::vector<int>> out;
        std::vector<char> seen(map_.size(), 0);
        for (int i = 0; i < size(); ++i) {
            if (seen[static_cast<std::size_t>(i)]) continue;
            std::vector<int> cyc;
            for (int j = i; !seen[static_cast<std::size_t>(j)]; j = (*this)(j)) {
                seen[static_cast<std::size_t>(j)] = 1;
                cyc.push_back(j);
            }
            out.push_back(std::move(cyc));
        }
        return out;
    }
    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> map_;
};

// ---------------------------------------------------------------------------

struct BranchPoint {
    ExtComplex position;
    Permutation monodromy;  ///< sheet transition for a counterclockwise loop
    double r_O = 0.0;       ///< adaptation radius (in the 1/z chart when at infinity)

    /// Aperture factor 1/len for each cycle of the monodromy.
    std::vector<double> gammas() const {
        std::vector<double> g;
        for (const auto& c : monodromy.cycles()) g.push_back(1.0 / static_cast<double>(c.size()));
        return g;
    }
    /// Smallest aperture factor over the cycles (the one that governs adaptation).
    double gamma() const {
        const auto g = gammas();
        return g.empty() ? 1.0 : *std::min_element(g.begin(), g.end());
    }
};

struct BranchedCover {
    std::string name;
    int degree = 1;
    std::vector<BranchPoint> branch_points;
    double rho = 2.0;
    std::optional<std::vector<std::vector<Complex>>> reference_pi;
};

namespace detail {

inline double arg_2pi(Complex z) {
    double a = std::arg(z);
    return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

/// Indices of the finite branch points sorted counterclockwise by argument
/// about the base point at the origin.
inline std::vector<std::size_t> ccw_order(const BranchedCover& c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < c.branch_points.size(); ++i)
        if (!c.branch_points[i].position.infinite) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return arg_2pi(c.branch_points[a].position.z) < arg_2pi(c.branch_points[b].position.z);
    });
    return idx;
}

inline std::optional<std::size_t> infinite_branch(const BranchedCover& c) {
    for (std::size_t i = 0; i < c.branch_points.size(); ++i)
        if (c.branch_points[i].position.infinite) return i;
    return std::nullopt;
}

}  // namespace detail

/// Product of the monodromies along a large counterclockwise circle,
/// composed in counterclockwise order (first crossing applied first), times
/// the monodromy at infinity when present. Identity iff the surface closes up.
inline Permutation monodromy_product(const BranchedCover& c) {
    Permutation p = Permutation::identity(c.degree);
    for (std::size_t i : detail::ccw_order(c)) p = c.branch_points[i].monodromy * p;
    if (auto inf = detail::infinite_branch(c)) p = c.branch_points[*inf].monodromy * p;
    return p;
}

/// True iff the group generated by the monodromies acts transitively on sheets.
inline bool monodromy_transitive(const BranchedCover& c) {
    if (c.degree <= 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(c.degree), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (const auto& b : c.branch_points) {
            if (b.monodromy.size() != c.degree) continue;
            int t = b.monodromy(s);
            if (!seen[static_cast<std::size_t>(t)]) {
                seen[static_cast<std::size_t>(t)] = 1;
                stack.push_back(t);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char x) { return x != 0; });
}

/// Riemann-Hurwitz: 2 - 2g = 2d - sum over branch points and cycles of (len - 1).
inline int genus(const BranchedCover& c) {
    if (c.degree < 1) fail(ErrorKind::validation, "degree must be positive");
    for (const auto& b : c.branch_points)
        if (b.monodromy.size() != c.degree || !b.monodromy.valid())
            fail(ErrorKind::validation, "monodromy is not a permutation of the sheets");
    if (!monodromy_product(c).is_identity())
        fail(ErrorKind::validation, "product of monodromies in counterclockwise order is not the identity");
    if (!monodromy_transitive(c))
        fail(ErrorKind::validation, "monodromy group is not transitive: the covering is disconnected");
    int ramification = 0;
    for (const auto& b : c.branch_points)
        for (const auto& cyc : b.monodromy.cycles()) ramification += static_cast<int>(cyc.size()) - 1;
    const int two_minus_2g = 2 * c.degree - ramification;
    if ((2 - two_minus_2g) % 2 != 0) fail(ErrorKind::validation, "odd total ramification");
    return (2 - two_minus_2g) / 2;
}

// ---------------------------------------------------------------------------
// Defaults

/// Smallest value > 1 with 2 max|p| <= rho, rounded up to one decimal.
inline double default_rho(const std::vector<ExtComplex>& positions) {
    double m = 0.0;
    for (const auto& p : positions)
        if (!p.infinite) m = std::max(m, std::abs(p.z));
    double r = std::ceil(2.0 * m * 10.0 - 1e-9) / 10.0;
    if (r <= 1.0) r = 1.1;
    return r;
}

/// One third of the minimum pairwise distance between finite branch points,
/// capped by rho/4; 1/(2 rho) at infinity.
inline void assign_default_radii(BranchedCover& c) {
    double dmin = INFINITY;
    for (std::size_t i = 0; i < c.branch_points.size(); ++i)
        for (std::size_t j = i + 1; j < c.branch_points.size(); ++j) {
            const auto& a = c.branch_points[i].position;
            const auto& b = c.branch_points[j].position;
            if (a.infinite || b.infinite) continue;
            dmin = std::min(dmin, std::abs(a.z - b.z));
        }
    const double finite_r = std::min(dmin / 3.0, c.rho / 4.0);
    for (auto& b : c.branch_points) b.r_O = b.position.infinite ? 1.0 / (2.0 * c.rho) : finite_r;
}

// ---------------------------------------------------------------------------
// Charts about branch points

/// Polar coordinates about a branch point on one lift; phi is accumulated
/// continuously around the point, so it ranges over [0, 2 pi / gamma).
struct ChartPolar {
    double r = 0.0;
    double phi = 0.0;
};

/// g_O(r, phi) = r^gamma e^{i gamma phi}.
inline Complex chart_image(ChartPolar p, double gamma) {
    if (p.r == 0.0) return {0.0, 0.0};
    return std::polar(std::pow(p.r, gamma), gamma * p.phi);
}

/// Radius and principal angle in [0, 2 pi) of z about O. At O = infinity
/// the coordinates are those of 1/z about 0.
inline ChartPolar polar_about(const ExtComplex& z, const ExtComplex& O) {
    Complex w;
    if (O.infinite) {
        if (z.infinite) return {0.0, 0.0};
        if (z.z == Complex{}) fail(ErrorKind::domain, "origin is not in the chart about infinity");
        w = 1.0 / z.z;
    } else {
        if (z.infinite) fail(ErrorKind::domain, "infinity is not in a chart about a finite point");
        w = z.z - O.z;
    }
    return {std::abs(w), detail::arg_2pi(w)};
}

/// Chart image of a point on lift `turn` (0-based count of full turns past
/// the reference ray) of the disk about O. Rejects points outside the disk.
inline Complex chart_image(const ExtComplex& z, int turn, const BranchPoint& O, double gamma) {
    ChartPolar p = polar_about(z, O.position);
    if (!(p.r <= O.r_O)) fail(ErrorKind::domain, "point lies outside the chart disk of the branch point");
    if (turn < 0 || static_cast<double>(turn) >= 1.0 / gamma - 1e-12)
        fail(ErrorKind::domain, "turn index exceeds the aperture of the branch point");
    p.phi += 2.0 * std::numbers::pi * turn;
    return chart_image(p, gamma);
}

// ---------------------------------------------------------------------------
// Validation

/// Every violated invariant, one human-readable line each. Empty iff valid.
inline std::vector<std::string> validate(const BranchedCover& c) {
    std::vector<std::string> out;
    if (c.degree < 1) out.push_back("degree must be positive");
    if (!(c.rho > 1.0)) out.push_back("rho must exceed 1");
    bool perms_ok = true;
    int n_inf = 0;
    for (std::size_t i = 0; i < c.branch_points.size(); ++i) {
        const auto& b = c.branch_points[i];
        const std::string tag = "branch point " + std::to_string(i) + ": ";
        if (b.monodromy.size() != c.degree || !b.monodromy.valid()) {
            out.push_back(tag + "monodromy is not a permutation of " + std::to_string(c.degree) + " sheets");
            perms_ok = false;
            continue;
        }
        if (b.monodromy.is_identity()) out.push_back(tag + "identity monodromy (not a branch point)");
        if (b.position.infinite) {
            ++n_inf;
        } else {
            if (std::abs(b.position.z) > c.rho / 2.0 * (1.0 + 1e-12)) out.push_back(tag + "branch point outside B_{rho/2}");
            if (b.position.z == Complex{}) out.push_back(tag + "branch point coincides with the base point at the origin");
            if (std::abs(b.position.z) + b.r_O > c.rho) out.push_back(tag + "adaptation disk not contained in B_rho");
        }
        if (!(b.r_O > 0.0)) out.push_back(tag + "adaptation radius r_O must be positive");
    }
    if (n_inf > 1) out.push_back("infinity listed more than once");
    for (std::size_t i = 0; i < c.branch_points.size(); ++i)
        for (std::size_t j = i + 1; j < c.branch_points.size(); ++j) {
            const auto& a = c.branch_points[i];
            const auto& b = c.branch_points[j];
            if (a.position.infinite || b.position.infinite) continue;
            const double d = std::abs(a.position.z - b.position.z);
            const std::string pair = std::to_string(i) + " and " + std::to_string(j);
            if (d == 0.0) {
                out.push_back("branch points " + pair + " coincide");
                continue;
            }
            if (d < a.r_O + b.r_O) out.push_back("adaptation disks of branch points " + pair + " overlap");
            // Cuts run radially outward; they must not overlap.
            const double cross = std::imag(std::conj(a.position.z) * b.position.z);
            const double dot = std::real(std::conj(a.position.z) * b.position.z);
            if (std::abs(cross) <= 1e-14 * std::abs(a.position.z) * std::abs(b.position.z) && dot > 0.0)
                out.push_back("branch points " + pair + " share an argument: their cuts overlap");
        }
    if (perms_ok && c.degree >= 1) {
        if (!monodromy_product(c).is_identity())
            out.push_back("product of monodromies in counterclockwise order is not the identity");
        else if (!monodromy_transitive(c))
            out.push_back("monodromy group is not transitive: the covering is disconnected");
        else if (genus(c) < 1)
            out.push_back("genus must be at least 1 for period computations");
    }
    return out;
}

inline void require_valid(const BranchedCover& c) {
    const auto report = validate(c);
    if (report.empty()) return;
    std::string msg = "invalid covering '" + c.name + "':";
    for (const auto& line : report) msg += "\n  " + line;
    fail(ErrorKind::validation, msg);
}

/// Convenience constructor for hyperelliptic covers: every monodromy is (0 1).
inline BranchedCover hyperelliptic_cover(std::string name, const std::vector<ExtComplex>& points,
                                         std::optional<double> rho = std::nullopt) {
    BranchedCover c;
    c.name = std::move(name);
    c.degree = 2;
    c.rho = rho.value_or(default_rho(points));
    for (const auto& p : points) c.branch_points.push_back({p, Permutation::transposition(2, 0, 1), 0.0});
    assign_default_radii(c);
    return c;
}

}  // namespace ramiperiod
