#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <ramiperiod/covering.hpp>

namespace fixtures {

using ramiperiod::Complex;
using ramiperiod::ExtComplex;

inline ExtComplex pt(double re, double im = 0.0) { return ExtComplex::finite({re, im}); }

// Genus-1 test curve: four simple branch points, listed counterclockwise by argument.
inline ramiperiod::BranchedCover torus(std::optional<double> rho = std::nullopt) {
    return ramiperiod::hyperelliptic_cover("torus", {pt(0.5, 0.4), pt(-0.3, 0.2), pt(-0.1), pt(0.1, -0.2)}, rho);
}

// mu^2 = lambda^6 - 1: branch points at the sixth roots of unity.
inline ramiperiod::BranchedCover lawson() {
    std::vector<ExtComplex> roots;
    for (int k = 0; k < 6; ++k) roots.push_back(ExtComplex::finite(std::polar(1.0, k * std::numbers::pi / 3.0)));
    return ramiperiod::hyperelliptic_cover("lawson", roots);
}

// Period ratio of the torus curve (up to SL(2,Z); the mesh basis lands on tau - 1),
// from an independent high-precision quadrature of the elliptic integrals.
inline const Complex torus_tau_precise{0.83610037693, 0.95503185369};

inline std::vector<std::vector<Complex>> lawson_pi() {
    const double s = 1.0 / std::sqrt(3.0);
    return {{Complex(0, 2 * s), Complex(0, -s)}, {Complex(0, -s), Complex(0, 2 * s)}};
}

}  // namespace fixtures
