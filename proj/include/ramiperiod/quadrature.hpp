#pragma once

// 1D adaptive quadrature on top of Boost's Gauss-Kronrod rule, with the
// achieved error checked against the requested tolerance.

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"

namespace ramiperiod {

template <class F>
double integrate(F&& f, double a, double b, double rel_tol, unsigned max_depth = 15) {
    double err = 0.0, l1 = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol, &err, &l1);
    if (!std::isfinite(val)) fail(ErrorKind::numeric, "quadrature produced a non-finite value");
    // Boost reports the error relative to the L1 norm; allow a little slack
    // for cancellation in nearly vanishing integrals.
    const double scale = std::max(std::abs(val), l1);
    if (err > 100.0 * rel_tol * scale && err > 1e-14)
        fail(ErrorKind::numeric, "quadrature did not converge: achieved error " + std::to_string(err) + " relative to " +
                                     std::to_string(scale));
    return val;
}

}  // namespace ramiperiod
