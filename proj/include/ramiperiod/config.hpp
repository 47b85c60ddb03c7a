#pragma once

#include <cstddef>

namespace ramiperiod {

enum class SolverKind { automatic, cg, direct };

/// All numerical tolerances in one place.
struct Config {
    // harmonic solves
    SolverKind solver = SolverKind::automatic;
    double cg_rel_tol = 1e-10;        // relative residual for preconditioned CG
    double cg_iter_factor = 50.0;     // iteration cap = factor * sqrt(n)
    // boundary-triangle quadrature
    double quadrature_tol = 1e-10;    // relative tolerance of the 1D weight integrals
    int quadrature_max_depth = 15;
    // period pipelines
    double cross_tol_rel = 1e-6;      // direct vs energy agreement, relative Frobenius
    double harmonic_check_rel = 1e-7; // conjugate construction refuses larger defects
    double zero_weight_eps = 1e-14;
};

inline const Config& default_config() {
    static const Config c{};
    return c;
}

}  // namespace ramiperiod
