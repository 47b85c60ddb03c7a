// Period matrix of a curve file on one adapted Fibonacci mesh.
//   torus_periods [curve.json] [n]

#include <cstdlib>
#include <iostream>

#include <ramiperiod/ramiperiod.hpp>

using namespace ramiperiod;

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : RAMIPERIOD_DATA_DIR "/curves/torus.json";
    const int n = argc > 2 ? std::atoi(argv[2]) : 2000;
    try {
        const BranchedCover curve = load_curve(path);
        MeshOptions opt;
        opt.n = n;
        const CoverMesh mesh = generate_mesh(curve, opt);
        const WeightSet w = build_weight_set(mesh, WeightMode::chart);
        const CutSystem cuts = homology_basis(mesh);
        const PeriodResult r = period_matrix(mesh, w, cuts, PeriodMethod::direct);

        std::cout << curve.name << ": genus " << cuts.genus << ", " << mesh.n_vertices() << " vertices, h = " << r.stats.h << "\n";
        std::cout << "Pi =\n" << r.pi << "\n";
        if (cuts.genus == 1) std::cout << "reduced: " << modular_reduce_genus1(r.pi(0, 0)).tau << "\n";
        if (curve.reference_pi) {
            ConvergenceRow row;
            score(row, r, to_matrix(*curve.reference_pi));
            std::cout << "error vs reference: " << row.fit_error() << "\n";
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code(e.kind());
    }
    return 0;
}
