// Command line front end: mesh generation and checks, period matrices,
// convergence sweeps. Exit codes: 0 ok, 2 bad input, 3 numeric, 4 I/O.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include <ramiperiod/ramiperiod.hpp>

using namespace ramiperiod;

namespace {

bool parse_on_off(const std::string& s) {
    if (s == "on") return true;
    if (s == "off") return false;
    fail(ErrorKind::validation, "expected on|off, got '" + s + "'");
}

WeightMode parse_weights(const std::string& s) {
    if (s == "chart") return WeightMode::chart;
    if (s == "spherical") return WeightMode::spherical;
    fail(ErrorKind::validation, "unknown weight mode '" + s + "'");
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

int mesh_gen(const std::string& curve, const std::string& sampler, int n, std::uint64_t seed, const std::string& adapt,
             std::optional<double> h_target, const std::string& out) {
    const BranchedCover c = load_curve(curve);
    MeshOptions o;
    if (sampler == "fibonacci")
        o.sampler = Sampler::fibonacci;
    else if (sampler == "random")
        o.sampler = Sampler::random;
    else
        fail(ErrorKind::validation, "unknown sampler '" + sampler + "'");
    o.n = n;
    o.seed = seed;
    o.adapt = parse_on_off(adapt);
    o.h_target = h_target;
    const CoverMesh m = generate_mesh(c, o);
    save_rpm(out, m);
    std::printf("%s: %d vertices, %d faces\n", out.c_str(), m.n_vertices(), m.n_faces());
    return 0;
}

int mesh_check(const std::string& path) {
    const CoverMesh m = load_rpm(path);
    const MeshStats s = mesh_stats(m);
    std::printf("vertices %d  faces %d  edges %d  euler %ld\n", s.n_vertices, s.n_faces, s.n_edges, s.euler);
    std::printf("faces inner %d  boundary %d  outer %d\n", s.n_inner, s.n_boundary, s.n_outer);
    std::printf("h %.6g  h_chart %.6g\n", s.h, s.h_chart);
    std::printf("(A) min angle       %.4f deg\n", deg(s.min_angle));
    std::printf("(D) max opp. sum    %.4f deg %s\n", deg(s.max_opposite_sum), s.max_opposite_sum <= std::numbers::pi + 1e-9 ? "(Delaunay)" : "(not Delaunay)");
    std::printf("(U) local density   %d\n", s.max_local_density);
    std::printf("boundary edges      max %.6g %s\n", s.max_boundary_edge, s.boundary_edges_ok ? "ok" : "too long");
    return 0;
}

void dump_functions(const std::string& dir, const HarmonicSolver& S, const ConjugateProbe& probe) {
    std::filesystem::create_directories(dir);
    for (int l = 0; l < probe.g; ++l) {
        const HolomorphicIntegral phi = holomorphic_integral(S, probe, l);
        std::ofstream u(dir + "/phi" + std::to_string(l + 1) + "_u.txt"), v(dir + "/phi" + std::to_string(l + 1) + "_v.txt");
        if (!u || !v) fail(ErrorKind::io, "cannot write into " + dir);
        u << "# vertex u0\n";
        for (std::size_t i = 0; i < phi.u.base.size(); ++i) u << i << ' ' << num(phi.u.base[i], 17) << '\n';
        v << "# face v0\n";
        for (std::size_t i = 0; i < phi.v.values.size(); ++i) v << i << ' ' << num(phi.v.values[i], 17) << '\n';
    }
}

int periods_compute(const std::string& mesh, const std::string& method, const std::string& weights, const std::string& curve,
                    const std::string& out, const std::string& dump) {
    if (method != "direct" && method != "energy" && method != "both") fail(ErrorKind::validation, "unknown method '" + method + "'");
    const CoverMesh m = load_rpm(mesh);
    const WeightSet w = build_weight_set(m, parse_weights(weights));
    const CutSystem cuts = homology_basis(m);
    std::optional<BranchedCover> c;
    if (!curve.empty()) c = load_curve(curve);
    const std::string name = c ? c->name : std::filesystem::path(mesh).stem().string();

    auto one = [&](PeriodMethod pm) {
        const PeriodResult r = period_matrix(m, w, cuts, pm);
        std::optional<double> err;
        if (c && c->reference_pi) {
            ConvergenceRow row;
            score(row, r, to_matrix(*c->reference_pi));
            err = row.fit_error();
        }
        return result_json(r, name, err);
    };
    nlohmann::json j;
    if (method == "both")
        j = nlohmann::json::array({one(PeriodMethod::direct), one(PeriodMethod::energy)});
    else
        j = one(method == "direct" ? PeriodMethod::direct : PeriodMethod::energy);
    write_json(out, j);
    if (!dump.empty()) {
        const HarmonicSolver S(m, w, cuts);
        dump_functions(dump, S, conjugate_probe(S));
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int convergence_run(ExperimentPlan plan) {
    const BranchedCover c = load_curve(plan.curve_path);
    const ConvergenceReport rep = run_convergence(plan, c);
    emit_csv(rep.rows, plan.csv_path);
    if (!plan.svg_path.empty()) emit_svg(rep.rows, rep.fits, plan.svg_path);
    if (!plan.json_dir.empty()) {
        std::filesystem::create_directories(plan.json_dir);
        for (const auto& r : rep.rows)
            if (r.ok())
                write_json(plan.json_dir + "/" + to_string(r.scheme) + "_n" + std::to_string(r.n_base) + "_s" + std::to_string(r.seed) + ".json",
                           result_json(*r.result, c.name, r.fit_error()));
    }
    int failed = 0;
    for (const auto& r : rep.rows) failed += !r.ok();
    std::printf("%zu runs, %d failed\n", rep.rows.size(), failed);
    int code = 0;
    for (const auto& f : rep.fits) {
        if (f.error.empty()) {
            std::printf("%-22s slope %.3f\n", to_string(f.scheme), f.slope);
        } else {
            std::printf("%-22s no fit: %s\n", to_string(f.scheme), f.error.c_str());
            code = exit_code(ErrorKind::numeric);
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete period matrices of branched coverings"};
    app.require_subcommand(1);

    auto* mesh = app.add_subcommand("mesh", "generate or inspect cover meshes");
    mesh->require_subcommand(1);
    std::string curve, sampler = "fibonacci", adapt = "on", out, mesh_path;
    int n = 1000;
    std::uint64_t seed = 0;
    std::optional<double> h_target;
    auto* gen = mesh->add_subcommand("gen", "triangulate a curve file into a .rpm mesh");
    gen->add_option("--curve", curve, "curve JSON")->required();
    gen->add_option("--sampler", sampler, "fibonacci|random");
    gen->add_option("--n", n, "base vertex count")->required();
    gen->add_option("--seed", seed, "seed for the random sampler");
    gen->add_option("--adapt", adapt, "refine near branch points: on|off");
    gen->add_option("--h-target", h_target, "adaptation target length");
    gen->add_option("--out", out, "output .rpm")->required();
    auto* check = mesh->add_subcommand("check", "print mesh statistics");
    check->add_option("--mesh", mesh_path, ".rpm file")->required();

    auto* periods = app.add_subcommand("periods", "period matrices");
    periods->require_subcommand(1);
    std::string method = "direct", weights = "chart", dump;
    auto* compute = periods->add_subcommand("compute", "period matrix of a mesh");
    compute->add_option("--mesh", mesh_path, ".rpm file")->required();
    compute->add_option("--method", method, "direct|energy|both");
    compute->add_option("--weights", weights, "chart|spherical");
    compute->add_option("--curve", curve, "curve JSON (name and reference for the error)");
    compute->add_option("--out", out, "result JSON")->required();
    compute->add_option("--dump", dump, "directory for u0/v text tables of the holomorphic integrals");

    auto* conv = app.add_subcommand("convergence", "convergence sweeps");
    conv->require_subcommand(1);
    ExperimentPlan plan;
    std::vector<std::string> schemes;
    bool no_timing = false;
    auto* run = conv->add_subcommand("run", "sweep schemes and sizes, fit slopes");
    run->add_option("--curve", plan.curve_path, "curve JSON with reference_pi")->required();
    run->add_option("--schemes", schemes, "subset of clustering-random clustering-fibonacci homogeneous-random homogeneous-fibonacci");
    run->add_option("--sizes", plan.sizes, "base vertex counts, increasing");
    run->add_option("--seeds", plan.seeds, "seeds for the random schemes");
    run->add_option("--weights", weights, "chart|spherical");
    run->add_option("--workers", plan.workers, "worker threads (RAMIPERIOD_WORKERS caps this)");
    run->add_option("--json-dir", plan.json_dir, "per-run result JSON files");
    run->add_flag("--no-timing", no_timing, "write wall_time_s = 0 (byte-reproducible CSV)");
    run->add_option("--csv", plan.csv_path, "output CSV")->required();
    run->add_option("--svg", plan.svg_path, "output SVG");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorKind::validation);
    }

    try {
        if (*gen) return mesh_gen(curve, sampler, n, seed, adapt, h_target, out);
        if (*check) return mesh_check(mesh_path);
        if (*compute) return periods_compute(mesh_path, method, weights, curve, out, dump);
        if (*run) {
            if (!schemes.empty()) {
                plan.schemes.clear();
                for (const auto& s : schemes) plan.schemes.push_back(parse_scheme(s));
            }
            plan.weights = parse_weights(weights);
            plan.record_timing = !no_timing;
            return convergence_run(plan);
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::numeric);
    }
    return 0;
}
