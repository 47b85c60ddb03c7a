#pragma once

// Experiment driver: curve files, convergence sweeps over the four mesh
// schemes, slope fits, CSV and SVG output.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "covering.hpp"
#include "error.hpp"
#include "homology.hpp"
#include "meshgen.hpp"
#include "periods.hpp"
#include "weights.hpp"

namespace ramiperiod {

// ---------------------------------------------------------------------------
// Curve files

inline BranchedCover parse_curve(const nlohmann::json& j) {
    auto bad = [](const std::string& what) { fail(ErrorKind::validation, "curve file: " + what); };
    if (!j.is_object()) bad("top level must be an object");
    for (const char* key : {"name", "degree", "branch_points", "monodromy"})
        if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
    BranchedCover c;
    if (!j["name"].is_string()) bad("'name' must be a string");
    c.name = j["name"].get<std::string>();
    if (!j["degree"].is_number_integer()) bad("'degree' must be an integer");
    c.degree = j["degree"].get<int>();
    const auto& bp = j["branch_points"];
    const auto& mono = j["monodromy"];
    if (!bp.is_array() || !mono.is_array()) bad("'branch_points' and 'monodromy' must be arrays");
    if (bp.size() != mono.size()) bad("one monodromy permutation per branch point is required");
    std::vector<ExtComplex> pos;
    for (std::size_t i = 0; i < bp.size(); ++i) {
        const auto& p = bp[i];
        if (p.is_string() && p.get<std::string>() == "inf") {
            pos.push_back(ExtComplex::inf());
        } else if (p.is_object() && p.contains("re") && p.contains("im") && p["re"].is_number() && p["im"].is_number()) {
            pos.push_back(ExtComplex::finite({p["re"].get<double>(), p["im"].get<double>()}));
        } else {
            bad("branch point " + std::to_string(i) + " must be {\"re\",\"im\"} or \"inf\"");
        }
        std::vector<int> img;
        if (!mono[i].is_array()) bad("monodromy " + std::to_string(i) + " must be an array");
        for (const auto& v : mono[i]) {
            if (!v.is_number_integer()) bad("monodromy " + std::to_string(i) + " must hold integers");
            img.push_back(v.get<int>());
        }
        c.branch_points.push_back({pos.back(), Permutation(std::move(img)), 0.0});
    }
    if (j.contains("rho") && !j["rho"].is_null()) {
        if (!j["rho"].is_number()) bad("'rho' must be a number");
        c.rho = j["rho"].get<double>();
    } else {
        c.rho = default_rho(pos);
    }
    assign_default_radii(c);
    if (j.contains("reference_pi") && !j["reference_pi"].is_null()) {
        std::vector<std::vector<Complex>> rows;
        for (const auto& row : j["reference_pi"]) {
            std::vector<Complex> r;
            for (const auto& x : row) {
                if (!x.is_object() || !x.contains("re") || !x.contains("im")) bad("reference_pi entries must be {\"re\",\"im\"}");
                r.emplace_back(x["re"].get<double>(), x["im"].get<double>());
            }
            rows.push_back(std::move(r));
        }
        c.reference_pi = std::move(rows);
    }
    require_valid(c);
    return c;
}

inline BranchedCover load_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot read curve file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::io, "malformed JSON in " + path + ": " + e.what());
    }
    return parse_curve(j);
}

inline nlohmann::json curve_json(const BranchedCover& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["degree"] = c.degree;
    j["rho"] = c.rho;
    j["branch_points"] = nlohmann::json::array();
    j["monodromy"] = nlohmann::json::array();
    for (const auto& b : c.branch_points) {
        if (b.position.infinite)
            j["branch_points"].push_back("inf");
        else
            j["branch_points"].push_back({{"re", b.position.z.real()}, {"im", b.position.z.imag()}});
        j["monodromy"].push_back(b.monodromy.image());
    }
    if (c.reference_pi) j["reference_pi"] = matrix_json(to_matrix(*c.reference_pi));
    return j;
}

// ---------------------------------------------------------------------------
// Plans and rows

enum class Scheme { clustering_random, clustering_fibonacci, homogeneous_random, homogeneous_fibonacci };

inline const std::vector<Scheme>& all_schemes() {
    static const std::vector<Scheme> s{Scheme::clustering_random, Scheme::clustering_fibonacci, Scheme::homogeneous_random,
                                       Scheme::homogeneous_fibonacci};
    return s;
}

inline const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::clustering_random: return "clustering-random";
    case Scheme::clustering_fibonacci: return "clustering-fibonacci";
    case Scheme::homogeneous_random: return "homogeneous-random";
    case Scheme::homogeneous_fibonacci: return "homogeneous-fibonacci";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    for (Scheme x : all_schemes())
        if (s == to_string(x)) return x;
    fail(ErrorKind::validation, "unknown scheme '" + s + "'");
}

inline bool is_random(Scheme s) { return s == Scheme::clustering_random || s == Scheme::homogeneous_random; }
inline bool is_adapted(Scheme s) { return s == Scheme::clustering_random || s == Scheme::clustering_fibonacci; }

struct ExperimentPlan {
    std::string curve_path;
    std::vector<Scheme> schemes = all_schemes();
    std::vector<int> sizes{250, 500, 1000, 2000, 4000, 8000};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    WeightMode weights = WeightMode::chart;
    std::string csv_path, svg_path, json_dir;
    int workers = 0;             // 0: hardware concurrency
    bool record_timing = true;   // off: wall_time_s = 0, byte-deterministic output
};

inline void validate_plan(const ExperimentPlan& p) {
    if (p.schemes.empty()) fail(ErrorKind::validation, "plan needs at least one scheme");
    if (p.sizes.size() < 3) fail(ErrorKind::validation, "plan needs at least 3 sizes for slope fitting");
    for (std::size_t i = 0; i < p.sizes.size(); ++i) {
        if (p.sizes[i] < 4) fail(ErrorKind::validation, "sizes must be at least 4");
        if (i && p.sizes[i] <= p.sizes[i - 1]) fail(ErrorKind::validation, "sizes must be strictly increasing");
    }
    for (Scheme s : p.schemes)
        if (is_random(s) && p.seeds.empty()) fail(ErrorKind::validation, "random schemes need at least one seed");
}

struct ConvergenceRow {
    Scheme scheme = Scheme::clustering_fibonacci;
    std::uint64_t seed = 0;
    int n_base = 0;
    double h = 0.0;
    double min_angle = 0.0;
    double err_fro = 0.0;
    std::optional<double> err_modular;  // genus 1 only
    double symmetry_defect = 0.0;
    double wall_time_s = 0.0;
    std::optional<std::string> error;   // tag of the failing stage
    std::optional<PeriodResult> result;

    bool ok() const { return !error.has_value(); }
    /// The error the slope is fitted to: modular for genus 1, Frobenius otherwise.
    double fit_error() const { return err_modular.value_or(err_fro); }
};

struct SchemeFit {
    Scheme scheme;
    double slope = NAN;
    std::string error;  // non-empty when the fit failed
    std::vector<std::pair<double, double>> points;  // (h, err) medians per size
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::vector<SchemeFit> fits;
};

// ---------------------------------------------------------------------------
// Single runs

/// Error of a period matrix against a reference. Genus 1: the reference is
/// moved into the computed basis (Frobenius) and both are reduced (modular).
/// Higher genus: best simultaneous signed permutation of the basis.
inline void score(ConvergenceRow& row, const PeriodResult& r, const CMatrix& ref) {
    if (r.pi.rows() != ref.rows()) fail(ErrorKind::validation, "reference_pi has the wrong size for this curve");
    if (r.pi.rows() == 1) {
        row.err_fro = std::abs(r.pi(0, 0) - align_genus1(ref(0, 0), r.pi(0, 0)));
        row.err_modular = compare(r.pi, ref, CompareMode::modular_g1);
    } else {
        row.err_fro = compare(r.pi, ref, CompareMode::signed_permutation);
    }
}

inline ConvergenceRow run_cell(const BranchedCover& cover, Scheme scheme, int n, std::uint64_t seed, WeightMode wm,
                               bool timing, const Config& cfg = default_config()) {
    ConvergenceRow row;
    row.scheme = scheme;
    row.seed = seed;
    row.n_base = n;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (!cover.reference_pi) fail(ErrorKind::validation, "curve has no reference_pi");
        MeshOptions o;
        o.sampler = is_random(scheme) ? Sampler::random : Sampler::fibonacci;
        o.n = n;
        o.seed = seed;
        o.adapt = is_adapted(scheme);
        const CoverMesh m = generate_mesh(cover, o);
        const WeightSet w = build_weight_set(m, wm, cfg);
        const CutSystem cuts = homology_basis(m);
        PeriodResult r = period_matrix(m, w, cuts, PeriodMethod::direct, cfg);
        row.h = r.stats.h;
        row.min_angle = r.stats.min_angle;
        row.symmetry_defect = r.symmetry_defect;
        score(row, r, to_matrix(*cover.reference_pi));
        row.result = std::move(r);
    } catch (const Error& e) {
        row.error = to_string(e.kind());
    } catch (const std::exception&) {
        row.error = "internal";
    }
    if (timing) row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

// ---------------------------------------------------------------------------
// Slopes

/// Least-squares slope of log err against log h.
inline double fit_slope(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 3) fail(ErrorKind::argument, "slope fit needs at least 3 points, got " + std::to_string(pts.size()));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [h, e] : pts) {
        if (!(h > 0.0) || !(e > 0.0)) fail(ErrorKind::argument, "slope fit needs positive h and err");
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 1e-12 * n * sxx)) fail(ErrorKind::argument, "slope fit needs at least two distinct h");
    return (n * sxy - sx * sy) / den;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// Per scheme: medians over seeds at each size, then the slope through them.
inline std::vector<SchemeFit> fit_schemes(const std::vector<ConvergenceRow>& rows, const std::vector<Scheme>& schemes) {
    std::vector<SchemeFit> out;
    for (Scheme s : schemes) {
        SchemeFit f{s, NAN, {}, {}};
        std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_size;
        for (const auto& r : rows)
            if (r.scheme == s && r.ok() && r.fit_error() > 0.0) {
                by_size[r.n_base].first.push_back(r.h);
                by_size[r.n_base].second.push_back(r.fit_error());
            }
        for (const auto& [n, hv] : by_size) f.points.emplace_back(median(hv.first), median(hv.second));
        try {
            f.slope = fit_slope(f.points);
        } catch (const Error& e) {
            f.error = e.what();
        }
        out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

inline int worker_count(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("RAMIPERIOD_WORKERS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min<int>(n, static_cast<int>(cap));
    }
    return std::max(1, n);
}

inline ConvergenceReport run_convergence(const ExperimentPlan& plan, const BranchedCover& cover,
                                         const Config& cfg = default_config()) {
    validate_plan(plan);
    if (!cover.reference_pi) fail(ErrorKind::validation, "curve '" + cover.name + "' has no reference_pi");
    struct Cell {
        Scheme s;
        int n;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (Scheme s : plan.schemes)
        for (int n : plan.sizes) {
            if (is_random(s))
                for (auto seed : plan.seeds) cells.push_back({s, n, seed});
            else
                cells.push_back({s, n, 0});
        }
    ConvergenceReport rep;
    rep.rows.resize(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();)
            rep.rows[i] = run_cell(cover, cells[i].s, cells[i].n, cells[i].seed, plan.weights, plan.record_timing, cfg);
    };
    const int nw = std::min<int>(worker_count(plan.workers), static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    for (int k = 1; k < nw; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    rep.fits = fit_schemes(rep.rows, plan.schemes);
    return rep;
}

inline ConvergenceReport run_convergence(const ExperimentPlan& plan) { return run_convergence(plan, load_curve(plan.curve_path)); }

// ---------------------------------------------------------------------------
// Output

inline std::string num(double x, int digits = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

inline const char* csv_header() { return "scheme,seed,n_base,h,min_angle,err_fro,err_modular,symmetry_defect,wall_time_s"; }

inline std::string csv_text(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const auto& r : rows) {
        os << to_string(r.scheme) << ',' << r.seed << ',' << r.n_base << ',';
        if (r.ok())
            os << num(r.h) << ',' << num(r.min_angle) << ',' << num(r.err_fro) << ',' << (r.err_modular ? num(*r.err_modular) : "")
               << ',' << num(r.symmetry_defect);
        else
            os << ",,error:" << *r.error << ",,";
        os << ',' << num(r.wall_time_s, 4) << '\n';
    }
    return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path);
    out << text;
    if (!out) fail(ErrorKind::io, "write failed for " + path);
}

inline void emit_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
    if (rows.empty()) fail(ErrorKind::argument, "no rows to write");
    write_text(path, csv_text(rows));
}

/// Four log-log panels (one per scheme, fixed layout), every successful run as
/// a dot, per-size medians as rings, the fitted line and its slope.
inline std::string svg_text(const std::vector<ConvergenceRow>& rows, const std::vector<SchemeFit>& fits) {
    constexpr double W = 900, H = 720, pw = 400, ph = 300, ml = 60, mt = 40, gapx = 440, gapy = 350;
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& r : rows)
        if (r.ok() && r.h > 0 && r.fit_error() > 0) {
            xlo = std::min(xlo, std::log10(r.h));
            xhi = std::max(xhi, std::log10(r.h));
            ylo = std::min(ylo, std::log10(r.fit_error()));
            yhi = std::max(yhi, std::log10(r.fit_error()));
        }
    if (!(xlo < INFINITY)) xlo = -2, xhi = 0, ylo = -4, yhi = 0;
    xlo = std::floor(xlo * 10) / 10 - 0.1, xhi = std::ceil(xhi * 10) / 10 + 0.1;
    ylo = std::floor(ylo) , yhi = std::ceil(yhi);
    if (yhi - ylo < 1) yhi = ylo + 1;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const auto& schemes = all_schemes();
    for (std::size_t k = 0; k < schemes.size(); ++k) {
        const Scheme s = schemes[k];
        const double ox = ml + gapx * static_cast<double>(k % 2), oy = mt + gapy * static_cast<double>(k / 2);
        auto X = [&](double lh) { return ox + (lh - xlo) / (xhi - xlo) * pw; };
        auto Y = [&](double le) { return oy + ph - (le - ylo) / (yhi - ylo) * ph; };
        os << "<g>\n<text x=\"" << num(ox, 6) << "\" y=\"" << num(oy - 8, 6) << "\" font-weight=\"bold\">" << to_string(s) << "</text>\n";
        os << "<rect x=\"" << num(ox, 6) << "\" y=\"" << num(oy, 6) << "\" width=\"" << pw << "\" height=\"" << ph
           << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double e = ylo; e <= yhi + 1e-9; e += 1)
            os << "<text x=\"" << num(ox - 6, 6) << "\" y=\"" << num(Y(e) + 4, 6) << "\" text-anchor=\"end\">1e" << num(e, 3) << "</text>\n";
        os << "<text x=\"" << num(ox, 6) << "\" y=\"" << num(oy + ph + 16, 6) << "\">h = " << num(std::pow(10, xlo), 3) << "</text>\n";
        os << "<text x=\"" << num(ox + pw, 6) << "\" y=\"" << num(oy + ph + 16, 6) << "\" text-anchor=\"end\">h = " << num(std::pow(10, xhi), 3)
           << "</text>\n";
        bool any = false;
        for (const auto& r : rows)
            if (r.scheme == s && r.ok() && r.fit_error() > 0) {
                any = true;
                os << "<circle cx=\"" << num(X(std::log10(r.h)), 6) << "\" cy=\"" << num(Y(std::log10(r.fit_error())), 6)
                   << "\" r=\"2.5\" fill=\"#888\"/>\n";
            }
        const auto fit = std::find_if(fits.begin(), fits.end(), [&](const SchemeFit& f) { return f.scheme == s; });
        if (fit != fits.end()) {
            for (const auto& [h, e] : fit->points)
                os << "<circle cx=\"" << num(X(std::log10(h)), 6) << "\" cy=\"" << num(Y(std::log10(e)), 6)
                   << "\" r=\"4\" fill=\"none\" stroke=\"#c00\"/>\n";
            if (fit->error.empty() && fit->points.size() >= 2) {
                // Line through the centroid of the medians.
                double cx = 0, cy = 0;
                for (const auto& [h, e] : fit->points) cx += std::log10(h), cy += std::log10(e);
                cx /= static_cast<double>(fit->points.size());
                cy /= static_cast<double>(fit->points.size());
                const double a = fit->points.front().first, b = fit->points.back().first;
                const double x0 = std::log10(std::min(a, b)), x1 = std::log10(std::max(a, b));
                os << "<line x1=\"" << num(X(x0), 6) << "\" y1=\"" << num(Y(cy + fit->slope * (x0 - cx)), 6) << "\" x2=\"" << num(X(x1), 6)
                   << "\" y2=\"" << num(Y(cy + fit->slope * (x1 - cx)), 6) << "\" stroke=\"#c00\"/>\n";
                os << "<text x=\"" << num(ox + 8, 6) << "\" y=\"" << num(oy + 16, 6) << "\">slope " << num(fit->slope, 3) << "</text>\n";
            } else if (!fit->error.empty()) {
                os << "<text x=\"" << num(ox + 8, 6) << "\" y=\"" << num(oy + 16, 6) << "\">no fit</text>\n";
            }
        }
        if (!any) os << "<text x=\"" << num(ox + pw / 2, 6) << "\" y=\"" << num(oy + ph / 2, 6) << "\" text-anchor=\"middle\">no data</text>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void emit_svg(const std::vector<ConvergenceRow>& rows, const std::vector<SchemeFit>& fits, const std::string& path) {
    if (rows.empty()) fail(ErrorKind::argument, "no rows to plot");
    write_text(path, svg_text(rows, fits));
}

}  // namespace ramiperiod
