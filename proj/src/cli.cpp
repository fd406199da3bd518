#include "pforge/cli.hpp"

#include "pforge/error.hpp"
#include "pforge/mesh.hpp"
#include "pforge/periods.hpp"
#include "pforge/quadrature.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

namespace pforge {

using nlohmann::ordered_json;

namespace {

constexpr const char* schema = "period-forge/1";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ordered_json bracket_json(const Bracket& b) {
    return {{"lo", b.lo}, {"hi", b.hi}, {"f_lo", b.f_lo}, {"f_hi", b.f_hi}};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
    out << text;
    if (!out) throw Error(Errc::IoFailure, "write failed for " + path);
}

std::string csv_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_common(const RunConfig& cfg, bool need_k = true) {
    if (need_k && cfg.k < 1) throw UsageError("--k must be a positive integer");
    if (!(cfg.tol >= 1e-12 && cfg.tol <= 1e-4)) throw UsageError("--tol must lie in [1e-12, 1e-4]");
}

struct Moduli2 {
    int k;
    double a, b;
};

Moduli2 read_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read solution file " + path);
    ordered_json j;
    try {
        in >> j;
        return {j.at("k").get<int>(), j.at("a_star").get<double>(), j.at("b_star").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed solution file " + path + ": " + e.what());
    }
}

Moduli2 solve_or_read(const RunConfig& cfg) {
    if (!cfg.solution_path.empty()) return read_solution(cfg.solution_path);
    if (cfg.a && cfg.b) return {cfg.k, *cfg.a, *cfg.b};
    PeriodSolution s = solve_period_problem(cfg.k, cfg.tol, cfg.prescan);
    return {cfg.k, s.a_star, s.b_star};
}

} // namespace

int cmd_solve(const RunConfig& cfg) {
    check_common(cfg);
    PeriodSolution s = solve_period_problem(cfg.k, cfg.tol, cfg.prescan);
    Params p = normalize_b0(make_params(Family::CaseVIII, s.k, s.a_star, s.b_star));
    ordered_json roots = ordered_json::array();
    for (const PeriodRoot& r : s.all_roots)
        roots.push_back({{"a_star", r.a_star},
                         {"b_star", r.b_star},
                         {"vertical_residual", r.vert_residual},
                         {"horizontal_residual", r.horiz_residual},
                         {"alpha_bracket", bracket_json(r.alpha_bracket)},
                         {"b_bracket", bracket_json(r.b_bracket)}});
    ordered_json j = {
        {"schema", schema},
        {"command", "solve"},
        {"k", s.k},
        {"tol", cfg.tol},
        {"a_star", s.a_star},
        {"b_star", s.b_star},
        {"b0", {{"re", p.b0.real()}, {"im", p.b0.imag()}}},
        {"residuals", {{"vertical", s.vert_residual}, {"horizontal", s.horiz_residual}}},
        {"brackets", {{"alpha", bracket_json(s.brackets[0])}, {"b", bracket_json(s.brackets[1])}}},
        {"all_roots", roots},
        {"alpha_curve",
         {{"points", s.curve_points}, {"b_min", s.curve_b_min}, {"b_max", s.curve_b_max}, {"folds", s.curve_folds}}},
    };
    write_text(cfg.out_path, j.dump(2) + "\n");
    return ExitOk;
}

int cmd_scan(const RunConfig& cfg) {
    if (cfg.k < 1) throw UsageError("--k must be a positive integer");
    if (cfg.family == Family::CaseVIII) throw UsageError("scan applies to CaseI, CaseV and CaseVI");
    if (cfg.grid < 2) throw UsageError("--grid must be at least 2");
    ScanTable t = nonsolvability_scan(cfg.family, cfg.k, cfg.grid);
    std::string out = "a,b,obstruction\n";
    for (const ScanCell& c : t.cells)
        out += csv_double(c.a) + "," + csv_double(c.b) + "," + (c.ok ? csv_double(c.value) : std::string("nan")) + "\n";
    std::string sign = t.failed ? "failed" : t.constant_sign() ? (t.positive ? "positive" : "negative") : "mixed";
    out += "# min_abs=" + csv_double(t.min_abs) + " at a=" + csv_double(t.min_a) + " b=" + csv_double(t.min_b) +
           " sign=" + sign + " positive=" + std::to_string(t.positive) + " negative=" + std::to_string(t.negative) +
           " failed=" + std::to_string(t.failed) + "\n";
    write_text(cfg.out_path, out);
    if (t.failed) {
        for (const ScanCell& c : t.cells)
            if (!c.ok) std::cerr << "scan: node a=" << c.a << " b=" << c.b << " failed: " << c.error << "\n";
        return ExitSolver;
    }
    return ExitOk;
}

int cmd_mesh(const RunConfig& cfg) {
    check_common(cfg, cfg.solution_path.empty());
    if (cfg.resolution < 8) throw UsageError("--resolution must be at least 8");
    if (cfg.slabs < 1) throw UsageError("--slabs must be at least 1");
    if (cfg.format != OutFormat::Obj && cfg.format != OutFormat::Ply) throw UsageError("mesh --format is obj or ply");
    if (cfg.out_path.empty()) throw UsageError("mesh needs --out");
    Moduli2 m = solve_or_read(cfg);
    Params p = normalize_b0(make_params(Family::CaseVIII, m.k, m.a, m.b));
    Domain2 dom = triangulate_domain(m.a, m.b, cfg.resolution, cfg.end_cutoff);
    ImmerseOptions io;
    io.throw_on_loop = false;
    Piece piece = immerse(p, dom, io);
    ordered_json side = {{"schema", schema}, {"command", "mesh"}, {"k", m.k}, {"a", m.a}, {"b", m.b},
                         {"resolution", cfg.resolution}, {"slabs", cfg.slabs}, {"end_cutoff", cfg.end_cutoff}};
    side["loop_residual_max"] = piece.loop_residual_max;
    side["piece_diameter"] = piece.diameter;
    side["conformality_max"] = piece.conformality_max;
    side["branch_audit_max"] = piece.branch_audit_max;
    bool loop_ok = piece.loop_residual_max <= io.loop_tol * piece.diameter;

    int code = ExitOk;
    if (!loop_ok) {
        std::cerr << "mesh: loop residual " << piece.loop_residual_max << " exceeds " << io.loop_tol
                  << " x diameter\n";
        code = ExitMesh;
    }
    SymmetryGroup G = symmetry_group(m.k);
    Assembly as;
    try {
        as = assemble(piece, G, cfg.slabs);
    } catch (const Error& e) {
        std::cerr << "mesh: " << e.what() << "\n";
        side["error"] = e.what();
        write_text(cfg.out_path + ".json", side.dump(2) + "\n");
        return ExitMesh;
    }
    export_mesh(as.mesh, cfg.out_path, cfg.format == OutFormat::Obj ? MeshFormat::Obj : MeshFormat::Ply);
    EndHeights eh = end_heights(dom, piece.mesh);
    side["copies"] = G.copies.size() * cfg.slabs;
    side["vertices"] = as.mesh.pos.size();
    side["triangles"] = as.mesh.tris.size();
    side["seam_max"] = as.seam_max;
    side["x3_span"] = as.z_max - as.z_min;
    side["curvature_sum"] = curvature_integral(as.mesh);
    side["curvature_sum_piece"] = curvature_integral(piece.mesh);
    side["curvature_target_piece"] = total_curvature_target(m.k);
    side["end_heights"] = {{"extrapolated", eh.extrapolated}, {"ring_radii", eh.radii}, {"ring_means", eh.means},
                           {"ring_spreads", eh.spreads}};
    if (cfg.embed_check) {
        EmbeddednessReport rep = embeddedness_report(p, dom, piece, 10000, &as.mesh);
        side["min_face_distance"] = rep.min_face_distance;
        side["face_distance_search_radius"] = rep.search_radius;
        side["boundary_simple"] = rep.boundary_simple;
    } else {
        side["min_face_distance"] = nullptr;
    }
    write_text(cfg.out_path + ".json", side.dump(2) + "\n");
    return code;
}

int cmd_verify(const RunConfig& cfg) {
    if (cfg.solution_path.empty() && !(cfg.a && cfg.b))
        throw UsageError("verify needs --solution FILE or --k K --a A --b B");
    Moduli2 m = cfg.solution_path.empty() ? Moduli2{cfg.k, *cfg.a, *cfg.b} : read_solution(cfg.solution_path);
    if (m.k < 1) throw UsageError("--k must be a positive integer");
    Params p = normalize_b0(make_params(Family::CaseVIII, m.k, m.a, m.b));
    ordered_json checks = ordered_json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool pass, ordered_json detail) {
        all = all && pass;
        checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    };

    {
        const double pi = std::numbers::pi;
        double v1 = integrate_singular({[](double) { return 1.0; }, 0.5, 0.5, 0.0, 1.0});
        double v2 = integrate_singular({[](double) { return 1.0; }, 0.5, 0.25, 0.0, 1.0});
        double b2 = std::exp(std::lgamma(0.5) + std::lgamma(0.75) - std::lgamma(1.25));
        double e1 = eta_integral(0.5, EtaMark::Zero, EtaMark::S) - eta_integral(0.5, EtaMark::One, EtaMark::PlusInf);
        double e2 = eta_integral(0.5, EtaMark::MinusInf, EtaMark::Zero) - eta_integral(0.5, EtaMark::S, EtaMark::One);
        bool ok = std::abs(v1 - pi) <= 1e-10 && std::abs(v2 - b2) <= 1e-10 && std::abs(e1) <= 1e-9 &&
                  std::abs(e2) <= 1e-9;
        record("quadrature_identities", ok,
               {{"pi_error", v1 - pi}, {"beta_error", v2 - b2}, {"eta_swap", e1}, {"eta_reflect", e2}});
    }
    {
        PeriodIntegrals I = period_integrals(m.k, m.a, m.b);
        double r0 = std::abs(I.I0 - I.Jplus) / I.I0, r1 = std::abs(I.I1 - I.Jminus) / I.I1;
        record("i0_jplus_i1_jminus", r0 <= 1e-10 && r1 <= 1e-10, {{"rel_I0_Jplus", r0}, {"rel_I1_Jminus", r1}});
    }
    {
        auto rows = asymptotics_report(m.k, 1e-4, 0.5);
        bool ok = rows[0].value <= 0.05 * rows[1].value;
        ordered_json d = ordered_json::array();
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i > 0) ok = ok && std::abs(rows[i].value / rows[i].target - 1) <= 0.02;
            d.push_back({{"quantity", rows[i].quantity}, {"value", rows[i].value}, {"target", rows[i].target}});
        }
        record("asymptotics", ok, d);
    }
    {
        bool ok = true;
        double prev = -INFINITY;
        for (int i = 0; i < 32; ++i) {
            double a = 0.02 + 0.96 * i / 31;
            double r = chm_ratio(m.k, a);
            ok = ok && r > prev;
            prev = r;
        }
        record("monotone_at_b1", ok, {{"grid", 32}});
    }
    {
        auto res = closure_check(p, default_cycles(p));
        double h = 0, v = 0;
        for (const CycleResidual& c : res) h = std::max(h, c.horizontal), v = std::max(v, c.vertical);
        record("closure", h <= 1e-6 && v <= 1e-6, {{"cycles", res.size()}, {"horizontal_max", h}, {"vertical_max", v}});
    }
    {
        bool ok = true;
        ordered_json d = ordered_json::array();
        try {
            for (const DivisorOrder& o : divisor_order_check(p)) {
                double err = std::abs(o.slope - o.expected);
                bool pass = err <= 0.05 * std::max(1, std::abs(o.expected));
                ok = ok && pass;
                d.push_back({{"site", divisor_site_name(o.site)}, {"function", divisor_function_name(o.fn)},
                             {"order", o.slope}, {"expected", o.expected}});
            }
        } catch (const Error& e) {
            ok = false;
            d.push_back({{"error", e.what()}});
        }
        record("divisor_orders", ok, d);
    }
    ordered_json j = {{"schema", schema}, {"command", "verify"}, {"k", m.k}, {"a", m.a}, {"b", m.b},
                      {"pass", all},      {"checks", checks}};
    write_text(cfg.out_path, j.dump(2) + "\n");
    return all ? ExitOk : ExitVerify;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Numerical lab for the Hoffman-Wohlgemuth singly periodic minimal surfaces"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string family = "CaseI", format;
    double a = NAN, b = NAN;

    auto* solve = app.add_subcommand("solve", "solve the CaseVIII period problem");
    auto* scan = app.add_subcommand("scan", "obstruction scan for a non-solvable family");
    auto* mesh = app.add_subcommand("mesh", "immerse, assemble and export one or more slabs");
    auto* verify = app.add_subcommand("verify", "run the invariant checks at given moduli");
    for (auto* c : {solve, scan, mesh, verify}) {
        c->add_option("--k", cfg.k, "genus parameter k >= 1");
        c->add_option("--tol", cfg.tol, "tolerance in [1e-12, 1e-4]");
        c->add_option("--out", cfg.out_path, "output file (stdout if omitted)");
    }
    solve->add_option("--prescan", cfg.prescan, "curve resolution for root isolation");
    scan->add_option("--family", family, "CaseI, CaseV or CaseVI");
    scan->add_option("--grid", cfg.grid, "points per axis");
    mesh->add_option("--resolution", cfg.resolution, "angular divisions of the domain");
    mesh->add_option("--slabs", cfg.slabs, "number of translational slabs");
    mesh->add_option("--end-cutoff", cfg.end_cutoff, "excluded radius around the end z = 0");
    mesh->add_option("--format", format, "obj or ply");
    mesh->add_option("--solution", cfg.solution_path, "solution JSON from solve");
    mesh->add_flag("--embed-check", cfg.embed_check, "also measure the minimum non-adjacent face distance");
    verify->add_option("--solution", cfg.solution_path, "solution JSON from solve");
    verify->add_option("--a", a, "modulus a");
    verify->add_option("--b", b, "modulus b");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ExitOk : ExitUsage;
    }

    try {
        if (std::isfinite(a)) cfg.a = a;
        if (std::isfinite(b)) cfg.b = b;
        if (*solve) return cmd_solve(cfg);
        if (*scan) {
            cfg.command = Command::Scan;
            try {
                cfg.family = parse_family(family);
            } catch (const Error&) {
                throw UsageError("unknown family '" + family + "'");
            }
            return cmd_scan(cfg);
        }
        if (*mesh) {
            cfg.command = Command::Mesh;
            if (format.empty() || format == "obj" || format == "OBJ") cfg.format = OutFormat::Obj;
            else if (format == "ply" || format == "PLY") cfg.format = OutFormat::Ply;
            else throw UsageError("mesh --format is obj or ply");
            return cmd_mesh(cfg);
        }
        cfg.command = Command::Verify;
        return cmd_verify(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return ExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
        case Errc::LoopResidualExceeded:
        case Errc::SeamMismatch: return ExitMesh;
        case Errc::InvalidK:
        case Errc::RangeViolation:
        case Errc::BadResolution: return ExitUsage;
        default: return ExitSolver;
        }
    }
}

} // namespace pforge
