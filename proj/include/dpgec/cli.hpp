#pragma once

// Command-line front end: JSON config in, report files out.
//
//   dpgec <solve|convergence|infsup|bv> --config <path> [--outdir <path>]

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpgec/error.hpp"
#include "dpgec/expr.hpp"
#include "dpgec/io.hpp"
#include "dpgec/mesh.hpp"
#include "dpgec/problem.hpp"
#include "dpgec/solver.hpp"
#include "dpgec/verify.hpp"

namespace dpgec::cli {

using json = nlohmann::ordered_json;

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"solve", "convergence", "infsup", "bv"};
    return c;
}

struct BvConfig {
    ButlerVolmerParams params;
    double c_e{};
    double c_s{};
    double phi_e{};
};

struct RunConfig {
    std::string command;
    ProblemKind kind{ProblemKind::concentration};
    Rect domain;
    int nx{8};
    int ny{8};
    SpaceLayout layout{1, 1, 0};
    Problem problem;
    BoundaryPartition partition;
    std::optional<std::string> manufactured;
    std::string outdir{"out"};
    SolveOptions solver;
    int levels{0};  // 0: command default
    BvConfig bv;
};

/// Parses config text; syntax errors carry line and column.
inline json parse_config_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error("config_parse", "line " + std::to_string(line) + ", column " +
                                        std::to_string(col) + ": " + e.what());
    }
}

inline json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace detail {

inline void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed,
                       std::vector<std::string>& bad) {
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) bad.push_back("unknown key '" + where + k + "'");
}

inline double number(const json& obj, const char* key, double def, const std::string& where,
                     std::vector<std::string>& bad) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) {
        bad.push_back(where + key + " must be a number");
        return def;
    }
    return v.get<double>();
}

inline int integer(const json& obj, const char* key, int def, const std::string& where,
                   std::vector<std::string>& bad) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        bad.push_back(where + key + " must be an integer");
        return def;
    }
    return v.get<int>();
}

inline expr::Expr expression(const json& v, const std::string& name) {
    if (v.is_number()) return expr::parse(io::fmt(v.get<double>()));
    if (!v.is_string()) throw Error("invalid_config", name + " must be a number or an expression string");
    try {
        return expr::parse(v.get<std::string>());
    } catch (const Error& e) {
        throw Error(e.code(), name + ": " + e.what());
    }
}

inline ScalarFn scalar(const json& obj, const char* key, double def, const std::string& where) {
    if (!obj.contains(key)) return constant_fn(def);
    return expr_fn(expression(obj.at(key), where + key));
}

inline BoundaryFn boundary(const json& obj, const char* key, double def, const std::string& where) {
    return boundary_fn(scalar(obj, key, def, where));
}

inline BoundaryKind boundary_kind(const std::string& s) {
    if (s == "dirichlet") return BoundaryKind::dirichlet;
    if (s == "neumann") return BoundaryKind::neumann;
    if (s == "robin") return BoundaryKind::robin;
    throw Error("invalid_config", "unknown boundary kind '" + s + "'");
}

inline BoundaryPartition partition(const json& obj, BoundaryPartition def) {
    if (!obj.is_object()) throw Error("invalid_config", "problem.partition must be an object");
    for (const auto& [k, v] : obj.items()) {
        const Side sides[] = {Side::left, Side::right, Side::bottom, Side::top};
        bool found = false;
        for (Side s : sides)
            if (k == to_string(s)) {
                if (!v.is_string()) throw Error("invalid_config", "partition." + k + " must be a string");
                def.sides[static_cast<int>(s)] = boundary_kind(v.get<std::string>());
                found = true;
            }
        if (!found) throw Error("invalid_config", "unknown partition side '" + k + "'");
    }
    return def;
}

inline Problem problem_block(const json& pb, ProblemKind kind, BoundaryPartition& part,
                             std::vector<std::string>& bad) {
    const std::string w = "problem.";
    if (kind == ProblemKind::concentration) {
        check_keys(pb, w, {"kind", "D", "dt", "c_prev", "J", "partition"}, bad);
        ConcentrationProblem c;
        c.D = number(pb, "D", 1.0, w, bad);
        c.dt = number(pb, "dt", 1.0, w, bad);
        c.c_prev = scalar(pb, "c_prev", 0.0, w);
        c.J = boundary(pb, "J", 0.0, w);
        part = pb.contains("partition") ? partition(pb.at("partition"), BoundaryPartition::all_neumann())
                                        : BoundaryPartition::all_neumann();
        return c;
    }
    check_keys(pb, w, {"kind", "kappa", "beta", "S", "I", "R", "partition"}, bad);
    PotentialProblem p;
    p.kappa = number(pb, "kappa", 1.0, w, bad);
    p.beta = scalar(pb, "beta", 1.0, w);
    if (pb.contains("S")) {
        const json& s = pb.at("S");
        if (!s.is_array() || s.size() != 2) {
            bad.emplace_back("problem.S must be an array of two components");
        } else {
            p.S_x = expr_fn(expression(s[0], "problem.S[0]"));
            p.S_y = expr_fn(expression(s[1], "problem.S[1]"));
        }
    }
    p.I = boundary(pb, "I", 0.0, w);
    p.R = boundary(pb, "R", 0.0, w);
    if (pb.contains("partition")) p.partition = partition(pb.at("partition"), p.partition);
    part = p.partition;
    return p;
}

inline ProblemKind problem_kind(const std::string& s) {
    if (s == "concentration") return ProblemKind::concentration;
    if (s == "potential") return ProblemKind::potential;
    throw Error("invalid_config", "unknown problem kind '" + s + "'");
}

inline BvConfig bv_block(const json& b, std::vector<std::string>& bad) {
    const std::string w = "bv.";
    check_keys(b, w, {"k_bv", "F", "R_gas", "T", "c_smax", "t_plus", "c_e", "c_s", "phi_e", "phi_open"},
               bad);
    BvConfig out;
    auto& p = out.params;
    p.k_bv = number(b, "k_bv", p.k_bv, w, bad);
    p.F = number(b, "F", p.F, w, bad);
    p.R_gas = number(b, "R_gas", p.R_gas, w, bad);
    p.T = number(b, "T", p.T, w, bad);
    p.c_smax = number(b, "c_smax", p.c_smax, w, bad);
    p.t_plus = number(b, "t_plus", p.t_plus, w, bad);
    out.c_e = number(b, "c_e", 0.0, w, bad);
    out.c_s = number(b, "c_s", 0.0, w, bad);
    out.phi_e = number(b, "phi_e", 0.0, w, bad);
    if (b.contains("phi_open")) {
        // Open-circuit curve in the state-of-charge variable, written as x.
        const expr::Expr e = expression(b.at("phi_open"), "bv.phi_open");
        p.phi_open = [e](double soc) { return e.eval(soc, 0.0); };
    }
    return out;
}

}  // namespace detail

/// Builds a RunConfig from parsed JSON. Collects every structural violation
/// into one ValidationError.
inline RunConfig build_config(const json& j, const std::string& command) {
    if (!j.is_object()) throw Error("invalid_config", "config must be a JSON object");
    std::vector<std::string> bad;
    detail::check_keys(j, "", {"command", "problem", "manufactured", "mesh", "discretization", "solver",
                               "output", "levels", "bv"},
                       bad);
    RunConfig c;
    c.command = command;
    if (j.contains("command") && j.at("command") != command)
        bad.push_back("config command does not match the requested command '" + command + "'");

    if (j.contains("output")) {
        const json& o = j.at("output");
        if (o.is_string()) c.outdir = o.get<std::string>();
        else if (o.is_object() && o.contains("dir") && o.at("dir").is_string())
            c.outdir = o.at("dir").get<std::string>();
        else bad.emplace_back("output must be a string or an object with a 'dir' string");
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        detail::check_keys(s, "solver.", {"tol", "dense_limit"}, bad);
        c.solver.tol = detail::number(s, "tol", c.solver.tol, "solver.", bad);
        c.solver.dense_limit = detail::integer(s, "dense_limit", c.solver.dense_limit, "solver.", bad);
        if (!(c.solver.tol > 0.0 && c.solver.tol < 1.0)) bad.emplace_back("solver.tol must lie in (0, 1)");
    }
    c.levels = detail::integer(j, "levels", 0, "", bad);

    if (command == "bv") {
        if (!j.contains("bv")) bad.emplace_back("bv block is required for the bv command");
        else c.bv = detail::bv_block(j.at("bv"), bad);
        if (!bad.empty()) throw ValidationError(std::move(bad));
        return c;
    }

    if (j.contains("mesh")) {
        const json& m = j.at("mesh");
        detail::check_keys(m, "mesh.", {"domain", "nx", "ny"}, bad);
        c.nx = detail::integer(m, "nx", c.nx, "mesh.", bad);
        c.ny = detail::integer(m, "ny", c.nx, "mesh.", bad);
        if (m.contains("domain")) {
            const json& d = m.at("domain");
            if (!d.is_array() || d.size() != 4 || !std::all_of(d.begin(), d.end(), [](const json& v) {
                    return v.is_number();
                }))
                bad.emplace_back("mesh.domain must be [x0, x1, y0, y1]");
            else c.domain = {d[0].get<double>(), d[1].get<double>(), d[2].get<double>(), d[3].get<double>()};
        }
    }
    if (j.contains("discretization")) {
        const json& d = j.at("discretization");
        detail::check_keys(d, "discretization.", {"p", "delta_p", "quad_order"}, bad);
        c.layout.p = detail::integer(d, "p", c.layout.p, "discretization.", bad);
        c.layout.delta_p = detail::integer(d, "delta_p", c.layout.delta_p, "discretization.", bad);
        c.layout.quad_override = detail::integer(d, "quad_order", 0, "discretization.", bad);
    }
    if (c.layout.p < 1) bad.emplace_back("p must be at least 1");
    if (c.layout.delta_p < 1) bad.emplace_back("delta_p must be at least 1");

    if (j.contains("manufactured")) {
        if (!j.at("manufactured").is_string()) {
            bad.emplace_back("manufactured must be a case name");
        } else {
            const ManufacturedCase mc = manufactured_case(j.at("manufactured").get<std::string>());
            c.manufactured = mc.name;
            c.kind = mc.kind;
            c.problem = mc.problem;
            c.partition = mc.partition;
            c.domain = mc.domain;
            if (j.contains("problem") && j.at("problem").contains("kind") &&
                j.at("problem").at("kind") != to_string(mc.kind))
                bad.push_back("problem.kind conflicts with manufactured case '" + mc.name + "'");
        }
    } else if (!j.contains("problem") || !j.at("problem").is_object()) {
        bad.emplace_back("problem block (or a manufactured case) is required");
    } else {
        const json& pb = j.at("problem");
        if (!pb.contains("kind") || !pb.at("kind").is_string()) {
            bad.emplace_back("problem.kind is required");
        } else {
            c.kind = detail::problem_kind(pb.at("kind").get<std::string>());
            c.problem = detail::problem_block(pb, c.kind, c.partition, bad);
        }
    }
    if (command == "convergence" && !c.manufactured)
        bad.emplace_back("convergence requires a manufactured case");
    if (!bad.empty()) throw ValidationError(std::move(bad));
    return c;
}

inline Mesh make_mesh(const RunConfig& c, int nx, int ny) {
    return classify_boundary(build_rect_mesh(c.domain, nx, ny), c.partition, c.kind);
}

/// Outcome of one command: the report written to report.json plus a one-line
/// human summary (which may include timings; files never do).
struct CommandResult {
    json report;
    std::string summary;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline CommandResult run_solve(const RunConfig& c, const std::filesystem::path& outdir) {
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh mesh = make_mesh(c, c.nx, c.ny);
    const DpgRun run = solve_dpg(mesh, c.problem, c.layout, c.solver);
    double riesz = 0.0, fosls = 0.0;
    for (const auto& i : run.solution.indicators) {
        riesz += i.eta_sq_riesz;
        fosls += i.eta_sq_fosls;
    }
    json r;
    r["command"] = "solve";
    r["kind"] = to_string(c.kind);
    if (c.manufactured) r["manufactured"] = *c.manufactured;
    r["mesh"] = io::mesh_summary(mesh);
    r["discretization"] = {{"p", c.layout.p},
                           {"delta_p", c.layout.delta_p},
                           {"quad_points", c.layout.quad_points()}};
    r["dofs"] = {{"field", run.dofmap.n_field},
                 {"flux", run.dofmap.n_flux},
                 {"trace", run.dofmap.n_trace},
                 {"total", run.dofmap.total()}};
    r["solver"] = {{"method", run.stats.dense ? "dense_cholesky" : "pcg_jacobi"},
                   {"iterations", run.stats.iterations},
                   {"relative_residual", run.stats.relative_residual}};
    r["eta"] = run.solution.eta;
    r["eta_sq_riesz"] = riesz;
    r["eta_sq_fosls"] = fosls;
    r["load_norm"] = run.load_norm;
    r["warnings"] = run.validation.warnings;
    ScalarFn exact;
    if (c.manufactured) {
        const ManufacturedCase mc = manufactured_case(*c.manufactured);
        const ErrorNorms en = error_norms(run.solution, mc, mesh, run.dofmap, make_reference(c.layout));
        r["errors"] = io::error_json(en);
        exact = mc.field;
    }
    io::write_text(outdir / "report.json", r.dump(2) + "\n");
    io::write_text(outdir / "fields.vtk", io::vtk_fields(mesh, run.dofmap, run.coeffs, exact));
    io::write_text(outdir / "indicators.csv", io::indicators_csv(mesh, run.solution.indicators));
    std::ostringstream s;
    s << "solve: " << run.dofmap.total() << " dofs, eta = " << io::fmt(run.solution.eta);
    if (r.contains("errors")) s << ", e_field = " << io::fmt(r["errors"]["e_field"].get<double>());
    s << ", " << seconds_since(t0) << " s";
    return {r, s.str()};
}

inline CommandResult run_convergence(const RunConfig& c, const std::filesystem::path& outdir) {
    const auto t0 = std::chrono::steady_clock::now();
    const ManufacturedCase mc = manufactured_case(*c.manufactured);
    const int levels = c.levels > 0 ? c.levels : 4;
    const EocReport rep = eoc_study(mc, c.layout, levels, c.nx, c.solver);
    json r;
    r["command"] = "convergence";
    r["kind"] = to_string(mc.kind);
    r["manufactured"] = mc.name;
    r["study"] = io::eoc_json(rep);
    io::write_text(outdir / "report.json", r.dump(2) + "\n");
    io::write_text(outdir / "eoc.csv", io::eoc_csv(rep));
    std::ostringstream s;
    s << "convergence: " << mc.name << " p=" << c.layout.p << ", finest-pair combined EOC = "
      << io::fmt(rep.final_eoc_combined()) << "\n";
    for (const EocRow& row : rep.rows) s << "  n=" << row.n << " runtime " << row.runtime_s << " s\n";
    s << "  total " << seconds_since(t0) << " s";
    return {r, s.str()};
}

inline CommandResult run_infsup(const RunConfig& c, const std::filesystem::path& outdir) {
    const int levels = c.levels > 0 ? c.levels : 3;
    std::vector<io::InfSupRow> rows;
    int nx = c.nx, ny = c.ny;
    for (int l = 0; l < levels; ++l, nx *= 2, ny *= 2) {
        const Mesh mesh = make_mesh(c, nx, ny);
        io::InfSupRow row;
        row.n = nx;
        row.h = mesh.h_max();
        row.dofs = build_dofmap(mesh, c.layout, active_facets(mesh, c.kind)).total();
        row.alpha = infsup_constant(mesh, c.layout, c.problem);
        rows.push_back(row);
    }
    json r;
    r["command"] = "infsup";
    r["kind"] = to_string(c.kind);
    if (c.manufactured) r["manufactured"] = *c.manufactured;
    r["p"] = c.layout.p;
    r["delta_p"] = c.layout.delta_p;
    json arr = json::array();
    for (const auto& row : rows)
        arr.push_back({{"n", row.n}, {"h", row.h}, {"dofs", row.dofs}, {"alpha", row.alpha}});
    r["levels"] = arr;
    io::write_text(outdir / "report.json", r.dump(2) + "\n");
    io::write_text(outdir / "infsup.csv", io::infsup_csv(rows));
    std::ostringstream s;
    s << "infsup:";
    for (const auto& row : rows) s << " n=" << row.n << " alpha=" << io::fmt(row.alpha);
    return {r, s.str()};
}

inline CommandResult run_bv(const RunConfig& c, const std::filesystem::path& outdir) {
    c.bv.params.validate();
    const RobinData rd = robin_coefficients(c.bv.params, c.bv.c_e, c.bv.c_s, c.bv.phi_e);
    json r;
    r["command"] = "bv";
    r["I_c"] = rd.I_c;
    r["beta"] = rd.beta;
    r["R_load"] = rd.R_load;
    r["state_of_charge"] = state_of_charge(c.bv.c_s, c.bv.params.c_smax);
    io::write_text(outdir / "report.json", r.dump(2) + "\n");
    return {r, "bv: I_c = " + io::fmt(rd.I_c) + ", beta = " + io::fmt(rd.beta) +
                   ", R_load = " + io::fmt(rd.R_load)};
}

inline CommandResult execute(const RunConfig& c, const std::filesystem::path& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw Error("io", "cannot create output directory '" + outdir.string() + "'");
    if (c.command == "solve") return run_solve(c, outdir);
    if (c.command == "convergence") return run_convergence(c, outdir);
    if (c.command == "infsup") return run_infsup(c, outdir);
    if (c.command == "bv") return run_bv(c, outdir);
    throw Error("usage", "unknown command '" + c.command + "'");
}

inline json error_object(const std::string& code, const std::string& message,
                         const std::vector<std::string>& violations = {}) {
    json e{{"code", code}, {"message", message}};
    if (!violations.empty()) e["violations"] = violations;
    return json{{"error", e}};
}

/// Entry point. Returns the process exit status: 0 success, 1 runtime failure,
/// 2 usage or configuration error. Errors are printed to `err` as JSON.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"DPG solver for the concentration and potential problems"};
    std::string command, config_path, outdir;
    app.add_option("command", command, "solve | convergence | infsup | bv")
        ->required()
        ->check(CLI::IsMember(commands()));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--outdir", outdir, "output directory (overrides the config)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_object("usage", e.what()).dump() << "\n";
        return 2;
    }

    try {
        const json j = read_config_file(config_path);
        RunConfig c = build_config(j, command);
        if (!outdir.empty()) c.outdir = outdir;
        const CommandResult res = execute(c, c.outdir);
        out << res.summary << "\n";
        return 0;
    } catch (const ValidationError& e) {
        err << error_object(e.code(), e.what(), e.violations()).dump() << "\n";
        return 2;
    } catch (const Error& e) {
        const bool config = e.code() == "config_parse" || e.code() == "invalid_config" ||
                            e.code() == "expr_syntax" || e.code() == "unknown_case" ||
                            e.code() == "invalid_partition" || e.code() == "invalid_mesh" ||
                            e.code() == "invalid_order";
        err << error_object(e.code(), e.what()).dump() << "\n";
        return config ? 2 : 1;
    } catch (const std::exception& e) {
        err << error_object("internal", e.what()).dump() << "\n";
        return 1;
    }
}

}  // namespace dpgec::cli
