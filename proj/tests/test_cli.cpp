#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpgec/cli.hpp"

using namespace dpgec;
using Catch::Approx;
namespace fs = std::filesystem;
using json = cli::json;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("dpgec_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

Outcome run_cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string("\"") + DPGEC_CLI_BINARY + "\" " + args + " > \"" +
                            (dir / "stdout.txt").string() + "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(dir / "stdout.txt"), slurp(dir / "stderr.txt")};
}

std::string config(const char* name) { return (fs::path(DPGEC_CONFIG_DIR) / name).string(); }

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

json error_of(const Outcome& o) {
    const json j = json::parse(o.err);
    REQUIRE(j.contains("error"));
    return j.at("error");
}

}  // namespace

TEST_CASE("bv command", "[cli]") {
    const fs::path d = scratch("bv");
    const Outcome o = run_cli("bv --config \"" + config("bv_example.json") + "\" --outdir \"" + d.string() + "/run\"", d);
    REQUIRE(o.status == 0);
    const json r = json::parse(slurp(d / "run/report.json"));
    CHECK(r["I_c"].get<double>() == 24.0);
    CHECK(r["beta"].get<double>() == 6.0);
    CHECK(r["R_load"].get<double>() == -4.5);
    CHECK(r["state_of_charge"].get<double>() == Approx(0.2));
}

TEST_CASE("solve reproduces a quadratic potential and writes its outputs", "[cli]") {
    const fs::path d = scratch("solve");
    const Outcome o = run_cli("solve --config \"" + config("pot_poly2_solve.json") + "\" --outdir \"" + d.string() + "/a\"", d);
    REQUIRE(o.status == 0);
    CHECK(o.out.rfind("solve:", 0) == 0);
    const json r = json::parse(slurp(d / "a/report.json"));
    CHECK(r["errors"]["e_field"].get<double>() <= 1e-9);
    CHECK(r["errors"]["e_flux"].get<double>() <= 1e-9);
    CHECK(r["eta"].get<double>() <= 1e-8 * r["load_norm"].get<double>());
    CHECK(r["dofs"]["total"].get<int>() == r["dofs"]["field"].get<int>() + r["dofs"]["flux"].get<int>() +
                                               r["dofs"]["trace"].get<int>());
    const std::string vtk = slurp(d / "a/fields.vtk");
    CHECK(vtk.rfind("# vtk DataFile Version 3.0", 0) == 0);
    CHECK(vtk.find("DIMENSIONS 9 9 1") != std::string::npos);
    CHECK(vtk.find("SCALARS exact_field") != std::string::npos);
    const std::string csv = slurp(d / "a/indicators.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);

    // a second run produces bit-identical files
    REQUIRE(run_cli("solve --config \"" + config("pot_poly2_solve.json") + "\" --outdir \"" + d.string() + "/b\"", d).status == 0);
    for (const char* f : {"report.json", "fields.vtk", "indicators.csv"}) {
        INFO(f);
        CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    }
}

TEST_CASE("convergence command", "[cli]") {
    const fs::path d = scratch("eoc");
    const Outcome o = run_cli("convergence --config \"" + config("conc_trig_convergence.json") + "\" --outdir \"" + d.string() + "/run\"", d);
    REQUIRE(o.status == 0);
    const json r = json::parse(slurp(d / "run/report.json"));
    const auto& eoc = r["study"]["eoc"];
    REQUIRE(eoc.size() == 3);
    CHECK(eoc.back()["combined"].get<double>() >= 1.8);
    CHECK(r["study"]["rows"].size() == 4);
    const std::string csv = slurp(d / "run/eoc.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("infsup and custom problems run", "[cli]") {
    const fs::path d = scratch("misc");
    REQUIRE(run_cli("infsup --config \"" + config("infsup_concentration.json") + "\" --outdir \"" + d.string() + "/inf\"", d).status == 0);
    const json r = json::parse(slurp(d / "inf/report.json"));
    REQUIRE(r["levels"].size() == 3);
    for (const auto& l : r["levels"]) CHECK(l["alpha"].get<double>() > 0.0);

    REQUIRE(run_cli("solve --config \"" + config("potential_custom.json") + "\" --outdir \"" + d.string() + "/pot\"", d).status == 0);
    const json p = json::parse(slurp(d / "pot/report.json"));
    CHECK(p["eta"].get<double>() < p["load_norm"].get<double>());
    CHECK_FALSE(p.contains("errors"));
    CHECK(p["mesh"]["facets"]["dirichlet"].get<int>() == 8);
}

TEST_CASE("errors are reported as JSON with a nonzero exit", "[cli]") {
    const fs::path d = scratch("errors");

    SECTION("malformed JSON") {
        const auto cfg = write_config(d, "{\n  \"command\": \"solve\",\n  \"mesh\": {nx: 4}\n}\n");
        const Outcome o = run_cli("solve --config \"" + cfg.string() + "\"", d);
        CHECK(o.status == 2);
        const json e = error_of(o);
        CHECK(e["code"] == "config_parse");
        CHECK(e["message"].get<std::string>().find("line 3") != std::string::npos);
    }
    SECTION("invalid Robin coefficient") {
        const auto cfg = write_config(d, R"({"problem": {"kind": "potential", "beta": "x - 2"}, "mesh": {"nx": 2},
                                            "output": ")" + (d / "o").string() + R"("})");
        const Outcome o = run_cli("solve --config \"" + cfg.string() + "\"", d);
        CHECK(o.status == 2);
        const json e = error_of(o);
        CHECK(e["code"] == "validation");
        CHECK(e["message"].get<std::string>().find("beta not positive on Gamma_R") != std::string::npos);
    }
    SECTION("unknown keys are collected") {
        const auto cfg = write_config(d, R"({"problem": {"kind": "concentration", "Dx": 1}, "mesh": {"nz": 2}})");
        const Outcome o = run_cli("solve --config \"" + cfg.string() + "\"", d);
        CHECK(o.status == 2);
        const json e = error_of(o);
        CHECK(e["code"] == "validation");
        CHECK(e["violations"].size() == 2);
    }
    SECTION("expression syntax") {
        const auto cfg = write_config(d, R"({"problem": {"kind": "concentration", "c_prev": "1 + * x"}})");
        const Outcome o = run_cli("solve --config \"" + cfg.string() + "\"", d);
        CHECK(o.status == 2);
        CHECK(error_of(o)["code"] == "expr_syntax");
    }
    SECTION("unknown manufactured case") {
        const auto cfg = write_config(d, R"({"manufactured": "pot-cubic"})");
        const Outcome o = run_cli("convergence --config \"" + cfg.string() + "\"", d);
        CHECK(o.status == 2);
        CHECK(error_of(o)["code"] == "unknown_case");
    }
    SECTION("usage") {
        const Outcome o = run_cli("solve", d);
        CHECK(o.status == 2);
        CHECK(error_of(o)["code"] == "usage");
        CHECK(run_cli("frobnicate --config x.json", d).status == 2);
    }
    SECTION("missing config file") {
        const Outcome o = run_cli("solve --config \"" + (d / "absent.json").string() + "\"", d);
        CHECK(o.status == 1);
        CHECK(error_of(o)["code"] == "io");
    }
}

TEST_CASE("config building", "[cli]") {
    const cli::RunConfig c = cli::build_config(json::parse(R"({"problem": {"kind": "concentration"}})"), "solve");
    CHECK(c.nx == 8);
    CHECK(c.ny == 8);
    CHECK(c.layout.p == 1);
    CHECK(c.outdir == "out");
    CHECK(c.kind == ProblemKind::concentration);
    CHECK(c.partition == BoundaryPartition::all_neumann());

    const cli::RunConfig m = cli::build_config(
        json::parse(R"({"manufactured": "pot-trig", "mesh": {"nx": 6}, "discretization": {"p": 3, "delta_p": 2}})"),
        "convergence");
    CHECK(m.kind == ProblemKind::potential);
    CHECK(m.nx == 6);
    CHECK(m.ny == 6);
    CHECK(m.layout.enriched_degree() == 5);
    CHECK(std::get<PotentialProblem>(m.problem).kappa == 2.0);

    const cli::RunConfig e = cli::build_config(
        json::parse(R"({"problem": {"kind": "potential", "kappa": 3, "S": ["x*y", 1], "I": "2*y"}})"), "solve");
    const auto& p = std::get<PotentialProblem>(e.problem);
    CHECK(p.kappa == 3.0);
    CHECK(p.S_x(0.5, 0.5) == 0.25);
    CHECK(p.S_y(0.1, 0.9) == 1.0);
    CHECK(p.I(0.0, 0.75, {1.0, 0.0}) == 1.5);

    try {
        cli::build_config(json::parse(R"({"command": "bv", "problem": {"kind": "concentration"}, "solver": {"tol": 2}})"),
                          "convergence");
        FAIL("expected a validation error");
    } catch (const ValidationError& v) {
        CHECK(v.violations().size() == 3);  // command mismatch, tolerance, no manufactured case
    }
    CHECK_THROWS_AS(cli::build_config(json::parse("[1, 2]"), "solve"), Error);
    CHECK_THROWS_AS(cli::build_config(json::parse(R"({"problem": {"kind": "thermal"}})"), "solve"), Error);
    CHECK_THROWS_AS(cli::build_config(json::parse(R"({"problem": {"kind": "potential", "partition": {"left": "periodic"}}})"), "solve"), Error);
}
