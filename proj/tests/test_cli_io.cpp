#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rse/cli.hpp"
#include "rse/errors.hpp"
#include "rse/io.hpp"
#include "test_util.hpp"

using namespace rse;
namespace fs = std::filesystem;

namespace {

json base_doc() {
    return json::parse(R"({
        "grid": {"dim": 1, "n_points": [32], "length": [16.0]},
        "physics": {"hbar": 1.0, "mass": 1.0, "lambda_c": 0.1},
        "mode": "modified",
        "initial": {"kind": "gaussian", "center": [0.0], "sigma": [1.0]},
        "integrator": {"dt": 0.02, "t_final": 0.2, "save_every": 5}
    })");
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("rse_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string write_doc(const fs::path& dir, const std::string& name, const json& doc) {
    const fs::path p = dir / name;
    std::ofstream(p) << doc.dump();
    return p.string();
}

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    if (out_text) *out_text = out.str();
    return code;
}

std::string validation_message(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("io: config parsing applies defaults and round-trips") {
    const ScenarioConfig cfg = parse_config(base_doc());
    CHECK(cfg.dim == 1);
    CHECK(cfg.n_points[0] == 32);
    CHECK(cfg.g_policy == GPolicy::strict);
    CHECK(cfg.integrator.save_every == 5);
    CHECK(cfg.integrator.window.lo == 1e-4);
    CHECK(cfg.integrator.window.hi == 1e-2);
    CHECK(cfg.integrator.window.kappa == 0.5);
    const json emitted = emit_config(cfg);
    const ScenarioConfig again = parse_config(emitted);
    CHECK(emit_config(again) == emitted);
}

TEST_CASE("io: default time step is the stability limit") {
    json doc = base_doc();
    doc.erase("integrator");
    const ScenarioConfig cfg = parse_config(doc);
    CHECK(std::abs(cfg.integrator.dt - 0.1 * 0.25) < 1e-15);
}

TEST_CASE("io: validation errors name the offending field") {
    json doc = base_doc();
    doc["grid"]["n_points"] = {48};
    CHECK(validation_message(doc).rfind("grid", 0) == 0);

    doc = base_doc();
    doc["physics"]["charge"] = 1.0;
    CHECK(validation_message(doc).find("physics.charge") != std::string::npos);

    doc = base_doc();
    doc["initial"].erase("sigma");
    CHECK(validation_message(doc).find("initial.sigma") != std::string::npos);

    doc = base_doc();
    doc["integrator"]["dt"] = 0.5;
    CHECK(validation_message(doc).find("integrator.dt") != std::string::npos);

    doc = base_doc();
    doc["mode"] = "nonlinear";
    CHECK(validation_message(doc).rfind("mode", 0) == 0);
    doc = base_doc();
    doc["integrator"]["correction_cutoff"] = -0.1;
    CHECK(validation_message(doc).find("correction_cutoff") != std::string::npos);
    doc = base_doc();
    doc["integrator"]["phase_window"] = {1e-2, 1e-4};
    CHECK(validation_message(doc).find("phase_window") != std::string::npos);

    doc = base_doc();
    doc["initial"]["kbar"] = {0.3};
    CHECK_THROWS_AS(parse_config(doc), WindingError);

    doc = base_doc();
    doc["grid"] = {{"dim", 1}, {"n_points", {256}}, {"length", {2.0 * rse::test::pi}}};
    doc["physics"]["lambda_c"] = 0.01;
    CHECK_THROWS_AS(parse_config(doc), DomainError);
}

TEST_CASE("io: series columns") {
    const auto c1 = series_columns(1);
    CHECK(c1.front() == "t");
    CHECK(c1.back() == "hi_norm");
    CHECK(c1.size() == 10);
    CHECK(series_columns(2).size() == 16);

    DiagnosticsRecord r;
    r.t = 0.1;
    r.norm = 1.0 / 3.0;
    std::ostringstream os;
    write_series_csv(os, {r});
    const std::string text = os.str();
    CHECK(text.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("io: snapshots round-trip bit for bit") {
    const fs::path dir = scratch_dir("snap");
    const Grid g = make_grid(2, {8, 16}, {2.0, 3.0});
    PhysicsParams p;
    p.lambda_c = 0.0123;
    p.potential.kind = Potential::Kind::harmonic;
    p.potential.omega = {1.5, 0.5};
    HydroState s;
    s.rho = rse::test::sample2(g, [](double x, double y) { return std::exp(-x * x - y * y) / 3.0; });
    s.s_per = rse::test::sample2(g, [](double x, double y) { return std::sin(x) * 0.1 + y / 7.0; });
    s.kbar = {rse::test::pi, 2.0 * rse::test::pi / 3.0};
    s.t = 0.1 + 0.2;
    const std::string path = (dir / "s.json").string();
    write_snapshot(path, g, p, s);
    const Snapshot back = read_snapshot(path);
    CHECK(back.grid.same_shape(g));
    CHECK(back.physics.lambda_c == p.lambda_c);
    CHECK(back.physics.potential.omega[1] == 0.5);
    CHECK(back.state.t == s.t);
    CHECK(back.state.kbar == s.kbar);
    CHECK(back.state.rho == s.rho);
    CHECK(back.state.s_per == s.s_per);
    CHECK_THROWS_AS(read_snapshot((dir / "missing.json").string()), IoError);
}

TEST_CASE("cli: coeffs") {
    std::string text;
    CHECK(run_cli({"coeffs", "4"}, &text) == 0);
    CHECK(text == "0,-0.5\n1,0\n2,-0.125\n3,0\n4,-0.0625\n");
    CHECK(run_cli({"coeffs", "65"}) == 1);
    CHECK(run_cli({"coeffs"}) == 1);
    CHECK(run_cli({"frobnicate"}) == 1);
}

TEST_CASE("cli: symbol rows and projected flags") {
    const fs::path dir = scratch_dir("symbol");
    json doc = base_doc();
    doc["grid"] = {{"dim", 1}, {"n_points", {64}}, {"length", {2.0 * rse::test::pi}}};
    doc.erase("integrator");  // default dt follows the finer grid
    doc["g_policy"] = "projected";
    std::string text;
    CHECK(run_cli({"symbol", "--config", write_doc(dir, "c.json", doc)}, &text) == 0);
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    CHECK(line == "k,g,projected");
    int rows = 0, flagged = 0;
    while (std::getline(is, line)) {
        ++rows;
        if (line.back() == '1') ++flagged;
    }
    CHECK(rows == 64);
    // lambda k >= 1 for |k| >= 10: k = 10..31 and -10..-32.
    CHECK(flagged == 45);

    doc["g_policy"] = "strict";
    CHECK(run_cli({"symbol", "--config", write_doc(dir, "s.json", doc)}) == 1);
}

TEST_CASE("cli: run writes series, snapshots and report") {
    const fs::path dir = scratch_dir("run");
    const std::string cfg = write_doc(dir, "c.json", base_doc());
    CHECK(run_cli({"run", "--config", cfg, "--out", (dir / "out").string()}) == 0);
    CHECK(fs::exists(dir / "out" / "series.csv"));
    CHECK(fs::exists(dir / "out" / "snapshots" / "snap_00000.json"));
    const json report = json::parse(read_text_file((dir / "out" / "report.json").string()));
    CHECK(report["complete"] == true);
    CHECK(report["projected_modes"] == 0);
    CHECK(report["snapshots"].size() == 3);
    CHECK(report["version"].get<std::string>().rfind("rse-lab", 0) == 0);

    // Diagnostics of a saved snapshot reproduce the last series row.
    std::string text;
    CHECK(run_cli({"diag", (dir / "out" / "snapshots" / "snap_00002.json").string()}, &text) == 0);
    const json d = json::parse(text);
    CHECK(d["norm"].get<double>() == report["final"]["norm"].get<double>());
    CHECK(d["I1_cc"][0].get<double>() == report["final"]["I1_cc"][0].get<double>());
}

TEST_CASE("cli: exit codes") {
    const fs::path dir = scratch_dir("codes");
    json doc = base_doc();
    doc["grid"] = {{"dim", 1}, {"n_points", {256}}, {"length", {2.0 * rse::test::pi}}};
    doc["physics"]["lambda_c"] = 0.01;
    doc["integrator"] = {{"t_final", 0.0}};
    doc["initial"] = {{"kind", "plane_wave"}, {"kbar", {1.0}}};
    CHECK(run_cli({"run", "--config", write_doc(dir, "strict.json", doc)}) == 1);
    doc["g_policy"] = "projected";
    doc["output"] = {{"dir", (dir / "proj").string()}};
    CHECK(run_cli({"run", "--config", write_doc(dir, "proj.json", doc)}) == 0);
    const json report = json::parse(read_text_file((dir / "proj" / "report.json").string()));
    CHECK(report["projected_modes"].get<int>() > 0);

    CHECK(run_cli({"run", "--config", (dir / "absent.json").string()}) == 3);
    std::ofstream(dir / "bad.json") << "{not json";
    CHECK(run_cli({"run", "--config", (dir / "bad.json").string()}) == 1);
}
