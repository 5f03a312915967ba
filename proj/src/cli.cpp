#include "rse/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "rse/checks.hpp"
#include "rse/diagnostics.hpp"
#include "rse/dynamics.hpp"
#include "rse/errors.hpp"
#include "rse/gfunc.hpp"
#include "rse/io.hpp"
#include "rse/madelung.hpp"
#include "rse/scenario.hpp"

#ifndef RSE_VERSION
#define RSE_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace rse {

std::string artifact_version() { return RSE_VERSION; }

namespace {

// FNV-1a over the raw bytes of a field; enough to spot silent changes.
std::string checksum(const RealField& f) {
    std::uint64_t h = 1469598103934665603ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(f.data());
    for (std::size_t i = 0; i < f.size() * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string snapshot_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%05zu.json", i);
    return buf;
}

// rho = |psi|^2 and the periodic phase wrapped to (-pi, pi]; used to store
// split-step states, which may have amplitudes too small to unwrap.
HydroState wrapped_state(const Grid& g, const ComplexField& psi, const std::array<double, 2>& kbar,
                         double t) {
    HydroState st;
    st.kbar = kbar;
    st.t = t;
    st.rho.resize(psi.size());
    st.s_per.resize(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double phase = 0.0;
        for (int a = 0; a < g.dim(); ++a) phase += kbar[a] * g.coords(a)[i];
        st.rho[i] = std::norm(psi[i]);
        st.s_per[i] = std::arg(psi[i] * std::polar(1.0, -phase));
    }
    return st;
}

// The separable comparison needs each factor's potential on its own axis.
bool split_potential(const ScenarioConfig& cfg, Potential& vx, Potential& vy) {
    const Potential& v = cfg.physics.potential;
    if (v.kind == Potential::Kind::none) return true;
    if (v.kind != Potential::Kind::harmonic) return false;
    vx.kind = vy.kind = Potential::Kind::harmonic;
    vx.omega = {v.omega[0], 0.0};
    vy.omega = {v.omega[1], 0.0};
    return true;
}

struct RunOutcome {
    int code = 0;
    std::string message;
};

RunOutcome run_one(const ScenarioConfig& cfg, const json& echo, const fs::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const Grid g = make_grid(cfg);
    const HydroState initial = build_initial(g, cfg.initial, cfg.physics);
    ensure_dir(out_dir / "snapshots");

    json report;
    report["version"] = artifact_version();
    report["config"] = echo;
    std::vector<std::string> warnings;
    std::vector<DiagnosticsRecord> records;
    std::vector<HydroState> snapshots;
    bool complete = true;
    std::string failure;
    int code = 0;

    if (cfg.mode == FlowMode::splitstep) {
        const WaveTrajectory wt =
            evolve_splitstep_linear(g, reconstruct(g, initial), cfg.physics, cfg.integrator);
        records = wt.records;
        for (std::size_t i = 0; i < wt.snapshots.size(); ++i) {
            snapshots.push_back(wrapped_state(g, wt.snapshots[i], initial.kbar, wt.times[i]));
        }
        warnings = wt.warnings;
        warnings.push_back("split-step snapshots store s_per wrapped to (-pi, pi]");
        complete = wt.complete;
        failure = wt.failure;
        code = wt.failure_code;
        report["projected_modes"] = 0;
    } else {
        const GOperator gop(g, cfg.physics.lambda_c, cfg.g_policy);
        if (gop.projected_count() > 0) {
            warnings.push_back("projected policy zeroed " + std::to_string(gop.projected_count()) +
                               " modes outside the real branch");
        }
        const Trajectory tr = evolve(g, initial, cfg.physics, gop, cfg.mode, cfg.integrator);
        records = tr.records;
        snapshots = tr.snapshots;
        warnings.insert(warnings.end(), tr.warnings.begin(), tr.warnings.end());
        complete = tr.complete;
        failure = tr.failure;
        code = tr.failure_code;
        report["projected_modes"] = gop.projected_count();

        if (cfg.initial.kind == InitialSpec::Kind::product && cfg.mode == FlowMode::modified) {
            Potential vx, vy;
            if (split_potential(cfg, vx, vy)) {
                const Grid gx(1, {g.n(0), 1}, {g.length(0), 1.0});
                const Grid gy(1, {g.n(1), 1}, {g.length(1), 1.0});
                PhysicsParams base = cfg.physics;
                base.potential = {};
                const SeparabilityResult sep =
                    separability_error(gx, build_initial(gx, *cfg.initial.x, cfg.physics), vx, gy,
                                       build_initial(gy, *cfg.initial.y, cfg.physics), vy, base,
                                       cfg.g_policy, cfg.integrator);
                report["separability"] = {{"error", sep.error},
                                          {"density_error", sep.density_error},
                                          {"phase_error", sep.phase_error},
                                          {"complete", sep.complete}};
            } else {
                warnings.push_back("separability report skipped: potential is not additive");
            }
        }
    }

    {
        std::ostringstream csv;
        write_series_csv(csv, records);
        write_text_file((out_dir / "series.csv").string(), csv.str());
    }
    json snap_list = json::array();
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const std::string name = snapshot_name(i);
        write_snapshot((out_dir / "snapshots" / name).string(), g, cfg.physics, snapshots[i]);
        snap_list.push_back({{"file", "snapshots/" + name}, {"t", snapshots[i].t}});
    }

    const HydroState& last = snapshots.back();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["wall_time_s"] = wall;
    report["complete"] = complete;
    if (!complete) report["failure"] = failure;
    report["warnings"] = warnings;
    report["snapshots"] = snap_list;
    report["final"] = record_json(records.back());
    report["checksums"] = {{"rho", checksum(last.rho)}, {"s_per", checksum(last.s_per)}};
    write_text_file((out_dir / "report.json").string(), dump_precise(report) + "\n");

    RunOutcome o;
    o.code = complete ? 0 : (code ? code : static_cast<int>(ExitCode::numeric));
    if (!complete) o.message = failure;
    return o;
}

int worst(int a, int b) { return std::max(a, b); }

int cmd_run(const std::vector<std::string>& configs, const std::string& out_override,
            std::ostream& out, std::ostream& err) {
    struct Job {
        std::string path;
        ScenarioConfig cfg;
        json echo;
        fs::path dir;
    };
    // Every config is validated before any run starts.
    std::vector<Job> jobs;
    for (const std::string& path : configs) {
        Job j{path, load_config(path), {}, {}};
        j.echo = emit_config(j.cfg);
        if (out_override.empty()) {
            j.dir = j.cfg.out_dir;
        } else if (configs.size() == 1) {
            j.dir = out_override;
        } else {
            j.dir = fs::path(out_override) / fs::path(path).stem();
        }
        jobs.push_back(std::move(j));
    }

    int threads = 1;
    if (const char* env = std::getenv("RSE_LAB_THREADS")) {
        try {
            threads = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            throw ValidationError("RSE_LAB_THREADS: expected a positive integer");
        }
    }
    threads = std::min<int>(threads, static_cast<int>(jobs.size()));

    std::vector<RunOutcome> outcomes(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                outcomes[i] = run_one(jobs[i].cfg, jobs[i].echo, jobs[i].dir);
            } catch (const Error& e) {
                outcomes[i] = {static_cast<int>(e.exit_code()), e.what()};
            } catch (const std::exception& e) {
                outcomes[i] = {static_cast<int>(ExitCode::numeric), e.what()};
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (outcomes[i].code == 0) {
            out << "ok   " << jobs[i].path << " -> " << jobs[i].dir.string() << "\n";
        } else {
            err << "fail " << jobs[i].path << ": " << outcomes[i].message << "\n";
        }
        code = worst(code, outcomes[i].code);
    }
    return code;
}

int cmd_check(const std::string& suite, bool as_json, std::uint64_t seed, std::ostream& out) {
    const std::vector<CheckResult> results = run_suite(suite, seed);
    bool all = true;
    json arr = json::array();
    for (const CheckResult& r : results) {
        all = all && r.passed;
        if (as_json) {
            arr.push_back({{"suite", r.suite},
                           {"name", r.name},
                           {"value", r.value},
                           {"tolerance", r.tolerance},
                           {"passed", r.passed},
                           {"note", r.note}});
        } else {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3e < %.1e", r.value, r.tolerance);
            out << (r.passed ? "PASS " : "FAIL ") << r.suite << "/" << r.name << "  " << buf;
            if (!r.note.empty()) out << "  (" << r.note << ")";
            out << "\n";
        }
    }
    if (as_json) {
        out << dump_precise(json{{"passed", all}, {"results", arr}}) << "\n";
    } else {
        out << (all ? "all checks passed" : "some checks FAILED") << " (" << results.size()
            << " checks)\n";
    }
    return all ? 0 : static_cast<int>(ExitCode::numeric);
}

int cmd_coeffs(int n, bool as_json, std::ostream& out) {
    if (n < 0 || n > 64) throw ValidationError("coeffs: N must be in [0, 64]");
    const std::vector<double> c = g_coefficients(n);
    if (as_json) {
        out << dump_precise(json{{"order", n}, {"coefficients", c}}) << "\n";
        return 0;
    }
    char buf[64];
    for (int i = 0; i <= n; ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g", i, c[i]);
        out << buf << "\n";
    }
    return 0;
}

int cmd_symbol(const std::string& config, std::ostream& out) {
    const ScenarioConfig cfg = load_config(config);
    const Grid g = make_grid(cfg);
    const GOperator gop(g, cfg.physics.lambda_c, cfg.g_policy);
    const bool flag = cfg.g_policy == GPolicy::projected;
    out << (g.dim() == 1 ? "k" : "kx,ky") << ",g" << (flag ? ",projected" : "") << "\n";
    char buf[80];
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int a = 0; a < g.dim(); ++a) {
            std::snprintf(buf, sizeof buf, "%.17g,", g.k_component(a)[i]);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g", gop.symbol()[i]);
        out << buf;
        if (flag) out << "," << (gop.projected_mask()[i] ? 1 : 0);
        out << "\n";
    }
    return 0;
}

int cmd_diag(const std::string& path, const std::string& policy, std::vector<double> window,
             double cutoff, std::ostream& out, std::ostream& err) {
    const Snapshot snap = read_snapshot(path);
    const GOperator gop(snap.grid, snap.physics.lambda_c, parse_policy(policy));
    IntegratorConfig defaults;
    CorrectionFilter w = defaults.window;
    if (!window.empty()) {
        if (window.size() != 2) throw ValidationError("--window: expected two values LO HI");
        w.lo = window[0];
        w.hi = window[1];
    }
    if (cutoff >= 0.0) w.kappa = cutoff;
    HydroState st = snap.state;
    if (auto warn = boundary_decay_warning(snap.grid, st.rho, "rho")) {
        err << "warning: " << *warn << "\n";
    }
    const DiagnosticsRecord r = diagnostics(snap.grid, st, snap.physics, gop, defaults.rho_floor, w);
    json j = record_json(r);
    j["projected_modes"] = gop.projected_count();
    out << dump_precise(j) << "\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rse_lab: nonlocal hydrodynamic flow lab", "rse_lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", artifact_version());

    std::vector<std::string> configs;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "integrate one or more scenarios");
    run->add_option("--config", configs, "scenario JSON (repeatable)")->required();
    run->add_option("--out", out_dir, "output directory (overrides output.dir)");

    std::string suite = "all";
    bool check_json = false;
    std::uint64_t seed = 20240601;
    auto* check = app.add_subcommand("check", "run built-in property checks");
    check->add_option("--suite", suite, "grid|gfunc|recurrence|dynamics|diagnostics|all");
    check->add_flag("--json", check_json, "machine-readable output");
    check->add_option("--seed", seed, "seed for the random fields");

    int order = 0;
    bool coeffs_json = false;
    auto* coeffs = app.add_subcommand("coeffs", "Taylor coefficients of G");
    coeffs->add_option("N", order, "highest order (<= 64)")->required();
    coeffs->add_flag("--json", coeffs_json, "machine-readable output");

    std::string symbol_config;
    auto* symbol = app.add_subcommand("symbol", "print the G symbol on a scenario grid");
    symbol->add_option("--config", symbol_config, "scenario JSON")->required();

    std::string snapshot;
    std::string policy = "strict";
    std::vector<double> window;
    double cutoff = -1.0;
    auto* diag = app.add_subcommand("diag", "diagnostics of a saved snapshot");
    diag->add_option("snapshot", snapshot, "snapshot JSON")->required();
    diag->add_option("--policy", policy, "strict|projected");
    diag->add_option("--window", window, "phase window LO HI (0 0 disables)")->expected(2);
    diag->add_option("--cutoff", cutoff, "correction cutoff on lambda_c |k| (0 disables)")
        ->check(CLI::NonNegativeNumber);

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << artifact_version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::validation);
    }

    try {
        if (*run) return cmd_run(configs, out_dir, out, err);
        if (*check) return cmd_check(suite, check_json, seed, out);
        if (*coeffs) return cmd_coeffs(order, coeffs_json, out);
        if (*symbol) return cmd_symbol(symbol_config, out);
        if (*diag) return cmd_diag(snapshot, policy, window, cutoff, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::numeric);
    }
    return 0;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace rse
