#include "rse/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rse/errors.hpp"

namespace rse {

namespace {

// Typed access to one JSON object with field-path error messages.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(where() + ": expected an object");
    }

    void only(const std::set<std::string>& allowed) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!allowed.count(it.key())) {
                throw ValidationError(child(it.key()) + ": unknown field");
            }
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) const {
        if (!j_.contains(key)) throw ValidationError(child(key) + ": required field missing");
        return j_.at(key);
    }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) throw ValidationError(child(key) + ": expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    long long integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ValidationError(child(key) + ": expected an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::string text(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) throw ValidationError(child(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    std::vector<double> numbers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array()) throw ValidationError(child(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                throw ValidationError(child(key) + "[" + std::to_string(i) + "]: expected a number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        return has(key) ? numbers(key) : fallback;
    }

    std::vector<int> integers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array()) throw ValidationError(child(key) + ": expected an array of integers");
        std::vector<int> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer()) {
                throw ValidationError(child(key) + "[" + std::to_string(i) +
                                      "]: expected an integer");
            }
            out.push_back(v[i].get<int>());
        }
        return out;
    }

    Fields object(const std::string& key) const { return Fields(raw(key), child(key)); }

    std::string child(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    std::string where() const { return path_.empty() ? "config" : path_; }

private:
    const json& j_;
    std::string path_;
};

// Re-raises any validation failure with the field path prepended if the
// message does not already carry one.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path, 0) == 0) throw;
        throw ValidationError(path + ": " + msg);
    }
}

InitialSpec parse_initial(const Fields& f, int dim) {
    using K = InitialSpec::Kind;
    InitialSpec spec;
    const std::string kind = f.text("kind");
    if (kind == "plane_wave") {
        f.only({"kind", "kbar"});
        spec.kind = K::plane_wave;
        spec.kbar = f.numbers("kbar");
    } else if (kind == "gaussian") {
        f.only({"kind", "center", "sigma", "kbar", "t0"});
        spec.kind = K::gaussian;
        spec.center = f.numbers("center", std::vector<double>(dim, 0.0));
        spec.sigma = f.numbers("sigma");
        spec.kbar = f.numbers("kbar", std::vector<double>(dim, 0.0));
        spec.t0 = f.number("t0", 0.0);
    } else if (kind == "harmonic_ground") {
        f.only({"kind", "omega"});
        spec.kind = K::harmonic_ground;
        spec.omega = f.numbers("omega");
    } else if (kind == "coherent") {
        f.only({"kind", "omega", "displacement"});
        spec.kind = K::coherent;
        spec.omega = f.numbers("omega");
        spec.displacement = f.numbers("displacement");
    } else if (kind == "custom") {
        f.only({"kind", "rho", "s_per", "kbar"});
        spec.kind = K::custom;
        spec.rho = f.numbers("rho");
        spec.s_per = f.numbers("s_per");
        spec.kbar = f.numbers("kbar", std::vector<double>(dim, 0.0));
    } else if (kind == "product") {
        f.only({"kind", "x", "y"});
        spec.kind = K::product;
        spec.x = std::make_shared<InitialSpec>(parse_initial(f.object("x"), 1));
        spec.y = std::make_shared<InitialSpec>(parse_initial(f.object("y"), 1));
    } else {
        throw ValidationError(f.child("kind") + ": unknown initial condition \"" + kind + "\"");
    }
    return spec;
}

json initial_json(const InitialSpec& s) {
    using K = InitialSpec::Kind;
    json j;
    j["kind"] = to_string(s.kind);
    switch (s.kind) {
        case K::plane_wave: j["kbar"] = s.kbar; break;
        case K::gaussian:
            j["center"] = s.center;
            j["sigma"] = s.sigma;
            j["kbar"] = s.kbar;
            j["t0"] = s.t0;
            break;
        case K::harmonic_ground: j["omega"] = s.omega; break;
        case K::coherent:
            j["omega"] = s.omega;
            j["displacement"] = s.displacement;
            break;
        case K::custom:
            j["rho"] = s.rho;
            j["s_per"] = s.s_per;
            j["kbar"] = s.kbar;
            break;
        case K::product:
            j["x"] = initial_json(*s.x);
            j["y"] = initial_json(*s.y);
            break;
    }
    return j;
}

void dump_value(std::ostringstream& os, const json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string pad_close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{" << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << "," << nl;
                first = false;
                os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
                dump_value(os, it.value(), indent, depth + 1);
            }
            os << nl << pad_close << "}";
            return;
        }
        case json::value_t::array: {
            // Numeric arrays stay on one line; they can be long.
            os << "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",";
                dump_value(os, j[i], indent, depth + 1);
            }
            os << "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s = buf;
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            os << s;
            return;
        }
        default: os << j.dump(); return;
    }
}

}  // namespace

std::string dump_precise(const json& j, int indent) {
    std::ostringstream os;
    dump_value(os, j, indent, 0);
    return os.str();
}

ScenarioConfig parse_config(const json& doc) {
    ScenarioConfig cfg;
    const Fields root(doc, "");
    root.only({"grid", "physics", "mode", "initial", "integrator", "g_policy", "seed", "output"});

    const Fields grid = root.object("grid");
    grid.only({"dim", "n_points", "length"});
    cfg.dim = static_cast<int>(grid.integer("dim"));
    cfg.n_points = grid.integers("n_points");
    cfg.length = grid.numbers("length");
    at_path("grid", [&] { return make_grid(cfg); });

    if (root.has("physics")) {
        const Fields ph = root.object("physics");
        ph.only({"hbar", "mass", "lambda_c", "potential"});
        cfg.physics.hbar = ph.number("hbar", 1.0);
        cfg.physics.mass = ph.number("mass", 1.0);
        cfg.physics.lambda_c = ph.number("lambda_c", 0.1);
        if (ph.has("potential")) {
            const Fields pot = ph.object("potential");
            const std::string kind = pot.text("kind");
            if (kind == "none") {
                pot.only({"kind"});
                cfg.physics.potential.kind = Potential::Kind::none;
            } else if (kind == "harmonic") {
                pot.only({"kind", "omega"});
                cfg.physics.potential.kind = Potential::Kind::harmonic;
                const std::vector<double> w = pot.numbers("omega");
                if (static_cast<int>(w.size()) != cfg.dim) {
                    throw ValidationError("physics.potential.omega: expected one entry per axis");
                }
                for (int a = 0; a < cfg.dim; ++a) cfg.physics.potential.omega[a] = w[a];
            } else if (kind == "tabulated") {
                pot.only({"kind", "values"});
                cfg.physics.potential.kind = Potential::Kind::tabulated;
                cfg.physics.potential.values = pot.numbers("values");
            } else {
                throw ValidationError("physics.potential.kind: unknown potential \"" + kind + "\"");
            }
        }
        at_path("physics", [&] { validate(cfg.physics); });
    }

    cfg.mode = at_path("mode", [&] { return parse_mode(root.text("mode", "modified")); });
    cfg.g_policy = at_path("g_policy", [&] { return parse_policy(root.text("g_policy", "strict")); });
    if (root.has("seed")) {
        const long long s = root.integer("seed");
        if (s < 0) throw ValidationError("seed: must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }

    cfg.initial = parse_initial(root.object("initial"), cfg.dim);

    if (root.has("integrator")) {
        const Fields in = root.object("integrator");
        in.only({"dt", "t_final", "save_every", "rho_floor", "cfl_constant", "phase_window",
                 "correction_cutoff"});
        const Grid g = make_grid(cfg);
        // Default dt: the stability limit itself.
        const double cfl = in.number("cfl_constant", 0.1);
        cfg.integrator.cfl_constant = cfl;
        cfg.integrator.dt = in.number("dt", max_stable_dt(g, cfg.physics, cfl));
        cfg.integrator.t_final = in.number("t_final", 0.0);
        cfg.integrator.save_every = static_cast<int>(in.integer("save_every", 1));
        cfg.integrator.rho_floor = in.number("rho_floor", kDefaultRhoFloor);
        if (in.has("phase_window")) {
            const std::vector<double> w = in.numbers("phase_window");
            if (w.size() != 2) throw ValidationError("integrator.phase_window: expected [lo, hi]");
            cfg.integrator.window.lo = w[0];
            cfg.integrator.window.hi = w[1];
        }
        cfg.integrator.window.kappa =
            in.number("correction_cutoff", cfg.integrator.window.kappa);
    } else {
        cfg.integrator.dt = max_stable_dt(make_grid(cfg), cfg.physics, cfg.integrator.cfl_constant);
    }

    if (root.has("output")) {
        const Fields out = root.object("output");
        out.only({"dir"});
        cfg.out_dir = out.text("dir", "out");
    }

    validate_config(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    const std::string text = read_text_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": not a valid JSON document (" + e.what() + ")");
    }
    return parse_config(doc);
}

json emit_config(const ScenarioConfig& cfg) {
    json j;
    j["grid"] = {{"dim", cfg.dim}, {"n_points", cfg.n_points}, {"length", cfg.length}};
    json pot;
    pot["kind"] = to_string(cfg.physics.potential.kind);
    if (cfg.physics.potential.kind == Potential::Kind::harmonic) {
        pot["omega"] = std::vector<double>(cfg.physics.potential.omega.begin(),
                                           cfg.physics.potential.omega.begin() + cfg.dim);
    } else if (cfg.physics.potential.kind == Potential::Kind::tabulated) {
        pot["values"] = cfg.physics.potential.values;
    }
    j["physics"] = {{"hbar", cfg.physics.hbar},
                    {"mass", cfg.physics.mass},
                    {"lambda_c", cfg.physics.lambda_c},
                    {"potential", pot}};
    j["mode"] = to_string(cfg.mode);
    j["initial"] = initial_json(cfg.initial);
    j["integrator"] = {{"dt", cfg.integrator.dt},
                       {"t_final", cfg.integrator.t_final},
                       {"save_every", cfg.integrator.save_every},
                       {"rho_floor", cfg.integrator.rho_floor},
                       {"cfl_constant", cfg.integrator.cfl_constant},
                       {"phase_window", {cfg.integrator.window.lo, cfg.integrator.window.hi}},
                       {"correction_cutoff", cfg.integrator.window.kappa}};
    j["g_policy"] = to_string(cfg.g_policy);
    j["seed"] = cfg.seed;
    j["output"] = {{"dir", cfg.out_dir}};
    return j;
}

std::vector<std::string> series_columns(int dim) {
    std::vector<std::string> cols{"t", "norm"};
    auto per_axis = [&](const std::string& name) {
        cols.push_back(name);
        if (dim == 2) cols.push_back(name + "_y");
    };
    cols.push_back("mean_x");
    if (dim == 2) cols.push_back("mean_y");
    per_axis("mean_p");
    cols.push_back("energy");
    per_axis("I1_paper");
    per_axis("I1_cc");
    per_axis("I2_paper");
    per_axis("I2_cc");
    cols.push_back("hi_norm");
    return cols;
}

void write_series_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
    const int dim = records.empty() ? 1 : records.front().dim;
    const auto cols = series_columns(dim);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    char buf[32];
    auto put = [&](double v, bool first = false) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << (first ? "" : ",") << buf;
    };
    for (const auto& r : records) {
        put(r.t, true);
        put(r.norm);
        for (int a = 0; a < dim; ++a) put(r.mean_x[a]);
        for (int a = 0; a < dim; ++a) put(r.mean_p[a]);
        put(r.energy);
        for (int a = 0; a < dim; ++a) put(r.I1_paper[a]);
        for (int a = 0; a < dim; ++a) put(r.I1_cc[a]);
        for (int a = 0; a < dim; ++a) put(r.I2_paper[a]);
        for (int a = 0; a < dim; ++a) put(r.I2_cc[a]);
        put(r.hi_norm);
        os << "\n";
    }
}

json snapshot_json(const Grid& g, const PhysicsParams& p, const HydroState& s) {
    json j;
    std::vector<int> n;
    std::vector<double> L;
    for (int a = 0; a < g.dim(); ++a) {
        n.push_back(g.n(a));
        L.push_back(g.length(a));
    }
    j["grid"] = {{"dim", g.dim()}, {"n_points", n}, {"length", L}};
    json pot{{"kind", to_string(p.potential.kind)}};
    if (p.potential.kind == Potential::Kind::harmonic) {
        pot["omega"] = std::vector<double>(p.potential.omega.begin(), p.potential.omega.begin() + g.dim());
    } else if (p.potential.kind == Potential::Kind::tabulated) {
        pot["values"] = p.potential.values;
    }
    j["physics"] = {{"hbar", p.hbar}, {"mass", p.mass}, {"lambda_c", p.lambda_c}, {"potential", pot}};
    j["t"] = s.t;
    j["kbar"] = std::vector<double>(s.kbar.begin(), s.kbar.begin() + g.dim());
    j["rho"] = s.rho;
    j["s_per"] = s.s_per;
    return j;
}

void write_snapshot(const std::string& path, const Grid& g, const PhysicsParams& p,
                    const HydroState& s) {
    write_text_file(path, dump_precise(snapshot_json(g, p, s)) + "\n");
}

Snapshot read_snapshot(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": not a valid JSON document (" + e.what() + ")");
    }
    const Fields root(doc, "");
    root.only({"grid", "physics", "t", "kbar", "rho", "s_per"});
    const Fields gr = root.object("grid");
    gr.only({"dim", "n_points", "length"});
    const Grid g = make_grid(static_cast<int>(gr.integer("dim")), gr.integers("n_points"),
                             gr.numbers("length"));
    PhysicsParams p;
    const Fields ph = root.object("physics");
    ph.only({"hbar", "mass", "lambda_c", "potential"});
    p.hbar = ph.number("hbar");
    p.mass = ph.number("mass");
    p.lambda_c = ph.number("lambda_c");
    const Fields pot = ph.object("potential");
    const std::string kind = pot.text("kind");
    if (kind == "harmonic") {
        p.potential.kind = Potential::Kind::harmonic;
        const auto w = pot.numbers("omega");
        for (std::size_t a = 0; a < w.size() && a < 2; ++a) p.potential.omega[a] = w[a];
    } else if (kind == "tabulated") {
        p.potential.kind = Potential::Kind::tabulated;
        p.potential.values = pot.numbers("values");
    } else if (kind != "none") {
        throw ValidationError("physics.potential.kind: unknown potential \"" + kind + "\"");
    }
    HydroState s;
    s.t = root.number("t");
    const auto kb = root.numbers("kbar");
    for (std::size_t a = 0; a < kb.size() && a < 2; ++a) s.kbar[a] = kb[a];
    s.rho = root.numbers("rho");
    s.s_per = root.numbers("s_per");
    if (s.rho.size() != g.size() || s.s_per.size() != g.size()) {
        throw ValidationError("snapshot: rho / s_per sample count does not match the grid");
    }
    return Snapshot{g, p, s};
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw IoError("write to " + path + " failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json record_json(const DiagnosticsRecord& r) {
    auto axes = [&](const std::array<double, 2>& v) {
        return std::vector<double>(v.begin(), v.begin() + r.dim);
    };
    return json{{"t", r.t},
                {"norm", r.norm},
                {"mean_x", axes(r.mean_x)},
                {"mean_p", axes(r.mean_p)},
                {"energy", r.energy},
                {"I1_paper", axes(r.I1_paper)},
                {"I1_cc", axes(r.I1_cc)},
                {"I2_paper", axes(r.I2_paper)},
                {"I2_cc", axes(r.I2_cc)},
                {"hi_norm", r.hi_norm}};
}

}  // namespace rse
