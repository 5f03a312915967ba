#include "rse/scenario.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rse/diagnostics.hpp"
#include "rse/errors.hpp"

namespace rse {

std::string to_string(InitialSpec::Kind k) {
    using K = InitialSpec::Kind;
    switch (k) {
        case K::plane_wave: return "plane_wave";
        case K::gaussian: return "gaussian";
        case K::harmonic_ground: return "harmonic_ground";
        case K::coherent: return "coherent";
        case K::custom: return "custom";
        case K::product: return "product";
    }
    return "gaussian";
}

Grid make_grid(const ScenarioConfig& cfg) { return make_grid(cfg.dim, cfg.n_points, cfg.length); }

namespace {

double nearest_image(double d, double L) { return d - L * std::round(d / L); }

void require_axes(const std::vector<double>& v, int dim, const std::string& field) {
    if (static_cast<int>(v.size()) != dim) {
        std::ostringstream os;
        os << "initial." << field << ": expected " << dim << " entries, got " << v.size();
        throw ValidationError(os.str());
    }
}

void require_winding(const Grid& g, int axis, double kbar) {
    const double w = kbar * g.length(axis) / (2.0 * std::numbers::pi);
    if (std::abs(w - std::round(w)) > 1e-9) {
        std::ostringstream os;
        os << "initial.kbar[" << axis << "] = " << kbar << " gives winding " << w
           << " on L = " << g.length(axis) << "; it must be an integer";
        throw WindingError(os.str());
    }
}

// 1D factor of a separable initial condition on one axis of g.
struct Factor {
    RealField rho;
    RealField s;
    double kbar = 0.0;
};

Factor gaussian_factor(const RealField& x, double L, double center, double sigma, double kbar,
                       double t, const PhysicsParams& p) {
    const double t_spread = 2.0 * p.mass * sigma * sigma / p.hbar;
    const double tau = t / t_spread;
    const double sig_t2 = sigma * sigma * (1.0 + tau * tau);
    const double v = p.hbar * kbar / p.mass;
    Factor f;
    f.kbar = kbar;
    f.rho.resize(x.size());
    f.s.resize(x.size());
    const double constant =
        -0.5 * std::atan(tau) - kbar * center - 0.5 * p.hbar * kbar * kbar * t / p.mass;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = nearest_image(x[i] - center - v * t, L);
        f.rho[i] = std::exp(-xi * xi / (2.0 * sig_t2)) / std::sqrt(2.0 * std::numbers::pi * sig_t2);
        f.s[i] = xi * xi * tau / (4.0 * sigma * sigma * (1.0 + tau * tau)) + constant;
    }
    return f;
}

Factor ground_factor(const RealField& x, double L, double omega, double shift,
                     const PhysicsParams& p) {
    const double a = p.mass * omega / p.hbar;
    Factor f;
    f.rho.resize(x.size());
    f.s.assign(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = nearest_image(x[i] - shift, L);
        f.rho[i] = std::sqrt(a / std::numbers::pi) * std::exp(-a * xi * xi);
    }
    return f;
}

HydroState from_factors(const Grid& g, const std::vector<Factor>& fs) {
    HydroState st;
    st.rho.assign(g.size(), 1.0);
    st.s_per.assign(g.size(), 0.0);
    for (int i = 0; i < g.n(0); ++i) {
        for (int j = 0; j < g.n(1); ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * g.n(1) + j;
            const int ij[2] = {i, j};
            for (int a = 0; a < g.dim(); ++a) {
                st.rho[idx] *= fs[a].rho[ij[a]];
                st.s_per[idx] += fs[a].s[ij[a]];
            }
        }
    }
    for (int a = 0; a < g.dim(); ++a) st.kbar[a] = fs[a].kbar;
    return st;
}

// Coordinates of one axis as a 1D list.
RealField axis_coords(const Grid& g, int axis) {
    RealField x(g.n(axis));
    for (int i = 0; i < g.n(axis); ++i) x[i] = -0.5 * g.length(axis) + i * g.dx(axis);
    return x;
}

}  // namespace

HydroState free_gaussian_1d(const Grid& g, double center, double sigma, double kbar, double t,
                            const PhysicsParams& p) {
    if (g.dim() != 1) throw ValidationError("free_gaussian_1d: needs a 1D grid");
    const Factor f = gaussian_factor(axis_coords(g, 0), g.length(0), center, sigma, kbar, t, p);
    HydroState st;
    st.rho = f.rho;
    st.s_per = f.s;
    st.kbar = {kbar, 0.0};
    st.t = 0.0;
    return st;
}

ComplexField free_gaussian_psi(const Grid& g, double center, double sigma, double kbar, double t,
                               const PhysicsParams& p) {
    return reconstruct(g, free_gaussian_1d(g, center, sigma, kbar, t, p));
}

HydroState build_initial(const Grid& g, const InitialSpec& spec, const PhysicsParams& p) {
    using K = InitialSpec::Kind;
    const int dim = g.dim();
    std::vector<Factor> fs(dim);
    switch (spec.kind) {
        case K::plane_wave: {
            require_axes(spec.kbar, dim, "kbar");
            for (int a = 0; a < dim; ++a) {
                require_winding(g, a, spec.kbar[a]);
                fs[a].rho.assign(g.n(a), 1.0 / g.length(a));
                fs[a].s.assign(g.n(a), 0.0);
                fs[a].kbar = spec.kbar[a];
            }
            return from_factors(g, fs);
        }
        case K::gaussian: {
            require_axes(spec.center, dim, "center");
            require_axes(spec.sigma, dim, "sigma");
            std::vector<double> kbar = spec.kbar.empty() ? std::vector<double>(dim, 0.0) : spec.kbar;
            require_axes(kbar, dim, "kbar");
            for (int a = 0; a < dim; ++a) {
                if (!(spec.sigma[a] > 0.0)) throw ValidationError("initial.sigma must be positive");
                require_winding(g, a, kbar[a]);
                fs[a] = gaussian_factor(axis_coords(g, a), g.length(a), spec.center[a], spec.sigma[a],
                                        kbar[a], spec.t0, p);
            }
            return from_factors(g, fs);
        }
        case K::harmonic_ground:
        case K::coherent: {
            require_axes(spec.omega, dim, "omega");
            std::vector<double> shift(dim, 0.0);
            if (spec.kind == K::coherent) {
                require_axes(spec.displacement, dim, "displacement");
                shift = spec.displacement;
            }
            for (int a = 0; a < dim; ++a) {
                if (!(spec.omega[a] > 0.0)) throw ValidationError("initial.omega must be positive");
                fs[a] = ground_factor(axis_coords(g, a), g.length(a), spec.omega[a], shift[a], p);
            }
            return from_factors(g, fs);
        }
        case K::custom: {
            if (spec.rho.size() != g.size() || spec.s_per.size() != g.size()) {
                throw ValidationError("initial.rho / initial.s_per: expected " +
                                      std::to_string(g.size()) + " samples each");
            }
            std::vector<double> kbar = spec.kbar.empty() ? std::vector<double>(dim, 0.0) : spec.kbar;
            require_axes(kbar, dim, "kbar");
            HydroState st;
            st.rho = spec.rho;
            st.s_per = spec.s_per;
            for (int a = 0; a < dim; ++a) {
                require_winding(g, a, kbar[a]);
                st.kbar[a] = kbar[a];
            }
            for (double r : st.rho) {
                if (!(r >= 0.0)) throw ValidationError("initial.rho must be non-negative");
            }
            return st;
        }
        case K::product: {
            if (dim != 2 || !spec.x || !spec.y) {
                throw ValidationError("initial.product needs a 2D grid and both x and y factors");
            }
            const Grid gx(1, {g.n(0), 1}, {g.length(0), 1.0});
            const Grid gy(1, {g.n(1), 1}, {g.length(1), 1.0});
            return product_state(build_initial(gx, *spec.x, p), build_initial(gy, *spec.y, p));
        }
    }
    throw ValidationError("initial.kind: unsupported");
}

void validate_config(const ScenarioConfig& cfg) {
    const Grid g = make_grid(cfg);
    validate(cfg.physics);
    if (cfg.physics.potential.kind == Potential::Kind::tabulated &&
        cfg.physics.potential.values.size() != g.size()) {
        throw ValidationError("physics.potential.values: expected " + std::to_string(g.size()) +
                              " samples");
    }
    if (cfg.mode != FlowMode::splitstep) {
        // Strict policy fails here, before any field is allocated for the run.
        GOperator(g, cfg.physics.lambda_c, cfg.g_policy);
        check_time_step(g, cfg.physics, cfg.integrator);
    } else {
        if (!(cfg.integrator.dt > 0.0)) throw ValidationError("integrator.dt must be positive");
        if (cfg.integrator.save_every < 1) {
            throw ValidationError("integrator.save_every must be >= 1");
        }
    }
    if (cfg.integrator.window.window_enabled() &&
        !(cfg.integrator.window.lo > 0.0 && cfg.integrator.window.lo < cfg.integrator.window.hi)) {
        throw ValidationError("integrator.phase_window: need 0 < lo < hi (or [0, 0] to disable)");
    }
    if (!(cfg.integrator.window.kappa >= 0.0)) {
        throw ValidationError("integrator.correction_cutoff must be >= 0 (0 disables)");
    }
    build_initial(g, cfg.initial, cfg.physics);
}

}  // namespace rse
