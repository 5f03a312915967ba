#include "rse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rse/diagnostics.hpp"
#include "rse/errors.hpp"

namespace rse {

std::string to_string(FlowMode m) {
    switch (m) {
        case FlowMode::modified: return "modified";
        case FlowMode::linear: return "linear";
        case FlowMode::splitstep: return "splitstep";
    }
    return "modified";
}

FlowMode parse_mode(const std::string& s) {
    if (s == "modified") return FlowMode::modified;
    if (s == "linear") return FlowMode::linear;
    if (s == "splitstep") return FlowMode::splitstep;
    throw ValidationError("mode: expected \"modified\", \"linear\" or \"splitstep\", got \"" + s +
                          "\"");
}

double max_stable_dt(const Grid& g, const PhysicsParams& p, double cfl_constant) {
    double dx = g.dx(0);
    for (int a = 1; a < g.dim(); ++a) dx = std::min(dx, g.dx(a));
    return cfl_constant * p.mass * dx * dx / p.hbar;
}

void check_time_step(const Grid& g, const PhysicsParams& p, const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ValidationError("integrator.dt must be positive");
    if (!(cfg.t_final >= 0.0)) throw ValidationError("integrator.t_final must be >= 0");
    if (cfg.save_every < 1) throw ValidationError("integrator.save_every must be >= 1");
    if (!(cfg.rho_floor > 0.0)) throw ValidationError("integrator.rho_floor must be positive");
    if (!(cfg.cfl_constant > 0.0)) throw ValidationError("integrator.cfl_constant must be positive");
    const double limit = max_stable_dt(g, p, cfg.cfl_constant);
    // Relative slack so that dt chosen exactly at the limit is accepted.
    if (cfg.dt > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "integrator.dt = " << cfg.dt << " exceeds the stability limit C m dx^2 / hbar = "
           << limit;
        throw ValidationError(os.str());
    }
}

int step_count(const IntegratorConfig& cfg) {
    return static_cast<int>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
}

namespace {

void require_finite(const RealField& f, const char* what) {
    for (double v : f) {
        if (!std::isfinite(v)) throw NonFiniteError(std::string("non-finite value in ") + what);
    }
}

// Multiplier -|k + kbar|^2: the Laplacian acting on e^{i kbar.x} psi_per,
// expressed on psi_per.
RealField shifted_laplacian_symbol(const Grid& g, const std::array<double, 2>& kbar) {
    RealField sym(g.size());
    for (std::size_t i = 0; i < sym.size(); ++i) {
        double q2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double q = g.k_component(a)[i] + kbar[a];
            q2 += q * q;
        }
        sym[i] = -q2;
    }
    return sym;
}

}  // namespace

HydroRhs rhs_hydro(const Grid& g, const HydroState& s, const PhysicsParams& p,
                   const GOperator& gop, FlowMode mode, double rho_floor,
                   const CorrectionFilter& window) {
    if (mode == FlowMode::splitstep) {
        throw ValidationError("rhs_hydro: splitstep is a wave-function scheme, not a hydro mode");
    }
    const ComplexField psi = periodic_factor(s);
    const ComplexField lap = apply_symbol(g, psi, shifted_laplacian_symbol(g, s.kbar));
    const RealField V = potential_values(g, p);

    const double hm = p.hbar / p.mass;
    HydroRhs out{RealField(g.size()), RealField(g.size())};
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const cplx w = std::conj(psi[i]) * lap[i];
        out.drho_dt[i] = -hm * w.imag();
        out.ds_dt[i] = 0.5 * hm * w.real() / std::max(s.rho[i], rho_floor) - V[i] / p.hbar;
    }
    if (mode == FlowMode::modified) {
        // j_RM = j_Sch - dj, so -div j_RM = -div j_Sch + div dj.
        const RealField div_dj = correction_divergence(g, s, p, gop, window);
        for (std::size_t i = 0; i < div_dj.size(); ++i) out.drho_dt[i] += div_dj[i];
    }
    require_finite(out.drho_dt, "drho/dt");
    require_finite(out.ds_dt, "ds/dt");
    return out;
}

HydroState step_rk4(const Grid& g, const HydroState& s, const PhysicsParams& p,
                    const GOperator& gop, double dt, FlowMode mode, double rho_floor,
                    const CorrectionFilter& window) {
    auto stage = [&](const HydroState& base, const HydroRhs& k, double h) {
        HydroState out = base;
        for (std::size_t i = 0; i < out.rho.size(); ++i) {
            out.rho[i] += h * k.drho_dt[i];
            out.s_per[i] += h * k.ds_dt[i];
        }
        out.t += h;
        return out;
    };
    const HydroRhs k1 = rhs_hydro(g, s, p, gop, mode, rho_floor, window);
    const HydroRhs k2 = rhs_hydro(g, stage(s, k1, 0.5 * dt), p, gop, mode, rho_floor, window);
    const HydroRhs k3 = rhs_hydro(g, stage(s, k2, 0.5 * dt), p, gop, mode, rho_floor, window);
    const HydroRhs k4 = rhs_hydro(g, stage(s, k3, dt), p, gop, mode, rho_floor, window);
    HydroState out = s;
    const double c = dt / 6.0;
    for (std::size_t i = 0; i < out.rho.size(); ++i) {
        out.rho[i] += c * (k1.drho_dt[i] + 2.0 * k2.drho_dt[i] + 2.0 * k3.drho_dt[i] + k4.drho_dt[i]);
        out.s_per[i] += c * (k1.ds_dt[i] + 2.0 * k2.ds_dt[i] + 2.0 * k3.ds_dt[i] + k4.ds_dt[i]);
    }
    out.t = s.t + dt;
    require_finite(out.rho, "rho");
    require_finite(out.s_per, "s_per");
    return out;
}

Trajectory evolve(const Grid& g, const HydroState& initial, const PhysicsParams& p,
                  const GOperator& gop, FlowMode mode, const IntegratorConfig& cfg) {
    check_time_step(g, p, cfg);
    Trajectory traj;
    if (auto w = boundary_decay_warning(g, initial.rho, "rho")) traj.warnings.push_back(*w);

    auto record = [&](const HydroState& st) {
        traj.snapshots.push_back(st);
        traj.records.push_back(diagnostics(g, st, p, gop, cfg.rho_floor, cfg.window));
    };
    record(initial);

    const int steps = step_count(cfg);
    HydroState cur = initial;
    const double t0 = initial.t;
    double norm_prev = integrate(g, cur.rho);
    for (int n = 1; n <= steps; ++n) {
        const double h = (t0 + std::min(n * cfg.dt, cfg.t_final)) - cur.t;
        try {
            HydroState next = step_rk4(g, cur, p, gop, h, mode, cfg.rho_floor, cfg.window);
            const double norm = integrate(g, next.rho);
            if (std::abs(norm - norm_prev) > 1e-6) {
                std::ostringstream os;
                os << "norm defect " << std::abs(norm - norm_prev) << " in one step at t = "
                   << next.t;
                throw StabilityError(os.str());
            }
            norm_prev = norm;
            cur = std::move(next);
        } catch (const Error& e) {
            traj.complete = false;
            traj.failure = e.what();
            traj.failure_code = static_cast<int>(e.exit_code());
            record(cur);
            return traj;
        }
        if (n % cfg.save_every == 0 || n == steps) record(cur);
    }
    return traj;
}

ComplexField splitstep_step(const Grid& g, const ComplexField& psi, const PhysicsParams& p,
                            const RealField& V, double dt) {
    ComplexField out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        out[i] = psi[i] * std::polar(1.0, -0.5 * dt * V[i] / p.hbar);
    }
    ComplexField h = g.forward(out);
    const double c = -0.5 * p.hbar * dt / p.mass;
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= std::polar(1.0, c * g.k_squared()[i]);
    out = g.inverse(h);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] *= std::polar(1.0, -0.5 * dt * V[i] / p.hbar);
    }
    return out;
}

WaveTrajectory evolve_splitstep_linear(const Grid& g, const ComplexField& psi0,
                                       const PhysicsParams& p, const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ValidationError("integrator.dt must be positive");
    if (cfg.save_every < 1) throw ValidationError("integrator.save_every must be >= 1");
    WaveTrajectory traj;
    RealField rho0(psi0.size());
    for (std::size_t i = 0; i < psi0.size(); ++i) rho0[i] = std::norm(psi0[i]);
    const double norm0 = integrate(g, rho0);
    if (std::abs(norm0 - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "splitstep: initial state is not normalized (norm = " << norm0 << ")";
        throw ValidationError(os.str());
    }
    if (auto w = boundary_decay_warning(g, rho0, "rho")) traj.warnings.push_back(*w);

    const RealField V = potential_values(g, p);
    auto record = [&](const ComplexField& psi, double t) {
        traj.times.push_back(t);
        traj.snapshots.push_back(psi);
        traj.records.push_back(wave_observables(g, psi, p, t));
    };
    ComplexField psi = psi0;
    double t = 0.0;
    record(psi, t);
    const int steps = step_count(cfg);
    for (int n = 1; n <= steps; ++n) {
        const double h = std::min(n * cfg.dt, cfg.t_final) - t;
        psi = splitstep_step(g, psi, p, V, h);
        t += h;
        for (const auto& v : psi) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                traj.complete = false;
                traj.failure = "non-finite value in psi";
                traj.failure_code = static_cast<int>(ExitCode::numeric);
                return traj;
            }
        }
        if (n % cfg.save_every == 0 || n == steps) record(psi, t);
    }
    return traj;
}

}  // namespace rse
