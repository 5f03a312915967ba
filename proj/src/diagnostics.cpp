#include "rse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rse/errors.hpp"

namespace rse {

namespace {

// hbar^2/2m int |grad psi|^2 for psi = e^{i kbar.x} psi_per.
double kinetic_energy(const Grid& g, const ComplexField& psi_per, const std::array<double, 2>& kbar,
                      const PhysicsParams& p) {
    const ComplexField h = g.forward(psi_per);
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double q2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double q = g.k_component(a)[i] + kbar[a];
            q2 += q * q;
        }
        s += q2 * std::norm(h[i]);
    }
    s *= g.cell_volume() / static_cast<double>(g.size());
    return 0.5 * p.hbar * p.hbar / p.mass * s;
}

double weighted(const Grid& g, const RealField& w, const RealField& f) {
    RealField prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = w[i] * f[i];
    return integrate(g, prod);
}

}  // namespace

DiagnosticsRecord observables(const Grid& g, const HydroState& s, const PhysicsParams& p) {
    DiagnosticsRecord r;
    r.dim = g.dim();
    r.t = s.t;
    r.norm = integrate(g, s.rho);
    const VectorField flux = probability_flux(g, s);
    for (int a = 0; a < g.dim(); ++a) {
        r.mean_x[a] = weighted(g, g.coords(a), s.rho);
        r.mean_p[a] = p.hbar * integrate(g, flux[a]);
    }
    r.energy = kinetic_energy(g, periodic_factor(s), s.kbar, p) +
               weighted(g, s.rho, potential_values(g, p));
    return r;
}

DiagnosticsRecord wave_observables(const Grid& g, const ComplexField& psi, const PhysicsParams& p,
                                   double t) {
    DiagnosticsRecord r;
    r.dim = g.dim();
    r.t = t;
    RealField rho(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
    r.norm = integrate(g, rho);
    const ComplexField h = g.forward(psi);
    for (int a = 0; a < g.dim(); ++a) {
        r.mean_x[a] = weighted(g, g.coords(a), rho);
        // <p> = hbar int Im(conj(psi) d psi) through Parseval.
        double s = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) s += g.k_component(a)[i] * std::norm(h[i]);
        r.mean_p[a] = p.hbar * s * g.cell_volume() / static_cast<double>(g.size());
    }
    r.energy = kinetic_energy(g, psi, {0.0, 0.0}, p) + weighted(g, rho, potential_values(g, p));
    return r;
}

RealField h_imag(const Grid& g, const HydroState& s, const PhysicsParams& p, const GOperator& gop,
                 double rho_floor, const CorrectionFilter& window) {
    RealField d = correction_divergence(g, s, p, gop, window);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] *= 0.5 * p.hbar / std::max(s.rho[i], rho_floor);
    }
    return d;
}

EhrenfestIntegrals ehrenfest_integrals(const Grid& g, const HydroState& s, const PhysicsParams& p,
                                       const GOperator& gop, double rho_floor,
                                       const CorrectionFilter& window) {
    EhrenfestIntegrals out;
    const VectorField gS = phase_gradient(g, s);
    const VectorField rho_gS = probability_flux(g, s);

    // Literal (2G - 1) forms: rho grad((2G - 1) S) = 2 rho grad((G + 1/2) S)
    // - 2 rho grad S, with the unwindowed phase Laplacian.
    const VectorField gphi = gradient(g, correction_potential(g, phase_laplacian(g, s), gop));
    VectorField flux;
    for (int a = 0; a < g.dim(); ++a) {
        flux[a].resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            flux[a][i] = 2.0 * s.rho[i] * gphi[a][i] - 2.0 * rho_gS[a][i];
        }
    }
    const RealField div_flux = divergence(g, flux);
    for (int a = 0; a < g.dim(); ++a) {
        out.I1_paper[a] = -p.hbar * weighted(g, g.coords(a), div_flux);
        out.I2_paper[a] = -p.hbar * p.hbar / p.mass * weighted(g, div_flux, gS[a]);
    }

    // Continuity-consistent forms.
    const VectorField jRM = modified_current(g, s, p, gop, window);
    const RealField HI = h_imag(g, s, p, gop, rho_floor, window);
    for (int a = 0; a < g.dim(); ++a) {
        const double mean_p = p.hbar * integrate(g, rho_gS[a]);
        out.I1_cc[a] = p.mass * integrate(g, jRM[a]) - mean_p;
        RealField integrand(g.size());
        for (std::size_t i = 0; i < integrand.size(); ++i) {
            integrand[i] = 2.0 * HI[i] * rho_gS[a][i];
        }
        out.I2_cc[a] = integrate(g, integrand);
    }
    return out;
}

DiagnosticsRecord diagnostics(const Grid& g, const HydroState& s, const PhysicsParams& p,
                              const GOperator& gop, double rho_floor, const CorrectionFilter& window) {
    DiagnosticsRecord r = observables(g, s, p);
    const EhrenfestIntegrals e = ehrenfest_integrals(g, s, p, gop, rho_floor, window);
    r.I1_paper = e.I1_paper;
    r.I2_paper = e.I2_paper;
    r.I1_cc = e.I1_cc;
    r.I2_cc = e.I2_cc;
    const RealField HI = h_imag(g, s, p, gop, rho_floor, window);
    RealField w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = s.rho[i] * std::abs(HI[i]);
    r.hi_norm = integrate(g, w);
    return r;
}

RealField spectral_shift(const Grid& g, const RealField& f, std::array<double, 2> shift) {
    // f(x + d) has transform e^{i k d} f_hat; the Nyquist mode keeps only its
    // real part so the result stays real.
    ComplexField h = g.forward(f);
    for (std::size_t i = 0; i < h.size(); ++i) {
        double phase = 0.0;
        for (int a = 0; a < g.dim(); ++a) phase += g.k_component(a)[i] * shift[a];
        h[i] *= std::polar(1.0, phase);
    }
    return g.inverse_real(h);
}

HydroState galilean_boost(const Grid& g, const HydroState& s, const PhysicsParams& p,
                          std::array<double, 2> v, double t) {
    if (p.potential.kind != Potential::Kind::none) {
        throw ValidationError("galilean_boost: only defined for free evolution (V = 0)");
    }
    for (int a = 0; a < g.dim(); ++a) {
        const double w = p.mass * v[a] * g.length(a) / (2.0 * std::numbers::pi * p.hbar);
        if (std::abs(w - std::round(w)) > 1e-9) {
            std::ostringstream os;
            os << "galilean_boost: m v L / (2 pi hbar) = " << w << " on axis " << a
               << " is not an integer; the boosted phase would not be periodic";
            throw WindingError(os.str());
        }
    }
    std::array<double, 2> d{v[0] * t, v[1] * t};
    HydroState out;
    out.t = s.t;
    out.rho = spectral_shift(g, s.rho, d);
    out.s_per = spectral_shift(g, s.s_per, d);
    double constant = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        out.kbar[a] = s.kbar[a] - p.mass * v[a] / p.hbar;
        constant += s.kbar[a] * d[a] - 0.5 * p.mass * v[a] * v[a] * t / p.hbar;
    }
    for (double& x : out.s_per) x += constant;
    return out;
}

Grid tensor_grid(const Grid& ga, const Grid& gb) {
    if (ga.dim() != 1 || gb.dim() != 1) throw ValidationError("tensor_grid: needs two 1D grids");
    return Grid(2, {ga.n(0), gb.n(0)}, {ga.length(0), gb.length(0)});
}

HydroState product_state(const HydroState& a, const HydroState& b) {
    HydroState out;
    const std::size_t na = a.rho.size();
    const std::size_t nb = b.rho.size();
    out.rho.resize(na * nb);
    out.s_per.resize(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            out.rho[i * nb + j] = a.rho[i] * b.rho[j];
            out.s_per[i * nb + j] = a.s_per[i] + b.s_per[j];
        }
    }
    out.kbar = {a.kbar[0], b.kbar[0]};
    out.t = a.t;
    return out;
}

Potential additive_potential(const Grid& ga, const Potential& va, const Grid& gb,
                             const Potential& vb, double mass) {
    using K = Potential::Kind;
    Potential out;
    const bool a_simple = va.kind != K::tabulated;
    const bool b_simple = vb.kind != K::tabulated;
    if (a_simple && b_simple) {
        if (va.kind == K::none && vb.kind == K::none) return out;
        out.kind = K::harmonic;
        out.omega = {va.kind == K::harmonic ? va.omega[0] : 0.0,
                     vb.kind == K::harmonic ? vb.omega[0] : 0.0};
        return out;
    }
    PhysicsParams pa;
    pa.mass = mass;
    pa.potential = va;
    PhysicsParams pb = pa;
    pb.potential = vb;
    const RealField Va = potential_values(ga, pa);
    const RealField Vb = potential_values(gb, pb);
    out.kind = K::tabulated;
    out.values.resize(Va.size() * Vb.size());
    for (std::size_t i = 0; i < Va.size(); ++i) {
        for (std::size_t j = 0; j < Vb.size(); ++j) out.values[i * Vb.size() + j] = Va[i] + Vb[j];
    }
    return out;
}

SeparabilityResult separability_error(const Grid& ga, const HydroState& a, const Potential& va,
                                      const Grid& gb, const HydroState& b, const Potential& vb,
                                      const PhysicsParams& base, GPolicy policy,
                                      const IntegratorConfig& cfg, double phase_mask_rel) {
    const Grid g2 = tensor_grid(ga, gb);
    PhysicsParams pa = base;
    pa.potential = va;
    PhysicsParams pb = base;
    pb.potential = vb;
    PhysicsParams p2 = base;
    p2.potential = additive_potential(ga, va, gb, vb, base.mass);

    const GOperator gop_a(ga, base.lambda_c, policy);
    const GOperator gop_b(gb, base.lambda_c, policy);
    const GOperator gop_2(g2, base.lambda_c, policy);

    const Trajectory ta = evolve(ga, a, pa, gop_a, FlowMode::modified, cfg);
    const Trajectory tb = evolve(gb, b, pb, gop_b, FlowMode::modified, cfg);
    const Trajectory t2 = evolve(g2, product_state(a, b), p2, gop_2, FlowMode::modified, cfg);

    SeparabilityResult r;
    r.complete = ta.complete && tb.complete && t2.complete;
    const std::size_t n = std::min({ta.snapshots.size(), tb.snapshots.size(), t2.snapshots.size()});
    for (std::size_t k = 0; k < n; ++k) {
        const HydroState ref = product_state(ta.snapshots[k], tb.snapshots[k]);
        const HydroState& got = t2.snapshots[k];
        const double rmax = *std::max_element(ref.rho.begin(), ref.rho.end());
        for (std::size_t i = 0; i < ref.rho.size(); ++i) {
            r.density_error = std::max(r.density_error, std::abs(got.rho[i] - ref.rho[i]));
            if (ref.rho[i] >= phase_mask_rel * rmax) {
                r.phase_error = std::max(r.phase_error, std::abs(wrap_angle(got.s_per[i] - ref.s_per[i])));
            }
        }
    }
    if (!r.complete) {
        r.density_error = INFINITY;
    }
    r.error = r.density_error + r.phase_error;
    return r;
}

}  // namespace rse
