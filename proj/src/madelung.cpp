#include "rse/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rse/errors.hpp"

namespace rse {

std::string to_string(Potential::Kind k) {
    switch (k) {
        case Potential::Kind::none: return "none";
        case Potential::Kind::harmonic: return "harmonic";
        case Potential::Kind::tabulated: return "tabulated";
    }
    return "none";
}

void validate(const PhysicsParams& p) {
    if (!(p.hbar > 0.0)) throw ValidationError("physics.hbar must be positive");
    if (!(p.mass > 0.0)) throw ValidationError("physics.mass must be positive");
    if (!(p.lambda_c > 0.0)) throw ValidationError("physics.lambda_c must be positive");
}

RealField potential_values(const Grid& g, const PhysicsParams& p) {
    RealField v(g.size(), 0.0);
    switch (p.potential.kind) {
        case Potential::Kind::none: break;
        case Potential::Kind::harmonic:
            for (int a = 0; a < g.dim(); ++a) {
                const double w = p.potential.omega[a];
                const RealField& x = g.coords(a);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.5 * p.mass * w * w * x[i] * x[i];
            }
            break;
        case Potential::Kind::tabulated:
            if (p.potential.values.size() != g.size()) {
                throw ValidationError("physics.potential.values: expected " +
                                      std::to_string(g.size()) + " samples, got " +
                                      std::to_string(p.potential.values.size()));
            }
            v = p.potential.values;
            break;
    }
    return v;
}

VectorField phase_gradient(const Grid& g, const HydroState& s) {
    VectorField flux = probability_flux(g, s);
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < flux[a].size(); ++i) flux[a][i] /= std::max(s.rho[i], 1e-300);
    }
    return flux;
}

namespace {

// Unwrapped phase increments along one lattice line starting at `start`
// with stride `stride`; returns the accumulated phase around the loop.
double unwrap_line(const ComplexField& psi, std::size_t start, std::size_t stride, int n,
                   RealField& phase) {
    double acc = phase[start];
    for (int i = 1; i <= n; ++i) {
        const std::size_t prev = start + (i - 1) * stride;
        const std::size_t cur = start + (i % n) * stride;
        acc += std::arg(psi[cur] * std::conj(psi[prev]));
        if (i < n) phase[cur] = acc;
    }
    return acc - phase[start];
}

int winding_number(double loop_phase, const char* axis_name) {
    const double w = loop_phase / (2.0 * std::numbers::pi);
    const double wi = std::round(w);
    if (std::abs(w - wi) > 1e-6) {
        std::ostringstream os;
        os << "decompose: phase around the " << axis_name << " axis is " << w
           << " x 2pi, not an integer winding";
        throw WindingError(os.str());
    }
    return static_cast<int>(wi);
}

// Phase accumulated around every lattice line, integrated from the spectral
// phase gradient Im(conj(psi) grad psi) / |psi|^2. A sum of wrapped
// increments always closes on a multiple of 2 pi; this integral only does so
// when the sampled phase is a resolved periodic field, so a seam left by a
// fractional winding shows up as a non-integer loop.
void check_loop_integrals(const Grid& g, const ComplexField& psi, const std::array<int, 2>& winding) {
    RealField re(psi.size()), im(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        re[i] = psi[i].real();
        im[i] = psi[i].imag();
    }
    const VectorField dre = gradient(g, re);
    const VectorField dim = gradient(g, im);
    const int n0 = g.n(0);
    const int n1 = g.n(1);
    for (int a = 0; a < g.dim(); ++a) {
        const int lines = g.dim() == 1 ? 1 : (a == 0 ? n1 : n0);
        const int along = a == 0 ? n0 : n1;
        const std::size_t stride = (g.dim() == 2 && a == 0) ? static_cast<std::size_t>(n1) : 1;
        for (int l = 0; l < lines; ++l) {
            const std::size_t start = (g.dim() == 2 && a == 1) ? static_cast<std::size_t>(l) * n1 : l;
            double loop = 0.0;
            for (int i = 0; i < along; ++i) {
                const std::size_t k = start + i * stride;
                loop += (re[k] * dim[a][k] - im[k] * dre[a][k]) / std::norm(psi[k]);
            }
            loop *= g.dx(a);
            const double w = loop / (2.0 * std::numbers::pi);
            if (std::abs(w - winding[a]) > 1e-6) {
                std::ostringstream os;
                os << "decompose: phase around the " << (a == 0 ? "x" : "y") << " axis is " << w
                   << " x 2pi, not an integer winding";
                throw WindingError(os.str());
            }
        }
    }
}

}  // namespace

HydroState decompose(const Grid& g, const ComplexField& psi, double eps) {
    if (psi.size() != g.size()) throw ValidationError("decompose: field size does not match grid");
    double amin = INFINITY;
    for (const auto& v : psi) amin = std::min(amin, std::abs(v));
    if (!(amin >= eps)) {
        std::ostringstream os;
        os << "decompose: min |psi| = " << amin << " below the node floor " << eps;
        throw NodeError(os.str());
    }

    HydroState st;
    st.rho.resize(g.size());
    for (std::size_t i = 0; i < psi.size(); ++i) st.rho[i] = std::norm(psi[i]);

    RealField phase(g.size(), 0.0);
    phase[0] = std::arg(psi[0]);
    const int n0 = g.n(0);
    const int n1 = g.n(1);
    std::array<int, 2> winding{0, 0};
    static const char* names[2] = {"x", "y"};

    if (g.dim() == 1) {
        winding[0] = winding_number(unwrap_line(psi, 0, 1, n0, phase), names[0]);
    } else {
        // First row along y, then every column along x from that row.
        winding[1] = winding_number(unwrap_line(psi, 0, 1, n1, phase), names[1]);
        for (int j = 0; j < n1; ++j) {
            const int w = winding_number(unwrap_line(psi, j, n1, n0, phase), names[0]);
            if (j == 0) {
                winding[0] = w;
            } else if (w != winding[0]) {
                throw WindingError("decompose: x winding differs between lattice columns "
                                   "(phase is not separable enough to unwrap)");
            }
        }
        // Every row must carry the same y winding.
        for (int i = 1; i < n0; ++i) {
            double loop = 0.0;
            for (int j = 0; j < n1; ++j) {
                const std::size_t a = static_cast<std::size_t>(i) * n1 + j;
                const std::size_t b = static_cast<std::size_t>(i) * n1 + (j + 1) % n1;
                loop += std::arg(psi[b] * std::conj(psi[a]));
            }
            if (winding_number(loop, names[1]) != winding[1]) {
                throw WindingError("decompose: y winding differs between lattice rows");
            }
        }
    }

    check_loop_integrals(g, psi, winding);

    st.s_per = phase;
    for (int a = 0; a < g.dim(); ++a) {
        st.kbar[a] = 2.0 * std::numbers::pi * winding[a] / g.length(a);
        const RealField& x = g.coords(a);
        for (std::size_t i = 0; i < phase.size(); ++i) st.s_per[i] -= st.kbar[a] * x[i];
    }
    return st;
}

ComplexField reconstruct(const Grid& g, const HydroState& s) {
    ComplexField psi(g.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double S = s.s_per[i];
        for (int a = 0; a < g.dim(); ++a) S += s.kbar[a] * g.coords(a)[i];
        psi[i] = std::polar(std::sqrt(std::max(s.rho[i], 0.0)), S);
    }
    return psi;
}

ComplexField periodic_factor(const HydroState& s) {
    ComplexField psi(s.rho.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        psi[i] = std::polar(std::sqrt(std::max(s.rho[i], 0.0)), s.s_per[i]);
    }
    return psi;
}

namespace {

// Spectral gradient and Laplacian of a complex periodic field from a single
// forward transform. As for real fields, odd derivatives drop the Nyquist
// mode.
struct ComplexDerivatives {
    std::array<ComplexField, 2> grad;
    ComplexField lap;
};

ComplexDerivatives complex_derivatives(const Grid& g, const ComplexField& psi, bool with_laplacian) {
    const ComplexField h = g.forward(psi);
    ComplexDerivatives d;
    for (int a = 0; a < g.dim(); ++a) {
        const double k_nyq = std::numbers::pi * g.n(a) / g.length(a) * (1.0 - 1e-12);
        const RealField& kc = g.k_component(a);
        ComplexField ha(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) {
            ha[i] = std::abs(kc[i]) >= k_nyq ? cplx(0.0) : cplx(0.0, kc[i]) * h[i];
        }
        d.grad[a] = g.inverse(ha);
    }
    if (with_laplacian) {
        const RealField& k2 = g.k_squared();
        ComplexField hl(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) hl[i] = -k2[i] * h[i];
        d.lap = g.inverse(hl);
    }
    return d;
}

}  // namespace

VectorField probability_flux(const Grid& g, const HydroState& s) {
    const ComplexField psi = periodic_factor(s);
    const auto grad = complex_derivatives(g, psi, false).grad;
    VectorField flux;
    for (int a = 0; a < g.dim(); ++a) {
        flux[a].resize(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            flux[a][i] = (std::conj(psi[i]) * grad[a][i]).imag() + s.kbar[a] * s.rho[i];
        }
    }
    return flux;
}

VectorField schrodinger_current(const Grid& g, const HydroState& s, const PhysicsParams& p) {
    VectorField j = probability_flux(g, s);
    const double c = p.hbar / p.mass;
    for (int a = 0; a < g.dim(); ++a) {
        for (double& v : j[a]) v *= c;
    }
    return j;
}

VectorField modified_current(const Grid& g, const HydroState& s, const PhysicsParams& p,
                             const GOperator& gop) {
    const RealField gs = apply_g(s.s_per, gop);
    VectorField j = gradient(g, gs);
    // Zero mode of the symbol is c_0 = G(0); the winding sees only this term.
    const double c0 = gop.symbol()[0];
    const double c = -2.0 * p.hbar / p.mass;
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < j[a].size(); ++i) {
            j[a][i] = c * s.rho[i] * (c0 * s.kbar[a] + j[a][i]);
        }
    }
    return j;
}

namespace {

double smooth_unit_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

// Laplacian S from psi and its derivatives; shared by the public entry
// points so that the correction can reuse one transform of psi.
RealField phase_laplacian_from(const ComplexField& psi, const ComplexDerivatives& d, int dim) {
    const auto& grad = d.grad;
    const ComplexField& lap = d.lap;
    RealField out(psi.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double n2 = std::norm(psi[i]);
        if (!(n2 > 1e-300)) continue;
        // Laplacian log psi = Laplacian psi / psi - (grad psi / psi)^2, with
        // 1/psi = conj(psi) / |psi|^2.
        const cplx inv = std::conj(psi[i]) / n2;
        cplx v = lap[i] * inv;
        for (int a = 0; a < dim; ++a) {
            const cplx u = grad[a][i] * inv;
            v -= u * u;
        }
        out[i] = v.imag();
    }
    return out;
}

RealField apply_window(const HydroState& s, RealField lap, const CorrectionFilter& w) {
    if (!w.window_enabled()) return lap;
    double mass = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        mass += s.rho[i];
        weighted += s.rho[i] * lap[i];
    }
    const double mean = mass > 0.0 ? weighted / mass : 0.0;
    const double rmax = *std::max_element(s.rho.begin(), s.rho.end());
    const double llo = std::log(w.lo * rmax);
    const double lhi = std::log(w.hi * rmax);
    const double rlo = w.lo * rmax;
    const double rhi = w.hi * rmax;
    for (std::size_t i = 0; i < lap.size(); ++i) {
        if (s.rho[i] >= rhi) continue;
        if (s.rho[i] <= rlo) {
            lap[i] = mean;
            continue;
        }
        const double lr = std::log(s.rho[i]);
        lap[i] = mean + smooth_unit_step((lr - llo) / (lhi - llo)) * (lap[i] - mean);
    }
    return lap;
}

}  // namespace

RealField phase_laplacian(const Grid& g, const HydroState& s) {
    const ComplexField psi = periodic_factor(s);
    return phase_laplacian_from(psi, complex_derivatives(g, psi, true), g.dim());
}

RealField windowed_phase_laplacian(const Grid& g, const HydroState& s, const CorrectionFilter& w) {
    return apply_window(s, phase_laplacian(g, s), w);
}

namespace {
// (G + 1/2) S = M Laplacian S with M = (g + 1/2) / (-|k|^2); M vanishes at
// k = 0 because g + 1/2 = O(|k|^4) there.
RealField correction_multiplier(const Grid& g, const GOperator& gop) {
    const RealField& k2 = g.k_squared();
    RealField m(g.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (k2[i] > 0.0) m[i] = -gop.correction_symbol()[i] / k2[i];
    }
    return m;
}

// M with the 2/3 dealias rule and the spectral cap folded in. The phase
// Laplacian is a nonlinear function of psi; its upper third is aliasing
// debris and is removed before the nonlocal operator acts.
RealField filtered_multiplier(const Grid& g, const GOperator& gop, const CorrectionFilter& w) {
    RealField sym = correction_multiplier(g, gop);
    const RealField mask = dealias_mask(g);
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] *= mask[i];
    if (w.cap_enabled()) {
        const double k2max = (w.kappa / gop.lambda_c()) * (w.kappa / gop.lambda_c());
        for (std::size_t i = 0; i < sym.size(); ++i) {
            if (g.k_squared()[i] > k2max) sym[i] = 0.0;
        }
    }
    return sym;
}
}  // namespace

RealField correction_potential(const Grid& g, const RealField& phase_lap, const GOperator& gop) {
    return apply_symbol(g, phase_lap, correction_multiplier(g, gop));
}

VectorField correction_current(const Grid& g, const HydroState& s, const PhysicsParams& p,
                               const GOperator& gop, const CorrectionFilter& w) {
    // Dealiasing, the multiplier M and the gradient are all diagonal in k and
    // are applied in one pass.
    VectorField j = gradient_of_symbol(g, windowed_phase_laplacian(g, s, w), filtered_multiplier(g, gop, w));
    const double c = 2.0 * p.hbar / p.mass;
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < j[a].size(); ++i) j[a][i] *= c * s.rho[i];
    }
    return j;
}

RealField correction_divergence(const Grid& g, const HydroState& s, const PhysicsParams& p,
                                const GOperator& gop, const CorrectionFilter& w) {
    // div(c rho grad phi) = c (grad rho . grad phi + rho Laplacian phi), with
    // grad rho = 2 Re(conj(psi) grad psi). Each term carries a factor of psi,
    // so the result decays with the state; the spectral divergence of the
    // product would instead spread its truncation error over the far tails,
    // where it is large compared with rho itself.
    const ComplexField psi = periodic_factor(s);
    const ComplexDerivatives d = complex_derivatives(g, psi, true);
    const RealField lap_w = apply_window(s, phase_laplacian_from(psi, d, g.dim()), w);
    const RealField sym = filtered_multiplier(g, gop, w);
    const VectorField grad_phi = gradient_of_symbol(g, lap_w, sym);
    RealField lap_sym(sym.size());
    for (std::size_t i = 0; i < sym.size(); ++i) lap_sym[i] = -g.k_squared()[i] * sym[i];
    RealField out = apply_symbol(g, lap_w, lap_sym);
    const double c = 2.0 * p.hbar / p.mass;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = s.rho[i] * out[i];
        for (int a = 0; a < g.dim(); ++a) {
            v += 2.0 * (std::conj(psi[i]) * d.grad[a][i]).real() * grad_phi[a][i];
        }
        out[i] = c * v;
    }
    return out;
}

VectorField modified_current(const Grid& g, const HydroState& s, const PhysicsParams& p,
                             const GOperator& gop, const CorrectionFilter& w) {
    VectorField j = schrodinger_current(g, s, p);
    const VectorField dj = correction_current(g, s, p, gop, w);
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < j[a].size(); ++i) j[a][i] -= dj[a][i];
    }
    return j;
}

}  // namespace rse
