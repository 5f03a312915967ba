#pragma once

#include <array>

#include "rse/diagnostics_record.hpp"
#include "rse/dynamics.hpp"
#include "rse/gfunc.hpp"
#include "rse/grid.hpp"
#include "rse/madelung.hpp"
#include "rse/state.hpp"

namespace rse {

// norm, <x>, <p> = hbar int rho grad S, and the energy
// int [hbar^2/2m (|grad sqrt rho|^2 + rho |grad S|^2) + rho V], the kinetic
// part evaluated as hbar^2/2m int |grad psi|^2 through Parseval.
DiagnosticsRecord observables(const Grid& g, const HydroState& s, const PhysicsParams& p);

// Same core fields straight from a wave function (split-step runs).
DiagnosticsRecord wave_observables(const Grid& g, const ComplexField& psi, const PhysicsParams& p,
                                   double t);

// H_I = (hbar / 2 rho) div(j_Sch - j_RM), rho clamped at rho_floor. The real
// part of the nonlinear Hamiltonian is identically zero for this flow.
RealField h_imag(const Grid& g, const HydroState& s, const PhysicsParams& p, const GOperator& gop,
                 double rho_floor = kDefaultRhoFloor, const CorrectionFilter& window = {});

struct EhrenfestIntegrals {
    std::array<double, 2> I1_paper{0.0, 0.0};
    std::array<double, 2> I2_paper{0.0, 0.0};
    std::array<double, 2> I1_cc{0.0, 0.0};
    std::array<double, 2> I2_cc{0.0, 0.0};
};

// Literal variant: the (2G - 1) operator forms
//   I1 = -hbar int x div[rho grad (2G-1) S]
//   I2 = -(hbar^2/m) int div[rho grad (2G-1) S] grad S.
// Continuity-consistent variant:
//   I1_cc = m int j_RM - <p>,  I2_cc = int rho 2 H_I grad S.
EhrenfestIntegrals ehrenfest_integrals(const Grid& g, const HydroState& s, const PhysicsParams& p,
                                       const GOperator& gop, double rho_floor = kDefaultRhoFloor,
                                       const CorrectionFilter& window = {});

// Full record: observables, both Ehrenfest variants and int rho |H_I|.
DiagnosticsRecord diagnostics(const Grid& g, const HydroState& s, const PhysicsParams& p,
                              const GOperator& gop, double rho_floor = kDefaultRhoFloor,
                              const CorrectionFilter& window = {});

// State seen from a frame moving with velocity v, at time t:
// rho'(x) = rho(x + v t), kbar' = kbar - m v / hbar and the constant phase
// kbar . v t - m v^2 t / 2 hbar added to s_per. Requires V = 0 and
// m v L / (2 pi hbar) integer on every axis (WindingError otherwise).
HydroState galilean_boost(const Grid& g, const HydroState& s, const PhysicsParams& p,
                          std::array<double, 2> v, double t);

// Periodic translation by `shift` per axis, exact for band-limited fields.
RealField spectral_shift(const Grid& g, const RealField& f, std::array<double, 2> shift);

struct SeparabilityResult {
    double error = 0.0;          // density part + phase part
    double density_error = 0.0;  // sup |rho_2D - rho_a (x) rho_b|
    double phase_error = 0.0;    // sup |wrap(S_2D - S_a - S_b)| on the mask
    bool complete = true;
};

// Evolves the product of two 1D states on the tensor grid and each factor on
// its own grid, then compares at every save point. The phase comparison is
// restricted to samples where rho_a rho_b >= phase_mask_rel * max(rho_a rho_b):
// in the far tails the phase of an exponentially small amplitude carries no
// information.
SeparabilityResult separability_error(const Grid& ga, const HydroState& a, const Potential& va,
                                      const Grid& gb, const HydroState& b, const Potential& vb,
                                      const PhysicsParams& base, GPolicy policy,
                                      const IntegratorConfig& cfg, double phase_mask_rel = 1e-4);

// Product state and additive potential on the tensor grid of ga x gb.
Grid tensor_grid(const Grid& ga, const Grid& gb);
HydroState product_state(const HydroState& a, const HydroState& b);
Potential additive_potential(const Grid& ga, const Potential& va, const Grid& gb,
                             const Potential& vb, double mass);

}  // namespace rse
