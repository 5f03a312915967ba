#pragma once

#include "rse/gfunc.hpp"
#include "rse/grid.hpp"
#include "rse/state.hpp"

namespace rse {

// psi -> (rho, kbar, s_per). Unwraps the phase along each axis and splits
// off the winding so that s_per is periodic.
HydroState decompose(const Grid& g, const ComplexField& psi, double eps = 1e-10);

// sqrt(rho) exp(i (kbar . x + s_per)).
ComplexField reconstruct(const Grid& g, const HydroState& s);

// sqrt(rho) exp(i s_per): the periodic factor of psi once exp(i kbar . x) is
// split off. Derivatives of psi follow from shifting k by kbar.
ComplexField periodic_factor(const HydroState& s);

// rho grad S = Im(conj(psi) grad psi), evaluated on psi so that folded
// (non-periodic) phases such as spreading packets carry no seam error.
VectorField probability_flux(const Grid& g, const HydroState& s);

// (hbar/m) rho grad S.
VectorField schrodinger_current(const Grid& g, const HydroState& s, const PhysicsParams& p);

// -(2 hbar/m) rho (c_0 kbar + grad G(lambda_c^2 Laplacian) s_per).
VectorField modified_current(const Grid& g, const HydroState& s, const PhysicsParams& p,
                             const GOperator& gop);

// Regularisation of the nonlocal correction used by the dynamics.
//
// Density window: a smooth step in log(rho / max rho) rising from 0 at `lo`
// to 1 at `hi`. Below it the phase Laplacian is replaced by its rho-weighted
// mean, so round-off in the far tails never reaches the operator.
// lo = hi = 0 disables it.
//
// Spectral cap: the correction acts only on modes with lambda_c |k| <= kappa;
// above it the flow is the linear one. The modified continuity equation
// amplifies short-wavelength perturbations at a rate that grows with the
// largest lambda_c |k| the correction reaches; the cap keeps that rate below
// what the integration interval can seed from round-off. kappa = 0 disables
// it.
struct CorrectionFilter {
    double lo = 0.0;
    double hi = 0.0;
    double kappa = 0.0;
    bool window_enabled() const { return hi > 0.0; }
    bool cap_enabled() const { return kappa > 0.0; }
};

// Laplacian S = Im(Laplacian log psi), built pointwise from spectral
// derivatives of the smooth periodic factor of psi. Windings drop out and a
// folded quadratic phase gives a constant.
RealField phase_laplacian(const Grid& g, const HydroState& s);

// mean + W (Laplacian S - mean), mean being the rho-weighted average.
RealField windowed_phase_laplacian(const Grid& g, const HydroState& s, const CorrectionFilter& w);

// (G + 1/2) S obtained from Laplacian S through the multiplier
// (g + 1/2) / (-|k|^2), which vanishes at k = 0: quadratic phases and
// windings give exactly zero.
RealField correction_potential(const Grid& g, const RealField& phase_lap, const GOperator& gop);

// j_Sch - j_RM = (2 hbar/m) rho grad((G + 1/2) S) with the windowed phase
// Laplacian. With the window disabled this is the literal difference.
VectorField correction_current(const Grid& g, const HydroState& s, const PhysicsParams& p,
                               const GOperator& gop, const CorrectionFilter& w = {});

// div(correction_current) by the product rule, so that it vanishes wherever
// rho and grad rho do. This is the form the continuity equation uses.
RealField correction_divergence(const Grid& g, const HydroState& s, const PhysicsParams& p,
                                const GOperator& gop, const CorrectionFilter& w = {});

// j_Sch - correction_current: the modified current seen by the dynamics.
VectorField modified_current(const Grid& g, const HydroState& s, const PhysicsParams& p,
                             const GOperator& gop, const CorrectionFilter& w);

}  // namespace rse
