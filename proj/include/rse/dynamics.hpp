#pragma once

#include <string>
#include <vector>

#include "rse/diagnostics_record.hpp"
#include "rse/gfunc.hpp"
#include "rse/grid.hpp"
#include "rse/madelung.hpp"
#include "rse/state.hpp"

namespace rse {

enum class FlowMode { modified, linear, splitstep };
std::string to_string(FlowMode m);
FlowMode parse_mode(const std::string& s);

enum class Scheme { rk4, splitstep };

// Clamp for the density divisor in the phase equation. Below it the
// amplitude sqrt(rho) is under round-off relative to O(1) peaks, so the
// clamped tails cannot feed back into the interior.
inline constexpr double kDefaultRhoFloor = 1e-32;

struct IntegratorConfig {
    double dt = 1e-3;
    double t_final = 0.0;
    int save_every = 1;
    double rho_floor = kDefaultRhoFloor;
    double cfl_constant = 0.1;
    // Regularisation of the nonlocal correction; see CorrectionFilter. The
    // defaults keep the correction on the bulk of localized states and on
    // lambda_c^2 |k|^2 <= 1/4, where perturbations seeded by round-off are not
    // amplified over several oscillation periods.
    CorrectionFilter window{1e-4, 1e-2, 0.5};
};

// dt <= C m dx^2 / hbar on the finest axis; violations are a ValidationError.
void check_time_step(const Grid& g, const PhysicsParams& p, const IntegratorConfig& cfg);
double max_stable_dt(const Grid& g, const PhysicsParams& p, double cfl_constant);

struct HydroRhs {
    RealField drho_dt;
    RealField ds_dt;
};

// Time derivatives of (rho, s_per). The Schrodinger part is evaluated through
// psi_per = sqrt(rho) e^{i s_per}:
//   div j_Sch = (hbar/m) Im(conj(psi) Laplacian psi)
//   Laplacian sqrt(rho)/sqrt(rho) - |grad S|^2 = Re(conj(psi) Laplacian psi) / rho,
// the latter with rho clamped at rho_floor. Mode linear drops the correction
// current; mode modified subtracts div of correction_current.
HydroRhs rhs_hydro(const Grid& g, const HydroState& s, const PhysicsParams& p,
                   const GOperator& gop, FlowMode mode, double rho_floor = kDefaultRhoFloor,
                   const CorrectionFilter& window = {});

// One classical RK4 step; dt may be negative (time reversal checks).
HydroState step_rk4(const Grid& g, const HydroState& s, const PhysicsParams& p,
                    const GOperator& gop, double dt, FlowMode mode, double rho_floor = kDefaultRhoFloor,
                    const CorrectionFilter& window = {});

struct Trajectory {
    std::vector<HydroState> snapshots;
    std::vector<DiagnosticsRecord> records;
    bool complete = true;
    std::string failure;
    // Exit code of the error that stopped the run (0 when complete).
    int failure_code = 0;
    std::vector<std::string> warnings;
};

// Integrates with RK4 over a duration cfg.t_final starting at initial.t,
// saving a snapshot and a diagnostics record every cfg.save_every steps (plus
// the first and last step). Step errors abort the run and return the partial
// trajectory flagged incomplete.
Trajectory evolve(const Grid& g, const HydroState& initial, const PhysicsParams& p,
                  const GOperator& gop, FlowMode mode, const IntegratorConfig& cfg);

// Strang splitting: half potential kick, free drift in wavenumber space,
// half kick.
ComplexField splitstep_step(const Grid& g, const ComplexField& psi, const PhysicsParams& p,
                            const RealField& V, double dt);

struct WaveTrajectory {
    std::vector<double> times;
    std::vector<ComplexField> snapshots;
    std::vector<DiagnosticsRecord> records;
    bool complete = true;
    std::string failure;
    // Exit code of the error that stopped the run (0 when complete).
    int failure_code = 0;
    std::vector<std::string> warnings;
};

WaveTrajectory evolve_splitstep_linear(const Grid& g, const ComplexField& psi0,
                                       const PhysicsParams& p, const IntegratorConfig& cfg);

// Number of steps and the exact step that lands on t_final.
int step_count(const IntegratorConfig& cfg);

}  // namespace rse
