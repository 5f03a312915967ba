#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rse/dynamics.hpp"
#include "rse/gfunc.hpp"
#include "rse/grid.hpp"
#include "rse/state.hpp"

namespace rse {

// Initial condition menu. Vector parameters carry one entry per axis.
struct InitialSpec {
    enum class Kind { plane_wave, gaussian, harmonic_ground, coherent, custom, product };
    Kind kind = Kind::gaussian;
    std::vector<double> kbar;          // plane_wave, gaussian, custom
    std::vector<double> center;        // gaussian
    std::vector<double> sigma;         // gaussian: width at the waist
    double t0 = 0.0;                   // gaussian: time elapsed since the waist
    std::vector<double> omega;         // harmonic_ground, coherent
    std::vector<double> displacement;  // coherent
    RealField rho;                     // custom
    RealField s_per;                   // custom
    std::shared_ptr<InitialSpec> x;    // product: factor along axis 0
    std::shared_ptr<InitialSpec> y;    // product: factor along axis 1
};

std::string to_string(InitialSpec::Kind k);

struct ScenarioConfig {
    int dim = 1;
    std::vector<int> n_points{256};
    std::vector<double> length{16.0};
    PhysicsParams physics;
    FlowMode mode = FlowMode::modified;
    InitialSpec initial;
    IntegratorConfig integrator;
    GPolicy g_policy = GPolicy::strict;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
};

Grid make_grid(const ScenarioConfig& cfg);

// Samples the initial condition on the grid. Throws WindingError when a
// requested kbar is not a lattice winding, ValidationError on bad parameters.
HydroState build_initial(const Grid& g, const InitialSpec& spec, const PhysicsParams& p);

// Analytic free Gaussian in 1D at time t after its waist (hbar, m from p),
// nearest-image coordinates. Returns rho and s_per with the winding split off.
HydroState free_gaussian_1d(const Grid& g, double center, double sigma, double kbar, double t,
                            const PhysicsParams& p);
ComplexField free_gaussian_psi(const Grid& g, double center, double sigma, double kbar, double t,
                               const PhysicsParams& p);

// Checks every precondition that can be decided before allocating a run:
// grid shape, physics, strict-policy domain, time step, initial parameters.
void validate_config(const ScenarioConfig& cfg);

}  // namespace rse
