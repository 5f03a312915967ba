#pragma once

#include <array>
#include <string>

#include "rse/grid.hpp"

namespace rse {

struct Potential {
    enum class Kind { none, harmonic, tabulated };
    Kind kind = Kind::none;
    // Harmonic frequency per axis: V = m/2 * sum_a omega_a^2 x_a^2.
    std::array<double, 2> omega{0.0, 0.0};
    // Tabulated values on the simulation grid.
    RealField values;
};

std::string to_string(Potential::Kind k);

struct PhysicsParams {
    double hbar = 1.0;
    double mass = 1.0;
    double lambda_c = 0.1;
    Potential potential;
};

void validate(const PhysicsParams& p);

// Potential sampled on the grid (zero field for Kind::none).
RealField potential_values(const Grid& g, const PhysicsParams& p);

// Hydrodynamic state: density, winding wavevector and periodic phase
// remainder. The total phase is S = kbar . x + s_per.
struct HydroState {
    RealField rho;
    std::array<double, 2> kbar{0.0, 0.0};
    RealField s_per;
    double t = 0.0;
};

// grad S = kbar + grad s_per, per axis.
VectorField phase_gradient(const Grid& g, const HydroState& s);

}  // namespace rse
