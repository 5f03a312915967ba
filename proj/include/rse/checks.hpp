#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rse/grid.hpp"

namespace rse {

// Outcome of one property check run by the `check` subcommand.
struct CheckResult {
    std::string suite;
    std::string name;
    double value = 0.0;      // measured residual (or 0/1 for boolean checks)
    double tolerance = 0.0;  // pass iff value < tolerance
    bool passed = false;
    std::string note;
};

// Suites: grid, gfunc, recurrence, dynamics, diagnostics; "all" runs every one.
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed = 20240601);
const std::vector<std::string>& suite_names();

// Random real field on g whose modes satisfy |n_a| <= max_mode on every
// axis, scaled so that its sup norm is `amplitude`.
RealField random_band_limited(const Grid& g, int max_mode, double amplitude, std::mt19937_64& rng);

}  // namespace rse
