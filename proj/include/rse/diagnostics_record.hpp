#pragma once

#include <array>

namespace rse {

// Per-save-point scalars. Vector quantities carry one entry per axis; the
// second entry is unused in 1D.
struct DiagnosticsRecord {
    int dim = 1;
    double t = 0.0;
    double norm = 0.0;
    std::array<double, 2> mean_x{0.0, 0.0};
    std::array<double, 2> mean_p{0.0, 0.0};
    double energy = 0.0;
    std::array<double, 2> I1_paper{0.0, 0.0};
    std::array<double, 2> I1_cc{0.0, 0.0};
    std::array<double, 2> I2_paper{0.0, 0.0};
    std::array<double, 2> I2_cc{0.0, 0.0};
    double hi_norm = 0.0;
};

}  // namespace rse
