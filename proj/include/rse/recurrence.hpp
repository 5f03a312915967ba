#pragma once

#include <array>
#include <vector>

#include "rse/grid.hpp"

namespace rse {

// Phase S = kbar . x + s_per, with only its derivatives ever evaluated.
struct Phase {
    std::array<double, 2> kbar{0.0, 0.0};
    RealField s_per;
};

// Laplacian^n (R e^{iS}) = (A_n + i B_n) e^{iS}.
struct RecurrencePair {
    RealField A;
    RealField B;
    int n = 0;
};

RecurrencePair recurrence_start(const RealField& R);
RecurrencePair recurrence_step(const Grid& g, const RecurrencePair& prev, const Phase& S);
// Pairs for n = 0..n_max.
std::vector<RecurrencePair> recurrence_sequence(const Grid& g, const RealField& R, const Phase& S,
                                                int n_max);

// Laplacian^n of R e^{i s_per} e^{i kbar.x}, returned without the e^{i kbar.x}
// factor (computed by shifting wavenumbers by kbar).
ComplexField direct_laplacian_power(const Grid& g, const RealField& R, const Phase& S, int n);

// sup |(A_n + i B_n) e^{i s_per} - direct| / sup |direct|.
double recurrence_relative_error(const Grid& g, const RealField& R, const Phase& S, int n);

// sup |(Laplacian S) R + 2 grad S . grad R - div(R^2 grad S) / R|.
double b1_identity_check(const Grid& g, const RealField& R, const Phase& S, double eps = 1e-10);

// alpha = R Laplacian S + 2 grad S . grad R.
RealField alpha(const Grid& g, const RealField& R, const Phase& S);

// Residuals of the printed two-step closed forms for A_2, B_2 against two
// recurrence steps, relative to the larger of sup |A_2| and sup |B_2|.
struct A2B2Residual {
    double a2 = 0.0;
    double b2 = 0.0;
};
A2B2Residual a2_b2_check(const Grid& g, const RealField& R, const Phase& S, double eps = 1e-10);

}  // namespace rse
