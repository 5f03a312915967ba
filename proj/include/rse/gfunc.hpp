#pragma once

#include <string>
#include <vector>

#include "rse/grid.hpp"

namespace rse {

// G(x) = (sqrt(1 - x^2) - 1) / x^2 on |x| <= 1; series branch for |x| < 1e-4.
double g_closed(double x);
// Same function through -2 sin^2(asin(x)/2) / x^2.
double g_trig(double x);
// Taylor coefficients c_0..c_N of G about 0 (odd ones vanish).
std::vector<double> g_coefficients(int order);
// Partial sum sum_{n<=order} c_n x^n.
double g_series(double x, int order);

enum class GPolicy { strict, projected };
std::string to_string(GPolicy p);
GPolicy parse_policy(const std::string& s);

// Diagonal multiplier for G(lambda_c^2 Laplacian) on one grid.
class GOperator {
public:
    GOperator(const Grid& grid, double lambda_c, GPolicy policy);

    const Grid& grid() const { return grid_; }
    double lambda_c() const { return lambda_c_; }
    GPolicy policy() const { return policy_; }
    // g_j per mode, flattened like the grid samples.
    const RealField& symbol() const { return symbol_; }
    // Per-mode flag: true if the mode was zeroed by the projected policy.
    const std::vector<bool>& projected_mask() const { return projected_; }
    std::size_t projected_count() const { return projected_count_; }

    RealField apply(const RealField& f) const;
    // Multiplier g_j + 1/2: the part of the operator beyond the Schrodinger term.
    const RealField& correction_symbol() const { return correction_; }

private:
    Grid grid_;
    double lambda_c_;
    GPolicy policy_;
    RealField symbol_;
    RealField correction_;
    std::vector<bool> projected_;
    std::size_t projected_count_ = 0;
};

GOperator build_g_operator(const Grid& grid, double lambda_c, GPolicy policy);
RealField apply_g(const RealField& s_per, const GOperator& gop);
// sum_{n=0}^{order} c_n lambda_c^{2n} Laplacian^n s_per with spectral Laplacians.
RealField apply_g_truncated(const Grid& grid, const RealField& s_per, double lambda_c, int order);

}  // namespace rse
