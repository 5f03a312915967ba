#include "rse/gfunc.hpp"

#include <cmath>
#include <sstream>

#include "rse/errors.hpp"

namespace rse {

namespace {

constexpr double kSeriesSwitch = 1e-4;

void check_domain(double x, const char* who) {
    if (!(std::abs(x) <= 1.0)) {
        std::ostringstream os;
        os << who << ": |x| = " << std::abs(x) << " lies outside the real branch |x| <= 1";
        throw DomainError(os.str());
    }
}

// The literal quotient cancels catastrophically near zero; four terms of the
// series are exact to round-off for |x| < 1e-4.
double small_x_series(double x) {
    const double x2 = x * x;
    return -0.5 - x2 / 8.0 - x2 * x2 / 16.0 - 5.0 * x2 * x2 * x2 / 128.0;
}

}  // namespace

double g_closed(double x) {
    check_domain(x, "g_closed");
    if (std::abs(x) < kSeriesSwitch) return small_x_series(x);
    // (sqrt(1 - x^2) - 1) / x^2 rewritten without the subtraction.
    return -1.0 / (1.0 + std::sqrt(1.0 - x * x));
}

double g_trig(double x) {
    check_domain(x, "g_trig");
    if (std::abs(x) < kSeriesSwitch) return small_x_series(x);
    const double s = std::sin(0.5 * std::asin(x));
    return -2.0 * s * s / (x * x);
}

std::vector<double> g_coefficients(int order) {
    if (order < 0) throw ValidationError("g_coefficients: order must be >= 0");
    std::vector<double> c(order + 1, 0.0);
    // c_{2(m-1)} = (-1)^m binom(1/2, m), with
    // binom(1/2, m+1) = binom(1/2, m) * (1/2 - m) / (m + 1).
    double binom = 0.5;  // binom(1/2, 1)
    double sign = -1.0;  // (-1)^1
    for (int m = 1; 2 * (m - 1) <= order; ++m) {
        c[2 * (m - 1)] = sign * binom;
        binom *= (0.5 - m) / (m + 1.0);
        sign = -sign;
    }
    return c;
}

double g_series(double x, int order) {
    const std::vector<double> c = g_coefficients(order);
    double acc = 0.0;
    for (int n = order; n >= 0; --n) acc = acc * x + c[n];
    return acc;
}

std::string to_string(GPolicy p) { return p == GPolicy::strict ? "strict" : "projected"; }

GPolicy parse_policy(const std::string& s) {
    if (s == "strict") return GPolicy::strict;
    if (s == "projected") return GPolicy::projected;
    throw ValidationError("g_policy: expected \"strict\" or \"projected\", got \"" + s + "\"");
}

GOperator::GOperator(const Grid& grid, double lambda_c, GPolicy policy)
    : grid_(grid), lambda_c_(lambda_c), policy_(policy) {
    if (!(lambda_c > 0.0) || !std::isfinite(lambda_c)) {
        throw ValidationError("g operator: lambda_c must be positive");
    }
    const double product = lambda_c * grid.k_norm_max();
    if (policy == GPolicy::strict && product >= 1.0) {
        std::ostringstream os;
        os << "strict policy: lambda_c * k_max = " << product
           << " >= 1, symbol would leave the real branch (use a coarser grid, a smaller "
              "lambda_c, or the projected policy)";
        throw DomainError(os.str());
    }
    const RealField& k2 = grid.k_squared();
    symbol_.resize(grid.size());
    correction_.resize(grid.size());
    projected_.assign(grid.size(), false);
    const double lam2 = lambda_c * lambda_c;
    for (std::size_t i = 0; i < k2.size(); ++i) {
        const double x = -lam2 * k2[i];
        if (-x >= 1.0) {
            symbol_[i] = 0.0;
            projected_[i] = true;
            ++projected_count_;
            correction_[i] = 0.5;
        } else {
            symbol_[i] = g_closed(x);
            // g + 1/2 = -x^2 / (2 (1 + sqrt(1 - x^2))^2), free of the
            // cancellation in the sum, which matters since it is O(x^2).
            const double r = 1.0 + std::sqrt(1.0 - x * x);
            correction_[i] = -x * x / (2.0 * r * r);
        }
    }
}

RealField GOperator::apply(const RealField& f) const { return apply_symbol(grid_, f, symbol_); }

GOperator build_g_operator(const Grid& grid, double lambda_c, GPolicy policy) {
    return GOperator(grid, lambda_c, policy);
}

RealField apply_g(const RealField& s_per, const GOperator& gop) { return gop.apply(s_per); }

RealField apply_g_truncated(const Grid& grid, const RealField& s_per, double lambda_c, int order) {
    const std::vector<double> c = g_coefficients(order);
    const RealField& k2 = grid.k_squared();
    RealField sym(grid.size());
    const double lam2 = lambda_c * lambda_c;
    for (std::size_t i = 0; i < sym.size(); ++i) {
        // Horner in x = -lambda^2 k^2, the spectral image of lambda^2 Laplacian.
        const double x = -lam2 * k2[i];
        double acc = 0.0;
        for (int n = order; n >= 0; --n) acc = acc * x + c[n];
        sym[i] = acc;
    }
    return apply_symbol(grid, s_per, sym);
}

}  // namespace rse
