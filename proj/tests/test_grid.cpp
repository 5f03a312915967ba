#include <doctest.h>

#include <random>

#include "rse/checks.hpp"
#include "rse/errors.hpp"
#include "rse/grid.hpp"
#include "test_util.hpp"

using namespace rse;
using rse::test::pi;
using rse::test::sample;

TEST_CASE("grid: wavenumbers follow transform ordering") {
    // Oracle: k_j = 2 pi m_j / L with m = 0, 1, ..., N/2 - 1, -N/2, ..., -1.
    const Grid g = make_grid(1, {8}, {2.0 * pi});
    const double expect[] = {0, 1, 2, 3, -4, -3, -2, -1};
    for (int i = 0; i < 8; ++i) CHECK(g.k(0)[i] == doctest::Approx(expect[i]).epsilon(1e-15));

    const Grid h = make_grid(1, {16}, {3.0});
    for (int i = 0; i < 16; ++i) {
        const int m = i < 8 ? i : i - 16;
        CHECK(std::abs(h.k(0)[i] - 2.0 * pi * m / 3.0) < 1e-13);
    }
}

TEST_CASE("grid: spacing and coordinates") {
    const Grid g = make_grid(1, {8}, {4.0 * pi});
    CHECK(std::abs(g.dx(0) - pi / 2.0) < 1e-15);
    CHECK(g.coords(0).front() == doctest::Approx(-2.0 * pi));
    CHECK(g.coords(0).back() == doctest::Approx(2.0 * pi - pi / 2.0));
}

TEST_CASE("grid: shape validation") {
    CHECK_THROWS_AS(make_grid(1, {4}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(1, {48}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(3, {8, 8, 8}, {1.0, 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(1, {8}, {-1.0}), ValidationError);
    CHECK_THROWS_AS(make_grid(2, {8}, {1.0, 1.0}), ValidationError);
    CHECK_NOTHROW(make_grid(2, {8, 16}, {1.0, 2.0}));
    CHECK(is_power_of_two(64));
    CHECK_FALSE(is_power_of_two(96));
}

TEST_CASE("grid: derivatives of trigonometric fields are exact") {
    const Grid g = make_grid(1, {64}, {2.0 * pi});
    const RealField s = sample(g, [](double x) { return std::sin(3.0 * x); });
    const RealField c3 = sample(g, [](double x) { return 3.0 * std::cos(3.0 * x); });
    CHECK(sup_abs_diff(spectral_derivative(g, s, 0, 1), c3) < 1e-12);
    const RealField lap = sample(g, [](double x) { return -9.0 * std::sin(3.0 * x); });
    CHECK(sup_abs_diff(laplacian(g, s), lap) < 1e-11);
    const RealField d3 = sample(g, [](double x) { return -27.0 * std::cos(3.0 * x); });
    CHECK(sup_abs_diff(spectral_derivative(g, s, 0, 3), d3) < 1e-10);
}

TEST_CASE("grid: odd derivatives drop the Nyquist mode") {
    const Grid g = make_grid(1, {16}, {2.0 * pi});
    // cos(8x) lives entirely on the Nyquist mode; its sampled derivative is
    // not representable and must come back as zero.
    const RealField nyq = sample(g, [](double x) { return std::cos(8.0 * x); });
    CHECK(sup_abs(spectral_derivative(g, nyq, 0, 1)) < 1e-12);
    const RealField lap = laplacian(g, nyq);
    CHECK(std::abs(lap[0] + 64.0 * nyq[0]) < 1e-10);
}

TEST_CASE("grid: integrals") {
    const Grid g = make_grid(1, {64}, {2.0 * pi});
    CHECK(std::abs(integrate(g, RealField(64, 1.0)) - 2.0 * pi) < 1e-12);
    CHECK(std::abs(integrate(g, sample(g, [](double x) { return std::sin(x); }))) < 1e-14);

    const Grid w = make_grid(1, {256}, {16.0});
    const RealField gauss =
        sample(w, [](double x) { return std::exp(-x * x / 2.0) / std::sqrt(2.0 * pi); });
    CHECK(std::abs(integrate(w, gauss) - 1.0) < 1e-8);
    CHECK(std::abs(integrate(w, gauss) - rse::test::riemann(w, gauss)) < 1e-14);
}

TEST_CASE("grid: Parseval and round trip on random band-limited fields") {
    std::mt19937_64 rng(7);
    for (int dim = 1; dim <= 2; ++dim) {
        const Grid g = dim == 1 ? make_grid(1, {128}, {5.0}) : make_grid(2, {32, 16}, {5.0, 3.0});
        const RealField f = random_band_limited(g, 5, 2.0, rng);
        CHECK(std::abs(sup_abs(f) - 2.0) < 1e-12);
        ComplexField fc(f.begin(), f.end());
        double direct = 0.0;
        for (double v : f) direct += v * v;
        direct *= g.cell_volume();
        CHECK(std::abs(spectral_norm2(g, g.forward(fc)) - direct) / direct < 1e-12);
        CHECK(sup_abs_diff(g.inverse_real(g.forward(fc)), f) < 1e-12);
    }
}

TEST_CASE("grid: mixed derivatives commute in 2D") {
    std::mt19937_64 rng(11);
    const Grid g = make_grid(2, {32, 64}, {2.0 * pi, 4.0});
    const RealField f = random_band_limited(g, 6, 1.0, rng);
    const RealField a = spectral_derivative(g, spectral_derivative(g, f, 0, 1), 1, 1);
    const RealField b = spectral_derivative(g, spectral_derivative(g, f, 1, 1), 0, 1);
    CHECK(sup_abs_diff(a, b) < 1e-12);
    // Divergence of a gradient equals the Laplacian.
    CHECK(sup_abs_diff(divergence(g, gradient(g, f)), laplacian(g, f)) < 1e-10);
}

TEST_CASE("grid: product rule after dealiasing") {
    std::mt19937_64 rng(3);
    const Grid g = make_grid(1, {96 / 3 * 2}, {2.0 * pi});  // 64 points
    const RealField a = random_band_limited(g, 10, 1.0, rng);
    const RealField b = random_band_limited(g, 10, 1.0, rng);
    const RealField ab = dealiased_product(g, a, b);
    const RealField lhs = spectral_derivative(g, ab, 0, 1);
    const RealField da = spectral_derivative(g, a, 0, 1);
    const RealField db = spectral_derivative(g, b, 0, 1);
    RealField rhs(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) rhs[i] = da[i] * b[i] + a[i] * db[i];
    CHECK(sup_abs_diff(lhs, rhs) / sup_abs(rhs) < 1e-10);

    // Modes beyond N/3 are removed, modes inside are kept.
    const RealField hi = sample(g, [](double x) { return std::cos(22.0 * x); });
    const RealField lo = sample(g, [](double x) { return std::cos(21.0 * x); });
    CHECK(sup_abs(dealias(g, hi)) < 1e-14);
    CHECK(sup_abs_diff(dealias(g, lo), lo) < 1e-13);
}

TEST_CASE("grid: boundary decay warning") {
    const Grid g = make_grid(1, {64}, {8.0});
    const RealField wide = sample(g, [](double x) { return std::exp(-x * x / 8.0); });
    const RealField narrow = sample(g, [](double x) { return std::exp(-x * x * 4.0); });
    CHECK(boundary_decay_warning(g, wide, "rho").has_value());
    CHECK_FALSE(boundary_decay_warning(g, narrow, "rho").has_value());
}

TEST_CASE("grid: wrap_angle") {
    CHECK(std::abs(wrap_angle(3.0 * pi + 0.1) - (-pi + 0.1)) < 1e-14);
    CHECK(std::abs(wrap_angle(-0.2) + 0.2) < 1e-16);
    CHECK(std::abs(wrap_angle(4.0 * pi)) < 1e-14);
}

TEST_CASE("grid: dealias mask keeps |n| <= N/3 on every axis") {
    // N = 16 keeps n = -5..5; N = 32 keeps n = -10..10.
    const Grid g1 = make_grid(1, {16}, {2.0 * pi});
    double kept = 0.0;
    for (double v : dealias_mask(g1)) kept += v;
    CHECK(kept == 11.0);
    const Grid g2 = make_grid(2, {16, 32}, {2.0 * pi, 2.0 * pi});
    kept = 0.0;
    for (double v : dealias_mask(g2)) {
        CHECK((v == 0.0 || v == 1.0));
        kept += v;
    }
    CHECK(kept == 11.0 * 21.0);
}

TEST_CASE("grid: fused symbol and gradient match the two-pass evaluation") {
    std::mt19937_64 rng(5);
    const Grid g = make_grid(2, {32, 16}, {2.0 * pi, 3.0});
    const RealField f = random_band_limited(g, 6, 1.0, rng);
    // A real, even multiplier: a function of |k|^2 only.
    RealField sym(g.size());
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = 1.0 / (1.0 + g.k_squared()[i]);
    const VectorField fused = gradient_of_symbol(g, f, sym);
    const VectorField twopass = gradient(g, apply_symbol(g, f, sym));
    for (int a = 0; a < 2; ++a) CHECK(sup_abs_diff(fused[a], twopass[a]) < 1e-13);
}
