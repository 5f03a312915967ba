#include <doctest.h>

#include <random>

#include "rse/checks.hpp"
#include "rse/errors.hpp"
#include "rse/madelung.hpp"
#include "test_util.hpp"

using namespace rse;
using rse::test::pi;
using rse::test::sample;

TEST_CASE("madelung: decompose then reconstruct round-trips a nodeless field") {
    std::mt19937_64 rng(17);
    const Grid g = make_grid(1, {128}, {2.0 * pi});
    const RealField amp = random_band_limited(g, 4, 0.4, rng);
    const RealField phase = random_band_limited(g, 4, 2.5, rng);
    ComplexField psi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        psi[i] = std::polar(1.0 + amp[i], 3.0 * g.coords(0)[i] + phase[i]);
    }
    const HydroState st = decompose(g, psi);
    CHECK(std::abs(st.kbar[0] - 3.0) < 1e-12);
    const ComplexField back = reconstruct(g, st);
    double d = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) d = std::max(d, std::abs(back[i] - psi[i]));
    CHECK(d < 1e-12);
    // The periodic remainder differs from the generating phase by a constant.
    const double c = st.s_per[0] - phase[0];
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(wrap_angle(st.s_per[i] - phase[i] - c)) < 1e-11);
}

TEST_CASE("madelung: plane wave on a lattice winding") {
    const Grid g = make_grid(1, {64}, {16.0});
    const double k = 2.0 * pi * 5.0 / 16.0;
    ComplexField psi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) psi[i] = std::polar(0.25, k * g.coords(0)[i]);
    const HydroState st = decompose(g, psi);
    CHECK(std::abs(st.kbar[0] - k) < 1e-12);
    CHECK(sup_abs_diff(st.rho, RealField(g.size(), 1.0 / 16.0)) < 1e-15);
    const double s0 = st.s_per[0];
    for (double v : st.s_per) CHECK(std::abs(v - s0) < 1e-12);
}

TEST_CASE("madelung: 2D windings are recovered per axis") {
    const Grid g = make_grid(2, {32, 64}, {2.0 * pi, 4.0 * pi});
    ComplexField psi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coords(0)[i];
        const double y = g.coords(1)[i];
        psi[i] = std::polar(1.0 + 0.2 * std::cos(x) * std::sin(y), 2.0 * x - 1.5 * y + 0.3 * std::sin(x + y));
    }
    const HydroState st = decompose(g, psi);
    CHECK(std::abs(st.kbar[0] - 2.0) < 1e-12);
    CHECK(std::abs(st.kbar[1] + 1.5) < 1e-12);
    const ComplexField back = reconstruct(g, st);
    double d = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) d = std::max(d, std::abs(back[i] - psi[i]));
    CHECK(d < 1e-12);
}

TEST_CASE("madelung: nodes and fractional windings are rejected") {
    const Grid g = make_grid(1, {64}, {2.0 * pi});
    ComplexField node(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) node[i] = std::sin(g.coords(0)[i]);
    CHECK_THROWS_AS(decompose(g, node), NodeError);

    // A phase ramp 2.5 x across the cell is not periodic.
    ComplexField frac(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) frac[i] = std::polar(1.0, 2.5 * g.coords(0)[i]);
    CHECK_THROWS_AS(decompose(g, frac), WindingError);
}

TEST_CASE("madelung: Schrodinger current is (hbar/m) rho grad S") {
    const Grid g = make_grid(1, {64}, {2.0 * pi});
    PhysicsParams p;
    p.hbar = 0.7;
    p.mass = 1.9;
    HydroState st;
    st.rho = sample(g, [](double x) { return 1.0 + 0.5 * std::cos(x); });
    st.s_per = sample(g, [](double x) { return 0.3 * std::sin(2.0 * x); });
    st.kbar = {2.0, 0.0};
    const VectorField j = schrodinger_current(g, st, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coords(0)[i];
        const double expect = p.hbar / p.mass * (1.0 + 0.5 * std::cos(x)) * (2.0 + 0.6 * std::cos(2.0 * x));
        CHECK(std::abs(j[0][i] - expect) < 1e-12);
    }
}

TEST_CASE("madelung: unwindowed correction current equals the literal difference") {
    // psi is resolved to round-off on 64 points, so the phase Laplacian built
    // from psi matches the spectral one; lambda k_max = 0.96.
    const Grid g = make_grid(1, {64}, {2.0 * pi});
    PhysicsParams p;
    p.lambda_c = 0.03;
    const GOperator gop(g, p.lambda_c, GPolicy::strict);
    HydroState st;
    st.rho = sample(g, [](double x) { return 1.0 + 0.5 * std::cos(x); });
    st.s_per = sample(g, [](double x) { return 0.3 * std::sin(2.0 * x) + 0.1 * std::cos(3.0 * x); });
    st.kbar = {1.0, 0.0};
    const VectorField js = schrodinger_current(g, st, p);
    const VectorField jl = modified_current(g, st, p, gop);
    const VectorField jc = correction_current(g, st, p, gop);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(js[0][i] - jl[0][i] - jc[0][i]) < 1e-12);

    // Oracle by hand on single modes: G acts as g(k) on sin 2x and cos 3x, and
    // c_0 = -1/2 on the winding, so j_RM = -(2 hbar/m) rho (c0 kbar + d/dx G s).
    const double l2 = p.lambda_c * p.lambda_c;
    // (sqrt(1 - x^2) - 1) / x^2 rewritten as -1 / (1 + sqrt(1 - x^2)) to avoid
    // cancellation at small x.
    const double g2 = -1.0 / (1.0 + std::sqrt(1.0 - std::pow(l2 * 4.0, 2)));
    const double g3 = -1.0 / (1.0 + std::sqrt(1.0 - std::pow(l2 * 9.0, 2)));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coords(0)[i];
        const double dgs = g2 * 0.6 * std::cos(2.0 * x) - g3 * 0.3 * std::sin(3.0 * x);
        const double expect = -2.0 * st.rho[i] * (-0.5 * 1.0 + dgs);
        CHECK(std::abs(jl[0][i] - expect) < 1e-12);
    }
}

TEST_CASE("madelung: correction vanishes for a uniform phase gradient") {
    const Grid g = make_grid(1, {32}, {2.0 * pi});
    PhysicsParams p;
    const GOperator gop(g, 0.05, GPolicy::strict);
    HydroState st;
    st.rho.assign(g.size(), 1.0 / (2.0 * pi));
    st.s_per.assign(g.size(), 0.4);
    st.kbar = {3.0, 0.0};
    for (const CorrectionFilter& w : {CorrectionFilter{}, CorrectionFilter{1e-6, 1e-3}}) {
        const VectorField jc = correction_current(g, st, p, gop, w);
        CHECK(sup_abs(jc[0]) < 1e-14);
    }
}

TEST_CASE("madelung: phase Laplacian of a folded quadratic and its window") {
    // rho = e^{-x^2}, S = 0.2 x^2: Laplacian S = 0.4 wherever psi is resolved,
    // although s_per itself has a kink at the cell boundary.
    const Grid g = make_grid(1, {64}, {16.0});
    HydroState st;
    st.rho = sample(g, [](double x) { return std::exp(-x * x); });
    st.s_per = sample(g, [](double x) { return 0.2 * x * x; });
    const RealField lap = phase_laplacian(g, st);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (st.rho[i] >= 1e-6) CHECK(std::abs(lap[i] - 0.4) < 1e-9);
    }
    const RealField lw = windowed_phase_laplacian(g, st, CorrectionFilter{1e-6, 1e-3});
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        num += st.rho[i] * lap[i];
        den += st.rho[i];
    }
    const double mean = num / den;
    CHECK(std::abs(mean - 0.4) < 1e-9);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (st.rho[i] >= 1e-3) CHECK(lw[i] == doctest::Approx(lap[i]).epsilon(1e-15));
        if (st.rho[i] <= 1e-6) CHECK(lw[i] == mean);
    }
    // Disabled window: the raw Laplacian.
    CHECK(sup_abs_diff(windowed_phase_laplacian(g, st, CorrectionFilter{}), lap) == 0.0);
}

TEST_CASE("madelung: correction vanishes for folded quadratic phases") {
    const Grid g = make_grid(1, {64}, {16.0});
    PhysicsParams p;
    p.lambda_c = 0.05;  // lambda k_max = 0.63
    const GOperator gop(g, p.lambda_c, GPolicy::strict);
    HydroState st;
    st.rho = sample(g, [](double x) { return std::exp(-(x - 0.5) * (x - 0.5)) / std::sqrt(pi); });
    st.s_per = sample(g, [](double x) { return 0.3 * x * x - 0.7 * x; });
    st.kbar = {2.0 * pi * 3.0 / 16.0, 0.0};
    const VectorField jc = correction_current(g, st, p, gop, CorrectionFilter{1e-6, 1e-3});
    CHECK(sup_abs(jc[0]) < 1e-12);
}

TEST_CASE("madelung: spectral cap removes the correction above lambda |k| = kappa") {
    // Phase with a mode at k = 2 and one at k = 9; with lambda = 0.1 they sit
    // at lambda k = 0.2 and 0.9. kappa = 0.5 keeps only the first.
    const Grid g = make_grid(1, {64}, {2.0 * pi});
    PhysicsParams p;
    p.lambda_c = 0.1;
    const GOperator gop(g, p.lambda_c, GPolicy::projected);
    HydroState lo, both;
    lo.rho.assign(g.size(), 1.0 / (2.0 * pi));
    both.rho = lo.rho;
    lo.s_per = sample(g, [](double x) { return 0.2 * std::cos(2.0 * x); });
    both.s_per = sample(g, [](double x) { return 0.2 * std::cos(2.0 * x) + 0.01 * std::sin(9.0 * x); });
    const CorrectionFilter cap{0.0, 0.0, 0.5};
    const VectorField a = correction_current(g, both, p, gop, cap);
    const VectorField b = correction_current(g, lo, p, gop, CorrectionFilter{});
    CHECK(sup_abs(b[0]) > 1e-6);
    // Uniform rho: the correction is linear in s_per, so the k = 9 part drops out.
    CHECK(sup_abs_diff(a[0], b[0]) < 1e-14);
    const VectorField full = correction_current(g, both, p, gop, CorrectionFilter{});
    CHECK(sup_abs_diff(full[0], b[0]) > 1e-6);
}

TEST_CASE("madelung: product-rule divergence of the correction") {
    PhysicsParams p;
    p.lambda_c = 0.03;
    p.mass = 1.3;
    {
        // Resolved periodic state: agrees with the spectral divergence.
        const Grid g = make_grid(1, {64}, {2.0 * pi});
        const GOperator gop(g, p.lambda_c, GPolicy::strict);
        HydroState st;
        st.rho = sample(g, [](double x) { return (1.0 + 0.4 * std::cos(x)) / (2.0 * pi); });
        st.s_per = sample(g, [](double x) { return 0.5 * std::sin(2.0 * x) + 0.2 * std::cos(3.0 * x); });
        st.kbar = {1.0, 0.0};
        const RealField a = correction_divergence(g, st, p, gop, CorrectionFilter{});
        const RealField b = divergence(g, correction_current(g, st, p, gop, CorrectionFilter{}));
        CHECK(sup_abs(b) > 1e-6);
        CHECK(sup_abs_diff(a, b) < 1e-12);
    }
    {
        // Capped correction on a localized state: the product rule decays with
        // rho, whereas the spectral divergence leaves truncation ringing of
        // the band-limited potential across the far tails.
        const Grid g = make_grid(1, {64}, {6.0 * pi});
        const GOperator gop(g, 0.1, GPolicy::projected);
        HydroState st;
        st.rho = sample(g, [](double x) { return std::exp(-x * x / 2.0) / std::sqrt(2.0 * pi); });
        st.s_per = sample(g, [](double x) { return 0.1 * std::pow(std::sin(x), 3); });
        const CorrectionFilter w{1e-4, 1e-2, 0.5};
        const RealField d = correction_divergence(g, st, p, gop, w);
        const RealField spectral = divergence(g, correction_current(g, st, p, gop, w));
        double tail = 0.0, tail_spectral = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::abs(g.coords(0)[i]) < 8.0) continue;  // rho < 1e-14 beyond
            tail = std::max(tail, std::abs(d[i]));
            tail_spectral = std::max(tail_spectral, std::abs(spectral[i]));
        }
        CHECK(tail < 1e-17);
        CHECK(tail_spectral > 1e-15);
        double mass = 0.0;
        for (double v : d) mass += v;
        CHECK(std::abs(mass * g.dx(0)) < 1e-15);
    }
}
