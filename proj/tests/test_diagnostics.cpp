#include <doctest.h>

#include "rse/diagnostics.hpp"
#include "rse/errors.hpp"
#include "rse/scenario.hpp"
#include "test_util.hpp"

using namespace rse;
using rse::test::pi;
using rse::test::sample;

namespace {

HydroState plane_wave(const Grid& g, double k) {
    HydroState st;
    st.rho.assign(g.size(), 1.0 / g.length(0));
    st.s_per.assign(g.size(), 0.0);
    st.kbar = {k, 0.0};
    return st;
}

double max_abs(const EhrenfestIntegrals& e, int dim) {
    double m = 0.0;
    for (int a = 0; a < dim; ++a) {
        m = std::max({m, std::abs(e.I1_paper[a]), std::abs(e.I1_cc[a]), std::abs(e.I2_paper[a]),
                      std::abs(e.I2_cc[a])});
    }
    return m;
}

}  // namespace

TEST_CASE("diagnostics: plane wave observables") {
    const Grid g = make_grid(1, {32}, {2.0 * pi});
    PhysicsParams p;
    p.hbar = 0.9;
    p.mass = 1.7;
    const DiagnosticsRecord r = observables(g, plane_wave(g, 3.0), p);
    CHECK(std::abs(r.norm - 1.0) < 1e-14);
    CHECK(std::abs(r.mean_p[0] - p.hbar * 3.0) < 1e-13);
    CHECK(std::abs(r.energy - p.hbar * p.hbar * 9.0 / (2.0 * p.mass)) < 1e-12);
}

TEST_CASE("diagnostics: Gaussian observables") {
    // Free Gaussian of waist sigma and wavevector k: <p> = hbar k,
    // E = hbar^2 / (8 m sigma^2) + hbar^2 k^2 / 2m.
    const Grid g = make_grid(1, {128}, {32.0});
    PhysicsParams p;
    const double k = 2.0 * pi * 2.0 / 32.0;
    InitialSpec spec;
    spec.kind = InitialSpec::Kind::gaussian;
    spec.center = {1.5};
    spec.sigma = {1.2};
    spec.kbar = {k};
    const DiagnosticsRecord r = observables(g, build_initial(g, spec, p), p);
    CHECK(std::abs(r.norm - 1.0) < 1e-12);
    CHECK(std::abs(r.mean_x[0] - 1.5) < 1e-12);
    CHECK(std::abs(r.mean_p[0] - k) < 1e-12);
    CHECK(std::abs(r.energy - (1.0 / (8.0 * 1.44) + 0.5 * k * k)) < 1e-12);

    const DiagnosticsRecord w = wave_observables(g, reconstruct(g, build_initial(g, spec, p)), p, 0.0);
    CHECK(std::abs(w.energy - r.energy) < 1e-12);
    CHECK(std::abs(w.mean_p[0] - r.mean_p[0]) < 1e-12);
}

TEST_CASE("diagnostics: Ehrenfest integrals vanish for stationary and uniform states") {
    PhysicsParams p;
    {
        const Grid g = make_grid(1, {32}, {16.0});
        const GOperator gop(g, p.lambda_c, GPolicy::strict);
        InitialSpec spec;
        spec.kind = InitialSpec::Kind::gaussian;
        spec.center = {0.0};
        spec.sigma = {1.0};
        const HydroState st = build_initial(g, spec, p);
        CHECK(max_abs(ehrenfest_integrals(g, st, p, gop), 1) < 1e-8);
        CHECK(max_abs(ehrenfest_integrals(g, st, p, gop, 1e-12, {1e-6, 1e-3}), 1) < 1e-8);
    }
    {
        const Grid g = make_grid(1, {32}, {2.0 * pi});
        PhysicsParams pp = p;
        pp.lambda_c = 0.05;
        const GOperator gop(g, pp.lambda_c, GPolicy::strict);
        const HydroState st = plane_wave(g, 2.0);
        CHECK(max_abs(ehrenfest_integrals(g, st, pp, gop), 1) < 1e-8);
        CHECK(sup_abs(h_imag(g, st, pp, gop)) < 1e-12);
        CHECK(diagnostics(g, st, pp, gop).hi_norm < 1e-12);
    }
}

TEST_CASE("diagnostics: continuity-consistent I1 is the current defect") {
    // 64 points resolve psi to round-off; lambda k_max = 0.96.
    const Grid g = make_grid(1, {64}, {2.0 * pi});
    PhysicsParams p;
    p.mass = 1.5;
    p.lambda_c = 0.03;
    const GOperator gop(g, p.lambda_c, GPolicy::strict);
    HydroState st;
    st.rho = sample(g, [](double x) { return (1.0 + 0.5 * std::cos(x)) / (2.0 * pi); });
    st.s_per = sample(g, [](double x) { return 0.1 * std::pow(std::sin(x), 3); });
    const EhrenfestIntegrals e = ehrenfest_integrals(g, st, p, gop);
    // Independent evaluation: j_Sch - j_RM = (2 hbar/m) rho d/dx (G + 1/2) s.
    // s = 0.1 sin^3 x = 0.075 sin x - 0.025 sin 3x.
    // G + 1/2 = -x^2 / (2 (1 + sqrt(1 - x^2))^2), exact and free of cancellation.
    auto Gc = [&](double k) {
        const double x = p.lambda_c * p.lambda_c * k * k;
        const double r = 1.0 + std::sqrt(1.0 - x * x);
        return -x * x / (2.0 * r * r);
    };
    RealField dj(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coords(0)[i];
        const double d = 0.075 * Gc(1) * std::cos(x) - 0.075 * Gc(3) * std::cos(3.0 * x);
        dj[i] = 2.0 * p.hbar / p.mass * st.rho[i] * d;
    }
    double sum = 0.0;
    for (double v : dj) sum += v;
    const double expect = -p.mass * sum * g.dx(0);
    CHECK(std::abs(e.I1_cc[0] - expect) < 1e-14);
    CHECK(std::abs(expect) > 1e-9);
}

TEST_CASE("diagnostics: spectral shift and Galilean boost") {
    const Grid g = make_grid(1, {32}, {16.0});
    const RealField f = sample(g, [](double x) { return std::sin(2.0 * pi * 3.0 * x / 16.0); });
    const RealField shifted = spectral_shift(g, f, {0.37, 0.0});
    const RealField expect = sample(g, [](double x) { return std::sin(2.0 * pi * 3.0 * (x + 0.37) / 16.0); });
    CHECK(sup_abs_diff(shifted, expect) < 1e-13);

    // A Gaussian moving at v = hbar k / m, seen from the co-moving frame, is
    // the Gaussian at rest. vt is a whole number of cells so that the
    // (kinked-at-the-edge) analytic phase is shifted exactly.
    PhysicsParams p;
    const double k = 2.0 * pi / 16.0;
    const double v = k;
    const double t = 4.0 * g.dx(0) / v;
    const HydroState moving = free_gaussian_1d(g, 0.0, 1.0, k, t, p);
    const HydroState rest = free_gaussian_1d(g, 0.0, 1.0, 0.0, t, p);
    const HydroState b = galilean_boost(g, moving, p, {v, 0.0}, t);
    CHECK(std::abs(b.kbar[0]) < 1e-15);
    CHECK(sup_abs_diff(b.rho, rest.rho) < 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (rest.rho[i] > 1e-8) CHECK(std::abs(wrap_angle(b.s_per[i] - rest.s_per[i])) < 1e-10);
    }

    CHECK_THROWS_AS(galilean_boost(g, moving, p, {0.3, 0.0}, t), WindingError);
    PhysicsParams ph = p;
    ph.potential.kind = Potential::Kind::harmonic;
    ph.potential.omega = {1.0, 0.0};
    CHECK_THROWS_AS(galilean_boost(g, moving, ph, {v, 0.0}, t), ValidationError);
}

TEST_CASE("diagnostics: tensor products") {
    const Grid ga = make_grid(1, {8}, {2.0});
    const Grid gb = make_grid(1, {16}, {3.0});
    const Grid g2 = tensor_grid(ga, gb);
    CHECK(g2.dim() == 2);
    CHECK(g2.n(0) == 8);
    CHECK(g2.n(1) == 16);
    HydroState a, b;
    a.rho = sample(ga, [](double x) { return 1.0 + x * x; });
    a.s_per = sample(ga, [](double x) { return x; });
    a.kbar = {pi, 0.0};
    b.rho = sample(gb, [](double y) { return 2.0 + y; });
    b.s_per = sample(gb, [](double y) { return -y; });
    b.kbar = {2.0 * pi / 3.0, 0.0};
    const HydroState ab = product_state(a, b);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        const double x = g2.coords(0)[i], y = g2.coords(1)[i];
        CHECK(std::abs(ab.rho[i] - (1.0 + x * x) * (2.0 + y)) < 1e-14);
        CHECK(std::abs(ab.s_per[i] - (x - y)) < 1e-14);
    }
    CHECK(ab.kbar[1] == b.kbar[0]);

    Potential va, vb;
    va.kind = Potential::Kind::harmonic;
    va.omega = {2.0, 0.0};
    const Potential v2 = additive_potential(ga, va, gb, vb, 1.0);
    CHECK(v2.kind == Potential::Kind::harmonic);
    CHECK(v2.omega[0] == 2.0);
    CHECK(v2.omega[1] == 0.0);
}
