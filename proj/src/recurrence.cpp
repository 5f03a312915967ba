#include "rse/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rse/errors.hpp"

namespace rse {

namespace {

VectorField grad_S(const Grid& g, const Phase& S) {
    VectorField gs = gradient(g, S.s_per);
    for (int a = 0; a < g.dim(); ++a) {
        for (double& v : gs[a]) v += S.kbar[a];
    }
    return gs;
}

// (Laplacian - |grad S|^2) f
RealField op_L(const Grid& g, const RealField& f, const RealField& gs2) {
    RealField out = laplacian(g, f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= gs2[i] * f[i];
    return out;
}

// (Laplacian S + 2 grad S . grad) f
RealField op_D(const Grid& g, const RealField& f, const VectorField& gs, const RealField& lapS) {
    const VectorField gf = gradient(g, f);
    RealField out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double dot = 0.0;
        for (int a = 0; a < g.dim(); ++a) dot += gs[a][i] * gf[a][i];
        out[i] = lapS[i] * f[i] + 2.0 * dot;
    }
    return out;
}

RealField squared_norm(const Grid& g, const VectorField& v) {
    RealField out(v[0].size(), 0.0);
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[a][i] * v[a][i];
    }
    return out;
}

void require_nodeless(const RealField& R, double eps, const char* who) {
    const double rmin = *std::min_element(R.begin(), R.end());
    if (!(rmin >= eps)) {
        std::ostringstream os;
        os << who << ": min R = " << rmin << " below the node floor " << eps;
        throw NodeError(os.str());
    }
}

// div(R^2 grad S) / R
RealField divergence_form(const Grid& g, const RealField& R, const VectorField& gs) {
    VectorField flux;
    for (int a = 0; a < g.dim(); ++a) {
        flux[a].resize(R.size());
        for (std::size_t i = 0; i < R.size(); ++i) flux[a][i] = R[i] * R[i] * gs[a][i];
    }
    RealField d = divergence(g, flux);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] /= R[i];
    return d;
}

}  // namespace

RecurrencePair recurrence_start(const RealField& R) {
    return RecurrencePair{R, RealField(R.size(), 0.0), 0};
}

RecurrencePair recurrence_step(const Grid& g, const RecurrencePair& prev, const Phase& S) {
    const VectorField gs = grad_S(g, S);
    const RealField gs2 = squared_norm(g, gs);
    const RealField lapS = laplacian(g, S.s_per);
    const RealField LA = op_L(g, prev.A, gs2);
    const RealField LB = op_L(g, prev.B, gs2);
    const RealField DA = op_D(g, prev.A, gs, lapS);
    const RealField DB = op_D(g, prev.B, gs, lapS);
    RecurrencePair next{RealField(LA.size()), RealField(LA.size()), prev.n + 1};
    for (std::size_t i = 0; i < LA.size(); ++i) {
        next.A[i] = LA[i] - DB[i];
        next.B[i] = LB[i] + DA[i];
    }
    return next;
}

std::vector<RecurrencePair> recurrence_sequence(const Grid& g, const RealField& R, const Phase& S,
                                                int n_max) {
    std::vector<RecurrencePair> seq{recurrence_start(R)};
    for (int n = 1; n <= n_max; ++n) seq.push_back(recurrence_step(g, seq.back(), S));
    return seq;
}

ComplexField direct_laplacian_power(const Grid& g, const RealField& R, const Phase& S, int n) {
    ComplexField psi(R.size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::polar(R[i], S.s_per[i]);
    RealField sym(g.size());
    for (std::size_t i = 0; i < sym.size(); ++i) {
        double q2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double q = g.k_component(a)[i] + S.kbar[a];
            q2 += q * q;
        }
        sym[i] = std::pow(-q2, n);
    }
    return apply_symbol(g, psi, sym);
}

double recurrence_relative_error(const Grid& g, const RealField& R, const Phase& S, int n) {
    const auto seq = recurrence_sequence(g, R, S, n);
    const ComplexField direct = direct_laplacian_power(g, R, S, n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
        const cplx rec = cplx(seq[n].A[i], seq[n].B[i]) * std::polar(1.0, S.s_per[i]);
        num = std::max(num, std::abs(rec - direct[i]));
        den = std::max(den, std::abs(direct[i]));
    }
    return den > 0.0 ? num / den : num;
}

double b1_identity_check(const Grid& g, const RealField& R, const Phase& S, double eps) {
    require_nodeless(R, eps, "b1_identity_check");
    const VectorField gs = grad_S(g, S);
    const RealField lhs = op_D(g, R, gs, laplacian(g, S.s_per));
    const RealField rhs = divergence_form(g, R, gs);
    return sup_abs_diff(lhs, rhs);
}

RealField alpha(const Grid& g, const RealField& R, const Phase& S) {
    return op_D(g, R, grad_S(g, S), laplacian(g, S.s_per));
}

A2B2Residual a2_b2_check(const Grid& g, const RealField& R, const Phase& S, double eps) {
    require_nodeless(R, eps, "a2_b2_check");
    const auto seq = recurrence_sequence(g, R, S, 2);
    const VectorField gs = grad_S(g, S);
    const RealField gs2 = squared_norm(g, gs);
    const RealField lapS = laplacian(g, S.s_per);
    const RealField LR = op_L(g, R, gs2);
    const RealField div_form = divergence_form(g, R, gs);

    const RealField LLR = op_L(g, LR, gs2);
    const RealField D_div = op_D(g, div_form, gs, lapS);
    const RealField L_div = op_L(g, div_form, gs2);
    const RealField D_LR = op_D(g, LR, gs, lapS);

    RealField a2(R.size());
    RealField b2(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
        a2[i] = LLR[i] - D_div[i];
        b2[i] = L_div[i] + D_LR[i];
    }
    // Common scale: B_2 vanishes identically for constant phases.
    const double scale = std::max({sup_abs(seq[2].A), sup_abs(seq[2].B), 1e-300});
    A2B2Residual r;
    r.a2 = sup_abs_diff(a2, seq[2].A) / scale;
    r.b2 = sup_abs_diff(b2, seq[2].B) / scale;
    return r;
}

}  // namespace rse
