#include "rse/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>

#include "rse/errors.hpp"

namespace rse {

namespace {
// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Plans are made for SIMD-aligned storage, which std::vector does not
// guarantee; transforms therefore run in a per-thread aligned buffer. The
// two copies are cheap next to the unaligned code path they avoid.
class AlignedScratch {
public:
    ~AlignedScratch() { fftw_free(buf_); }
    fftw_complex* get(std::size_t n) {
        if (n > size_) {
            fftw_free(buf_);
            buf_ = fftw_alloc_complex(n);
            size_ = n;
        }
        return buf_;
    }

private:
    fftw_complex* buf_ = nullptr;
    std::size_t size_ = 0;
};

void execute_in_place(fftw_plan plan, cplx* data, std::size_t n) {
    thread_local AlignedScratch scratch;
    fftw_complex* buf = scratch.get(n);
    std::memcpy(buf, data, n * sizeof(cplx));
    fftw_execute_dft(plan, buf, buf);
    std::memcpy(data, buf, n * sizeof(cplx));
}
}  // namespace

struct Grid::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    Plans(int dim, std::array<int, 2> n) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        const std::size_t total = static_cast<std::size_t>(n[0]) * n[1];
        fftw_complex* buf = fftw_alloc_complex(total);
        const unsigned flags = FFTW_ESTIMATE;
        if (dim == 1) {
            fwd = fftw_plan_dft_1d(n[0], buf, buf, FFTW_FORWARD, flags);
            bwd = fftw_plan_dft_1d(n[0], buf, buf, FFTW_BACKWARD, flags);
        } else {
            fwd = fftw_plan_dft_2d(n[0], n[1], buf, buf, FFTW_FORWARD, flags);
            bwd = fftw_plan_dft_2d(n[0], n[1], buf, buf, FFTW_BACKWARD, flags);
        }
        fftw_free(buf);
    }
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid::Grid(int dim, std::array<int, 2> n, std::array<double, 2> length) : dim_(dim) {
    if (dim != 1 && dim != 2) {
        throw ValidationError("grid: dim must be 1 or 2, got " + std::to_string(dim));
    }
    for (int a = 0; a < dim; ++a) {
        if (!is_power_of_two(n[a]) || n[a] < 8) {
            throw ValidationError("grid: n_points[" + std::to_string(a) +
                                  "] must be a power of two >= 8, got " +
                                  std::to_string(n[a]));
        }
        if (!(length[a] > 0.0) || !std::isfinite(length[a])) {
            throw ValidationError("grid: length[" + std::to_string(a) + "] must be positive");
        }
        n_[a] = n[a];
        length_[a] = length[a];
    }
    size_ = static_cast<std::size_t>(n_[0]) * n_[1];

    for (int a = 0; a < dim; ++a) {
        const int N = n_[a];
        k_[a].resize(N);
        const double dk = 2.0 * std::numbers::pi / length_[a];
        for (int j = 0; j < N; ++j) {
            const int m = j < N / 2 ? j : j - N;
            k_[a][j] = dk * m;
        }
    }

    k2_.assign(size_, 0.0);
    for (int a = 0; a < dim; ++a) {
        kc_[a].assign(size_, 0.0);
        x_[a].assign(size_, 0.0);
    }
    for (int i = 0; i < n_[0]; ++i) {
        for (int j = 0; j < n_[1]; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * n_[1] + j;
            const int ij[2] = {i, j};
            for (int a = 0; a < dim; ++a) {
                const double kk = k_[a][ij[a]];
                kc_[a][idx] = kk;
                k2_[idx] += kk * kk;
                x_[a][idx] = -0.5 * length_[a] + ij[a] * dx(a);
            }
        }
    }
    plans_ = std::make_shared<const Plans>(dim, n_);
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= dx(a);
    return v;
}

double Grid::k_norm_max() const { return std::sqrt(*std::max_element(k2_.begin(), k2_.end())); }

bool Grid::same_shape(const Grid& o) const {
    if (dim_ != o.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (n_[a] != o.n_[a] || length_[a] != o.length_[a]) return false;
    }
    return true;
}

ComplexField Grid::forward(const ComplexField& f) const {
    if (f.size() != size_) throw ValidationError("grid: field size does not match grid");
    ComplexField out(f);
    execute_in_place(plans_->fwd, out.data(), size_);
    return out;
}

ComplexField Grid::forward(const RealField& f) const {
    if (f.size() != size_) throw ValidationError("grid: field size does not match grid");
    ComplexField c(f.begin(), f.end());
    execute_in_place(plans_->fwd, c.data(), size_);
    return c;
}

ComplexField Grid::inverse(const ComplexField& fhat) const {
    if (fhat.size() != size_) throw ValidationError("grid: field size does not match grid");
    ComplexField out(fhat);
    execute_in_place(plans_->bwd, out.data(), size_);
    const double s = 1.0 / static_cast<double>(size_);
    for (auto& v : out) v *= s;
    return out;
}

RealField Grid::inverse_real(const ComplexField& fhat) const {
    ComplexField c = inverse(fhat);
    RealField r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = c[i].real();
    return r;
}

Grid make_grid(int dim, const std::vector<int>& n_points, const std::vector<double>& lengths) {
    if (dim != 1 && dim != 2) {
        throw ValidationError("grid: dim must be 1 or 2, got " + std::to_string(dim));
    }
    if (static_cast<int>(n_points.size()) != dim || static_cast<int>(lengths.size()) != dim) {
        throw ValidationError("grid: n_points and length need one entry per axis");
    }
    std::array<int, 2> n{1, 1};
    std::array<double, 2> L{1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
        n[a] = n_points[a];
        L[a] = lengths[a];
    }
    return Grid(dim, n, L);
}

RealField apply_symbol(const Grid& g, const RealField& f, const RealField& symbol) {
    ComplexField h = g.forward(f);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= symbol[i];
    return g.inverse_real(h);
}

ComplexField apply_symbol(const Grid& g, const ComplexField& f, const RealField& symbol) {
    ComplexField h = g.forward(f);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= symbol[i];
    return g.inverse(h);
}

RealField spectral_derivative(const Grid& g, const RealField& f, int axis, int order) {
    if (axis < 0 || axis >= g.dim()) throw ValidationError("derivative: axis out of range");
    if (order < 1) throw ValidationError("derivative: order must be >= 1");
    const int N = g.n(axis);
    const double k_nyq = std::numbers::pi * N / g.length(axis) * (1.0 - 1e-12);
    const RealField& kc = g.k_component(axis);
    ComplexField h = g.forward(f);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double kk = kc[i];
        if (order % 2 == 1 && std::abs(kk) >= k_nyq) {
            h[i] = 0.0;
            continue;
        }
        cplx factor(1.0, 0.0);
        for (int o = 0; o < order; ++o) factor *= cplx(0.0, kk);
        h[i] *= factor;
    }
    return g.inverse_real(h);
}

RealField laplacian(const Grid& g, const RealField& f) {
    RealField sym(g.size());
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = -g.k_squared()[i];
    return apply_symbol(g, f, sym);
}

namespace {
// k_a with the Nyquist mode of the axis dropped: the multiplier of a first
// derivative is i times this.
RealField first_derivative_k(const Grid& g, int axis) {
    const double k_nyq = std::numbers::pi * g.n(axis) / g.length(axis) * (1.0 - 1e-12);
    RealField k = g.k_component(axis);
    for (double& v : k) {
        if (std::abs(v) >= k_nyq) v = 0.0;
    }
    return k;
}
}  // namespace

VectorField gradient(const Grid& g, const RealField& f) { return gradient_of_symbol(g, f, {}); }

VectorField gradient_of_symbol(const Grid& g, const RealField& f, const RealField& symbol) {
    ComplexField h = g.forward(f);
    if (!symbol.empty()) {
        for (std::size_t i = 0; i < h.size(); ++i) h[i] *= symbol[i];
    }
    VectorField v;
    ComplexField ha(h.size());
    for (int a = 0; a < g.dim(); ++a) {
        const RealField k = first_derivative_k(g, a);
        for (std::size_t i = 0; i < h.size(); ++i) ha[i] = cplx(-k[i] * h[i].imag(), k[i] * h[i].real());
        v[a] = g.inverse_real(ha);
    }
    return v;
}

RealField divergence(const Grid& g, const VectorField& v) {
    ComplexField sum(g.size(), cplx(0.0));
    for (int a = 0; a < g.dim(); ++a) {
        const ComplexField h = g.forward(v[a]);
        const RealField k = first_derivative_k(g, a);
        for (std::size_t i = 0; i < h.size(); ++i) sum[i] += cplx(-k[i] * h[i].imag(), k[i] * h[i].real());
    }
    return g.inverse_real(sum);
}

double integrate(const Grid& g, const RealField& f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.cell_volume();
}

double spectral_norm2(const Grid& g, const ComplexField& fhat) {
    double s = 0.0;
    for (const auto& v : fhat) s += std::norm(v);
    return s * g.cell_volume() / static_cast<double>(g.size());
}

RealField dealias_mask(const Grid& g) {
    RealField mask(g.size(), 1.0);
    for (int i = 0; i < g.n(0); ++i) {
        for (int j = 0; j < g.n(1); ++j) {
            const int ij[2] = {i, j};
            for (int a = 0; a < g.dim(); ++a) {
                const int N = g.n(a);
                const int m = ij[a] < N / 2 ? ij[a] : ij[a] - N;
                if (3 * std::abs(m) > N) mask[static_cast<std::size_t>(i) * g.n(1) + j] = 0.0;
            }
        }
    }
    return mask;
}

RealField dealias(const Grid& g, const RealField& f) { return apply_symbol(g, f, dealias_mask(g)); }

RealField dealiased_product(const Grid& g, const RealField& a, const RealField& b) {
    RealField p(a.size());
    const RealField da = dealias(g, a);
    const RealField db = dealias(g, b);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = da[i] * db[i];
    return dealias(g, p);
}

double boundary_max(const Grid& g, const RealField& f) {
    double m = 0.0;
    const int n0 = g.n(0);
    const int n1 = g.n(1);
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            bool edge = (i == 0 || i == n0 - 1);
            if (g.dim() == 2) edge = edge || j == 0 || j == n1 - 1;
            if (edge) m = std::max(m, std::abs(f[static_cast<std::size_t>(i) * n1 + j]));
        }
    }
    return m;
}

std::optional<std::string> boundary_decay_warning(const Grid& g, const RealField& f,
                                                  const std::string& name, double tol) {
    const double m = boundary_max(g, f);
    if (m <= tol) return std::nullopt;
    std::ostringstream os;
    os << "boundary decay: |" << name << "| reaches " << m << " at the domain edge (limit "
       << tol << ")";
    return os.str();
}

double sup_abs(const RealField& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double sup_abs_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace rse
