#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rse {

using cplx = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<cplx>;
// One component per axis; only the first dim() entries are meaningful.
using VectorField = std::array<RealField, 2>;

// Periodic uniform lattice in one or two dimensions. Coordinates run over
// [-L/2, L/2) on every axis; 2D samples are stored row-major with axis 0 as
// the slow index. Copies share the (immutable) transform plans.
class Grid {
public:
    Grid(int dim, std::array<int, 2> n, std::array<double, 2> length);

    int dim() const { return dim_; }
    int n(int axis) const { return n_[axis]; }
    double length(int axis) const { return length_[axis]; }
    double dx(int axis) const { return length_[axis] / n_[axis]; }
    std::size_t size() const { return size_; }
    double cell_volume() const;

    // Wavenumbers of one axis in transform ordering.
    const std::vector<double>& k(int axis) const { return k_[axis]; }
    // |k|^2 for every mode, flattened like the samples.
    const RealField& k_squared() const { return k2_; }
    // Wavenumber component along `axis` for every mode, flattened.
    const RealField& k_component(int axis) const { return kc_[axis]; }
    // Largest |k| over all modes (corner modes in 2D).
    double k_norm_max() const;

    // Coordinate of every sample along `axis`, flattened.
    const RealField& coords(int axis) const { return x_[axis]; }

    bool same_shape(const Grid& other) const;

    // Unnormalized forward transform and normalized inverse.
    ComplexField forward(const ComplexField& f) const;
    ComplexField forward(const RealField& f) const;
    ComplexField inverse(const ComplexField& fhat) const;
    RealField inverse_real(const ComplexField& fhat) const;

private:
    struct Plans;
    int dim_;
    std::array<int, 2> n_{1, 1};
    std::array<double, 2> length_{1.0, 1.0};
    std::size_t size_;
    std::array<std::vector<double>, 2> k_;
    RealField k2_;
    std::array<RealField, 2> kc_;
    std::array<RealField, 2> x_;
    std::shared_ptr<const Plans> plans_;
};

Grid make_grid(int dim, const std::vector<int>& n_points, const std::vector<double>& lengths);

bool is_power_of_two(int n);

// Multiply the transform of f by a real per-mode multiplier.
RealField apply_symbol(const Grid& g, const RealField& f, const RealField& symbol);
ComplexField apply_symbol(const Grid& g, const ComplexField& f, const RealField& symbol);

// d^order f / dx_axis^order, exact for band-limited periodic fields. The
// Nyquist mode is dropped for odd orders so real input stays real.
RealField spectral_derivative(const Grid& g, const RealField& f, int axis, int order);
RealField laplacian(const Grid& g, const RealField& f);
VectorField gradient(const Grid& g, const RealField& f);
// grad of the field whose transform is symbol * transform(f), from a single
// forward transform; an empty symbol is the identity.
VectorField gradient_of_symbol(const Grid& g, const RealField& f, const RealField& symbol);
RealField divergence(const Grid& g, const VectorField& v);

// Rectangle rule dx^dim * sum(f); spectrally accurate on a periodic lattice.
double integrate(const Grid& g, const RealField& f);
// Parseval counterpart of integrate(|f|^2) evaluated from the transform.
double spectral_norm2(const Grid& g, const ComplexField& fhat);

// 2/3-rule: zero every mode with |n| > N/3 on any axis.
RealField dealias(const Grid& g, const RealField& f);
// The same rule as a per-mode multiplier of ones and zeros.
RealField dealias_mask(const Grid& g);
RealField dealiased_product(const Grid& g, const RealField& a, const RealField& b);

// Largest |f| over the samples on the domain edge (first and last lines).
double boundary_max(const Grid& g, const RealField& f);
// Warning text if a localized field has not decayed at the edge.
std::optional<std::string> boundary_decay_warning(const Grid& g, const RealField& f,
                                                  const std::string& name,
                                                  double tol = 1e-10);

double sup_abs(const RealField& f);
double sup_abs_diff(const RealField& a, const RealField& b);
double wrap_angle(double a);

}  // namespace rse
