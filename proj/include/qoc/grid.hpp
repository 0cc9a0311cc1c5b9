#ifndef QOC_GRID_HPP
#define QOC_GRID_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qoc/common.hpp"

namespace qoc {

/// Uniform spatial grid on [-x_max, x_max) with a power-of-two point count.
struct SpatialGrid {
    double x_max = 0.0;
    int n_points = 0;

    SpatialGrid() = default;
    SpatialGrid(double xmax, int n) : x_max(xmax), n_points(n) {
        if (!(xmax > 0)) throw Error("grid: x_max must be positive");
        if (n < 8 || !is_power_of_two(n))
            throw Error("grid: n_points must be a power of two >= 8");
    }

    double dx() const { return 2.0 * x_max / n_points; }
    double x(int i) const { return -x_max + i * dx(); }

    /// Momentum grid in standard discrete-Fourier ordering.
    double k(int m) const {
        const double dk = 2.0 * pi / (n_points * dx());
        return (m <= n_points / 2 ? m : m - n_points) * dk;
    }

    bool operator==(const SpatialGrid& o) const {
        return x_max == o.x_max && n_points == o.n_points;
    }
};

struct Wavefunction {
    SpatialGrid grid;
    CVector psi;

    Wavefunction() = default;
    Wavefunction(SpatialGrid g, CVector v) : grid(g), psi(std::move(v)) {
        if (psi.size() != grid.n_points) throw Error("wavefunction: size mismatch");
    }

    double norm2() const { return psi.squaredNorm() * grid.dx(); }
    double norm() const { return std::sqrt(norm2()); }
    void normalize() { psi /= norm(); }
};

/// <a|b> = sum_i a_i* b_i dx, conjugate-linear in the first argument.
inline Complex inner_product(const Wavefunction& a, const Wavefunction& b) {
    if (!(a.grid == b.grid)) throw Error("inner_product: grid mismatch");
    return a.psi.dot(b.psi) * a.grid.dx();
}

// --- Potentials ------------------------------------------------------------

/// V(x) = w0^4/(64 B) x^4 - w0^2/4 x^2 + beta x^3.
struct AsymmetricDoubleWell {
    double B = 1.0;
    double omega0 = 1.0;
    double beta = 1.0 / 256.0;

    double operator()(double x) const {
        const double w2 = omega0 * omega0;
        return w2 * w2 / (64.0 * B) * x * x * x * x - 0.25 * w2 * x * x +
               beta * x * x * x;
    }
};

/// Potential sampled at arbitrary abscissae, resampled onto a grid by
/// linear interpolation. Outside the tabulated range the end values hold.
struct TabulatedPotential {
    std::vector<double> x;
    std::vector<double> v;

    double operator()(double xq) const {
        if (x.size() < 2 || x.size() != v.size())
            throw Error("tabulated potential: need >= 2 (x, V) samples");
        if (xq <= x.front()) return v.front();
        if (xq >= x.back()) return v.back();
        auto it = std::upper_bound(x.begin(), x.end(), xq);
        const auto j = static_cast<size_t>(it - x.begin());
        const double t = (xq - x[j - 1]) / (x[j] - x[j - 1]);
        return (1.0 - t) * v[j - 1] + t * v[j];
    }
};

/// Any callable V(x); covers the model wells and user-supplied forms.
struct Potential {
    std::function<double(double)> f;

    Potential() = default;
    Potential(AsymmetricDoubleWell w) : f(w) {}
    Potential(TabulatedPotential t) : f(std::move(t)) {}
    Potential(std::function<double(double)> fn) : f(std::move(fn)) {}

    double operator()(double x) const { return f(x); }
};

inline RVector eval_potential(const Potential& pot, const SpatialGrid& grid) {
    RVector v(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) v[i] = pot(grid.x(i));
    return v;
}

// --- Observables -----------------------------------------------------------

/// <psi| x |psi>
inline double position_expectation(const Wavefunction& w) {
    double s = 0.0;
    for (int i = 0; i < w.grid.n_points; ++i)
        s += w.grid.x(i) * std::norm(w.psi[i]);
    return s * w.grid.dx();
}

/// |psi(x0)|^2 by nearest-grid-point lookup.
inline double density_at(const Wavefunction& w, double x0) {
    if (x0 < -w.grid.x_max || x0 >= w.grid.x_max)
        throw Error("density_at: x0 outside grid");
    const int i = static_cast<int>(std::lround((x0 + w.grid.x_max) / w.grid.dx()));
    return std::norm(w.psi[std::min(i, w.grid.n_points - 1)]);
}

/// Position matrix element <a| x |b>.
inline Complex dipole_matrix_element(const Wavefunction& a, const Wavefunction& b) {
    if (!(a.grid == b.grid)) throw Error("dipole_matrix_element: grid mismatch");
    Complex s = 0.0;
    for (int i = 0; i < a.grid.n_points; ++i)
        s += std::conj(a.psi[i]) * a.grid.x(i) * b.psi[i];
    return s * a.grid.dx();
}

/// Normalized Gaussian packet exp[-gamma (x-x0)^2] e^{i k0 x}: a target state
/// with predefined position and momentum expectation values.
inline Wavefunction gaussian_packet(const SpatialGrid& grid, double x0, double k0,
                                    double gamma) {
    if (!(gamma > 0)) throw Error("gaussian_packet: gamma must be positive");
    CVector psi(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        psi[i] = std::exp(-gamma * (x - x0) * (x - x0)) *
                 std::exp(Complex(0.0, k0 * x));
    }
    Wavefunction w(grid, std::move(psi));
    w.normalize();
    return w;
}

/// Normalized narrow Gaussian standing in for delta(x - x0).
inline RVector delta_gaussian(const SpatialGrid& grid, double x0, double sigma) {
    if (!(sigma > 0)) throw Error("delta_gaussian: sigma must be positive");
    RVector g(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double u = (grid.x(i) - x0) / sigma;
        g[i] = std::exp(-0.5 * u * u);
    }
    const double z = g.sum() * grid.dx();
    if (z <= 0) throw Error("delta_gaussian: x0 outside grid support");
    return g / z;
}

}  // namespace qoc

#endif
