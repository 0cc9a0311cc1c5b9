#ifndef QOC_GRID_SYSTEM_HPP
#define QOC_GRID_SYSTEM_HPP

#include <cmath>
#include <map>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/fft.hpp"
#include "qoc/grid.hpp"

namespace qoc {

/// 1D grid system H = -d^2/dx^2 / 2 + V(x) - x eps(t), propagated with the
/// 2nd-order split-operator factorization
///   U(dt) = exp(-i T dt/2) exp(-i V_tot dt) exp(-i T dt/2).
/// A GridSystem owns its FFT scratch and phase caches, so concurrent
/// propagations over distinct instances are safe.
class GridSystem {
public:
    GridSystem(SpatialGrid grid, const Potential& pot)
        : grid_(grid), v_(eval_potential(pot, grid)), x_(grid.n_points),
          fft_(grid.n_points) {
        for (int i = 0; i < grid.n_points; ++i) x_[i] = grid.x(i);
    }

    const SpatialGrid& grid() const { return grid_; }
    const RVector& potential_values() const { return v_; }
    int dim() const { return grid_.n_points; }
    double measure() const { return grid_.dx(); }
    int n_dipole_channels() const { return 1; }

    Complex inner(const CVector& a, const CVector& b) const {
        return a.dot(b) * grid_.dx();
    }

    /// <chi| x |psi> with the grid measure.
    Complex mu_element(int /*j*/, const CVector& chi, const CVector& psi) const {
        Complex s = 0.0;
        for (int i = 0; i < chi.size(); ++i)
            s += std::conj(chi[i]) * x_[i] * psi[i];
        return s * grid_.dx();
    }

    /// One real-time split step; dt < 0 propagates backward.
    void step(CVector& psi, const double* eps, double dt) const {
        const CVector& kin = kinetic_phase(0.5 * dt);
        const CVector& pot = potential_phase(dt);
        fft_.forward(psi);
        psi.array() *= kin.array();
        fft_.inverse(psi);
        apply_potential_and_field(psi, pot, eps[0] * dt);
        fft_.forward(psi);
        psi.array() *= kin.array();
        fft_.inverse(psi);
    }

    /// One imaginary-time step exp(-H0 dtau), field-free.
    void imaginary_step(CVector& psi, double dtau) const {
        const RVector& kin = kinetic_decay(0.5 * dtau);
        const RVector& pot = potential_decay(dtau);
        fft_.forward(psi);
        psi.array() *= kin.array();
        fft_.inverse(psi);
        psi.array() *= pot.array();
        fft_.forward(psi);
        psi.array() *= kin.array();
        fft_.inverse(psi);
    }

    /// H0 psi = T psi + V psi (field-free part).
    CVector apply_h0(const CVector& psi) const {
        CVector tp = psi;
        fft_.forward(tp);
        for (int m = 0; m < tp.size(); ++m) {
            const double k = grid_.k(m);
            tp[m] *= 0.5 * k * k;
        }
        fft_.inverse(tp);
        tp.array() += v_.array() * psi.array();
        return tp;
    }

    double energy(const CVector& psi) const {
        const Complex e = inner(psi, apply_h0(psi));
        const double n2 = psi.squaredNorm() * grid_.dx();
        return e.real() / n2;
    }

private:
    const CVector& kinetic_phase(double half_dt) const {
        auto it = kin_phase_.find(half_dt);
        if (it == kin_phase_.end()) {
            CVector p(grid_.n_points);
            for (int m = 0; m < grid_.n_points; ++m) {
                const double k = grid_.k(m);
                p[m] = std::exp(Complex(0.0, -0.5 * k * k * half_dt));
            }
            it = kin_phase_.emplace(half_dt, std::move(p)).first;
        }
        return it->second;
    }
    const CVector& potential_phase(double dt) const {
        auto it = pot_phase_.find(dt);
        if (it == pot_phase_.end()) {
            CVector p(grid_.n_points);
            for (int i = 0; i < grid_.n_points; ++i)
                p[i] = std::exp(Complex(0.0, -v_[i] * dt));
            it = pot_phase_.emplace(dt, std::move(p)).first;
        }
        return it->second;
    }
    const RVector& kinetic_decay(double half_dtau) const {
        auto it = kin_decay_.find(half_dtau);
        if (it == kin_decay_.end()) {
            RVector p(grid_.n_points);
            for (int m = 0; m < grid_.n_points; ++m) {
                const double k = grid_.k(m);
                p[m] = std::exp(-0.5 * k * k * half_dtau);
            }
            it = kin_decay_.emplace(half_dtau, std::move(p)).first;
        }
        return it->second;
    }
    const RVector& potential_decay(double dtau) const {
        auto it = pot_decay_.find(dtau);
        if (it == pot_decay_.end()) {
            RVector p(grid_.n_points);
            for (int i = 0; i < grid_.n_points; ++i) p[i] = std::exp(-v_[i] * dtau);
            it = pot_decay_.emplace(dtau, std::move(p)).first;
        }
        return it->second;
    }

    /// psi_i *= exp(-i V_i dt) * exp(+i x_i theta), theta = eps*dt.  The
    /// dipole phase e^{i theta x_i} is built by the geometric recurrence
    /// e^{i theta x_{i+1}} = e^{i theta x_i} e^{i theta dx}, refreshed every
    /// block to keep rounding at the ulp level.
    void apply_potential_and_field(CVector& psi, const CVector& pot,
                                   double theta) const {
        if (theta == 0.0) {
            psi.array() *= pot.array();
            return;
        }
        constexpr int block = 32;
        const Complex ratio = std::exp(Complex(0.0, theta * grid_.dx()));
        const int n = grid_.n_points;
        Complex phase;
        for (int i = 0; i < n; ++i) {
            if (i % block == 0) phase = std::exp(Complex(0.0, theta * x_[i]));
            psi[i] *= pot[i] * phase;
            phase *= ratio;
        }
    }

    SpatialGrid grid_;
    RVector v_;
    RVector x_;
    Fft fft_;
    mutable std::map<double, CVector> kin_phase_;
    mutable std::map<double, CVector> pot_phase_;
    mutable std::map<double, RVector> kin_decay_;
    mutable std::map<double, RVector> pot_decay_;
};

/// Result of the imaginary-time eigensolver.
struct EigenStates {
    std::vector<double> energies;
    std::vector<CVector> states;  // orthonormal under the dx measure

    Wavefunction wavefunction(const SpatialGrid& g, int n) const {
        return Wavefunction(g, states.at(n));
    }
};

/// Lowest n_states eigenpairs of H0 by imaginary-time propagation with
/// Gram-Schmidt re-orthogonalization against the already-converged states.
inline EigenStates imaginary_time_eigenstates(const GridSystem& sys, int n_states,
                                              double dtau = 0.005,
                                              double tol = 1e-10,
                                              long step_cap = 1000000) {
    if (n_states < 1 || n_states > 8)
        throw Error("eigensolver: n_states must be in [1, 8]");
    const int n = sys.dim();
    const double dx = sys.measure();
    EigenStates out;

    for (int s = 0; s < n_states; ++s) {
        // Start from a node-structured seed overlapping the target state.
        CVector psi(n);
        for (int i = 0; i < n; ++i) {
            const double x = sys.grid().x(i);
            psi[i] = std::pow(x, s) * std::exp(-0.25 * x * x);
        }
        auto orthogonalize = [&] {
            for (const auto& prev : out.states) {
                const Complex c = prev.dot(psi) * dx;
                psi -= c * prev;
            }
        };
        orthogonalize();
        psi /= std::sqrt(psi.squaredNorm() * dx);

        double e_prev = sys.energy(psi);
        long it = 0;
        for (;; ++it) {
            if (it >= step_cap)
                throw Error("eigensolver: state " + std::to_string(s) +
                            " did not converge within step cap");
            sys.imaginary_step(psi, dtau);
            orthogonalize();
            psi /= std::sqrt(psi.squaredNorm() * dx);
            if (it % 16 == 15) {
                const double e = sys.energy(psi);
                if (std::abs(e - e_prev) < tol * 16) break;
                e_prev = e;
            }
        }
        // Fix the phase: make the dominant-magnitude component real positive,
        // then pin the paper's sign convention for the ground state below.
        int imax = 0;
        psi.cwiseAbs().maxCoeff(&imax);
        psi *= std::abs(psi[imax]) / psi[imax];
        out.energies.push_back(sys.energy(psi));
        out.states.push_back(std::move(psi));
    }
    return out;
}

/// Dipole matrix mu_mn = <m| x |n> in a fixed eigenbasis, with eigenstate
/// phases chosen so that <0|x|0> < 0 when the ground state sits in the
/// left well.
inline RMatrix dipole_matrix(const GridSystem& sys, EigenStates& es) {
    const int ns = static_cast<int>(es.states.size());
    // States are real up to a global phase after the eigensolver; rotate each
    // to be real and fix signs so the first nonzero <m|x|n> column pattern is
    // reproducible: sign of <n| x |n-1> made positive for n >= 1.
    for (int s = 0; s < ns; ++s) {
        CVector& v = es.states[s];
        int imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::abs(v[imax]) / v[imax];
    }
    RMatrix mu(ns, ns);
    for (int m = 0; m < ns; ++m)
        for (int nn = 0; nn < ns; ++nn)
            mu(m, nn) = sys.mu_element(0, es.states[m], es.states[nn]).real();
    for (int nn = 1; nn < ns; ++nn) {
        if (mu(nn - 1, nn) < 0) {
            es.states[nn] = -es.states[nn];
            for (int m = 0; m < ns; ++m) {
                mu(m, nn) = -mu(m, nn);
                mu(nn, m) = -mu(nn, m);
            }
        }
    }
    return mu;
}

}  // namespace qoc

#endif
