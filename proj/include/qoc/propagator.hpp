#ifndef QOC_PROPAGATOR_HPP
#define QOC_PROPAGATOR_HPP

#include <functional>
#include <utility>

#include "qoc/common.hpp"
#include "qoc/field.hpp"
#include "qoc/time_grid.hpp"

namespace qoc {

/// Dense storage for a state trajectory: column i is the state at t_i.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(int dim, int n_steps) : m_(CMatrix::Zero(dim, n_steps + 1)) {}

    void store(int i, const CVector& psi) { m_.col(i) = psi; }
    CVector at(int i) const { return m_.col(i); }
    CMatrix::ConstColXpr col(int i) const { return m_.col(i); }
    int n_steps() const { return static_cast<int>(m_.cols()) - 1; }
    bool empty() const { return m_.size() == 0; }
    void clear() { m_.resize(0, 0); }

private:
    CMatrix m_;
};

namespace detail {
template <class System>
void check_field(const System& sys, const CVector& psi, const ControlField& field) {
    if (psi.size() != sys.dim())
        throw Error("propagate: state dimension mismatch");
    if (field.n_channels() != sys.n_dipole_channels())
        throw Error("propagate: field channel count mismatch");
    if (field.n_samples() != field.time_grid().n_steps)
        throw Error("propagate: field sample count mismatch");
}

template <class System>
void gather_eps(const System& sys, const ControlField& field, int i, double* eps) {
    for (int j = 0; j < sys.n_dipole_channels(); ++j) eps[j] = field(i, j);
}
}  // namespace detail

/// Propagate psi across the whole time grid of `field`. The tap callback
/// receives (i, psi) at every grid time, including the initial one; pass a
/// no-op lambda when only the endpoint matters. Backward propagation visits
/// indices n_steps..0 and uses dt -> -dt, the exact inverse of the forward
/// splitting.
template <class System, class Tap>
void propagate(const System& sys, CVector& psi, const ControlField& field,
               Direction dir, Tap&& tap) {
    detail::check_field(sys, psi, field);
    const TimeGrid& tg = field.time_grid();
    double eps[8];
    if (sys.n_dipole_channels() > 8)
        throw Error("propagate: too many dipole channels");
    if (dir == Direction::Forward) {
        tap(0, psi);
        for (int i = 0; i < tg.n_steps; ++i) {
            detail::gather_eps(sys, field, i, eps);
            sys.step(psi, eps, tg.dt);
            tap(i + 1, psi);
        }
    } else {
        tap(tg.n_steps, psi);
        for (int i = tg.n_steps - 1; i >= 0; --i) {
            detail::gather_eps(sys, field, i, eps);
            sys.step(psi, eps, -tg.dt);
            tap(i, psi);
        }
    }
}

template <class System>
void propagate(const System& sys, CVector& psi, const ControlField& field,
               Direction dir = Direction::Forward) {
    propagate(sys, psi, field, dir, [](int, const CVector&) {});
}

/// Source term for the inhomogeneous backward equation: s(i) must return the
/// vector w(t_i) O(t_i) Psi(t_i) (no 1/T factor; that is applied here).
using InhomogeneousSource = std::function<CVector(int)>;

/// Backward propagation of
///   i d/dt chi = H chi - (i/T) w(t) O(t) Psi(t),   chi(T) = chi_final,
/// discretized with a trapezoid accumulation of the source around each step:
///   chi(t_i) = U(-dt)[chi(t_{i+1}) + (dt/2T) s_{i+1}] + (dt/2T) s_i.
/// With w == 0 this reduces exactly to the plain backward propagator.
template <class System, class Tap>
void propagate_inhomogeneous(const System& sys, CVector& chi,
                             const ControlField& field,
                             const InhomogeneousSource& source, Tap&& tap) {
    detail::check_field(sys, chi, field);
    const TimeGrid& tg = field.time_grid();
    const double half = 0.5 * tg.dt / tg.t_final;
    double eps[8];
    if (sys.n_dipole_channels() > 8)
        throw Error("propagate: too many dipole channels");
    tap(tg.n_steps, chi);
    for (int i = tg.n_steps - 1; i >= 0; --i) {
        chi += half * source(i + 1);
        detail::gather_eps(sys, field, i, eps);
        sys.step(chi, eps, -tg.dt);
        chi += half * source(i);
        tap(i, chi);
    }
}

}  // namespace qoc

#endif
