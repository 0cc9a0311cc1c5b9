#ifndef QOC_TWOLEVEL_HPP
#define QOC_TWOLEVEL_HPP

#include <algorithm>
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qoc/common.hpp"
#include "qoc/field.hpp"
#include "qoc/time_grid.hpp"

namespace qoc {

/// Two-level model H = diag(omega_a, omega_b) - eps(t) mu sigma_x.
struct TwoLevelParams {
    double omega_a = 0.0;
    double omega_b = 0.0;
    double mu = 0.0;
    double omega_ba() const { return omega_b - omega_a; }
};

/// Exact integration (no RWA) of
///   dc_a/dt = -i omega_a c_a + i eps(t) mu c_b
///   dc_b/dt = -i omega_b c_b + i eps(t) mu c_a
/// by classical RK4 with step dt, starting from (c_a, c_b) = (1, 0).
/// The tap callback receives (i, t_i, c) at every grid point.
template <class Tap>
CVector integrate_exact(const TwoLevelParams& p,
                        const std::function<double(double)>& eps,
                        const TimeGrid& tg, Tap&& tap) {
    CVector c(2);
    c << 1.0, 0.0;
    auto deriv = [&p, &eps](double t, const CVector& y) {
        const double e = eps(t);
        CVector d(2);
        d[0] = -iunit * p.omega_a * y[0] + iunit * e * p.mu * y[1];
        d[1] = -iunit * p.omega_b * y[1] + iunit * e * p.mu * y[0];
        return d;
    };
    const double h = tg.dt;
    tap(0, 0.0, c);
    for (int i = 0; i < tg.n_steps; ++i) {
        const double t = tg.t(i);
        const CVector k1 = deriv(t, c);
        const CVector k2 = deriv(t + 0.5 * h, c + 0.5 * h * k1);
        const CVector k3 = deriv(t + 0.5 * h, c + 0.5 * h * k2);
        const CVector k4 = deriv(t + h, c + h * k3);
        c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tap(i + 1, t + h, c);
    }
    return c;
}

inline CVector integrate_exact(const TwoLevelParams& p,
                               const std::function<double(double)>& eps,
                               const TimeGrid& tg) {
    return integrate_exact(p, eps, tg,
                           [](int, double, const CVector&) {});
}

/// RWA populations for eps(t) = A sin(nu t) starting in the lower state:
///   |g_b(t)|^2 = (Omega_R^2 / Omega^2) sin^2(Omega t / 2),
/// Omega_R = A mu, Omega^2 = Omega_R^2 + (omega_ba - nu)^2.
struct RwaPopulations {
    double lower;
    double upper;
};

inline RwaPopulations rwa_populations(const TwoLevelParams& p, double A,
                                      double nu, double t) {
    const double omega_r = A * p.mu;
    const double delta = p.omega_ba() - nu;
    const double omega = std::sqrt(omega_r * omega_r + delta * delta);
    const double s2 = std::pow(std::sin(0.5 * omega * t), 2);
    const double upper = (omega > 0)
                             ? (omega_r * omega_r) / (omega * omega) * s2
                             : 0.0;
    return {1.0 - upper, upper};
}

/// Pulse-area amplitude for full inversion on resonance: A = pi / (mu T).
inline double pulse_area_amplitude(double mu, double T) {
    if (!(mu != 0.0) || !(T > 0)) throw Error("pulse area: need mu != 0, T > 0");
    return pi / (T * std::abs(mu));
}

/// Off-resonant optimal amplitude, branch k:
///   A = (1/mu) sqrt((2k+1)^2 pi^2 / T^2 - delta^2).
/// Throws if the radicand is negative (k too small for the detuning).
inline double optimal_amplitude_offresonant(double mu, double T, double delta,
                                            int k = 0) {
    if (k < 0) throw Error("optimal amplitude: k must be >= 0");
    const double r =
        std::pow((2 * k + 1) * pi / T, 2) - delta * delta;
    if (r < 0)
        throw Error("optimal amplitude: detuning too large for branch k");
    return std::sqrt(r) / std::abs(mu);
}

/// Fluence of a constant-envelope resonant pulse A sin(nu t): E0 = A^2 T / 2
/// (exact when an integer number of half-periods fits in T).
inline double rwa_fluence(double A, double T) { return 0.5 * A * A * T; }

/// First-order perturbation theory: the optimal fields solve the eigenproblem
///   lambda eps(t) = int_0^T |mu|^2 cos[omega_ba (t - t')] eps(t') dt'.
/// The kernel has analytic rank 2, so everything beyond the two leading
/// eigenvalues is numerical noise.
struct PerturbationSolution {
    TimeGrid tg;
    std::vector<double> eigenvalues;     // descending
    std::vector<RVector> fields;         // unit-yield rescaled, n_steps samples

    /// Constant envelope amplitude of mode m (max |eps|).
    double amplitude(int m = 0) const {
        return fields.at(m).cwiseAbs().maxCoeff();
    }

    ControlField field(int m = 0) const {
        ControlField f(tg, 1);
        f.channel(0) = fields.at(m);
        return f;
    }
};

/// Discretizes the kernel with the same rectangle rule used for fluences
/// (samples t_i = i dt, weight dt) and keeps the n_modes largest eigenpairs.
/// Each kept field is rescaled to first-order unit yield,
///   eps_opt = sqrt((1/lambda) / E0) eps   [E0 = sum eps^2 dt].
inline PerturbationSolution perturbation_eigenfields(const TwoLevelParams& p,
                                                     const TimeGrid& tg,
                                                     int n_modes = 3) {
    const int n = tg.n_steps;
    if (n_modes < 1 || n_modes > n)
        throw Error("perturbation: invalid mode count");
    const double w = p.omega_ba();
    const double mu2 = p.mu * p.mu;
    RMatrix K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = mu2 * std::cos(w * (tg.t(i) - tg.t(j))) * tg.dt;
            K(i, j) = v;
            K(j, i) = v;
        }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(K);
    if (es.info() != Eigen::Success)
        throw Error("perturbation: eigensolver failed");

    PerturbationSolution out;
    out.tg = tg;
    for (int m = 0; m < n_modes; ++m) {
        const int idx = n - 1 - m;  // Eigen sorts ascending
        const double lambda = es.eigenvalues()[idx];
        RVector v = es.eigenvectors().col(idx);
        const double e0 = v.squaredNorm() * tg.dt;
        if (lambda > 0) v *= std::sqrt((1.0 / lambda) / e0);
        // Fix the overall sign: start the pulse rising.
        int imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0) v = -v;
        out.eigenvalues.push_back(lambda);
        out.fields.push_back(std::move(v));
    }
    return out;
}

}  // namespace qoc

#endif
