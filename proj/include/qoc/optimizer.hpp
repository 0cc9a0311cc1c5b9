#ifndef QOC_OPTIMIZER_HPP
#define QOC_OPTIMIZER_HPP

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/field.hpp"
#include "qoc/filters.hpp"
#include "qoc/propagator.hpp"
#include "qoc/targets.hpp"
#include "qoc/time_grid.hpp"

namespace qoc {

/// Pointwise field update, the core control equation:
///   eps_j(t) = -(1/alpha_j) Im <chi(t)| mu_j |psi(t)>.
template <class System>
double field_update(const System& sys, int j, const CVector& chi,
                    const CVector& psi, double alpha) {
    if (alpha == 0.0) throw Error("field update: alpha must be nonzero");
    return -sys.mu_element(j, chi, psi).imag() / alpha;
}

struct IterationStats {
    int iteration = 0;
    double J1 = 0.0;
    double J2 = 0.0;
    double J3 = 0.0;  // TDSE constraint term; zero by construction
    double J = 0.0;
    double fluence = 0.0;
    double alpha = 0.0;
};

struct ConvergenceRecord {
    std::vector<IterationStats> iterations;
    int best_index = -1;
    double best_J1 = 0.0;
    bool converged = false;
    std::string stop_reason;
};

struct OptimizationResult {
    ControlField field;  // best iterate, never necessarily the last
    ConvergenceRecord record;
};

struct OptimizerConfig {
    double alpha = 1.0;                  // penalty / initial Lagrange multiplier
    std::vector<double> alphas;          // optional per-channel override
    double delta_J = 1e-5;               // |J^k - J^{k-1}| threshold; 0 disables
    int max_iterations = 200;
    double eta = 1.0;                    // mixing, time-dependent scheme
    double xi = 1.0;
    std::optional<double> fluence_target;       // fixed-fluence mode (per channel)
    std::optional<FieldFilter> filter;          // filtered mode

    double channel_alpha(int j) const {
        if (!alphas.empty()) return alphas.at(j);
        return alpha;
    }
    bool constrained() const { return fluence_target || filter; }

    void validate() const {
        if (eta < 0.0 || eta > 1.0) throw Error("optimizer: eta must be in [0,1]");
        if (xi < 0.0 || xi > 2.0) throw Error("optimizer: xi must be in [0,2]");
        for (size_t j = 0; j < std::max<size_t>(1, alphas.size()); ++j)
            if (channel_alpha(static_cast<int>(j)) <= 0.0)
                throw Error("optimizer: alpha must be positive");
        if (fluence_target && *fluence_target <= 0.0)
            throw Error("optimizer: fluence target must be positive");
        if (max_iterations < 1) throw Error("optimizer: need >= 1 iteration");
    }
};

namespace detail {

template <class System>
void check_norm(const System& sys, const CVector& psi, const char* where) {
    const double n2 = psi.squaredNorm() * sys.measure();
    if (std::abs(n2 - 1.0) > 1e-4)
        throw Error(std::string("optimizer: norm loss ") + std::to_string(n2 - 1.0) +
                    " beyond 1e-4 during " + where +
                    " propagation; reduce dt or check the Hamiltonian");
}

/// Forward propagation of phi_i with a fixed field; stores the trajectory.
template <class System>
void forward_fixed(const System& sys, const CVector& phi_i,
                   const ControlField& eps, Trajectory& traj) {
    CVector psi = phi_i;
    propagate(sys, psi, eps, Direction::Forward,
              [&](int i, const CVector& p) { traj.store(i, p); });
    check_norm(sys, psi, "forward");
}

struct JAccounting {
    static IterationStats make(int k, double J1, const ControlField& eps,
                               const OptimizerConfig& cfg, double alpha_now) {
        IterationStats s;
        s.iteration = k;
        s.J1 = J1;
        s.fluence = 0.0;
        for (int j = 0; j < eps.n_channels(); ++j) s.fluence += eps.fluence(j);
        if (cfg.fluence_target) {
            // alpha is a Lagrange multiplier; the constraint term vanishes on
            // iterates whose fluence equals the target.
            s.J2 = -alpha_now * (s.fluence - *cfg.fluence_target * eps.n_channels());
        } else {
            s.J2 = -alpha_now * s.fluence;
        }
        s.J3 = 0.0;
        s.J = s.J1 + s.J2 + s.J3;
        s.alpha = alpha_now;
        return s;
    }
};

inline void update_best(ConvergenceRecord& rec, const IterationStats& s,
                        const ControlField& eps, ControlField& best) {
    rec.iterations.push_back(s);
    if (rec.best_index < 0 || s.J1 > rec.best_J1) {
        rec.best_index = static_cast<int>(rec.iterations.size()) - 1;
        rec.best_J1 = s.J1;
        best = eps;
    }
}

inline bool converged(const ConvergenceRecord& rec, double delta_J) {
    const auto n = rec.iterations.size();
    if (n < 2 || delta_J <= 0.0) return false;
    return std::abs(rec.iterations[n - 1].J - rec.iterations[n - 2].J) < delta_J;
}

}  // namespace detail

/// Iterative schemes with immediate feedback. The backward propagation of the
/// Lagrange multiplier chi computes the field self-consistently from the
/// currently propagated chi and the stored Psi trajectory; the value obtained
/// from the states at t_{i+1} is held over [t_i, t_{i+1}] (field sample i).
///
/// run_standard / run_time_dependent (unconstrained): per iteration one
/// backward (field eps~, eta mixing) and one self-consistent forward (field
/// eps^{k+1}, xi mixing); with eta = xi = 1 and a final-time weight this is
/// the standard scheme.
template <class System>
OptimizationResult run_time_dependent(const System& sys, const CVector& phi_i,
                                      const TargetSpec& target,
                                      const ControlField& initial_guess,
                                      const OptimizerConfig& cfg) {
    cfg.validate();
    if (!target.op->has_operator() && !target.weight.is_final_time())
        throw Error("optimizer: target defines no operator action");
    const TimeGrid tg = initial_guess.time_grid();
    const int n = tg.n_steps;
    const int nch = sys.n_dipole_channels();
    const bool final_time = target.weight.is_final_time();

    ControlField eps = initial_guess;
    ControlField best = eps;
    ConvergenceRecord rec;

    Trajectory psi_traj(sys.dim(), n);
    Trajectory chi_traj;
    if (!cfg.constrained()) chi_traj = Trajectory(sys.dim(), n);

    // Iterate 0: evaluate the initial guess. In fixed-fluence mode alpha_j is
    // a Lagrange multiplier seeded from the guess, alpha_j^0 = sqrt(E0(guess)/E0).
    detail::forward_fixed(sys, phi_i, eps, psi_traj);
    auto traj_at = [&](int i) { return psi_traj.at(i); };
    double J1 = evaluate_J1(target, traj_at, tg);
    std::vector<double> alpha_ch(nch);
    for (int j = 0; j < nch; ++j) alpha_ch[j] = cfg.channel_alpha(j);
    if (cfg.fluence_target) {
        for (int j = 0; j < nch; ++j) {
            const double e0 = eps.fluence(j);
            if (e0 <= 0.0)
                throw Error("optimizer: fixed-fluence mode needs a nonzero guess");
            alpha_ch[j] = std::sqrt(e0 / *cfg.fluence_target);
        }
    }
    detail::update_best(rec, detail::JAccounting::make(0, J1, eps, cfg, alpha_ch[0]),
                        eps, best);

    for (int k = 1; k <= cfg.max_iterations; ++k) {
        // Backward sweep: chi(T) from the target (final-time weight) or 0
        // with the inhomogeneous source -(i/T) w(t) O(t) Psi(t).
        ControlField eps_tilde(tg, nch);
        CVector chi;
        if (final_time) {
            chi = target.op->chi_boundary(psi_traj.at(n), tg.t_final);
        } else {
            chi = CVector::Zero(sys.dim());
        }
        const double half = 0.5 * tg.dt / tg.t_final;
        if (!cfg.constrained()) chi_traj.store(n, chi);
        double eps_buf[8];
        for (int i = n - 1; i >= 0; --i) {
            if (!final_time) {
                const CVector s = target.weight(i + 1) *
                                  target.op->apply(psi_traj.at(i + 1), tg.t(i + 1));
                chi += half * s;
            }
            const CVector psi_here = psi_traj.at(i + 1);
            for (int j = 0; j < nch; ++j) {
                const double upd = field_update(sys, j, chi, psi_here, alpha_ch[j]);
                eps_tilde.at(i, j) = (1.0 - cfg.eta) * eps(i, j) + cfg.eta * upd;
                eps_buf[j] = eps_tilde(i, j);
            }
            sys.step(chi, eps_buf, -tg.dt);
            if (!final_time) {
                const CVector s = target.weight(i) *
                                  target.op->apply(psi_traj.at(i), tg.t(i));
                chi += half * s;
            }
            if (!cfg.constrained()) chi_traj.store(i, chi);
        }

        if (cfg.constrained()) {
            // Filter, then rescale to the exact target fluence.
            ControlField next =
                cfg.filter ? apply_filter(*cfg.filter, eps_tilde) : eps_tilde;
            if (cfg.fluence_target) {
                for (int j = 0; j < nch; ++j) {
                    const double e0 = next.fluence(j);
                    if (e0 <= 0.0)
                        throw Error("optimizer: filter annihilated the field; "
                                    "fluence rescale is degenerate");
                    // alpha^{k+1} = alpha^k sqrt(E0(filtered)/E0); the field
                    // rescale alpha^k/alpha^{k+1} pins the fluence exactly.
                    const double alpha_next =
                        alpha_ch[j] * std::sqrt(e0 / *cfg.fluence_target);
                    next.channel(j) *= alpha_ch[j] / alpha_next;
                    alpha_ch[j] = alpha_next;
                }
            }
            eps = next;
            detail::forward_fixed(sys, phi_i, eps, psi_traj);
            J1 = evaluate_J1(target, traj_at, tg);
        } else {
            // Self-consistent forward with the xi-mixed update.
            CVector psi = phi_i;
            psi_traj.store(0, psi);
            for (int i = 0; i < n; ++i) {
                const CVector chi_here = chi_traj.at(i);
                for (int j = 0; j < nch; ++j) {
                    const double upd =
                        field_update(sys, j, chi_here, psi, alpha_ch[j]);
                    eps.at(i, j) = (1.0 - cfg.xi) * eps_tilde(i, j) + cfg.xi * upd;
                    eps_buf[j] = eps(i, j);
                }
                sys.step(psi, eps_buf, tg.dt);
                psi_traj.store(i + 1, psi);
            }
            detail::check_norm(sys, psi, "forward");
            J1 = evaluate_J1(target, traj_at, tg);
        }

        detail::update_best(
            rec, detail::JAccounting::make(k, J1, eps, cfg, alpha_ch[0]), eps, best);
        if (k == 1 && rec.best_J1 < 1e-8)
            std::cerr << "[optimizer] warning: yield still < 1e-8 after the "
                         "first iteration; a zero/weak guess can be a "
                         "stationary point when initial and target states are "
                         "orthogonal\n";
        if (detail::converged(rec, cfg.delta_J)) {
            rec.converged = true;
            rec.stop_reason = "delta J below threshold";
            break;
        }
    }
    if (!rec.converged) rec.stop_reason = "iteration cap reached";
    return {best, rec};
}

/// Standard scheme (final-time Hermitian target, penalty factor).
template <class System>
OptimizationResult run_standard(const System& sys, const CVector& phi_i,
                                const TargetSpec& target,
                                const ControlField& initial_guess,
                                OptimizerConfig cfg) {
    if (!target.weight.is_final_time())
        throw Error("run_standard: requires a final-time target");
    cfg.eta = 1.0;
    cfg.xi = 1.0;
    cfg.fluence_target.reset();
    cfg.filter.reset();
    return run_time_dependent(sys, phi_i, target, initial_guess, cfg);
}

/// Fixed-fluence scheme: alpha becomes a Lagrange multiplier, every accepted
/// field is rescaled to fluence E0 exactly.
template <class System>
OptimizationResult run_fluence_fixed(const System& sys, const CVector& phi_i,
                                     const TargetSpec& target, double E0,
                                     const ControlField& initial_guess,
                                     OptimizerConfig cfg) {
    cfg.fluence_target = E0;
    cfg.eta = 1.0;
    cfg.xi = 1.0;
    return run_time_dependent(sys, phi_i, target, initial_guess, cfg);
}

/// Filtered scheme: eps^{k+1} = G[eps~] (penalty mode) or G followed by the
/// fluence rescale (pass E0).
template <class System>
OptimizationResult run_filtered(const System& sys, const CVector& phi_i,
                                const TargetSpec& target, FieldFilter chain,
                                const ControlField& initial_guess,
                                OptimizerConfig cfg,
                                std::optional<double> E0 = std::nullopt) {
    cfg.filter = std::move(chain);
    cfg.fluence_target = E0;
    cfg.eta = 1.0;
    cfg.xi = 1.0;
    return run_time_dependent(sys, phi_i, target, initial_guess, cfg);
}

/// Rapidly convergent projection scheme: starts backward from
/// chi(T) = phi_f and carries the extra overlap factor <Psi(t)|chi(t)>,
/// refreshed at every time step.
template <class System>
OptimizationResult run_rapid_projection(const System& sys, const CVector& phi_i,
                                        const CVector& phi_f,
                                        const ControlField& initial_guess,
                                        const OptimizerConfig& cfg) {
    cfg.validate();
    if (cfg.constrained())
        throw Error("run_rapid_projection: penalty mode only");
    const TimeGrid tg = initial_guess.time_grid();
    const int n = tg.n_steps;
    const int nch = sys.n_dipole_channels();

    ControlField eps = initial_guess;  // field for the chi backward sweep
    ControlField best = eps;
    ConvergenceRecord rec;

    Trajectory psi_traj(sys.dim(), n);
    Trajectory chi_traj(sys.dim(), n);

    auto update = [&](int j, const CVector& chi, const CVector& psi) {
        const Complex overlap = sys.inner(psi, chi);
        const Complex m = sys.mu_element(j, chi, psi);
        return -(overlap * m).imag() / cfg.channel_alpha(j);
    };

    // Step 0: backward propagation of phi_f with the guess field.
    {
        CVector chi = phi_f;
        propagate(sys, chi, eps, Direction::Backward,
                  [&](int i, const CVector& c) { chi_traj.store(i, c); });
        detail::check_norm(sys, chi, "backward");
    }

    double eps_buf[8];
    for (int k = 0; k <= cfg.max_iterations; ++k) {
        // Self-consistent forward sweep of Psi; its field is the iterate.
        ControlField eps_tilde(tg, nch);
        CVector psi = phi_i;
        psi_traj.store(0, psi);
        for (int i = 0; i < n; ++i) {
            const CVector chi_here = chi_traj.at(i);
            for (int j = 0; j < nch; ++j) {
                eps_tilde.at(i, j) = update(j, chi_here, psi);
                eps_buf[j] = eps_tilde(i, j);
            }
            sys.step(psi, eps_buf, tg.dt);
            psi_traj.store(i + 1, psi);
        }
        detail::check_norm(sys, psi, "forward");
        const double J1 = std::norm(sys.inner(phi_f, psi));
        detail::update_best(
            rec, detail::JAccounting::make(k, J1, eps_tilde, cfg, cfg.alpha),
            eps_tilde, best);
        if (k == 1 && rec.best_J1 < 1e-8)
            std::cerr << "[optimizer] warning: yield still < 1e-8 after the "
                         "first iteration; weak guess may be a stationary "
                         "point\n";
        if (detail::converged(rec, cfg.delta_J)) {
            rec.converged = true;
            rec.stop_reason = "delta J below threshold";
            break;
        }
        if (k == cfg.max_iterations) break;

        // Self-consistent backward sweep of chi from phi_f.
        CVector chi = phi_f;
        chi_traj.store(n, chi);
        for (int i = n - 1; i >= 0; --i) {
            const CVector psi_here = psi_traj.at(i + 1);
            for (int j = 0; j < nch; ++j) {
                eps.at(i, j) = update(j, chi, psi_here);
                eps_buf[j] = eps(i, j);
            }
            sys.step(chi, eps_buf, -tg.dt);
            chi_traj.store(i, chi);
        }
        detail::check_norm(sys, chi, "backward");
    }
    if (!rec.converged) rec.stop_reason = "iteration cap reached";
    return {best, rec};
}

}  // namespace qoc

#endif
