#ifndef QOC_TARGETS_HPP
#define QOC_TARGETS_HPP

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/grid.hpp"
#include "qoc/time_grid.hpp"

namespace qoc {

// --- Weight function -------------------------------------------------------

/// Weight w(t) of a time-averaged target, normalized to (1/T) int w dt = 1.
/// The final-time delta weight is kept symbolic (kind FinalTime) rather than
/// as a numeric spike, with the convention int_0^T delta(t-T) dt = 1/2.
class WeightFunction {
public:
    enum class Kind { FinalTime, Uniform, Sampled };

    static WeightFunction final_time() { return WeightFunction(Kind::FinalTime); }
    static WeightFunction uniform() { return WeightFunction(Kind::Uniform); }

    /// Samples at t_i = i*dt, i = 0..n_steps; rescaled so the trapezoid sum
    /// satisfies the normalization exactly.
    static WeightFunction sampled(const TimeGrid& tg, RVector values) {
        if (values.size() != tg.n_steps + 1)
            throw Error("weight: need n_steps+1 samples");
        if (values.minCoeff() < 0) throw Error("weight: w(t) must be >= 0");
        double s = values.sum() - 0.5 * (values[0] + values[values.size() - 1]);
        s *= tg.dt;
        if (!(s > 0)) throw Error("weight: vanishing weight");
        WeightFunction w(Kind::Sampled);
        w.values_ = values * (tg.t_final / s);
        return w;
    }

    static WeightFunction from_function(const TimeGrid& tg,
                                        const std::function<double(double)>& f) {
        RVector v(tg.n_steps + 1);
        for (int i = 0; i <= tg.n_steps; ++i) v[i] = f(tg.t(i));
        return sampled(tg, std::move(v));
    }

    Kind kind() const { return kind_; }
    bool is_final_time() const { return kind_ == Kind::FinalTime; }

    double operator()(int i) const {
        switch (kind_) {
            case Kind::Uniform: return 1.0;
            case Kind::Sampled: return values_[i];
            default: throw Error("weight: final-time weight has no samples");
        }
    }

private:
    explicit WeightFunction(Kind k) : kind_(k) {}
    Kind kind_;
    RVector values_;
};

// --- Target operators ------------------------------------------------------

/// Hermitian target operator O(t); the J1 functionals and the chi boundary
/// and source terms are all expressed through it.
class TargetOperator {
public:
    virtual ~TargetOperator() = default;

    /// O(t) psi.
    virtual CVector apply(const CVector& psi, double t) const = 0;

    /// <psi| O(t) |psi>.
    virtual double expectation(const CVector& psi, double t) const {
        return inner_(psi, apply(psi, t)).real();
    }

    /// Final-time yield J1; identical to expectation(psi, T) except for the
    /// non-operator targets (phase-fixed overlap, density overlap).
    virtual double final_value(const CVector& psi_final, double T) const {
        return expectation(psi_final, T);
    }

    /// chi(T) for the backward equation; O Psi(T) unless overridden.
    virtual CVector chi_boundary(const CVector& psi_final, double T) const {
        return apply(psi_final, T);
    }

    virtual bool time_dependent() const { return false; }
    /// False for targets that only define J1 (no linear operator action).
    virtual bool has_operator() const { return true; }

    double measure() const { return measure_; }

protected:
    explicit TargetOperator(double measure) : measure_(measure) {}
    Complex inner_(const CVector& a, const CVector& b) const {
        return a.dot(b) * measure_;
    }
    double measure_;
};

class ProjectionTarget : public TargetOperator {
public:
    ProjectionTarget(CVector phi, double measure)
        : TargetOperator(measure), phi_(std::move(phi)) {
        const double n2 = phi_.squaredNorm() * measure;
        if (std::abs(n2 - 1.0) > 1e-8)
            throw Error("projection target: state not normalized");
    }
    CVector apply(const CVector& psi, double) const override {
        return phi_ * inner_(phi_, psi);
    }
    double expectation(const CVector& psi, double) const override {
        return std::norm(inner_(phi_, psi));
    }
    const CVector& state() const { return phi_; }

private:
    CVector phi_;
};

/// J1 = Re <Psi(T)|phi_f>, fixing the global phase of the target state.
/// Not a Hermitian operator; chi(T) = phi_f / 2.
class PhaseFixedOverlapTarget : public TargetOperator {
public:
    PhaseFixedOverlapTarget(CVector phi, double measure)
        : TargetOperator(measure), phi_(std::move(phi)) {}
    CVector apply(const CVector&, double) const override {
        throw Error("phase-fixed overlap target: no operator action");
    }
    double final_value(const CVector& psi, double) const override {
        return inner_(psi, phi_).real();
    }
    CVector chi_boundary(const CVector&, double) const override {
        return 0.5 * phi_;
    }
    bool has_operator() const override { return false; }

private:
    CVector phi_;
};

/// Local density target: multiply pointwise by a narrow normalized Gaussian
/// standing in for delta(x - x0); J1 approximates |psi(x0)|^2.
class LocalDensityTarget : public TargetOperator {
public:
    LocalDensityTarget(const SpatialGrid& grid, double x0, double sigma)
        : TargetOperator(grid.dx()), g_(delta_gaussian(grid, x0, sigma)) {}
    explicit LocalDensityTarget(RVector weights, double measure)
        : TargetOperator(measure), g_(std::move(weights)) {}
    CVector apply(const CVector& psi, double) const override {
        return g_.array() * psi.array();
    }

private:
    RVector g_;
};

/// J1 = int sqrt(n(x,T) n_f(x)) dx; evaluator only, never optimized.
class DensityOverlapTarget : public TargetOperator {
public:
    DensityOverlapTarget(RVector n_f, double measure)
        : TargetOperator(measure), nf_(std::move(n_f)) {}
    CVector apply(const CVector&, double) const override {
        throw Error("density overlap target: no operator action");
    }
    double final_value(const CVector& psi, double) const override {
        double s = 0.0;
        for (int i = 0; i < psi.size(); ++i)
            s += std::sqrt(std::norm(psi[i]) * nf_[i]);
        return s * measure_;
    }
    bool has_operator() const override { return false; }

private:
    RVector nf_;
};

class MultiObjectiveTarget : public TargetOperator {
public:
    using Term = std::pair<double, std::shared_ptr<const TargetOperator>>;
    explicit MultiObjectiveTarget(std::vector<Term> terms)
        : TargetOperator(terms.empty() ? 1.0 : terms.front().second->measure()),
          terms_(std::move(terms)) {
        for (const auto& [beta, op] : terms_) {
            if (!std::isfinite(beta)) throw Error("multi-objective: weight not finite");
            if (!op->has_operator())
                throw Error("multi-objective: component without operator action");
        }
    }
    CVector apply(const CVector& psi, double t) const override {
        CVector out = CVector::Zero(psi.size());
        for (const auto& [beta, op] : terms_) out += beta * op->apply(psi, t);
        return out;
    }
    bool time_dependent() const override {
        for (const auto& [beta, op] : terms_)
            if (op->time_dependent()) return true;
        return false;
    }

private:
    std::vector<Term> terms_;
};

/// Wave-function follower O(t) = |phi(t)><phi(t)| with
/// phi(t) = sum_n c_n(t) e^{-i E_n t} |n>.
class FollowerTarget : public TargetOperator {
public:
    using Coefficients = std::function<RVector(double)>;

    FollowerTarget(std::vector<CVector> basis, std::vector<double> energies,
                   Coefficients coeffs, double measure, double t_max)
        : TargetOperator(measure), basis_(std::move(basis)),
          energies_(std::move(energies)), coeffs_(std::move(coeffs)),
          t_max_(t_max) {
        if (basis_.size() != energies_.size())
            throw Error("follower target: basis/energy size mismatch");
    }

    CVector target_state(double t) const {
        if (t < 0.0 || t > t_max_ * (1.0 + 1e-12))
            throw Error("follower target: queried outside [0, T]");
        const RVector c = coeffs_(t);
        if (c.size() != static_cast<Eigen::Index>(basis_.size()))
            throw Error("follower target: coefficient count mismatch");
        CVector phi = CVector::Zero(basis_.front().size());
        for (size_t n = 0; n < basis_.size(); ++n)
            phi += c[static_cast<Eigen::Index>(n)] *
                   std::exp(Complex(0.0, -energies_[n] * t)) * basis_[n];
        return phi;
    }

    CVector apply(const CVector& psi, double t) const override {
        const CVector phi = target_state(t);
        return phi * inner_(phi, psi);
    }
    double expectation(const CVector& psi, double t) const override {
        return std::norm(inner_(target_state(t), psi));
    }
    bool time_dependent() const override { return true; }

private:
    std::vector<CVector> basis_;
    std::vector<double> energies_;
    Coefficients coeffs_;
    double t_max_;
};

/// Moving local density O(t) = delta(x - x0(t)), Gaussian-approximated.
class MovingDensityTarget : public TargetOperator {
public:
    MovingDensityTarget(SpatialGrid grid, std::function<double(double)> x0,
                        double sigma)
        : TargetOperator(grid.dx()), grid_(grid), x0_(std::move(x0)),
          sigma_(sigma) {}
    CVector apply(const CVector& psi, double t) const override {
        const RVector g = delta_gaussian(grid_, x0_(t), sigma_);
        return g.array() * psi.array();
    }
    bool time_dependent() const override { return true; }

private:
    SpatialGrid grid_;
    std::function<double(double)> x0_;
    double sigma_;
};

// --- TargetSpec ------------------------------------------------------------

/// A target operator plus the weight that turns it into a functional.
struct TargetSpec {
    std::shared_ptr<const TargetOperator> op;
    WeightFunction weight = WeightFunction::final_time();

    CVector apply(const CVector& psi, double t) const { return op->apply(psi, t); }
};

inline TargetSpec projection_target(CVector phi, double measure) {
    return {std::make_shared<ProjectionTarget>(std::move(phi), measure),
            WeightFunction::final_time()};
}

/// J1 of a stored trajectory. For the final-time weight this is
/// <Psi(T)|O|Psi(T)>; otherwise the trapezoid average
/// (1/T) sum w(t_i) <Psi(t_i)|O(t_i)|Psi(t_i)> dt.
template <class TrajectoryAt>
double evaluate_J1(const TargetSpec& spec, const TrajectoryAt& psi_at,
                   const TimeGrid& tg) {
    if (spec.weight.is_final_time())
        return spec.op->final_value(psi_at(tg.n_steps), tg.t_final);
    double s = 0.0;
    for (int i = 0; i <= tg.n_steps; ++i) {
        const double trap = (i == 0 || i == tg.n_steps) ? 0.5 : 1.0;
        s += trap * spec.weight(i) * spec.op->expectation(psi_at(i), tg.t(i));
    }
    return s * tg.dt / tg.t_final;
}

// --- Occupation-path follower (quantum-number-space trajectory) ------------

/// Piecewise coefficient path |0> -> |4> -> |3> -> |1> over [0, T]:
///   c0 = cos(pi t/T) up to T/2, then 0
///   c4 = sin(pi t/T) up to T/2, then 1 up to 5T/8, then 0
///   c1 = sin(2 pi t/T - 3 pi/2) from 3T/4
///   c3 = normalization remainder, c2 = 0
/// Step functions are right-continuous.
inline FollowerTarget::Coefficients occupation_path_coefficients(double T) {
    if (!(T > 0)) throw Error("occupation path: T must be positive");
    return [T](double t) {
        RVector c = RVector::Zero(5);
        if (t < T / 2) {
            c[0] = std::cos(pi * t / T);
            c[4] = std::sin(pi * t / T);
        } else {
            c[4] = (t <= 5.0 * T / 8.0) ? 1.0 : 0.0;
            if (t >= 3.0 * T / 4.0) c[1] = std::sin(2.0 * pi * t / T - 1.5 * pi);
            const double rem = 1.0 - c[0] * c[0] - c[1] * c[1] - c[4] * c[4];
            c[3] = std::sqrt(std::max(0.0, rem));
        }
        return c;
    };
}

/// Weight emphasizing the final occupation and de-emphasizing the fast dump
/// at 5T/8: f(t) = 1 - exp(-(t-5T/8)^2/1600) + exp(-(t-T)^2/64).
inline WeightFunction occupation_path_weight(const TimeGrid& tg) {
    const double T = tg.t_final;
    return WeightFunction::from_function(tg, [T](double t) {
        const double a = t - 5.0 * T / 8.0;
        const double b = t - T;
        return 1.0 - std::exp(-a * a / 1600.0) + std::exp(-b * b / 64.0);
    });
}

/// Full target for the occupation-path example: follower over the lowest
/// five eigenstates with the shaped weight above.
inline TargetSpec build_follower_path(std::vector<CVector> basis,
                                      std::vector<double> energies,
                                      double measure, const TimeGrid& tg) {
    if (basis.size() != 5 || energies.size() != 5)
        throw Error("occupation path: need eigenstates |0>..|4>");
    auto op = std::make_shared<FollowerTarget>(
        std::move(basis), std::move(energies),
        occupation_path_coefficients(tg.t_final), measure, tg.t_final);
    return {op, occupation_path_weight(tg)};
}

}  // namespace qoc

#endif
