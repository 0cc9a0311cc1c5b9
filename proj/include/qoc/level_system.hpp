#ifndef QOC_LEVEL_SYSTEM_HPP
#define QOC_LEVEL_SYSTEM_HPP

#include <map>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qoc/common.hpp"

namespace qoc {

/// N-level system H = H0 - sum_j mu_j eps_j(t) with Hermitian H0 and dipole
/// matrices. Propagation uses the same 2nd-order splitting as the grid path,
///   U(dt) = exp(-i H0 dt/2) exp(+i mu eps dt) exp(-i H0 dt/2),
/// with the matrix exponentials evaluated in precomputed eigenbases.
class LevelSystem {
public:
    LevelSystem(CMatrix h0, std::vector<CMatrix> dipoles)
        : h0_(std::move(h0)), mu_(std::move(dipoles)) {
        const auto n = h0_.rows();
        if (h0_.cols() != n) throw Error("level system: H0 must be square");
        check_hermitian(h0_, "H0");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h0_);
        h0_evals_ = es.eigenvalues();
        h0_evecs_ = es.eigenvectors();
        for (const auto& m : mu_) {
            if (m.rows() != n || m.cols() != n)
                throw Error("level system: dipole dimension mismatch");
            check_hermitian(m, "dipole");
            Eigen::SelfAdjointEigenSolver<CMatrix> esm(m);
            mu_evals_.push_back(esm.eigenvalues());
            mu_evecs_.push_back(esm.eigenvectors());
        }
    }

    /// Two-level convenience: energies omega_a, omega_b and off-diagonal mu.
    static LevelSystem two_level(double omega_a, double omega_b, double mu) {
        CMatrix h0 = CMatrix::Zero(2, 2);
        h0(0, 0) = omega_a;
        h0(1, 1) = omega_b;
        CMatrix m = CMatrix::Zero(2, 2);
        m(0, 1) = mu;
        m(1, 0) = mu;
        return LevelSystem(std::move(h0), {std::move(m)});
    }

    int dim() const { return static_cast<int>(h0_.rows()); }
    double measure() const { return 1.0; }
    int n_dipole_channels() const { return static_cast<int>(mu_.size()); }
    const CMatrix& h0() const { return h0_; }
    const CMatrix& dipole(int j) const { return mu_.at(j); }

    Complex inner(const CVector& a, const CVector& b) const { return a.dot(b); }

    Complex mu_element(int j, const CVector& chi, const CVector& psi) const {
        return chi.dot(mu_[j] * psi);
    }

    void step(CVector& psi, const double* eps, double dt) const {
        const CVector& half = h0_half_phase(dt);
        psi = h0_evecs_.adjoint() * psi;
        psi.array() *= half.array();
        psi = h0_evecs_ * psi;
        for (int j = 0; j < n_dipole_channels(); ++j) {
            const double theta = eps[j] * dt;
            if (theta == 0.0) continue;
            psi = mu_evecs_[j].adjoint() * psi;
            for (int m = 0; m < psi.size(); ++m)
                psi[m] *= std::exp(Complex(0.0, mu_evals_[j][m] * theta));
            psi = mu_evecs_[j] * psi;
        }
        psi = h0_evecs_.adjoint() * psi;
        psi.array() *= half.array();
        psi = h0_evecs_ * psi;
    }

    CVector apply_h0(const CVector& psi) const { return h0_ * psi; }

    double energy(const CVector& psi) const {
        return psi.dot(h0_ * psi).real() / psi.squaredNorm();
    }

private:
    static void check_hermitian(const CMatrix& m, const char* name) {
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw Error(std::string("level system: ") + name + " not Hermitian");
    }

    const CVector& h0_half_phase(double dt) const {
        auto it = h0_phase_.find(dt);
        if (it == h0_phase_.end()) {
            CVector p(dim());
            for (int m = 0; m < dim(); ++m)
                p[m] = std::exp(Complex(0.0, -0.5 * h0_evals_[m] * dt));
            it = h0_phase_.emplace(dt, std::move(p)).first;
        }
        return it->second;
    }

    CMatrix h0_;
    std::vector<CMatrix> mu_;
    RVector h0_evals_;
    CMatrix h0_evecs_;
    std::vector<RVector> mu_evals_;
    std::vector<CMatrix> mu_evecs_;
    mutable std::map<double, CVector> h0_phase_;
};

}  // namespace qoc

#endif
