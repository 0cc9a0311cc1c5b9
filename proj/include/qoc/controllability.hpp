#ifndef QOC_CONTROLLABILITY_HPP
#define QOC_CONTROLLABILITY_HPP

#include <vector>

#include "qoc/common.hpp"

namespace qoc {

/// Lie-algebra rank criterion for complete controllability of
/// H = H0 - sum_j eps_j mu_j on an N-level system: the dynamical Lie algebra
/// L0 generated by {i H0, i mu_j} must have real dimension N^2 (all of u(N)).

namespace detail {

/// Real vectorization of a (skew-)Hermitian matrix: [Re(A); Im(A)].
inline RVector vectorize(const CMatrix& a) {
    const auto n2 = a.size();
    RVector v(2 * n2);
    for (Eigen::Index i = 0; i < n2; ++i) {
        v[i] = a(i).real();
        v[n2 + i] = a(i).imag();
    }
    return v;
}

}  // namespace detail

/// Orthonormal basis of the generated Lie algebra, kept both as matrices
/// (for commutators) and as real vectors (for rank bookkeeping).
struct LieBasis {
    std::vector<CMatrix> matrices;
    std::vector<RVector> vectors;

    int rank() const { return static_cast<int>(matrices.size()); }

    /// Project `a` onto the orthogonal complement of the current span and
    /// insert it if the residual is significant. Returns true on insertion.
    bool try_insert(CMatrix a, double tol) {
        RVector v = detail::vectorize(a);
        const double scale = v.norm();
        if (scale <= tol) return false;
        for (const auto& b : vectors) v -= b.dot(v) * b;
        // Second pass for numerical orthogonality.
        for (const auto& b : vectors) v -= b.dot(v) * b;
        const double res = v.norm();
        if (res <= tol * scale) return false;
        v /= res;
        // Rebuild the matrix from the orthonormalized vector.
        const auto n = a.rows();
        CMatrix m(n, n);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            m(i) = Complex(v[i], v[a.size() + i]);
        matrices.push_back(std::move(m));
        vectors.push_back(std::move(v));
        return true;
    }
};

struct ControllabilityResult {
    int rank = 0;
    int dim = 0;           // N
    bool controllable = false;  // rank == N^2
};

/// Generates the dynamical Lie algebra by commutator closure over an
/// orthonormalized basis and reports its dimension.
inline ControllabilityResult lie_rank(const CMatrix& h0,
                                      const std::vector<CMatrix>& dipoles,
                                      double tol = 1e-10) {
    const auto n = h0.rows();
    if (h0.cols() != n) throw Error("controllability: H0 must be square");
    auto check = [&](const CMatrix& m) {
        if (m.rows() != n || m.cols() != n)
            throw Error("controllability: dipole dimension mismatch");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw Error("controllability: generator not Hermitian");
    };
    check(h0);
    for (const auto& m : dipoles) check(m);

    LieBasis basis;
    basis.try_insert(iunit * h0, tol);
    for (const auto& m : dipoles) basis.try_insert(iunit * m, tol);

    const int full = static_cast<int>(n * n);
    // Closure: commutate every new element against everything already kept.
    size_t frontier = 0;
    while (frontier < basis.matrices.size() && basis.rank() < full) {
        const CMatrix a = basis.matrices[frontier];
        for (size_t j = 0; j < frontier && basis.rank() < full; ++j) {
            const CMatrix& b = basis.matrices[j];
            basis.try_insert(a * b - b * a, tol);
        }
        ++frontier;
    }

    ControllabilityResult r;
    r.rank = basis.rank();
    r.dim = static_cast<int>(n);
    r.controllable = (r.rank == full);
    return r;
}

}  // namespace qoc

#endif
