#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qoc/controllability.hpp"

using namespace qoc;

namespace {

CMatrix sigma_x() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

CMatrix random_hermitian(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
    return CMatrix(0.5 * (m + m.adjoint()));
}

}  // namespace

TEST_CASE("two-level with nonzero trace is completely controllable",
          "[controllability]") {
    CMatrix h0 = CMatrix::Zero(2, 2);
    h0(0, 0) = 0.0;
    h0(1, 1) = 0.1568;  // tr H0 != 0
    const auto r = lie_rank(h0, {0.3921 * sigma_x()});
    CHECK(r.dim == 2);
    CHECK(r.rank == 4);
    CHECK(r.controllable);
}

TEST_CASE("traceless two-level generators only span su(2)", "[controllability]") {
    CMatrix h0 = CMatrix::Zero(2, 2);
    h0(0, 0) = -0.0784;
    h0(1, 1) = 0.0784;  // traceless
    const auto r = lie_rank(h0, {0.3921 * sigma_x()});
    CHECK(r.rank == 3);
    CHECK_FALSE(r.controllable);
}

TEST_CASE("commuting generators are never controllable", "[controllability]") {
    // Diagonal H0 and diagonal dipole commute: the algebra stays abelian.
    CMatrix h0 = CMatrix::Zero(3, 3);
    h0(0, 0) = 0.1;
    h0(1, 1) = 0.5;
    h0(2, 2) = 0.9;
    CMatrix mu = CMatrix::Zero(3, 3);
    mu(0, 0) = 1.0;
    mu(1, 1) = -0.5;
    mu(2, 2) = 2.0;
    const auto r = lie_rank(h0, {mu});
    CHECK(r.rank == 2);
    CHECK_FALSE(r.controllable);
}

TEST_CASE("generic three-level pair generates all of u(3)", "[controllability]") {
    const CMatrix h0 = random_hermitian(3, 11);
    const CMatrix mu = random_hermitian(3, 22);
    const auto r = lie_rank(h0, {mu});
    CHECK(r.rank == 9);
    CHECK(r.controllable);
}

TEST_CASE("rank agrees with a brute-force matrix-rank oracle",
          "[controllability][property]") {
    // Oracle: build the commutator closure without orthogonalization tricks,
    // stack real vectorizations into a big matrix and take its numerical rank.
    const int n = 3;
    const CMatrix h0 = random_hermitian(n, 5);
    CMatrix mu = CMatrix::Zero(n, n);  // nearest-neighbor coupling
    mu(0, 1) = mu(1, 0) = 1.0;
    mu(1, 2) = mu(2, 1) = 0.7;

    std::vector<CMatrix> gens = {iunit * h0, iunit * mu};
    for (size_t pass = 0; pass < 4; ++pass) {
        const size_t sz = gens.size();
        for (size_t a = 0; a < sz; ++a)
            for (size_t b = 0; b < a; ++b)
                gens.push_back(gens[a] * gens[b] - gens[b] * gens[a]);
        if (gens.size() > 200) break;
    }
    RMatrix stack(static_cast<Eigen::Index>(gens.size()), 2 * n * n);
    for (size_t g = 0; g < gens.size(); ++g)
        for (Eigen::Index i = 0; i < n * n; ++i) {
            stack(static_cast<Eigen::Index>(g), i) = gens[g](i).real();
            stack(static_cast<Eigen::Index>(g), n * n + i) = gens[g](i).imag();
        }
    Eigen::ColPivHouseholderQR<RMatrix> qr(stack);
    qr.setThreshold(1e-8);
    const int oracle_rank = static_cast<int>(qr.rank());

    const auto r = lie_rank(h0, {mu});
    CHECK(r.rank == oracle_rank);
}

TEST_CASE("multiple polarization channels can restore controllability",
          "[controllability]") {
    // One diagonal dipole is useless; adding an off-diagonal one closes u(2).
    CMatrix h0 = CMatrix::Zero(2, 2);
    h0(0, 0) = 0.3;
    h0(1, 1) = 0.7;
    CMatrix mu_z = CMatrix::Zero(2, 2);
    mu_z(0, 0) = 1.0;
    mu_z(1, 1) = -1.0;
    CHECK_FALSE(lie_rank(h0, {mu_z}).controllable);
    CHECK(lie_rank(h0, {mu_z, sigma_x()}).controllable);
}

TEST_CASE("controllability input validation", "[controllability]") {
    CMatrix bad(2, 3);
    bad.setZero();
    CHECK_THROWS_AS(lie_rank(bad, {}), Error);
    CMatrix h0 = CMatrix::Zero(2, 2);
    CMatrix non_hermitian = CMatrix::Zero(2, 2);
    non_hermitian(0, 1) = Complex(0.0, 1.0);
    non_hermitian(1, 0) = Complex(0.0, 1.0);  // should be -i for Hermitian
    CHECK_THROWS_AS(lie_rank(h0, {non_hermitian}), Error);
    CMatrix wrong_size = CMatrix::Zero(3, 3);
    CHECK_THROWS_AS(lie_rank(h0, {wrong_size}), Error);
}
