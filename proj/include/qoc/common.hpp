#ifndef QOC_COMMON_HPP
#define QOC_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qoc {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr Complex iunit{0.0, 1.0};

enum class Direction { Forward, Backward };

/// Thrown on invalid input or on numerical failures (non-convergence,
/// degenerate rescalings, norm loss).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace qoc

#endif
