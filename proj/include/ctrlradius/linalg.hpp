#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ctrlradius {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Relative singular-value cutoff used by every "has full rank" test unless a
/// caller asks for something else.
inline constexpr double kDefaultRankTol = 1e-8;

/// Bad dimensions, non-finite entries, or other malformed numeric input.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// det(sE - A) vanishes identically; spectral tests cannot be evaluated.
class SingularPencilError : public NumericError {
 public:
  using NumericError::NumericError;
};

void require_finite(const Matrix& m, std::string_view what);

/// Returns x minimizing ||M x - rhs||_2. When M is column-rank deficient (or
/// wider than tall) the minimum-norm minimizer is returned.
Vector least_squares(const Matrix& m, const Vector& rhs);

/// Singular values in nonincreasing order; min(rows, cols) of them.
Vector singular_values(const Matrix& m);

/// Number of singular values strictly above rel_tol * sigma_max. Zero matrix -> 0.
int numerical_rank(const Matrix& m, double rel_tol = kDefaultRankTol);

/// Complex overload used by the spectral rank test [sE - A, B].
int numerical_rank(const Eigen::MatrixXcd& m, double rel_tol = kDefaultRankTol);

/// Finite generalized eigenvalues of the pencil sE - A, with multiplicity.
/// Infinite eigenvalues are dropped. Throws SingularPencilError when
/// det(sE - A) is identically zero.
std::vector<Complex> generalized_eigenvalues(const Matrix& e, const Matrix& a);

/// True when rank(sE - A) < n at several generic sample points.
bool is_singular_pencil(const Matrix& e, const Matrix& a);

}  // namespace ctrlradius
