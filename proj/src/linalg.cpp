#include "ctrlradius/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace ctrlradius {

namespace {

template <typename Derived>
int rank_from_singular_values(const Eigen::MatrixBase<Derived>& sv, double rel_tol) {
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (!(smax > 0.0)) return 0;
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * smax) ++rank;
  }
  return rank;
}

void require_rel_tol(double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw NumericError("rank tolerance must lie in (0, 1), got " + std::to_string(rel_tol));
  }
}

}  // namespace

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw NumericError(std::string(what) + " contains non-finite entries");
  }
}

Vector least_squares(const Matrix& m, const Vector& rhs) {
  if (rhs.size() != m.rows()) {
    throw NumericError("least_squares: rhs has length " + std::to_string(rhs.size()) +
                       " but matrix has " + std::to_string(m.rows()) + " rows");
  }
  require_finite(m, "least_squares matrix");
  require_finite(rhs, "least_squares rhs");
  if (m.cols() == 0) return Vector(0);
  if (m.rows() == 0) return Vector::Zero(m.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);
  return cod.solve(rhs);
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) throw NumericError("singular_values: empty matrix");
  require_finite(m, "singular_values input");
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

int numerical_rank(const Matrix& m, double rel_tol) {
  require_rel_tol(rel_tol);
  if (m.size() == 0) return 0;
  return rank_from_singular_values(singular_values(m), rel_tol);
}

int numerical_rank(const Eigen::MatrixXcd& m, double rel_tol) {
  require_rel_tol(rel_tol);
  if (m.size() == 0) return 0;
  if (!m.allFinite()) throw NumericError("numerical_rank: non-finite complex input");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return rank_from_singular_values(svd.singularValues(), rel_tol);
}

bool is_singular_pencil(const Matrix& e, const Matrix& a) {
  // Generic real sample points; a regular pencil can be singular at only
  // finitely many s, so failing at all of them means det(sE - A) == 0.
  constexpr std::array<double, 3> samples{0.6180339887498949, -1.3247179572447460,
                                          2.7182818284590452};
  const Index n = e.rows();
  for (const double s : samples) {
    if (numerical_rank(Matrix(s * e - a), 1e-11) == n) return false;
  }
  return true;
}

std::vector<Complex> generalized_eigenvalues(const Matrix& e, const Matrix& a) {
  if (e.rows() != e.cols() || a.rows() != a.cols() || e.rows() != a.rows()) {
    throw NumericError("generalized_eigenvalues: E and A must be square of equal size");
  }
  require_finite(e, "E");
  require_finite(a, "A");
  if (e.rows() == 0) return {};
  if (is_singular_pencil(e, a)) {
    throw SingularPencilError("pencil sE - A is singular (det identically zero); spectral rank test inconclusive");
  }

  // A v = s E v  <=>  (sE - A) v = 0.
  Eigen::GeneralizedEigenSolver<Matrix> ges(a, e, /*computeEigenvectors=*/false);
  if (ges.info() != Eigen::Success) {
    throw NumericError("generalized_eigenvalues: QZ iteration did not converge");
  }
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  const double beta_floor = 100.0 * std::numeric_limits<double>::epsilon() * std::max(e.norm(), 1e-300);

  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(betas.size()));
  for (Index i = 0; i < betas.size(); ++i) {
    if (std::abs(betas(i)) <= beta_floor) continue;  // infinite
    out.push_back(alphas(i) / betas(i));
  }
  return out;
}

}  // namespace ctrlradius
