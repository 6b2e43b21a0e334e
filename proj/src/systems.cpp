#include "ctrlradius/systems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "ctrlradius/toeplitz.hpp"

namespace ctrlradius {

namespace {

/// Singular values above rel_tol * max(sigma_max, scale); the scale keeps a
/// nearly vanishing [sE - A, B] from being judged against itself.
int rank_against_scale(const Eigen::MatrixXcd& m, double rel_tol, double scale) {
  if (!m.allFinite()) throw NumericError("rank test: non-finite input");
  const Vector sv = Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues();
  const double cutoff = rel_tol * std::max(sv.size() > 0 ? sv(0) : 0.0, scale);
  return static_cast<int>((sv.array() > cutoff).count());
}

std::string shape(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void expect_shape(const Matrix& m, Index rows, Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ModelError(what + ": expected " + shape(rows, cols) + ", found " + shape(m.rows(), m.cols()));
  }
}

void expect_mask_shape(const BoolMatrix& m, Index rows, Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ModelError(what + ": expected " + shape(rows, cols) + ", found " + shape(m.rows(), m.cols()));
  }
}

}  // namespace

HigherOrderSystem::HigherOrderSystem(std::vector<Matrix> coefficients, Matrix b)
    : coeffs_(std::move(coefficients)), b_(std::move(b)) {
  if (coeffs_.size() < 2) {
    throw ModelError("higher-order system needs degree >= 1 (at least two coefficient matrices)");
  }
  const Index n = b_.rows();
  if (n < 1 || b_.cols() < 1) throw ModelError("input matrix b must be at least 1x1");
  bool any_nonzero = false;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const int power = static_cast<int>(coeffs_.size() - 1 - k);
    expect_shape(coeffs_[k], n, n, "P_" + std::to_string(power));
    if (!coeffs_[k].allFinite()) throw ModelError("P_" + std::to_string(power) + " has non-finite entries");
    any_nonzero = any_nonzero || !coeffs_[k].isZero(0.0);
  }
  if (!b_.allFinite()) throw ModelError("b has non-finite entries");
  if (!any_nonzero) throw ModelError("all coefficient matrices are zero");
}

const Matrix& HigherOrderSystem::coefficient(int i) const {
  if (i < 0 || i > degree()) throw ModelError("coefficient index out of range: " + std::to_string(i));
  return coeffs_[static_cast<std::size_t>(degree() - i)];
}

DescriptorSystem::DescriptorSystem(Matrix e, Matrix a, Matrix b)
    : e_(std::move(e)), a_(std::move(a)), b_(std::move(b)) {
  const Index n = e_.rows();
  if (n < 1) throw ModelError("descriptor system needs n >= 1");
  if (b_.cols() < 1) throw ModelError("descriptor system needs m >= 1");
  expect_shape(e_, n, n, "E");
  expect_shape(a_, n, n, "A");
  expect_shape(b_, n, b_.cols(), "B");
  if (!e_.allFinite() || !a_.allFinite() || !b_.allFinite()) {
    throw ModelError("descriptor system has non-finite entries");
  }
}

PerturbationMask PerturbationMask::all_free(Index n, Index m) {
  return {BoolMatrix::Constant(n, n, true), BoolMatrix::Constant(n, n, true), BoolMatrix::Constant(n, m, true)};
}

PerturbationMask PerturbationMask::none_free(Index n, Index m) {
  return {BoolMatrix::Constant(n, n, false), BoolMatrix::Constant(n, n, false), BoolMatrix::Constant(n, m, false)};
}

Index PerturbationMask::free_count() const {
  return E.cast<Index>().sum() + A.cast<Index>().sum() + B.cast<Index>().sum();
}

void PerturbationMask::validate_for(const DescriptorSystem& sys) const {
  expect_mask_shape(E, sys.n(), sys.n(), "mask E");
  expect_mask_shape(A, sys.n(), sys.n(), "mask A");
  expect_mask_shape(B, sys.n(), sys.m(), "mask B");
  if (free_count() == 0) throw ModelError("empty perturbation structure");
}

CanonicalForm canonical_form(const HigherOrderSystem& sys) {
  const Index big_n = sys.state_dim();
  const Index big_m = sys.input_dim();
  const int d = sys.degree();
  const Index n = big_n * d;

  Matrix e = Matrix::Identity(n, n);
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, big_m);
  PerturbationMask mask = PerturbationMask::none_free(n, big_m);

  e.topLeftCorner(big_n, big_n) = sys.coefficient(d);
  mask.E.topLeftCorner(big_n, big_n).setConstant(true);
  for (int k = 0; k < d; ++k) {
    // block column k of the first block row holds -P_{d-1-k}
    a.block(0, k * big_n, big_n, big_n) = -sys.coefficient(d - 1 - k);
    mask.A.block(0, k * big_n, big_n, big_n).setConstant(true);
  }
  for (int k = 1; k < d; ++k) {
    a.block(k * big_n, (k - 1) * big_n, big_n, big_n).setIdentity();
  }
  b.topRows(big_n) = sys.b();
  mask.B.topRows(big_n).setConstant(true);

  return {DescriptorSystem(std::move(e), std::move(a), std::move(b)), std::move(mask)};
}

ControllabilityReport is_c_controllable_pencil(const DescriptorSystem& sys, double rel_tol) {
  const Index n = sys.n();
  const Index m = sys.m();
  ControllabilityReport report;
  report.tested_eigenvalues = generalized_eigenvalues(sys.E(), sys.A());

  Eigen::MatrixXcd pencil_b(n, n + m);
  pencil_b.rightCols(m) = sys.B().cast<Complex>();
  for (const Complex s : report.tested_eigenvalues) {
    pencil_b.leftCols(n) = s * sys.E().cast<Complex>() - sys.A().cast<Complex>();
    const double scale = std::abs(s) * sys.E().norm() + sys.A().norm() + sys.B().norm();
    if (rank_against_scale(pencil_b, rel_tol, scale) < n) {
      report.controllable = false;
      report.failing_mode = FailingMode::Spectral;
      report.failing_eigenvalue = s;
      return report;
    }
  }

  Matrix e_b(n, n + m);
  e_b << sys.E(), sys.B();
  if (numerical_rank(e_b, rel_tol) < n) {
    report.controllable = false;
    report.failing_mode = FailingMode::Infinity;
  }
  return report;
}

bool is_c_controllable_toeplitz(const DescriptorSystem& sys, double rel_tol) {
  const ControllabilityToeplitz t = assemble(sys);
  return numerical_rank(t.matrix, rel_tol) == sys.n() * sys.n();
}

bool is_cd_controllable(const HigherOrderSystem& sys, double rel_tol) {
  return is_c_controllable_toeplitz(canonical_form(sys).system, rel_tol);
}

HigherOrderSystem extract_higher_order_perturbation(const HigherOrderSystem& sys, const Matrix& delta_e,
                                                    const Matrix& delta_a, const Matrix& delta_b) {
  const CanonicalForm canon = canonical_form(sys);
  const Index n = canon.system.n();
  const Index m = canon.system.m();
  expect_shape(delta_e, n, n, "delta E");
  expect_shape(delta_a, n, n, "delta A");
  expect_shape(delta_b, n, m, "delta B");

  auto check_fixed = [](const Matrix& delta, const BoolMatrix& free, const char* what) {
    for (Index i = 0; i < delta.rows(); ++i) {
      for (Index j = 0; j < delta.cols(); ++j) {
        if (!free(i, j) && delta(i, j) != 0.0) {
          throw StructureError(std::string("perturbation of fixed entry ") + what + "(" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
        }
      }
    }
  };
  check_fixed(delta_e, canon.mask.E, "E");
  check_fixed(delta_a, canon.mask.A, "A");
  check_fixed(delta_b, canon.mask.B, "B");

  const Index big_n = sys.state_dim();
  const int d = sys.degree();
  std::vector<Matrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(d + 1));
  coeffs.push_back(canon.system.E().topLeftCorner(big_n, big_n) + delta_e.topLeftCorner(big_n, big_n));
  for (int k = 0; k < d; ++k) {
    coeffs.push_back(-(canon.system.A().block(0, k * big_n, big_n, big_n) + delta_a.block(0, k * big_n, big_n, big_n)));
  }
  Matrix b = canon.system.B().topRows(big_n) + delta_b.topRows(big_n);
  return HigherOrderSystem(std::move(coeffs), std::move(b));
}

}  // namespace ctrlradius
