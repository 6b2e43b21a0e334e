#pragma once

#include <optional>
#include <vector>

#include "ctrlradius/linalg.hpp"

namespace ctrlradius {

/// Bad shapes or otherwise invalid model data.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Perturbation placed on an entry that the structure keeps fixed.
class StructureError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// P_d x^(d) + ... + P_1 x' + P_0 x = b u with N x N coefficients.
class HigherOrderSystem {
 public:
  /// coefficients are ordered from the leading one: {P_d, P_{d-1}, ..., P_0}.
  HigherOrderSystem(std::vector<Matrix> coefficients, Matrix b);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  Index state_dim() const { return b_.rows(); }
  Index input_dim() const { return b_.cols(); }

  /// P_i for i in [0, d].
  const Matrix& coefficient(int i) const;
  const std::vector<Matrix>& coefficients_leading_first() const { return coeffs_; }
  const Matrix& b() const { return b_; }

 private:
  std::vector<Matrix> coeffs_;
  Matrix b_;
};

/// E z' = A z + B u.
class DescriptorSystem {
 public:
  DescriptorSystem(Matrix e, Matrix a, Matrix b);

  Index n() const { return e_.rows(); }
  Index m() const { return b_.cols(); }
  const Matrix& E() const { return e_; }
  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }

 private:
  Matrix e_, a_, b_;
};

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Entry-wise freedom pattern; true marks a perturbable entry.
struct PerturbationMask {
  BoolMatrix E;
  BoolMatrix A;
  BoolMatrix B;

  static PerturbationMask all_free(Index n, Index m);
  static PerturbationMask none_free(Index n, Index m);
  Index free_count() const;
  /// Throws ModelError on shape mismatch or when nothing is free.
  void validate_for(const DescriptorSystem& sys) const;
};

enum class FailingMode { None, Spectral, Infinity };

struct ControllabilityReport {
  bool controllable = true;
  FailingMode failing_mode = FailingMode::None;
  Complex failing_eigenvalue{};  ///< meaningful for FailingMode::Spectral only
  std::vector<Complex> tested_eigenvalues;
};

struct CanonicalForm {
  DescriptorSystem system;
  PerturbationMask mask;
};

/// Block-companion descriptor realization: E = diag(P_d, I, ..., I),
/// A = [-P_{d-1} ... -P_0; I 0 ...], B = [b; 0; ...]. The mask frees exactly
/// the entries holding P_d, P_{d-1..0} and b.
CanonicalForm canonical_form(const HigherOrderSystem& sys);

/// rank [sE - A, B] = n at every finite generalized eigenvalue and rank [E, B] = n.
/// Throws SingularPencilError for singular pencils.
ControllabilityReport is_c_controllable_pencil(const DescriptorSystem& sys,
                                               double rel_tol = kDefaultRankTol);

/// Full row rank of the block-Toeplitz controllability matrix.
bool is_c_controllable_toeplitz(const DescriptorSystem& sys, double rel_tol = kDefaultRankTol);

/// C^d-controllability, evaluated through the canonical form.
bool is_cd_controllable(const HigherOrderSystem& sys, double rel_tol = kDefaultRankTol);

/// Reads the perturbed coefficients back out of a perturbed canonical form.
/// Throws StructureError if a delta touches a filler (identity/zero) entry.
HigherOrderSystem extract_higher_order_perturbation(const HigherOrderSystem& sys, const Matrix& delta_e,
                                                    const Matrix& delta_a, const Matrix& delta_b);

}  // namespace ctrlradius
