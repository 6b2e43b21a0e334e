#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ctrlradius/radius.hpp"
#include "ctrlradius/systems.hpp"

namespace testing_support {

using ctrlradius::BoolMatrix;
using ctrlradius::DescriptorSystem;
using ctrlradius::HigherOrderSystem;
using ctrlradius::Index;
using ctrlradius::Matrix;
using ctrlradius::PerturbationMask;
using ctrlradius::Vector;

inline std::string problem_path(const std::string& name) { return std::string(CTRLRADIUS_PROBLEMS_DIR) + "/" + name; }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  Matrix matrix(Index r, Index c) {
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }
  Vector vector(Index n) { return matrix(n, 1).col(0); }
  Matrix orthogonal(Index n) {
    Eigen::HouseholderQR<Matrix> qr(matrix(n, n));
    return qr.householderQ() * Matrix::Identity(n, n);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// wᵀ[s0 E - A, B] = 0 afterwards, so s0 is an uncontrollable mode.
inline DescriptorSystem make_spectral_uncontrollable(const DescriptorSystem& sys, Rng& rng) {
  const Index n = sys.n();
  const Vector w = rng.vector(n);
  const double s0 = rng.uniform(-2.0, 2.0);
  const Matrix proj = w * w.transpose() / w.squaredNorm();
  const Matrix a = sys.A() + proj * (s0 * sys.E() - sys.A());
  const Matrix b = (Matrix::Identity(n, n) - proj) * sys.B();
  return DescriptorSystem(sys.E(), a, b);
}

/// wᵀ[E, B] = 0 afterwards.
inline DescriptorSystem make_infinity_uncontrollable(const DescriptorSystem& sys, Rng& rng) {
  const Index n = sys.n();
  const Vector w = rng.vector(n);
  const Matrix keep = Matrix::Identity(n, n) - w * w.transpose() / w.squaredNorm();
  return DescriptorSystem(keep * sys.E(), sys.A(), keep * sys.B());
}

inline DescriptorSystem random_descriptor(Rng& rng, Index n, Index m) {
  return DescriptorSystem(rng.matrix(n, n), rng.matrix(n, n), rng.matrix(n, m));
}

/// wᵀ[P(s0), b] = 0 afterwards.
inline HigherOrderSystem make_spectral_uncontrollable(const HigherOrderSystem& sys, Rng& rng) {
  const Index big_n = sys.state_dim();
  const int d = sys.degree();
  const Vector w = rng.vector(big_n);
  const double s0 = rng.uniform(-1.5, 1.5);
  Matrix p_at = Matrix::Zero(big_n, big_n);
  for (int i = 0; i <= d; ++i) p_at += std::pow(s0, i) * sys.coefficient(i);
  const Matrix proj = w * w.transpose() / w.squaredNorm();
  std::vector<Matrix> coeffs = sys.coefficients_leading_first();
  coeffs.back() -= proj * p_at;
  return HigherOrderSystem(coeffs, (Matrix::Identity(big_n, big_n) - proj) * sys.b());
}

/// wᵀ[P_d, b] = 0 afterwards.
inline HigherOrderSystem make_infinity_uncontrollable(const HigherOrderSystem& sys, Rng& rng) {
  const Index big_n = sys.state_dim();
  const Vector w = rng.vector(big_n);
  const Matrix keep = Matrix::Identity(big_n, big_n) - w * w.transpose() / w.squaredNorm();
  std::vector<Matrix> coeffs = sys.coefficients_leading_first();
  coeffs.front() = keep * coeffs.front();
  return HigherOrderSystem(coeffs, keep * sys.b());
}

inline HigherOrderSystem random_higher_order(Rng& rng, int d, Index big_n, Index big_m) {
  std::vector<Matrix> coeffs;
  for (int k = 0; k <= d; ++k) coeffs.push_back(rng.matrix(big_n, big_n));
  return HigherOrderSystem(coeffs, rng.matrix(big_n, big_m));
}

inline BoolMatrix bool_matrix(std::initializer_list<std::initializer_list<int>> rows) {
  BoolMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (int v : r) m(i, j++) = v != 0;
    ++i;
  }
  return m;
}

// Systems from the literature used throughout the tests.

inline DescriptorSystem example1_system() {
  Matrix e(3, 3), a(3, 3), b(3, 1);
  e << 1.8, 0, 0, 0, 0.34, 0, 0, 0, 0;
  a << 2, -0.91, -0.088, 0.19, 0.25, 0.51, 0.64, 0.31, -0.59;
  b << -0.63, 0.53, -0.58;
  return DescriptorSystem(e, a, b);
}

inline PerturbationMask fixed_e_mask(Index n, Index m) {
  PerturbationMask mask = PerturbationMask::all_free(n, m);
  mask.E.setConstant(false);
  return mask;
}

inline DescriptorSystem example2_system(double delta) {
  Matrix e(3, 3), a(3, 3), b(3, 1);
  e << 0, 2.1, 0, 1, 0, 0, 0, 0, 0;
  a << 1, 3, 0, 2, 1, 1, 3, 1, 5;
  b << 1, 0, delta;
  return DescriptorSystem(e, a, b);
}

inline DescriptorSystem circuit_system(double c1, double c2, double l, double r) {
  Matrix e = Matrix::Zero(4, 4), a(4, 4), b(4, 1);
  e.diagonal() << c1, c2, -l, 0;
  a << 0, 0, 0, 1, 0, 0, 1, 0, -1, 1, 0, 0, 1, 0, 0, r;
  b << 0, 0, 0, -1;
  return DescriptorSystem(e, a, b);
}

/// Only the C1, C2, L and R positions are free.
inline PerturbationMask circuit_mask() {
  PerturbationMask mask = PerturbationMask::none_free(4, 1);
  mask.E(0, 0) = mask.E(1, 1) = mask.E(2, 2) = true;
  mask.A(3, 3) = true;
  return mask;
}

inline Matrix brake_stiffness(double mu, double k = 1.0, double gamma = M_PI / 100.0) {
  const double s = std::sin(gamma);
  const double c = std::cos(gamma);
  Matrix kk(2, 2);
  kk << (s + mu * c) * s, -mu - (s + mu * c) * c, (mu * s - c) * s, 1 + (mu * s + c) * c;
  return k * kk;
}

inline HigherOrderSystem brake_system(double mu, double mass = 5.0) {
  Matrix b(2, 1);
  b << 0, 1;
  return HigherOrderSystem({mass * Matrix::Identity(2, 2), Matrix::Zero(2, 2), brake_stiffness(mu)}, b);
}

/// Mass matrix and the zero damping term stay fixed; stiffness and input are free.
inline ctrlradius::CoefficientMask brake_mask() {
  ctrlradius::CoefficientMask mask;
  mask.P = {BoolMatrix::Constant(2, 2, false), BoolMatrix::Constant(2, 2, false), std::nullopt};
  return mask;
}

}  // namespace testing_support
