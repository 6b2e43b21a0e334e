#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrlradius/stln.hpp"
#include "ctrlradius/systems.hpp"

namespace ctrlradius {

struct RadiusResult {
  double radius_frobenius = 0.0;
  double radius_spectral = 0.0;
  Matrix dE;
  Matrix dA;
  Matrix dB;
  DescriptorSystem perturbed_system;
  std::optional<HigherOrderSystem> perturbed_higher_order{};
  int iterations = 0;
  bool converged = false;
  bool uncontrollability_verified = false;
  /// Column of the tall-oriented Toeplitz matrix split off as y; empty when no
  /// iteration ran.
  std::optional<Index> partition_col_used{};
  bool already_uncontrollable = false;
  std::string message{};
};

/// Optional per-coefficient masks for a higher-order system. Each entry, when
/// present, must be N x N (P) or N x M (b); absent entries are fully free.
struct CoefficientMask {
  /// Leading first, like the coefficients; either empty or d+1 long.
  std::vector<std::optional<BoolMatrix>> P;
  std::optional<BoolMatrix> b;
};

/// max(1e-8, 10 / omega): rank tolerance used to verify a computed perturbation.
double verification_tolerance(const StlnConfig& cfg);

RadiusResult compute_radius_descriptor(const DescriptorSystem& sys, const PerturbationMask& mask,
                                       const StlnConfig& cfg = {});

RadiusResult compute_radius_higher_order(const HigherOrderSystem& sys, const std::optional<CoefficientMask>& mask = {},
                                         const StlnConfig& cfg = {});

/// Canonical filler mask intersected with the user mask.
PerturbationMask higher_order_mask(const HigherOrderSystem& sys, const std::optional<CoefficientMask>& mask);

/// sigma_min([E B]): distance to the nearest [E B] of deficient row rank.
double oracle_r2_unstructured(const DescriptorSystem& sys);

}  // namespace ctrlradius
