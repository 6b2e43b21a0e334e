#pragma once

// Randomized property checks shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ctrlradius/radius.hpp"
#include "ctrlradius/stln.hpp"
#include "ctrlradius/toeplitz.hpp"
#include "support.hpp"

namespace testing_support {

struct AgreementStats {
  int conclusive = 0;
  int agree = 0;
  int controllable = 0;
  int uncontrollable = 0;
  int inconclusive = 0;
};

/// Pencil and Toeplitz verdicts on random descriptor systems (n <= 5, m <= 2),
/// a third each controllable, spectrally uncontrollable and uncontrollable at infinity.
inline AgreementStats pencil_vs_toeplitz(std::uint64_t seed, int target) {
  Rng rng(seed);
  AgreementStats st;
  for (int i = 0; st.conclusive < target; ++i) {
    const Index n = rng.integer(1, 5);
    const Index m = rng.integer(1, 2);
    DescriptorSystem sys = random_descriptor(rng, n, m);
    if (i % 3 == 1) sys = make_spectral_uncontrollable(sys, rng);
    if (i % 3 == 2) sys = make_infinity_uncontrollable(sys, rng);
    try {
      const bool pencil = ctrlradius::is_c_controllable_pencil(sys).controllable;
      const bool toeplitz = ctrlradius::is_c_controllable_toeplitz(sys);
      ++st.conclusive;
      st.agree += pencil == toeplitz;
      (toeplitz ? st.controllable : st.uncontrollable)++;
    } catch (const ctrlradius::SingularPencilError&) {
      ++st.inconclusive;
    }
  }
  return st;
}

/// Higher-order verdict against the pencil test on the canonical form (d <= 3, N <= 3).
inline AgreementStats higher_order_vs_canonical(std::uint64_t seed, int target) {
  Rng rng(seed);
  AgreementStats st;
  for (int i = 0; st.conclusive < target; ++i) {
    const int d = rng.integer(1, 3);
    const Index big_n = rng.integer(1, 3);
    const Index big_m = rng.integer(1, 2);
    HigherOrderSystem sys = random_higher_order(rng, d, big_n, big_m);
    if (i % 3 == 1) sys = make_spectral_uncontrollable(sys, rng);
    if (i % 3 == 2) sys = make_infinity_uncontrollable(sys, rng);
    try {
      const bool pencil = ctrlradius::is_c_controllable_pencil(ctrlradius::canonical_form(sys).system).controllable;
      const bool cd = ctrlradius::is_cd_controllable(sys);
      ++st.conclusive;
      st.agree += pencil == cd;
      (cd ? st.controllable : st.uncontrollable)++;
    } catch (const ctrlradius::SingularPencilError&) {
      ++st.inconclusive;
    }
  }
  return st;
}

inline PerturbationMask random_mask(Rng& rng, Index n, Index m, double p_free) {
  PerturbationMask mask = PerturbationMask::none_free(n, m);
  do {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        mask.E(i, j) = rng.uniform(0, 1) < p_free;
        mask.A(i, j) = rng.uniform(0, 1) < p_free;
      }
      for (Index j = 0; j < m; ++j) mask.B(i, j) = rng.uniform(0, 1) < p_free;
    }
  } while (mask.free_count() == 0);
  return mask;
}

struct IdentityErrors {
  double s_identity = 0.0;     ///< max |S dα - dE1 z|
  double p_identity = 0.0;     ///< max |P dα - df1|
  double round_trip = 0.0;     ///< max |embed(α) - C(extract(α))| and coordinate read-back error
  double norm_identity = 0.0;  ///< max | ||α|| - ||[dE dA dB]||_F | / ||α||
  int probes = 0;
};

/// Structure-map identities on random systems, masks, orientations, partitions and probes.
inline IdentityErrors structure_identities(std::uint64_t seed, int systems, int probes_per_system) {
  Rng rng(seed);
  IdentityErrors err;
  for (int t = 0; t < systems; ++t) {
    const Index n = rng.integer(2, 4);
    const Index m = rng.integer(1, 3);
    const DescriptorSystem sys = random_descriptor(rng, n, m);
    const PerturbationMask mask = random_mask(rng, n, m, 0.6);
    const ctrlradius::ControllabilityToeplitz t0 = ctrlradius::orient_tall(ctrlradius::assemble(sys));
    const ctrlradius::StructureBasis basis = ctrlradius::build_basis(sys, mask, t0.orientation);
    const Index cols = basis.cols();
    const Index p = rng.integer(0, static_cast<int>(cols - 1));
    const Vector z = rng.vector(cols - 1);
    const Matrix s = ctrlradius::build_S(basis, z, p);
    const Matrix pm = ctrlradius::build_P(basis, p);
    for (int k = 0; k < probes_per_system; ++k) {
      const Vector da = rng.vector(basis.size());
      const Matrix full = ctrlradius::embed(basis, da);
      Matrix e1(full.rows(), cols - 1);
      e1 << full.leftCols(p), full.rightCols(cols - 1 - p);
      err.s_identity = std::max(err.s_identity, (s * da - e1 * z).cwiseAbs().maxCoeff());
      err.p_identity = std::max(err.p_identity, (pm * da - full.col(p)).cwiseAbs().maxCoeff());

      // The Toeplitz map is linear, so the matrix of the perturbation alone
      // must equal the embedding, and the coordinates must read back unchanged.
      const ctrlradius::SystemPerturbation d = ctrlradius::extract(basis, da);
      const DescriptorSystem delta(d.dE, d.dA, d.dB);
      const Matrix t1 = ctrlradius::assemble(delta).matrix;
      const Matrix oriented = t0.orientation == ctrlradius::Orientation::Transposed ? Matrix(t1.transpose()) : t1;
      err.round_trip = std::max(err.round_trip, (oriented - full).cwiseAbs().maxCoeff());
      for (Index k = 0; k < basis.size(); ++k) {
        const ctrlradius::Parameter& par = basis.parameters[static_cast<std::size_t>(k)];
        const Matrix& src = par.source == ctrlradius::Source::E ? d.dE : par.source == ctrlradius::Source::A ? d.dA : d.dB;
        err.round_trip = std::max(err.round_trip, std::abs(src(par.row, par.col) - da(k)));
      }
      Matrix stacked(n, 2 * n + m);
      stacked << d.dE, d.dA, d.dB;
      err.norm_identity = std::max(err.norm_identity, std::abs(da.norm() - stacked.norm()) / da.norm());
      ++err.probes;
    }
  }
  return err;
}

struct ValidityStats {
  int runs = 0;
  int converged = 0;
  int valid = 0;  ///< converged and the perturbed system fails the Toeplitz test
};

/// Radius runs on random systems with full, E-fixed and random masks.
inline ValidityStats output_validity(std::uint64_t seed, int runs) {
  Rng rng(seed);
  ValidityStats st;
  for (int i = 0; i < runs; ++i) {
    const Index n = rng.integer(2, 4);
    const Index m = rng.integer(1, 2);
    const DescriptorSystem sys = random_descriptor(rng, n, m);
    PerturbationMask mask = PerturbationMask::all_free(n, m);
    if (i % 3 == 1) mask = fixed_e_mask(n, m);
    if (i % 3 == 2) mask = random_mask(rng, n, m, 0.7);
    ctrlradius::StlnConfig cfg;
    cfg.multistart = i % 2 == 0;
    const ctrlradius::RadiusResult r = ctrlradius::compute_radius_descriptor(sys, mask, cfg);
    ++st.runs;
    if (!r.converged) continue;
    ++st.converged;
    st.valid += !ctrlradius::is_c_controllable_toeplitz(r.perturbed_system, ctrlradius::verification_tolerance(cfg));
  }
  return st;
}

struct CovarianceStats {
  int compared = 0;
  int skipped = 0;  ///< base run did not converge
  double max_rel_error = 0.0;
};

/// radius(cE, cA, cB) against |c| radius(E, A, B) under one shared configuration.
inline CovarianceStats scale_covariance(std::uint64_t seed, int systems, const ctrlradius::StlnConfig& cfg) {
  Rng rng(seed);
  CovarianceStats st;
  for (int i = 0; i < systems; ++i) {
    const Index n = rng.integer(2, 4);
    const Index m = rng.integer(1, 2);
    const DescriptorSystem sys = random_descriptor(rng, n, m);
    const PerturbationMask mask = i % 2 == 0 ? PerturbationMask::all_free(n, m) : fixed_e_mask(n, m);
    const ctrlradius::RadiusResult base = ctrlradius::compute_radius_descriptor(sys, mask, cfg);
    if (!base.converged) {
      ++st.skipped;
      continue;
    }
    for (double c : {2.0, 10.0}) {
      const DescriptorSystem scaled(c * sys.E(), c * sys.A(), c * sys.B());
      const ctrlradius::RadiusResult r = ctrlradius::compute_radius_descriptor(scaled, mask, cfg);
      const double expected = std::abs(c) * base.radius_frobenius;
      const double rel = std::abs(r.radius_frobenius - expected) / std::max(expected, 1e-300);
      st.max_rel_error = std::max(st.max_rel_error, rel);
      ++st.compared;
    }
  }
  return st;
}

struct OracleBoundStats {
  int systems = 0;
  int within = 0;
  double worst_excess = 0.0;  ///< max(radius - sigma_min([E B]))
  std::vector<std::string> violations;
};

/// Full-mask multistart radius against sigma_min([E B]) on random controllable systems.
inline OracleBoundStats oracle_bound(std::uint64_t seed, int systems) {
  Rng rng(seed);
  OracleBoundStats st;
  ctrlradius::StlnConfig cfg;
  cfg.multistart = true;
  for (int i = 0; i < systems; ++i) {
    const Index n = rng.integer(2, 4);
    const Index m = rng.integer(1, 2);
    const DescriptorSystem sys = random_descriptor(rng, n, m);
    const ctrlradius::RadiusResult r =
        ctrlradius::compute_radius_descriptor(sys, PerturbationMask::all_free(n, m), cfg);
    const double bound = ctrlradius::oracle_r2_unstructured(sys);
    ++st.systems;
    const double excess = r.radius_frobenius - bound;
    st.worst_excess = std::max(st.worst_excess, excess);
    if (r.converged && excess <= 1e-6) {
      ++st.within;
    } else {
      st.violations.push_back("system " + std::to_string(i) + " (n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                              "): radius " + std::to_string(r.radius_frobenius) + ", bound " + std::to_string(bound) +
                              (r.converged ? "" : ", not converged"));
    }
  }
  return st;
}

}  // namespace testing_support
