#include "ctrlradius/radius.hpp"

#include <algorithm>
#include <string>

#include "ctrlradius/toeplitz.hpp"

namespace ctrlradius {

namespace {

Matrix stacked(const Matrix& de, const Matrix& da, const Matrix& db) {
  Matrix out(de.rows(), de.cols() + da.cols() + db.cols());
  out << de, da, db;
  return out;
}

void fill_norms(RadiusResult& r) {
  const Matrix s = stacked(r.dE, r.dA, r.dB);
  r.radius_frobenius = s.norm();
  r.radius_spectral = s.isZero(0.0) ? 0.0 : singular_values(s)(0);
}

RadiusResult zero_result(const DescriptorSystem& sys) {
  RadiusResult r{.dE = Matrix::Zero(sys.n(), sys.n()),
                 .dA = Matrix::Zero(sys.n(), sys.n()),
                 .dB = Matrix::Zero(sys.n(), sys.m()),
                 .perturbed_system = sys};
  return r;
}

DescriptorSystem perturbed(const DescriptorSystem& sys, const SystemPerturbation& d) {
  return DescriptorSystem(sys.E() + d.dE, sys.A() + d.dA, sys.B() + d.dB);
}

// A 1 x m Toeplitz matrix is just B, so the only way to lose rank is B = 0.
RadiusResult scalar_state_radius(const DescriptorSystem& sys, const PerturbationMask& mask) {
  RadiusResult r = zero_result(sys);
  bool reachable = true;
  for (Index j = 0; j < sys.m(); ++j) {
    if (mask.B(0, j)) {
      r.dB(0, j) = -sys.B()(0, j);
    } else if (sys.B()(0, j) != 0.0) {
      reachable = false;
    }
  }
  if (!reachable) {
    r.dB.setZero();
    r.message = "perturbation structure cannot make this system uncontrollable (fixed nonzero input entry)";
    return r;
  }
  r.perturbed_system = DescriptorSystem(sys.E(), sys.A(), sys.B() + r.dB);
  r.converged = true;
  r.uncontrollability_verified = !is_c_controllable_toeplitz(r.perturbed_system);
  fill_norms(r);
  return r;
}

}  // namespace

double verification_tolerance(const StlnConfig& cfg) { return std::max(1e-8, 10.0 / cfg.omega); }

RadiusResult compute_radius_descriptor(const DescriptorSystem& sys, const PerturbationMask& mask,
                                       const StlnConfig& cfg) {
  mask.validate_for(sys);
  cfg.validate();

  if (!is_c_controllable_toeplitz(sys, kDefaultRankTol)) {
    RadiusResult r = zero_result(sys);
    r.converged = true;
    r.uncontrollability_verified = true;
    r.already_uncontrollable = true;
    return r;
  }
  if (sys.n() == 1) return scalar_state_radius(sys, mask);

  const ControllabilityToeplitz t = orient_tall(assemble(sys));
  const StructureBasis basis = build_basis(sys, mask, t.orientation);
  const double tol = verification_tolerance(cfg);
  auto verify = [&](const StlnState& s) {
    return !is_c_controllable_toeplitz(perturbed(sys, extract(basis, s.alpha)), tol);
  };

  StlnState state;
  bool verified = false;
  if (cfg.multistart) {
    MultistartResult ms = stln_multistart(t.matrix, basis, cfg, verify);
    state = std::move(ms.best);
    verified = ms.best_accepted || (state.converged && verify(state));
  } else {
    state = stln_run(t.matrix, basis, cfg, resolve_partition(cfg, t.matrix.cols()));
    verified = state.converged && verify(state);
  }

  const SystemPerturbation d = extract(basis, state.alpha);
  RadiusResult r{.dE = d.dE, .dA = d.dA, .dB = d.dB, .perturbed_system = perturbed(sys, d)};
  r.iterations = state.iterations;
  r.converged = state.converged;
  r.uncontrollability_verified = verified;
  r.partition_col_used = state.partition_col;
  r.message = state.message;
  fill_norms(r);
  return r;
}

PerturbationMask higher_order_mask(const HigherOrderSystem& sys, const std::optional<CoefficientMask>& mask) {
  PerturbationMask canon = canonical_form(sys).mask;
  if (!mask) return canon;
  const Index big_n = sys.state_dim();
  const int d = sys.degree();
  if (!mask->P.empty() && static_cast<int>(mask->P.size()) != d + 1) {
    throw ModelError("coefficient mask: expected " + std::to_string(d + 1) + " entries, found " +
                     std::to_string(mask->P.size()));
  }
  auto check = [](const BoolMatrix& m, Index rows, Index cols, const std::string& what) {
    if (m.rows() != rows || m.cols() != cols) {
      throw ModelError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", found " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
  };
  for (std::size_t k = 0; k < mask->P.size(); ++k) {
    if (!mask->P[k]) continue;
    const int power = d - static_cast<int>(k);
    const BoolMatrix& m = *mask->P[k];
    check(m, big_n, big_n, "mask P_" + std::to_string(power));
    if (k == 0) {
      canon.E.topLeftCorner(big_n, big_n) = m;
    } else {
      canon.A.block(0, static_cast<Index>(k - 1) * big_n, big_n, big_n) = m;
    }
  }
  if (mask->b) {
    check(*mask->b, big_n, sys.input_dim(), "mask b");
    canon.B.topRows(big_n) = *mask->b;
  }
  return canon;
}

RadiusResult compute_radius_higher_order(const HigherOrderSystem& sys, const std::optional<CoefficientMask>& mask,
                                         const StlnConfig& cfg) {
  const CanonicalForm canon = canonical_form(sys);
  const PerturbationMask pm = higher_order_mask(sys, mask);
  RadiusResult r = compute_radius_descriptor(canon.system, pm, cfg);
  r.perturbed_higher_order = extract_higher_order_perturbation(sys, r.dE, r.dA, r.dB);
  return r;
}

double oracle_r2_unstructured(const DescriptorSystem& sys) {
  Matrix eb(sys.n(), sys.n() + sys.m());
  eb << sys.E(), sys.B();
  const Vector sv = singular_values(eb);
  return sv(sv.size() - 1);
}

}  // namespace ctrlradius
