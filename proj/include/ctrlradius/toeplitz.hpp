#pragma once

#include <vector>

#include "ctrlradius/linalg.hpp"
#include "ctrlradius/systems.hpp"

namespace ctrlradius {

enum class Orientation { AsBuilt, Transposed };

/// n^2 x n(n+m-1) block matrix whose full row rank is equivalent to C-controllability.
struct ControllabilityToeplitz {
  Matrix matrix;
  Index n = 0;
  Index m = 0;
  Orientation orientation = Orientation::AsBuilt;
};

enum class Source { E, A, B };

struct Parameter {
  Source source;
  Index row;
  Index col;
};

struct Placement {
  Index row;
  Index col;
  double sign;
};

/// One parameter per free system entry; each parameter lists every Toeplitz
/// position it occupies (with the sign of its block).
struct StructureBasis {
  Index n = 0;
  Index m = 0;
  Orientation orientation = Orientation::AsBuilt;
  std::vector<Parameter> parameters;
  std::vector<std::vector<Placement>> placements;

  Index size() const { return static_cast<Index>(parameters.size()); }
  /// Shape of the Toeplitz matrix in the current orientation.
  Index rows() const;
  Index cols() const;
};

struct SystemPerturbation {
  Matrix dE;
  Matrix dA;
  Matrix dB;
};

ControllabilityToeplitz assemble(const DescriptorSystem& sys);

/// Transposes when the matrix is wider than tall; idempotent.
ControllabilityToeplitz orient_tall(const ControllabilityToeplitz& t);

/// Parameters in E, A, B order, row-major within each. Throws ModelError on an
/// empty or mis-shaped mask.
StructureBasis build_basis(const DescriptorSystem& sys, const PerturbationMask& mask,
                           Orientation orientation = Orientation::AsBuilt);

/// Same basis with placements re-indexed for the requested orientation.
StructureBasis reoriented(const StructureBasis& basis, Orientation orientation);

/// sum_k alpha_k Phi_k as a dense matrix of the basis shape.
Matrix embed(const StructureBasis& basis, const Vector& alpha);

/// Scatters alpha back to system-shaped perturbations.
SystemPerturbation extract(const StructureBasis& basis, const Vector& alpha);

}  // namespace ctrlradius
