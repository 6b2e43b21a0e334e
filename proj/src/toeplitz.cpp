#include "ctrlradius/toeplitz.hpp"

#include <string>

namespace ctrlradius {

namespace {

Index unit_width(Index n, Index m) { return n + m; }
Index trailing_start(Index n, Index m) { return (n - 1) * unit_width(n, m); }

void require_length(const StructureBasis& basis, const Vector& alpha) {
  if (alpha.size() != basis.size()) {
    throw NumericError("parameter vector has length " + std::to_string(alpha.size()) + ", basis has " +
                       std::to_string(basis.size()));
  }
}

}  // namespace

Index StructureBasis::rows() const {
  const Index r = n * n;
  return orientation == Orientation::AsBuilt ? r : n * (n + m - 1);
}

Index StructureBasis::cols() const {
  const Index c = n * (n + m - 1);
  return orientation == Orientation::AsBuilt ? c : n * n;
}

ControllabilityToeplitz assemble(const DescriptorSystem& sys) {
  const Index n = sys.n();
  const Index m = sys.m();
  const Index w = unit_width(n, m);
  ControllabilityToeplitz t;
  t.n = n;
  t.m = m;
  t.matrix = Matrix::Zero(n * n, n * (n + m - 1));
  for (Index i = 0; i + 1 < n; ++i) {
    t.matrix.block(i * n, i * w, n, n) = -sys.A();
    t.matrix.block(i * n, i * w + n, n, m) = sys.B();
  }
  for (Index i = 1; i < n; ++i) {
    t.matrix.block(i * n, (i - 1) * w, n, n) = sys.E();
  }
  t.matrix.block((n - 1) * n, trailing_start(n, m), n, m) = sys.B();
  return t;
}

ControllabilityToeplitz orient_tall(const ControllabilityToeplitz& t) {
  if (t.matrix.cols() <= t.matrix.rows()) return t;
  ControllabilityToeplitz out = t;
  out.matrix = t.matrix.transpose();
  out.orientation = t.orientation == Orientation::AsBuilt ? Orientation::Transposed : Orientation::AsBuilt;
  return out;
}

StructureBasis build_basis(const DescriptorSystem& sys, const PerturbationMask& mask, Orientation orientation) {
  mask.validate_for(sys);
  const Index n = sys.n();
  const Index m = sys.m();
  const Index w = unit_width(n, m);

  StructureBasis basis;
  basis.n = n;
  basis.m = m;

  auto add = [&](Source source, Index r, Index c, std::vector<Placement> places) {
    basis.parameters.push_back({source, r, c});
    basis.placements.push_back(std::move(places));
  };

  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      if (!mask.E(r, c)) continue;
      std::vector<Placement> places;
      for (Index i = 1; i < n; ++i) places.push_back({i * n + r, (i - 1) * w + c, 1.0});
      add(Source::E, r, c, std::move(places));
    }
  }
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      if (!mask.A(r, c)) continue;
      std::vector<Placement> places;
      for (Index i = 0; i + 1 < n; ++i) places.push_back({i * n + r, i * w + c, -1.0});
      add(Source::A, r, c, std::move(places));
    }
  }
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < m; ++c) {
      if (!mask.B(r, c)) continue;
      std::vector<Placement> places;
      for (Index i = 0; i + 1 < n; ++i) places.push_back({i * n + r, i * w + n + c, 1.0});
      places.push_back({(n - 1) * n + r, trailing_start(n, m) + c, 1.0});
      add(Source::B, r, c, std::move(places));
    }
  }
  return reoriented(basis, orientation);
}

StructureBasis reoriented(const StructureBasis& basis, Orientation orientation) {
  if (basis.orientation == orientation) return basis;
  StructureBasis out = basis;
  out.orientation = orientation;
  for (auto& places : out.placements) {
    for (auto& p : places) std::swap(p.row, p.col);
  }
  return out;
}

Matrix embed(const StructureBasis& basis, const Vector& alpha) {
  require_length(basis, alpha);
  Matrix out = Matrix::Zero(basis.rows(), basis.cols());
  for (Index k = 0; k < basis.size(); ++k) {
    for (const Placement& p : basis.placements[static_cast<std::size_t>(k)]) {
      out(p.row, p.col) += p.sign * alpha(k);
    }
  }
  return out;
}

SystemPerturbation extract(const StructureBasis& basis, const Vector& alpha) {
  require_length(basis, alpha);
  SystemPerturbation d{Matrix::Zero(basis.n, basis.n), Matrix::Zero(basis.n, basis.n),
                       Matrix::Zero(basis.n, basis.m)};
  for (Index k = 0; k < basis.size(); ++k) {
    const Parameter& p = basis.parameters[static_cast<std::size_t>(k)];
    switch (p.source) {
      case Source::E: d.dE(p.row, p.col) = alpha(k); break;
      case Source::A: d.dA(p.row, p.col) = alpha(k); break;
      case Source::B: d.dB(p.row, p.col) = alpha(k); break;
    }
  }
  return d;
}

}  // namespace ctrlradius
