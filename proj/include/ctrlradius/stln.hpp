#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrlradius/linalg.hpp"
#include "ctrlradius/toeplitz.hpp"

namespace ctrlradius {

struct StlnConfig {
  double omega = 1e8;
  double epsilon = 1e-3;
  int max_iter = 200;
  /// Column split off as y; empty means the last column.
  std::optional<Index> partition_col;
  bool multistart = false;
  /// Columns tried by multistart; empty means all of them.
  std::vector<Index> multistart_columns;
  /// Iterations run with the plain step before Levenberg-Marquardt damping
  /// switches on. Negative disables damping.
  int damping_after = 20;

  /// Throws NumericError when omega, epsilon or max_iter are out of range.
  void validate() const;
};

struct StlnState {
  Matrix Y;
  Vector y;
  Vector alpha;
  Vector z;
  Matrix E1;
  Vector f1;
  Vector r;
  int iterations = 0;
  bool converged = false;
  Index partition_col = 0;
  /// Why the run stopped without converging; empty otherwise.
  std::string message;
};

struct StlnDerived {
  Matrix S;
  Matrix P;
};

/// Partition column from the config, resolved against a matrix with `cols` columns.
Index resolve_partition(const StlnConfig& cfg, Index cols);

/// alpha = 0, z = argmin ||y - Y z||, r = y - Y z.
StlnState stln_init(const Matrix& t, Index parameter_count, Index partition_col);

/// S with S * dalpha = dE1 * z for every dalpha.
Matrix build_S(const StructureBasis& basis, const Vector& z, Index partition_col);

/// P with P * dalpha = df1 for every dalpha.
Matrix build_P(const StructureBasis& basis, Index partition_col);

StlnDerived derive(const StructureBasis& basis, const StlnState& state);

/// Stacked least-squares matrix [w(S-P), w(Y+E1); I, 0].
Matrix stacked_system(const StlnState& state, const StlnDerived& derived, double omega);

/// Least-squares minimizer of ||K (dalpha; dz) - (w r; -alpha)||, optionally with
/// a Tikhonov term damping * ||(dalpha; dz)||^2. Throws NumericError when the
/// stacked system is numerically singular or non-finite.
std::pair<Vector, Vector> stln_step(const StlnState& state, const StlnDerived& derived, const StlnConfig& cfg,
                                    double damping = 0.0);

/// Recomputes E1, f1 and r from alpha and z.
void refresh(StlnState& state, const StructureBasis& basis);

using StlnObserver = std::function<void(const StlnState&)>;

/// Runs the iteration on one partition column. Never throws for numeric
/// trouble inside the loop; it is reported through converged/message.
StlnState stln_run(const Matrix& t, const StructureBasis& basis, const StlnConfig& cfg, Index partition_col,
                   const StlnObserver& observer = {});

/// Extra check a candidate must pass to count as a solution (e.g. verified rank drop).
using StlnAcceptance = std::function<bool(const StlnState&)>;

struct MultistartResult {
  StlnState best;
  bool best_accepted = false;
  std::vector<StlnState> runs;  ///< in column order
};

/// Runs every configured column (in parallel) and keeps the minimum-norm
/// converged and accepted run, ties going to the lowest column. Falls back to
/// converged-only, then to any run, in the same order.
MultistartResult stln_multistart(const Matrix& t, const StructureBasis& basis, const StlnConfig& cfg,
                                 const StlnAcceptance& accept = {});

}  // namespace ctrlradius
