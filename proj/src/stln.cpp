#include "ctrlradius/stln.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include <Eigen/SVD>

namespace ctrlradius {

namespace {

Index local_col(Index j, Index p) { return j < p ? j : j - 1; }

Matrix drop_column(const Matrix& t, Index p) {
  Matrix out(t.rows(), t.cols() - 1);
  out.leftCols(p) = t.leftCols(p);
  out.rightCols(t.cols() - 1 - p) = t.rightCols(t.cols() - 1 - p);
  return out;
}

void split_perturbation(const StructureBasis& basis, const Vector& alpha, Index p, Matrix& e1, Vector& f1) {
  const Matrix full = embed(basis, alpha);
  e1 = drop_column(full, p);
  f1 = full.col(p);
}

Vector residual_at(const StlnState& s, const StructureBasis& basis, const Vector& alpha, const Vector& z) {
  Matrix e1;
  Vector f1;
  split_perturbation(basis, alpha, s.partition_col, e1, f1);
  return (s.y + f1) - (s.Y + e1) * z;
}

double merit(double omega, const Vector& r, const Vector& alpha) {
  return omega * omega * r.squaredNorm() + alpha.squaredNorm();
}

bool better(const StlnState& a, bool a_ok, const StlnState& b, bool b_ok) {
  const int ra = a_ok ? 0 : (a.converged ? 1 : 2);
  const int rb = b_ok ? 0 : (b.converged ? 1 : 2);
  if (ra != rb) return ra < rb;
  const double na = a.alpha.norm();
  const double nb = b.alpha.norm();
  if (na != nb) return na < nb;
  return a.partition_col < b.partition_col;
}

}  // namespace

void StlnConfig::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw NumericError("omega must be positive and finite");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw NumericError("epsilon must be positive and finite");
  if (max_iter < 1) throw NumericError("max_iter must be at least 1");
}

Index resolve_partition(const StlnConfig& cfg, Index cols) {
  const Index p = cfg.partition_col.value_or(cols - 1);
  if (p < 0 || p >= cols) {
    throw NumericError("partition column " + std::to_string(p) + " out of range [0, " + std::to_string(cols) + ")");
  }
  return p;
}

StlnState stln_init(const Matrix& t, Index parameter_count, Index partition_col) {
  if (t.cols() < 2) throw NumericError("matrix needs at least two columns to partition");
  if (partition_col < 0 || partition_col >= t.cols()) {
    throw NumericError("partition column " + std::to_string(partition_col) + " out of range [0, " +
                       std::to_string(t.cols()) + ")");
  }
  StlnState s;
  s.partition_col = partition_col;
  s.Y = drop_column(t, partition_col);
  s.y = t.col(partition_col);
  s.alpha = Vector::Zero(parameter_count);
  s.E1 = Matrix::Zero(s.Y.rows(), s.Y.cols());
  s.f1 = Vector::Zero(s.y.size());
  s.z = least_squares(s.Y, s.y);
  s.r = s.y - s.Y * s.z;
  return s;
}

Matrix build_S(const StructureBasis& basis, const Vector& z, Index partition_col) {
  if (z.size() != basis.cols() - 1) throw NumericError("z has the wrong length for build_S");
  Matrix s = Matrix::Zero(basis.rows(), basis.size());
  for (Index k = 0; k < basis.size(); ++k) {
    for (const Placement& pl : basis.placements[static_cast<std::size_t>(k)]) {
      if (pl.col == partition_col) continue;
      s(pl.row, k) += pl.sign * z(local_col(pl.col, partition_col));
    }
  }
  return s;
}

Matrix build_P(const StructureBasis& basis, Index partition_col) {
  Matrix p = Matrix::Zero(basis.rows(), basis.size());
  for (Index k = 0; k < basis.size(); ++k) {
    for (const Placement& pl : basis.placements[static_cast<std::size_t>(k)]) {
      if (pl.col == partition_col) p(pl.row, k) += pl.sign;
    }
  }
  return p;
}

StlnDerived derive(const StructureBasis& basis, const StlnState& state) {
  return {build_S(basis, state.z, state.partition_col), build_P(basis, state.partition_col)};
}

Matrix stacked_system(const StlnState& state, const StlnDerived& derived, double omega) {
  const Index l = state.alpha.size();
  const Index rows = state.Y.rows();
  const Index nz = state.Y.cols();
  Matrix k = Matrix::Zero(rows + l, l + nz);
  k.topLeftCorner(rows, l) = omega * (derived.S - derived.P);
  k.topRightCorner(rows, nz) = omega * (state.Y + state.E1);
  k.bottomLeftCorner(l, l).setIdentity();
  return k;
}

std::pair<Vector, Vector> stln_step(const StlnState& state, const StlnDerived& derived, const StlnConfig& cfg,
                                    double damping) {
  const Index l = state.alpha.size();
  Matrix k = stacked_system(state, derived, cfg.omega);
  Vector rhs(k.rows());
  rhs << cfg.omega * state.r, -state.alpha;
  if (damping > 0.0) {
    const Index c = k.cols();
    Matrix kd(k.rows() + c, c);
    kd << k, std::sqrt(damping) * Matrix::Identity(c, c);
    Vector rd(rhs.size() + c);
    rd << rhs, Vector::Zero(c);
    k = std::move(kd);
    rhs = std::move(rd);
  }
  if (!k.allFinite() || !rhs.allFinite()) {
    throw NumericError("stacked STLN system has non-finite entries; the iteration diverged");
  }
  Eigen::BDCSVD<Matrix> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(k.rows(), k.cols())));
  // Directions below the cutoff are dropped (minimum-norm step); only a
  // cutoff that swallows part of the z-block is treated as failure.
  const Index nz = state.Y.cols();
  if (svd.rank() < nz) {
    throw NumericError("stacked STLN system is numerically singular (rank " + std::to_string(svd.rank()) + ", need " +
                       std::to_string(nz) + "); try a smaller omega");
  }
  const Vector x = svd.solve(rhs);
  return {x.head(l), x.tail(x.size() - l)};
}

void refresh(StlnState& state, const StructureBasis& basis) {
  split_perturbation(basis, state.alpha, state.partition_col, state.E1, state.f1);
  state.r = (state.y + state.f1) - (state.Y + state.E1) * state.z;
}

StlnState stln_run(const Matrix& t, const StructureBasis& basis, const StlnConfig& cfg, Index partition_col,
                   const StlnObserver& observer) {
  cfg.validate();
  if (t.rows() != basis.rows() || t.cols() != basis.cols()) {
    throw NumericError("matrix shape does not match the structure basis");
  }
  StlnState s = stln_init(t, basis.size(), partition_col);
  // Unit scale of the identity block in the stacked system.
  const double lambda_floor = 1e-8;
  double lambda = 0.0;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    Vector da, dz;
    Matrix k;
    try {
      const StlnDerived derived = derive(basis, s);
      k = stacked_system(s, derived, cfg.omega);
      const bool damped = cfg.damping_after >= 0 && it > cfg.damping_after;
      const double m0 = merit(cfg.omega, s.r, s.alpha);
      while (true) {
        std::tie(da, dz) = stln_step(s, derived, cfg, lambda);
        if (!damped) break;
        const Vector trial_alpha = s.alpha + da;
        const double m1 = merit(cfg.omega, residual_at(s, basis, trial_alpha, s.z + dz), trial_alpha);
        if (m1 <= m0 || lambda > 1e30) break;
        lambda = lambda > 0.0 ? lambda * 10.0 : lambda_floor;
      }
      if (damped) lambda = lambda > lambda_floor ? lambda / 10.0 : 0.0;
    } catch (const NumericError& e) {
      s.iterations = it;
      s.converged = false;
      s.message = e.what();
      return s;
    }

    s.alpha += da;
    s.z += dz;
    refresh(s, basis);
    s.iterations = it;
    if (!s.alpha.allFinite() || !s.z.allFinite() || !s.r.allFinite()) {
      s.converged = false;
      s.message = "iteration produced non-finite values";
      return s;
    }
    if (observer) observer(s);

    if (da.norm() < cfg.epsilon && dz.norm() < cfg.epsilon) {
      const double knorm = singular_values(k)(0);
      if (cfg.omega * s.r.norm() <= 10.0 * cfg.epsilon * knorm) {
        s.converged = true;
      } else {
        s.message = "stalled: increments below epsilon but the weighted residual is not";
      }
      return s;
    }
  }
  s.message = "no convergence within max_iter";
  return s;
}

MultistartResult stln_multistart(const Matrix& t, const StructureBasis& basis, const StlnConfig& cfg,
                                 const StlnAcceptance& accept) {
  cfg.validate();
  std::vector<Index> columns = cfg.multistart_columns;
  if (columns.empty()) {
    for (Index j = 0; j < t.cols(); ++j) columns.push_back(j);
  }
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  for (Index j : columns) {
    if (j < 0 || j >= t.cols()) {
      throw NumericError("multistart column " + std::to_string(j) + " out of range [0, " + std::to_string(t.cols()) +
                         ")");
    }
  }

  MultistartResult out;
  out.runs.resize(columns.size());
  std::vector<char> accepted(columns.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < columns.size(); i = next++) {
      out.runs[i] = stln_run(t, basis, cfg, columns[i]);
      accepted[i] = out.runs[i].converged && (!accept || accept(out.runs[i]));
    }
  };
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min(hw, columns.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::size_t best = 0;
  for (std::size_t i = 1; i < columns.size(); ++i) {
    if (better(out.runs[i], accepted[i], out.runs[best], accepted[best])) best = i;
  }
  out.best = out.runs[best];
  out.best_accepted = accepted[best] != 0;
  return out;
}

}  // namespace ctrlradius
