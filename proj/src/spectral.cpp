#include "softcut/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "softcut/error.hpp"

namespace softcut::spectral {

namespace {

struct SymmetricReduction {
  SparseMatrix B;               // D^-1/2 W D^-1/2
  Eigen::VectorXd inv_sqrt_deg; // D^-1/2
};

SymmetricReduction reduce(const SparseMatrix& W, const Eigen::VectorXd& degrees) {
  SymmetricReduction r;
  r.inv_sqrt_deg.resize(degrees.size());
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    if (!(degrees[i] > 0)) throw Error(Errc::ZeroDegree, "type " + std::to_string(i) + " has zero degree");
    r.inv_sqrt_deg[i] = 1.0 / std::sqrt(degrees[i]);
  }
  r.B = r.inv_sqrt_deg.asDiagonal() * W * r.inv_sqrt_deg.asDiagonal();
  return r;
}

struct Eigenpairs {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd U;  // orthonormal in the reduced space
  int restarts = 0;
};

Eigenpairs dense_solve(const SparseMatrix& B, int q) {
  Eigen::MatrixXd L = -Eigen::MatrixXd(B);
  L.diagonal().array() += 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "dense eigensolver failed");
  Eigenpairs out;
  out.lambdas = solver.eigenvalues().head(q);
  out.U = solver.eigenvectors().leftCols(q);
  return out;
}

// Deterministic start vectors: mt19937_64 output is fixed by the standard,
// and the bits are mapped to [-0.5, 0.5) by hand.
Eigen::VectorXd seeded_vector(Eigen::Index v, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Eigen::VectorXd x(v);
  for (Eigen::Index i = 0; i < v; ++i) x[i] = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
  return x;
}

// Removes the components of x along the first `cols` columns of V (twice, CGS2).
double orthogonalize(const Eigen::MatrixXd& V, Eigen::Index cols, Eigen::VectorXd& x) {
  for (int pass = 0; pass < 2; ++pass) {
    if (cols == 0) break;
    const Eigen::VectorXd h = V.leftCols(cols).transpose() * x;
    x.noalias() -= V.leftCols(cols) * h;
  }
  return x.norm();
}

// Thick-restart Lanczos for the q largest eigenvalues of B, returned as
// lambda = 1 - mu in ascending order.
Eigenpairs lanczos_solve(const SparseMatrix& B, int q, const SolverOptions& options) {
  const Eigen::Index v = B.rows();
  Eigen::Index m = options.krylov_dim > 0 ? options.krylov_dim : std::max<Eigen::Index>(2 * q + 20, 40);
  m = std::clamp<Eigen::Index>(m, std::min<Eigen::Index>(q + 1, v), v);

  Eigen::MatrixXd V(v, m);
  Eigen::MatrixXd BV(v, m);
  std::uint64_t seed = 0x5eedULL;
  Eigen::VectorXd next = seeded_vector(v, seed++);
  next.normalize();
  Eigen::Index kept = 0;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    V.col(kept) = next;
    for (Eigen::Index j = kept; j < m; ++j) {
      BV.col(j) = B * V.col(j);
      if (j + 1 == m) break;
      Eigen::VectorXd w = BV.col(j);
      double beta = orthogonalize(V, j + 1, w);
      // Breakdown: the Krylov space is invariant, continue from a fresh direction.
      while (beta < 1e-10) {
        w = seeded_vector(v, seed++);
        beta = orthogonalize(V, j + 1, w);
      }
      V.col(j + 1) = w / beta;
    }

    Eigen::MatrixXd H = V.transpose() * BV;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(H);
    if (small.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "projected eigensolver failed");

    // Ritz pairs in descending mu order.
    const Eigen::VectorXd theta = small.eigenvalues().reverse();
    const Eigen::MatrixXd S = small.eigenvectors().rowwise().reverse();
    const Eigen::MatrixXd X = V * S;

    bool converged = true;
    for (int k = 0; k < q && converged; ++k) {
      const Eigen::VectorXd r = B * X.col(k) - theta[k] * X.col(k);
      converged = r.norm() <= options.tol;
    }
    if (converged || m == v) {
      Eigenpairs out;
      out.lambdas = (1.0 - theta.head(q).array()).matrix();
      out.U = X.leftCols(q);
      out.restarts = restart;
      return out;
    }

    Eigen::VectorXd f = BV.col(m - 1);
    double beta = orthogonalize(V, m, f);
    while (beta < 1e-10) {
      f = seeded_vector(v, seed++);
      beta = orthogonalize(V, m, f);
    }
    kept = std::min<Eigen::Index>(m - 1, q + (m - q) / 2);
    V.leftCols(kept) = X.leftCols(kept);
    BV.leftCols(kept) = BV * S.leftCols(kept);
    next = f / beta;
    // Re-orthogonalize the new vector against the rotated kept block.
    beta = orthogonalize(V, kept, next);
    next /= beta;
  }
  throw Error(Errc::ConvergenceFailure,
              "iterative eigensolver did not converge in " + std::to_string(options.max_restarts) + " restarts");
}

}  // namespace

std::string_view strategy_name(SolverStrategy strategy) noexcept {
  switch (strategy) {
    case SolverStrategy::Auto: return "auto";
    case SolverStrategy::Dense: return "dense";
    case SolverStrategy::Iterative: return "iterative";
  }
  return "unknown";
}

void canonicalize_signs(Eigen::MatrixXd& Y) {
  for (Eigen::Index k = 0; k < Y.cols(); ++k) {
    auto col = Y.col(k);
    const double top = col.cwiseAbs().maxCoeff();
    if (top == 0.0) continue;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) >= top * (1.0 - 1e-9)) {
        if (col[i] < 0) col = -col;
        break;
      }
    }
  }
}

std::vector<std::vector<int>> degenerate_groups(const Eigen::VectorXd& lambdas) {
  std::vector<std::vector<int>> groups;
  std::vector<int> current;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    const bool tied = k > 0 && std::abs(lambdas[k] - lambdas[k - 1]) <= 1e-9 * std::max(1.0, lambdas[k]);
    if (!tied) {
      if (current.size() >= 2) groups.push_back(current);
      current.clear();
    }
    current.push_back(static_cast<int>(k));
  }
  if (current.size() >= 2) groups.push_back(current);
  return groups;
}

double residual_bound(const Eigen::VectorXd& degrees, double tol) {
  return tol * std::max(1.0, degrees.size() ? degrees.maxCoeff() : 0.0);
}

SpectralEmbedding solve_embedding(const SparseMatrix& W, const Eigen::VectorXd& degrees, int q,
                                  const SolverOptions& options) {
  const Eigen::Index v = W.rows();
  if (q < 1) throw Error(Errc::InvalidArgument, "q must be at least 1");
  if (q > v) {
    throw Error(Errc::QTooLarge, "q = " + std::to_string(q) + " exceeds vocabulary size " + std::to_string(v));
  }
  if (degrees.size() != v || W.cols() != v) throw Error(Errc::InvalidArgument, "W and D dimensions disagree");
  const auto components = chain::connected_components(W);
  if (components.count() != 1) {
    throw Error(Errc::Disconnected, "weight graph has " + std::to_string(components.count()) + " components");
  }

  const auto reduction = reduce(W, degrees);
  auto strategy = options.strategy;
  if (strategy == SolverStrategy::Auto) {
    strategy = v <= options.dense_limit ? SolverStrategy::Dense : SolverStrategy::Iterative;
  }
  auto pairs = strategy == SolverStrategy::Dense ? dense_solve(reduction.B, q) : lanczos_solve(reduction.B, q, options);

  SpectralEmbedding out;
  out.lambdas = std::move(pairs.lambdas);
  out.Y = reduction.inv_sqrt_deg.asDiagonal() * pairs.U;
  canonicalize_signs(out.Y);
  out.strategy = strategy;
  out.restarts = pairs.restarts;
  out.degenerate_groups = degenerate_groups(out.lambdas);

  const auto report = check_residuals(W, degrees, out);
  out.residuals = report.residuals;
  const double bound = residual_bound(degrees, options.tol);
  if (report.max_residual() > bound) {
    throw Error(Errc::ConvergenceFailure, "eigenpair residual " + std::to_string(report.max_residual()) +
                                              " exceeds bound " + std::to_string(bound));
  }
  return out;
}

double relaxed_objective(const SparseMatrix& W, const Eigen::MatrixXd& Y) {
  double nu = 0.0;
  for (Eigen::Index i = 0; i < W.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(W, i); it; ++it) {
      const auto diff = Y.row(i) - Y.row(it.col());
      nu += it.value() * diff.squaredNorm();
    }
  }
  return nu;
}

ResidualReport check_residuals(const SparseMatrix& W, const Eigen::VectorXd& degrees,
                               const SpectralEmbedding& embedding) {
  const auto& Y = embedding.Y;
  ResidualReport report;
  report.residuals.resize(Y.cols());
  const Eigen::MatrixXd DY = degrees.asDiagonal() * Y;
  const Eigen::MatrixXd LY = DY - W * Y;
  for (Eigen::Index k = 0; k < Y.cols(); ++k) {
    report.residuals[k] = (LY.col(k) - embedding.lambdas[k] * DY.col(k)).norm();
  }
  const Eigen::MatrixXd gram = Y.transpose() * DY;
  report.orthonormality_defect =
      Y.cols() ? (gram - Eigen::MatrixXd::Identity(Y.cols(), Y.cols())).cwiseAbs().maxCoeff() : 0.0;
  return report;
}

}  // namespace softcut::spectral
