#pragma once

// Smallest generalized eigenpairs of (D - W) y = lambda D y, computed via the
// symmetric reduction B = D^-1/2 W D^-1/2 (lambda = 1 - mu, y = D^-1/2 u).

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <string_view>
#include <vector>

#include "softcut/chain.hpp"

namespace softcut::spectral {

using chain::SparseMatrix;

enum class SolverStrategy { Auto, Dense, Iterative };

std::string_view strategy_name(SolverStrategy strategy) noexcept;

struct SolverOptions {
  double tol = 1e-8;               // relative residual target
  int max_restarts = 2000;         // iterative budget
  Eigen::Index dense_limit = 2000; // Auto uses the dense solver up to this size
  Eigen::Index krylov_dim = 0;     // 0 picks max(2q + 20, 40)
  SolverStrategy strategy = SolverStrategy::Auto;
};

struct SpectralEmbedding {
  Eigen::VectorXd lambdas;  // ascending
  Eigen::MatrixXd Y;        // v x q, columns D-orthonormal
  Eigen::VectorXd residuals;
  // Index groups (0-based) of numerically tied eigenvalues, size >= 2 only.
  std::vector<std::vector<int>> degenerate_groups;
  SolverStrategy strategy = SolverStrategy::Dense;
  int restarts = 0;

  int q() const noexcept { return static_cast<int>(lambdas.size()); }
  Eigen::Index size() const noexcept { return Y.rows(); }
};

/// q smallest eigenpairs. Throws Error{QTooLarge} when q > v,
/// Error{Disconnected} when W's support is not connected, Error{ZeroDegree},
/// and Error{ConvergenceFailure} when the residual contract is not met.
SpectralEmbedding solve_embedding(const SparseMatrix& W, const Eigen::VectorXd& degrees, int q,
                                  const SolverOptions& options = {});

/// nu(Y) = sum_k sum_{i,j} w_ij (y_ik - y_jk)^2 over ordered pairs.
double relaxed_objective(const SparseMatrix& W, const Eigen::MatrixXd& Y);

struct ResidualReport {
  Eigen::VectorXd residuals;        // ||(D - W) y_k - lambda_k D y_k||_2
  double orthonormality_defect = 0; // ||Y^T D Y - I||_max
  double max_residual() const { return residuals.size() ? residuals.maxCoeff() : 0.0; }
};

ResidualReport check_residuals(const SparseMatrix& W, const Eigen::VectorXd& degrees,
                               const SpectralEmbedding& embedding);

/// Residual threshold tol * max(1, max_i d_i).
double residual_bound(const Eigen::VectorXd& degrees, double tol);

/// Flips each column so its entry of largest magnitude is positive. Entries
/// within a relative 1e-9 of the maximum count as tied; the lowest index wins.
void canonicalize_signs(Eigen::MatrixXd& Y);

/// Groups consecutive ascending eigenvalues with |a - b| <= 1e-9 max(1, b).
std::vector<std::vector<int>> degenerate_groups(const Eigen::VectorXd& lambdas);

}  // namespace softcut::spectral
