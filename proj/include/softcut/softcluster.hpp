#pragma once

// Soft membership from the spectral embedding, Bayes inversion to per-word
// posteriors, and the hard criteria used to audit partitions.

#include <Eigen/Core>

#include <vector>

#include "softcut/chain.hpp"
#include "softcut/spectral.hpp"

namespace softcut::soft {

using chain::SparseMatrix;

/// ytilde_ik = d_i y_ik^2. Each column is a distribution over types when
/// Y^T D Y = I; column 0 equals pi when y_0 is constant.
Eigen::MatrixXd soft_membership(const Eigen::MatrixXd& Y, const Eigen::VectorXd& degrees);

inline Eigen::MatrixXd soft_membership(const spectral::SpectralEmbedding& embedding, const Eigen::VectorXd& degrees) {
  return soft_membership(embedding.Y, degrees);
}

struct PriorFit {
  Eigen::VectorXd priors;  // on the simplex
  double residual = 0.0;   // ||Ytilde p - pi||_2 after projection
  int rank = 0;
  bool degenerate = false; // rank-deficient system, uniform fallback used
};

/// Least-squares solution of Ytilde p = pi, clipped to nonnegative values and
/// renormalized. Rank-deficient systems fall back to uniform priors.
PriorFit cluster_priors(const Eigen::MatrixXd& ytilde, const Eigen::VectorXd& pi);

/// posterior_ik = ytilde_ik p_k / pi_i. Throws Error{ZeroMarginal}.
Eigen::MatrixXd posterior(const Eigen::MatrixXd& ytilde, const Eigen::VectorXd& priors, const Eigen::VectorXd& pi);

/// max_i |sum_k posterior_ik - 1|
double posterior_row_defect(const Eigen::MatrixXd& posteriors);

struct SoftClustering {
  Eigen::MatrixXd ytilde;
  PriorFit prior_fit;
  Eigen::MatrixXd posteriors;
};

SoftClustering soft_cluster(const spectral::SpectralEmbedding& embedding, const Eigen::VectorXd& degrees,
                            const Eigen::VectorXd& pi);

/// Hard assignment of every type to one of `clusters` clusters.
struct HardPartition {
  std::vector<int> assignment;
  int clusters = 0;

  std::vector<std::size_t> sizes() const;
  /// Binary v x clusters indicator matrix.
  Eigen::MatrixXd indicator() const;
  /// Drops empty clusters and renumbers the rest in order.
  HardPartition compacted() const;
};

/// mu(Z) = sum_k kappa_k / alpha_k, with W's diagonal ignored.
/// Throws Error{EmptyCluster}.
double hard_mnc(const HardPartition& partition, const SparseMatrix& W, const Eigen::VectorXd& degrees);

/// Pr(leave cluster k next step | in cluster k) under the stationary walk.
/// Throws Error{EmptyCluster}.
Eigen::VectorXd escape_probabilities(const SparseMatrix& P, const Eigen::VectorXd& pi, const HardPartition& partition);

struct SignedWalk {
  SparseMatrix matrix;       // w_ij y_jk / (d_i y_ik)
  std::vector<bool> defined; // false where y_ik == 0; such rows are empty
};

/// Column `axis` is 0-based.
SignedWalk signed_walk_matrix(const SparseMatrix& W, const Eigen::VectorXd& degrees, const Eigen::MatrixXd& Y,
                              Eigen::Index axis);

/// Max-posterior cluster per type; ties go to the lowest cluster index.
HardPartition argmax_assignment(const Eigen::MatrixXd& posteriors);

/// Soft analogue of the escape probability, reported next to nu(Y):
/// sum_i ytilde_ik sum_j p_ij (1 - posterior_jk).
struct SoftEscapeReport {
  Eigen::VectorXd per_cluster;
  double total = 0.0;
  double nu = 0.0;
  double four_total() const { return 4.0 * total; }
};

SoftEscapeReport soft_escape_diagnostic(const SparseMatrix& P, const SoftClustering& soft, double nu);

}  // namespace softcut::soft
