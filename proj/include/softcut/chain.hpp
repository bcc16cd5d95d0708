#pragma once

// Maximum-likelihood bigram chain over word types: directed counts, the
// symmetrized weights W, degrees D, P = D^-1 W and the stationary law.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "softcut/corpus.hpp"

namespace softcut::chain {

using corpus::TypeId;
using SparseCounts = Eigen::SparseMatrix<std::int64_t, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct BigramCounts {
  SparseCounts pairs;                    // pairs(i, j): type i immediately left of type j
  std::vector<std::int64_t> type_counts; // n_i
  std::int64_t total = 0;                // n
  bool circular = true;

  Eigen::Index size() const noexcept { return pairs.rows(); }
};

/// Core counter over id sequences, one sequence per text. With `circular`,
/// each nonempty text also contributes its last -> first adjacency.
BigramCounts count_bigrams(const std::vector<std::vector<TypeId>>& texts, Eigen::Index vocabulary,
                           bool circular = true);

/// Throws Error{UnknownType} for a token missing from the table.
BigramCounts count_bigrams(const corpus::TokenStream& stream, const corpus::TypeTable& table,
                           bool circular = true);

/// Maximum-likelihood estimator p_ij = n_ij / n_i on the directed counts.
/// Throws Error{ZeroCount}.
SparseMatrix directional_transition(const BigramCounts& counts);

struct Weights {
  SparseMatrix W;          // (n_ij + n_ji) / 2, diagonal kept
  Eigen::VectorXd degrees; // d_i = n_i
};

Weights symmetrize(const BigramCounts& counts);

/// P = D^-1 W. Throws Error{ZeroDegree}.
SparseMatrix transition(const SparseMatrix& W, const Eigen::VectorXd& degrees);

/// pi_i = n_i / n.
Eigen::VectorXd stationary(const BigramCounts& counts);

struct BigramChain {
  BigramCounts counts;
  SparseMatrix W;
  Eigen::VectorXd degrees;
  SparseMatrix P;
  Eigen::VectorXd pi;

  static BigramChain build(BigramCounts counts);
  Eigen::Index size() const noexcept { return W.rows(); }
};

struct ComponentMap {
  std::vector<int> component;     // per type, numbered by lowest member id
  std::vector<std::size_t> sizes; // per component

  std::size_t count() const noexcept { return sizes.size(); }
  /// Largest component; ties go to the lower component id.
  int largest() const;
  std::vector<TypeId> members(int id) const;
};

/// Undirected connectivity over the nonzero support of W.
ComponentMap connected_components(const SparseMatrix& W);

/// Counts restricted to `keep` (ascending global ids), reindexed 0..|keep|-1.
/// Only meaningful when no adjacency crosses the boundary of `keep`.
BigramCounts restrict_counts(const BigramCounts& counts, std::span<const TypeId> keep);

// Defects used by validation; all return max-abs deviations.
double row_sum_defect(const SparseMatrix& P);
double degree_defect(const SparseMatrix& W, const Eigen::VectorXd& degrees);
double symmetry_defect(const SparseMatrix& W);
double stationarity_defect(const SparseMatrix& P, const Eigen::VectorXd& pi);
double reversibility_defect(const SparseMatrix& P, const Eigen::VectorXd& pi);

/// Debug dump: one JSON header line {v, n, circular, components}, then
/// "# counts" and "# W" sections of "i j value" rows in row-major order.
void write_chain_dump(std::ostream& out, const BigramCounts& counts, const SparseMatrix& W,
                      const ComponentMap& components);

}  // namespace softcut::chain
