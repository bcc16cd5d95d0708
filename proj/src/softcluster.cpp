#include "softcut/softcluster.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

#include "softcut/error.hpp"

namespace softcut::soft {

Eigen::MatrixXd soft_membership(const Eigen::MatrixXd& Y, const Eigen::VectorXd& degrees) {
  return degrees.asDiagonal() * Y.cwiseAbs2();
}

PriorFit cluster_priors(const Eigen::MatrixXd& ytilde, const Eigen::VectorXd& pi) {
  const auto q = ytilde.cols();
  PriorFit fit;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ytilde);
  qr.setThreshold(1e-10);
  fit.rank = static_cast<int>(qr.rank());
  if (fit.rank < q) {
    fit.degenerate = true;
    fit.priors = Eigen::VectorXd::Constant(q, 1.0 / static_cast<double>(q));
  } else {
    fit.priors = qr.solve(pi).cwiseMax(0.0);
    const double mass = fit.priors.sum();
    if (mass > 0) {
      fit.priors /= mass;
    } else {
      fit.degenerate = true;
      fit.priors = Eigen::VectorXd::Constant(q, 1.0 / static_cast<double>(q));
    }
  }
  fit.residual = (ytilde * fit.priors - pi).norm();
  return fit;
}

Eigen::MatrixXd posterior(const Eigen::MatrixXd& ytilde, const Eigen::VectorXd& priors, const Eigen::VectorXd& pi) {
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (!(pi[i] > 0)) throw Error(Errc::ZeroMarginal, "type " + std::to_string(i) + " has zero marginal");
  }
  return pi.cwiseInverse().asDiagonal() * ytilde * priors.asDiagonal();
}

double posterior_row_defect(const Eigen::MatrixXd& posteriors) {
  if (posteriors.size() == 0) return 0.0;
  return (posteriors.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

SoftClustering soft_cluster(const spectral::SpectralEmbedding& embedding, const Eigen::VectorXd& degrees,
                            const Eigen::VectorXd& pi) {
  SoftClustering out;
  out.ytilde = soft_membership(embedding, degrees);
  out.prior_fit = cluster_priors(out.ytilde, pi);
  out.posteriors = posterior(out.ytilde, out.prior_fit.priors, pi);
  return out;
}

std::vector<std::size_t> HardPartition::sizes() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(clusters), 0);
  for (int c : assignment) ++out.at(static_cast<std::size_t>(c));
  return out;
}

Eigen::MatrixXd HardPartition::indicator() const {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(assignment.size()), clusters);
  for (std::size_t i = 0; i < assignment.size(); ++i) Z(static_cast<Eigen::Index>(i), assignment[i]) = 1.0;
  return Z;
}

HardPartition HardPartition::compacted() const {
  const auto counts = sizes();
  std::vector<int> relabel(counts.size(), -1);
  HardPartition out;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) relabel[k] = out.clusters++;
  }
  out.assignment.reserve(assignment.size());
  for (int c : assignment) out.assignment.push_back(relabel[static_cast<std::size_t>(c)]);
  return out;
}

namespace {

void require_nonempty(const HardPartition& partition, std::size_t v) {
  if (partition.assignment.size() != v) throw Error(Errc::InvalidArgument, "partition size does not match chain");
  const auto sizes = partition.sizes();
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) throw Error(Errc::EmptyCluster, "cluster " + std::to_string(k) + " is empty");
  }
}

}  // namespace

double hard_mnc(const HardPartition& partition, const SparseMatrix& W, const Eigen::VectorXd& degrees) {
  require_nonempty(partition, static_cast<std::size_t>(W.rows()));
  Eigen::VectorXd cut = Eigen::VectorXd::Zero(partition.clusters);
  Eigen::VectorXd volume = Eigen::VectorXd::Zero(partition.clusters);
  for (Eigen::Index i = 0; i < W.outerSize(); ++i) {
    const int ci = partition.assignment[static_cast<std::size_t>(i)];
    volume[ci] += degrees[i];
    for (SparseMatrix::InnerIterator it(W, i); it; ++it) {
      if (it.col() == i) continue;
      const int cj = partition.assignment[static_cast<std::size_t>(it.col())];
      // (z_ik - z_jk)^2 is 1 for k = ci and k = cj when they differ.
      if (ci != cj) {
        cut[ci] += it.value();
        cut[cj] += it.value();
      }
    }
  }
  return (cut.array() / volume.array()).sum();
}

Eigen::VectorXd escape_probabilities(const SparseMatrix& P, const Eigen::VectorXd& pi, const HardPartition& partition) {
  require_nonempty(partition, static_cast<std::size_t>(P.rows()));
  Eigen::VectorXd leaving = Eigen::VectorXd::Zero(partition.clusters);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(partition.clusters);
  for (Eigen::Index i = 0; i < P.outerSize(); ++i) {
    const int ci = partition.assignment[static_cast<std::size_t>(i)];
    mass[ci] += pi[i];
    double out_prob = 0.0;
    for (SparseMatrix::InnerIterator it(P, i); it; ++it) {
      if (partition.assignment[static_cast<std::size_t>(it.col())] != ci) out_prob += it.value();
    }
    leaving[ci] += pi[i] * out_prob;
  }
  return leaving.cwiseQuotient(mass);
}

SignedWalk signed_walk_matrix(const SparseMatrix& W, const Eigen::VectorXd& degrees, const Eigen::MatrixXd& Y,
                              Eigen::Index axis) {
  SignedWalk out;
  out.defined.assign(static_cast<std::size_t>(W.rows()), true);
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < W.outerSize(); ++i) {
    const double yi = Y(i, axis);
    if (yi == 0.0) {
      out.defined[static_cast<std::size_t>(i)] = false;
      continue;
    }
    for (SparseMatrix::InnerIterator it(W, i); it; ++it) {
      triplets.emplace_back(i, it.col(), it.value() * Y(it.col(), axis) / (degrees[i] * yi));
    }
  }
  out.matrix.resize(W.rows(), W.cols());
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

HardPartition argmax_assignment(const Eigen::MatrixXd& posteriors) {
  HardPartition out;
  out.clusters = static_cast<int>(posteriors.cols());
  out.assignment.reserve(static_cast<std::size_t>(posteriors.rows()));
  for (Eigen::Index i = 0; i < posteriors.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < posteriors.cols(); ++k) {
      if (posteriors(i, k) > posteriors(i, best)) best = k;
    }
    out.assignment.push_back(static_cast<int>(best));
  }
  return out;
}

SoftEscapeReport soft_escape_diagnostic(const SparseMatrix& P, const SoftClustering& soft, double nu) {
  SoftEscapeReport report;
  report.nu = nu;
  // P (1 - posterior) gives, per type, the chance to step outside each cluster.
  const Eigen::MatrixXd outside = Eigen::MatrixXd::Ones(soft.posteriors.rows(), soft.posteriors.cols()) - soft.posteriors;
  const Eigen::MatrixXd step = P * outside;
  report.per_cluster = soft.ytilde.cwiseProduct(step).colwise().sum().transpose();
  report.total = report.per_cluster.sum();
  return report;
}

}  // namespace softcut::soft
