#include <doctest.h>

#include <cmath>

#include "softcut/chain.hpp"
#include "softcut/error.hpp"
#include "softcut/softcluster.hpp"
#include "softcut/spectral.hpp"
#include "support/synthetic.hpp"

using namespace softcut;
using namespace softcut::soft;
using chain::BigramChain;

namespace {

BigramChain two_state() { return BigramChain::build(chain::count_bigrams({{0, 1, 0, 1}}, 2)); }

BigramChain random_chain(std::size_t vocab, std::size_t length, std::uint64_t seed) {
  return BigramChain::build(
      chain::count_bigrams({softcut::testing::random_text(vocab, length, seed)}, static_cast<Eigen::Index>(vocab)));
}

// Quadratic-form evaluation straight from the indicator matrix.
double mnc_oracle(const Eigen::MatrixXd& W, const Eigen::VectorXd& d, const Eigen::MatrixXd& Z) {
  double mu = 0.0;
  for (Eigen::Index k = 0; k < Z.cols(); ++k) {
    double kappa = 0.0;
    double alpha = 0.0;
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      alpha += Z(i, k) * Z(i, k) * d[i];
      for (Eigen::Index j = 0; j < W.cols(); ++j) {
        if (i != j) kappa += W(i, j) * (Z(i, k) - Z(j, k)) * (Z(i, k) - Z(j, k));
      }
    }
    mu += kappa / alpha;
  }
  return mu;
}

}  // namespace

TEST_CASE("soft membership of the two-state chain") {
  const auto c = two_state();
  const auto e = spectral::solve_embedding(c.W, c.degrees, 2);
  const auto yt = soft_membership(e, c.degrees);
  CHECK(yt(0, 1) == doctest::Approx(0.5));
  CHECK(yt(1, 1) == doctest::Approx(0.5));
  CHECK(yt(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("zero eigenvector entries give zero membership") {
  Eigen::MatrixXd Y(3, 1);
  Y << 0.5, 0.0, -0.5;
  const auto yt = soft_membership(Y, Eigen::Vector3d(2, 5, 2));
  CHECK(yt(1, 0) == 0.0);
  CHECK(yt.col(0).sum() == doctest::Approx(1.0));
}

TEST_CASE("membership columns are distributions and the first is pi") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto c = random_chain(40, 3000, seed);
    const auto e = spectral::solve_embedding(c.W, c.degrees, 5);
    const auto yt = soft_membership(e, c.degrees);
    CHECK((yt.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK((yt.col(0) - c.pi).cwiseAbs().maxCoeff() <= 1e-8);
    Eigen::MatrixXd flipped = e.Y;
    flipped.col(1) = -flipped.col(1);
    flipped.col(3) = -flipped.col(3);
    CHECK(soft_membership(flipped, c.degrees) == yt);
  }
}

TEST_CASE("prior fit on the two-state chain is degenerate") {
  const auto fit = cluster_priors(Eigen::MatrixXd::Constant(2, 2, 0.5), Eigen::Vector2d(0.5, 0.5));
  CHECK(fit.degenerate);
  CHECK(fit.rank == 1);
  CHECK(fit.priors == Eigen::Vector2d(0.5, 0.5));
  const auto post = posterior(Eigen::MatrixXd::Constant(2, 2, 0.5), fit.priors, Eigen::Vector2d(0.5, 0.5));
  CHECK((post.array() - 0.5).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("prior fit special cases") {
  const Eigen::Vector3d pi(0.2, 0.3, 0.5);
  const auto single = cluster_priors(pi, pi);
  CHECK(single.priors.size() == 1);
  CHECK(single.priors[0] == doctest::Approx(1.0));
  CHECK(posterior(pi, single.priors, pi) == Eigen::MatrixXd::Ones(3, 1));

  const Eigen::MatrixXd I = Eigen::Matrix3d::Identity();
  const auto fit = cluster_priors(I, pi);
  CHECK_FALSE(fit.degenerate);
  CHECK((fit.priors - pi).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(fit.residual <= 1e-14);
  const auto post = posterior(I, fit.priors, pi);
  CHECK((post - I).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(posterior_row_defect(post) <= 1e-14);
}

TEST_CASE("posterior rejects zero marginals") {
  try {
    posterior(Eigen::MatrixXd::Ones(2, 1), Eigen::VectorXd::Ones(1), Eigen::Vector2d(1.0, 0.0));
    FAIL("expected ZeroMarginal");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroMarginal);
  }
}

TEST_CASE("hard criterion on the two-state chain") {
  const auto c = two_state();
  // kappa sums ordered pairs: w_ab + w_ba = 4 per cluster, alpha = 2.
  CHECK(hard_mnc({{0, 1}, 2}, c.W, c.degrees) == doctest::Approx(4.0));
  CHECK(hard_mnc({{0, 0}, 1}, c.W, c.degrees) == 0.0);
  const auto esc = escape_probabilities(c.P, c.pi, {{0, 1}, 2});
  CHECK(esc == Eigen::Vector2d(1.0, 1.0));
  CHECK(escape_probabilities(c.P, c.pi, {{0, 0}, 1})[0] == 0.0);
}

TEST_CASE("zero-weight graph and absorbing blocks") {
  chain::SparseMatrix empty(3, 3);
  CHECK(hard_mnc({{0, 1, 1}, 2}, empty, Eigen::Vector3d(1, 1, 1)) == 0.0);

  const auto blocks = BigramChain::build(chain::count_bigrams({{0, 1}, {2, 3}}, 4));
  const auto esc = escape_probabilities(blocks.P, blocks.pi, {{0, 0, 1, 1}, 2});
  CHECK(esc == Eigen::Vector2d(0.0, 0.0));
}

TEST_CASE("empty clusters are rejected") {
  const auto c = two_state();
  try {
    hard_mnc({{0, 0}, 2}, c.W, c.degrees);
    FAIL("expected EmptyCluster");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyCluster);
  }
  CHECK_THROWS_AS(escape_probabilities(c.P, c.pi, {{1, 1}, 2}), Error);
}

TEST_CASE("hard criterion matches the quadratic form and twice the escape mass") {
  softcut::testing::Rng rng(99);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t v = 3 + seed % 6;
    const auto c = BigramChain::build(chain::count_bigrams({softcut::testing::loop_free_text(v, 80, seed)},
                                                           static_cast<Eigen::Index>(v)));
    for (int trial = 0; trial < 5; ++trial) {
      HardPartition z;
      z.clusters = 2 + static_cast<int>(rng.below(2));
      for (std::size_t i = 0; i < v; ++i) z.assignment.push_back(static_cast<int>(i % static_cast<std::size_t>(z.clusters)));
      for (std::size_t i = v; i-- > 1;) std::swap(z.assignment[i], z.assignment[rng.below(i + 1)]);
      const double mu = hard_mnc(z, c.W, c.degrees);
      CHECK(std::abs(mu - mnc_oracle(Eigen::MatrixXd(c.W), c.degrees, z.indicator())) <= 1e-12);
      CHECK(std::abs(mu - 2.0 * escape_probabilities(c.P, c.pi, z).sum()) <= 1e-10);
    }
  }
}

TEST_CASE("hard criterion ignores self-loops") {
  const auto c = BigramChain::build(chain::count_bigrams({{0, 0, 1, 2, 1, 1}}, 3));
  const HardPartition z{{0, 1, 1}, 2};
  CHECK(hard_mnc(z, c.W, c.degrees) == doctest::Approx(mnc_oracle(Eigen::MatrixXd(c.W), c.degrees, z.indicator())));
  // The degree identity keeps the escape relation exact with loops present.
  CHECK(hard_mnc(z, c.W, c.degrees) == doctest::Approx(2.0 * escape_probabilities(c.P, c.pi, z).sum()));
}

TEST_CASE("partition helpers") {
  const HardPartition z{{2, 0, 2}, 4};
  CHECK(z.sizes() == std::vector<std::size_t>{1, 0, 2, 0});
  const auto compact = z.compacted();
  CHECK(compact.clusters == 2);
  CHECK(compact.assignment == std::vector<int>{1, 0, 1});
  const auto Z = compact.indicator();
  CHECK(Z.rowwise().sum() == Eigen::Vector3d::Ones());
  CHECK(Z(0, 1) == 1.0);
}

TEST_CASE("argmax assignment") {
  Eigen::MatrixXd post(2, 2);
  post << 0.9, 0.1, 0.2, 0.8;
  CHECK(argmax_assignment(post).assignment == std::vector<int>{0, 1});
  CHECK(argmax_assignment(Eigen::MatrixXd::Constant(3, 3, 1.0 / 3)).assignment == std::vector<int>{0, 0, 0});
  CHECK(argmax_assignment(Eigen::MatrixXd::Ones(2, 1)).assignment == std::vector<int>{0, 0});
}

TEST_CASE("signed walk matrix") {
  const auto c = two_state();
  Eigen::MatrixXd Y(2, 2);
  Y << 0.5, 0.5, 0.5, -0.5;
  const auto walk = signed_walk_matrix(c.W, c.degrees, Y, 1);
  CHECK(walk.defined == std::vector<bool>{true, true});
  CHECK(walk.matrix.coeff(0, 1) == doctest::Approx(-1.0));
  CHECK(signed_walk_matrix(c.W, c.degrees, Y, 0).matrix.coeff(0, 1) == doctest::Approx(1.0));

  Y(1, 1) = 0.0;
  const auto masked = signed_walk_matrix(c.W, c.degrees, Y, 1);
  CHECK_FALSE(masked.defined[1]);
  CHECK(masked.matrix.row(1).nonZeros() == 0);
  CHECK(masked.matrix.coeff(0, 1) == 0.0);
}

TEST_CASE("soft escape diagnostic") {
  const auto c = random_chain(20, 1500, 3);
  const auto e = spectral::solve_embedding(c.W, c.degrees, 3);
  const auto s = soft_cluster(e, c.degrees, c.pi);
  const double nu = spectral::relaxed_objective(c.W, e.Y);
  const auto report = soft_escape_diagnostic(c.P, s, nu);
  CHECK(report.per_cluster.size() == 3);
  CHECK(report.nu == nu);
  CHECK(report.total == doctest::Approx(report.per_cluster.sum()));
  CHECK(report.per_cluster.minCoeff() >= -1e-12);
}

TEST_CASE("literal prior fit recovers the first axis") {
  // With the first membership column equal to pi, the least-squares
  // solution is the first unit vector whenever the system has full rank.
  const auto c = random_chain(30, 3000, 8);
  const auto e = spectral::solve_embedding(c.W, c.degrees, 3);
  const auto s = soft_cluster(e, c.degrees, c.pi);
  CHECK_FALSE(s.prior_fit.degenerate);
  CHECK(s.prior_fit.priors[0] == doctest::Approx(1.0));
  CHECK(s.prior_fit.residual <= 1e-8);
  CHECK(posterior_row_defect(s.posteriors) <= 1e-8);
}
