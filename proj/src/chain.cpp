#include "softcut/chain.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "softcut/error.hpp"

namespace softcut::chain {

BigramCounts count_bigrams(const std::vector<std::vector<TypeId>>& texts, Eigen::Index vocabulary,
                           bool circular) {
  BigramCounts counts;
  counts.circular = circular;
  counts.type_counts.assign(static_cast<std::size_t>(vocabulary), 0);

  std::vector<Eigen::Triplet<std::int64_t>> triplets;
  for (const auto& text : texts) {
    for (TypeId id : text) {
      if (id < 0 || id >= vocabulary) {
        throw Error(Errc::UnknownType, "type id " + std::to_string(id) + " outside vocabulary");
      }
      ++counts.type_counts[static_cast<std::size_t>(id)];
    }
    counts.total += static_cast<std::int64_t>(text.size());
    for (std::size_t t = 1; t < text.size(); ++t) triplets.emplace_back(text[t - 1], text[t], 1);
    if (circular && !text.empty()) triplets.emplace_back(text.back(), text.front(), 1);
  }

  counts.pairs.resize(vocabulary, vocabulary);
  counts.pairs.setFromTriplets(triplets.begin(), triplets.end());
  return counts;
}

BigramCounts count_bigrams(const corpus::TokenStream& stream, const corpus::TypeTable& table, bool circular) {
  std::vector<std::vector<TypeId>> texts;
  texts.reserve(stream.texts.size());
  for (const auto& text : stream.texts) {
    auto& ids = texts.emplace_back();
    ids.reserve(text.tokens.size());
    for (const auto& token : text.tokens) {
      auto id = table.find(token.text);
      if (!id) throw Error(Errc::UnknownType, "token '" + token.text + "' missing from type table");
      ids.push_back(*id);
    }
  }
  return count_bigrams(texts, static_cast<Eigen::Index>(table.size()), circular);
}

SparseMatrix directional_transition(const BigramCounts& counts) {
  SparseMatrix P = counts.pairs.cast<double>();
  for (Eigen::Index i = 0; i < P.outerSize(); ++i) {
    const auto n_i = counts.type_counts[static_cast<std::size_t>(i)];
    if (n_i <= 0) throw Error(Errc::ZeroCount, "type " + std::to_string(i) + " has zero count");
    for (SparseMatrix::InnerIterator it(P, i); it; ++it) it.valueRef() /= static_cast<double>(n_i);
  }
  return P;
}

Weights symmetrize(const BigramCounts& counts) {
  const SparseCounts both = counts.pairs + SparseCounts(counts.pairs.transpose());
  Weights out;
  // Entries are integers here; halving is exact in binary floating point.
  out.W = both.cast<double>() * 0.5;
  out.degrees.resize(counts.size());
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    out.degrees[i] = static_cast<double>(counts.type_counts[static_cast<std::size_t>(i)]);
  }
  return out;
}

SparseMatrix transition(const SparseMatrix& W, const Eigen::VectorXd& degrees) {
  SparseMatrix P = W;
  for (Eigen::Index i = 0; i < P.outerSize(); ++i) {
    if (!(degrees[i] > 0)) throw Error(Errc::ZeroDegree, "type " + std::to_string(i) + " has zero degree");
    for (SparseMatrix::InnerIterator it(P, i); it; ++it) it.valueRef() /= degrees[i];
  }
  return P;
}

Eigen::VectorXd stationary(const BigramCounts& counts) {
  Eigen::VectorXd pi(counts.size());
  const auto n = static_cast<double>(counts.total);
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    pi[i] = static_cast<double>(counts.type_counts[static_cast<std::size_t>(i)]) / n;
  }
  return pi;
}

BigramChain BigramChain::build(BigramCounts counts) {
  BigramChain chain;
  auto weights = symmetrize(counts);
  chain.P = transition(weights.W, weights.degrees);
  chain.pi = stationary(counts);
  chain.W = std::move(weights.W);
  chain.degrees = std::move(weights.degrees);
  chain.counts = std::move(counts);
  return chain;
}

int ComponentMap::largest() const {
  if (sizes.empty()) return -1;
  return static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
}

std::vector<TypeId> ComponentMap::members(int id) const {
  std::vector<TypeId> out;
  for (std::size_t i = 0; i < component.size(); ++i) {
    if (component[i] == id) out.push_back(static_cast<TypeId>(i));
  }
  return out;
}

ComponentMap connected_components(const SparseMatrix& W) {
  const auto v = static_cast<std::size_t>(W.rows());
  ComponentMap map;
  map.component.assign(v, -1);
  std::vector<Eigen::Index> stack;
  for (std::size_t root = 0; root < v; ++root) {
    if (map.component[root] >= 0) continue;
    const int id = static_cast<int>(map.sizes.size());
    map.sizes.push_back(0);
    map.component[root] = id;
    stack.push_back(static_cast<Eigen::Index>(root));
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      ++map.sizes.back();
      for (SparseMatrix::InnerIterator it(W, i); it; ++it) {
        const auto j = static_cast<std::size_t>(it.col());
        if (it.value() != 0.0 && map.component[j] < 0) {
          map.component[j] = id;
          stack.push_back(it.col());
        }
      }
    }
  }
  return map;
}

BigramCounts restrict_counts(const BigramCounts& counts, std::span<const TypeId> keep) {
  std::vector<Eigen::Index> local(static_cast<std::size_t>(counts.size()), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) local[static_cast<std::size_t>(keep[k])] = static_cast<Eigen::Index>(k);

  BigramCounts out;
  out.circular = counts.circular;
  std::vector<Eigen::Triplet<std::int64_t>> triplets;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto n_i = counts.type_counts[static_cast<std::size_t>(keep[k])];
    out.type_counts.push_back(n_i);
    out.total += n_i;
    for (SparseCounts::InnerIterator it(counts.pairs, keep[k]); it; ++it) {
      const auto j = local[static_cast<std::size_t>(it.col())];
      if (j >= 0) triplets.emplace_back(static_cast<Eigen::Index>(k), j, it.value());
    }
  }
  const auto size = static_cast<Eigen::Index>(keep.size());
  out.pairs.resize(size, size);
  out.pairs.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

double row_sum_defect(const SparseMatrix& P) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < P.outerSize(); ++i) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(P, i); it; ++it) sum += it.value();
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double degree_defect(const SparseMatrix& W, const Eigen::VectorXd& degrees) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < W.outerSize(); ++i) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(W, i); it; ++it) sum += it.value();
    worst = std::max(worst, std::abs(sum - degrees[i]));
  }
  return worst;
}

double symmetry_defect(const SparseMatrix& W) {
  const SparseMatrix diff = W - SparseMatrix(W.transpose());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < diff.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(diff, i); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

double stationarity_defect(const SparseMatrix& P, const Eigen::VectorXd& pi) {
  const Eigen::VectorXd moved = P.transpose() * pi;
  return (moved - pi).lpNorm<Eigen::Infinity>();
}

double reversibility_defect(const SparseMatrix& P, const Eigen::VectorXd& pi) {
  const SparseMatrix flow = pi.asDiagonal() * P;
  return symmetry_defect(flow);
}

void write_chain_dump(std::ostream& out, const BigramCounts& counts, const SparseMatrix& W,
                      const ComponentMap& components) {
  nlohmann::json header;
  header["v"] = counts.size();
  header["n"] = counts.total;
  header["circular"] = counts.circular;
  header["component_sizes"] = components.sizes;
  out << header.dump() << '\n';
  out << "# counts\n";
  for (Eigen::Index i = 0; i < counts.pairs.outerSize(); ++i) {
    for (SparseCounts::InnerIterator it(counts.pairs, i); it; ++it) {
      out << i << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  out << "# W\n";
  for (Eigen::Index i = 0; i < W.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(W, i); it; ++it) {
      out << i << ' ' << it.col() << ' ' << nlohmann::json(it.value()).dump() << '\n';
    }
  }
}

}  // namespace softcut::chain
