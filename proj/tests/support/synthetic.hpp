#pragma once

// Deterministic synthetic corpora for tests. Only the raw mt19937_64 stream
// is used so sequences are identical across standard libraries.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "softcut/corpus.hpp"

namespace softcut::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(gen_() % bound); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

/// Uniform random draws over `vocab` ids.
inline std::vector<corpus::TypeId> random_text(std::size_t vocab, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<corpus::TypeId> text(length);
  for (auto& id : text) id = static_cast<corpus::TypeId>(rng.below(vocab));
  return text;
}

/// Circular text with no immediate repetition (including last -> first), so
/// the counted chain has a zero diagonal. Needs vocab >= 3.
inline std::vector<corpus::TypeId> loop_free_text(std::size_t vocab, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<corpus::TypeId> text;
  for (std::size_t t = 0; t < length; ++t) {
    corpus::TypeId id;
    do {
      id = static_cast<corpus::TypeId>(rng.below(vocab));
    } while ((!text.empty() && id == text.back()) || (t + 1 == length && id == text.front()));
    text.push_back(id);
  }
  return text;
}

/// Letters-only type name, so the tokenizer keeps it as one word.
inline std::string letter_name(const std::string& prefix, std::size_t index) {
  std::string suffix;
  do {
    suffix.insert(suffix.begin(), static_cast<char>('a' + index % 26));
    index /= 26;
  } while (index > 0);
  return prefix + suffix;
}

enum class Source { A = 0, B = 1, Shared = 2 };

struct BilingualCorpus {
  std::string text;                   // whitespace-separated words
  std::vector<std::string> type_names; // all 2 * own + shared names
  std::vector<Source> sources;         // parallel to type_names
};

/// Two first-order sources over disjoint vocabularies of `own` types that
/// share `shared` further types. Each state jumps to `successors` random
/// targets with random weights. Output alternates blocks of `block_length`
/// tokens from A and B, each source resuming from its own last state.
inline BilingualCorpus bilingual_corpus(std::uint64_t seed, std::size_t own = 100, std::size_t shared = 10,
                                        std::size_t blocks = 20, std::size_t block_length = 500,
                                        std::size_t successors = 8) {
  Rng rng(seed);
  BilingualCorpus out;
  for (std::size_t i = 0; i < own; ++i) {
    out.type_names.push_back(letter_name("ka", i));
    out.sources.push_back(Source::A);
  }
  for (std::size_t i = 0; i < own; ++i) {
    out.type_names.push_back(letter_name("zu", i));
    out.sources.push_back(Source::B);
  }
  for (std::size_t i = 0; i < shared; ++i) {
    out.type_names.push_back(letter_name("mi", i));
    out.sources.push_back(Source::Shared);
  }

  struct Chain {
    std::vector<std::size_t> vocab;                    // global ids
    std::vector<std::vector<std::size_t>> targets;     // local ids
    std::vector<std::vector<double>> cumulative;
  };
  std::vector<Chain> chains(2);
  for (std::size_t s = 0; s < 2; ++s) {
    auto& c = chains[s];
    for (std::size_t i = 0; i < own; ++i) c.vocab.push_back(s * own + i);
    for (std::size_t i = 0; i < shared; ++i) c.vocab.push_back(2 * own + i);
    const std::size_t m = c.vocab.size();
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::size_t> picked;
      while (picked.size() < successors) {
        const auto j = rng.below(m);
        if (std::find(picked.begin(), picked.end(), j) == picked.end()) picked.push_back(j);
      }
      std::vector<double> cum;
      double total = 0.0;
      for (std::size_t k = 0; k < successors; ++k) {
        total += 0.05 + rng.unit();
        cum.push_back(total);
      }
      for (auto& x : cum) x /= total;
      c.targets.push_back(std::move(picked));
      c.cumulative.push_back(std::move(cum));
    }
  }

  std::vector<std::size_t> state{0, 0};
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto s = b % 2;
    auto& c = chains[s];
    for (std::size_t t = 0; t < block_length; ++t) {
      const double u = rng.unit();
      const auto& cum = c.cumulative[state[s]];
      std::size_t k = 0;
      while (k + 1 < cum.size() && u > cum[k]) ++k;
      state[s] = c.targets[state[s]][k];
      if (!out.text.empty()) out.text.push_back(t == 0 ? '\n' : ' ');
      out.text += out.type_names[c.vocab[state[s]]];
    }
  }
  return out;
}

}  // namespace softcut::testing
