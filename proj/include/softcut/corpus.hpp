#pragma once

// Text ingestion: UTF-8 validation, tokenization, kind filtering and the
// type index that every later stage refers to by dense id.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace softcut::corpus {

using TypeId = int;

enum class TokenKind { Word, Punctuation, Figure };

std::string_view kind_name(TokenKind kind) noexcept;

/// Half-open byte range [start, end) into the normalized source of a text.
struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct Token {
  std::string text;  // type string (case-folded when folding is on)
  TokenKind kind = TokenKind::Word;
  ByteSpan span;

  friend bool operator==(const Token&, const Token&) = default;
};

/// One text of the corpus. `tokens` are retained for analysis; `dropped`
/// holds tokens removed by filtering, kept so rendering can show them.
struct Text {
  std::string name;
  std::string source;
  std::vector<Token> tokens;
  std::vector<Token> dropped;

  friend bool operator==(const Text&, const Text&) = default;
};

struct TokenStream {
  std::vector<Text> texts;

  /// Corpus size n: number of retained tokens over all texts.
  std::size_t token_count() const noexcept;
  friend bool operator==(const TokenStream&, const TokenStream&) = default;
};

struct NormalizeConfig {
  bool strip_bom = true;
};

struct TokenizerConfig {
  bool fold_case = false;
};

enum class FilterPolicy { KeepAll, DropPunctuation, DropPunctuationAndFigures };

/// Validates UTF-8, maps CRLF and lone CR to LF, drops a leading BOM and
/// applies canonical composition (NFC).
/// Throws Error{InvalidEncoding} or Error{EmptyInput}.
std::string normalize_input(std::string_view bytes, const NormalizeConfig& config = {});

/// Splits `text` into Word / Figure / Punctuation tokens. Words are maximal
/// runs of letters and combining marks, with U+0027 or U+2019 allowed
/// between two letters; figures are maximal runs of decimal digits; any
/// other non-whitespace code point is a one-character punctuation token.
std::vector<Token> tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Splits a normalized text on lines that are empty or whitespace-only.
/// Returned views point into `text`; paragraphs keep their inner newlines.
std::vector<std::string_view> split_paragraphs(std::string_view text);

/// Builds a single text from already-normalized source.
Text make_text(std::string name, std::string source, const TokenizerConfig& config = {});

struct CorpusConfig {
  NormalizeConfig normalize;
  TokenizerConfig tokenizer;
  bool split_paragraphs = false;
};

/// Reads each file as one text (or several, one per paragraph).
/// Throws Error{Io} when a file cannot be read; encoding errors carry the file name.
TokenStream read_corpus(const std::vector<std::filesystem::path>& paths, const CorpusConfig& config);

/// Builds a corpus from in-memory documents; names are "text0", "text1", ...
TokenStream corpus_from_strings(const std::vector<std::string>& documents, const CorpusConfig& config = {});

/// Throws Error{AllTokensDropped} if nothing survives.
TokenStream filter_tokens(const TokenStream& stream, FilterPolicy policy);

class TypeTable {
 public:
  TypeTable() = default;

  /// Ids are assigned in first-occurrence order over texts then tokens.
  static TypeTable build(const TokenStream& stream);

  /// Table over `ids` (in that order), renumbered 0..|ids|-1 with counts kept.
  TypeTable subset(const std::vector<TypeId>& ids) const;

  std::size_t size() const noexcept { return names_.size(); }
  std::optional<TypeId> find(std::string_view type) const;
  const std::string& name(TypeId id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::int64_t count(TypeId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  std::int64_t total() const noexcept;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> names_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, TypeId, Hash, std::equal_to<>> index_;
};

inline TypeTable build_type_table(const TokenStream& stream) { return TypeTable::build(stream); }

}  // namespace softcut::corpus
