#include "softcut/corpus.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "softcut/error.hpp"

namespace softcut::corpus {

namespace {

enum class CharClass { Space, Letter, Mark, Digit, Apostrophe, Other };

CharClass classify(UChar32 c) {
  if (c == 0x27 || c == 0x2019) return CharClass::Apostrophe;
  if (u_isUWhiteSpace(c)) return CharClass::Space;
  const auto mask = U_GET_GC_MASK(c);
  if (mask & U_GC_L_MASK) return CharClass::Letter;
  if (mask & U_GC_M_MASK) return CharClass::Mark;
  if (mask & U_GC_ND_MASK) return CharClass::Digit;
  return CharClass::Other;
}

bool is_word_char(CharClass cls) { return cls == CharClass::Letter || cls == CharClass::Mark; }

struct CodePoint {
  std::size_t start;
  std::size_t end;
  CharClass cls;
};

// Text must already be valid UTF-8.
std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    out.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(i),
                   c < 0 ? CharClass::Other : classify(c)});
  }
  return out;
}

std::string fold(std::string_view token) {
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(token.data(), static_cast<int32_t>(token.size())))
      .toLower(icu::Locale::getRoot())
      .toUTF8String(out);
  return out;
}

bool is_blank_line(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char ch) { return ch == ' ' || ch == '\t'; });
}

}  // namespace

std::string_view kind_name(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Word: return "word";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::Figure: return "figure";
  }
  return "unknown";
}

std::size_t TokenStream::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& text : texts) n += text.tokens.size();
  return n;
}

std::string normalize_input(std::string_view bytes, const NormalizeConfig& config) {
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  for (int32_t i = 0; i < length;) {
    const int32_t at = i;
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      throw Error(Errc::InvalidEncoding, "invalid UTF-8 sequence at byte offset " + std::to_string(at));
    }
  }

  std::string_view body = bytes;
  if (config.strip_bom && body.starts_with("\xEF\xBB\xBF")) body.remove_prefix(3);

  std::string lf;
  lf.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\r') {
      lf.push_back('\n');
      if (i + 1 < body.size() && body[i + 1] == '\n') ++i;
    } else {
      lf.push_back(body[i]);
    }
  }

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(Errc::InvalidEncoding, "NFC normalizer unavailable");
  const auto decoded = icu::UnicodeString::fromUTF8(icu::StringPiece(lf.data(), static_cast<int32_t>(lf.size())));
  const auto composed = nfc->normalize(decoded, status);
  if (U_FAILURE(status)) throw Error(Errc::InvalidEncoding, std::string("normalization failed: ") + u_errorName(status));

  std::string out;
  composed.toUTF8String(out);
  if (out.empty()) throw Error(Errc::EmptyInput, "input is empty after normalization");
  return out;
}

std::vector<Token> tokenize(std::string_view text, const TokenizerConfig& config) {
  const auto cps = decode(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    const auto cls = cps[i].cls;
    if (cls == CharClass::Space) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    TokenKind kind = TokenKind::Punctuation;
    if (is_word_char(cls)) {
      kind = TokenKind::Word;
      while (j < cps.size()) {
        if (is_word_char(cps[j].cls)) {
          ++j;
        } else if (cps[j].cls == CharClass::Apostrophe && j + 1 < cps.size() &&
                   cps[j + 1].cls == CharClass::Letter && is_word_char(cps[j - 1].cls)) {
          j += 2;
        } else {
          break;
        }
      }
    } else if (cls == CharClass::Digit) {
      kind = TokenKind::Figure;
      while (j < cps.size() && cps[j].cls == CharClass::Digit) ++j;
    }
    const ByteSpan span{cps[i].start, cps[j - 1].end};
    std::string piece(text.substr(span.start, span.size()));
    if (config.fold_case && kind == TokenKind::Word) piece = fold(piece);
    tokens.push_back({std::move(piece), kind, span});
    i = j;
  }
  return tokens;
}

std::vector<std::string_view> split_paragraphs(std::string_view text) {
  std::vector<std::string_view> paragraphs;
  std::size_t para_start = 0;
  std::size_t para_end = 0;  // end of the last nonblank line, newline excluded
  std::size_t line_start = 0;
  bool in_para = false;
  while (line_start <= text.size()) {
    auto nl = text.find('\n', line_start);
    const std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    const auto line = text.substr(line_start, line_end - line_start);
    if (is_blank_line(line)) {
      if (in_para) paragraphs.push_back(text.substr(para_start, para_end - para_start));
      in_para = false;
    } else {
      if (!in_para) para_start = line_start;
      in_para = true;
      para_end = line_end;
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  if (in_para) paragraphs.push_back(text.substr(para_start, para_end - para_start));
  return paragraphs;
}

Text make_text(std::string name, std::string source, const TokenizerConfig& config) {
  Text text;
  text.name = std::move(name);
  text.tokens = tokenize(source, config);
  text.source = std::move(source);
  return text;
}

namespace {

void append_document(TokenStream& stream, const std::string& name, std::string_view bytes,
                     const CorpusConfig& config) {
  std::string normalized;
  try {
    normalized = normalize_input(bytes, config.normalize);
  } catch (const Error& e) {
    throw Error(e.code(), name + ": " + e.what());
  }
  if (!config.split_paragraphs) {
    stream.texts.push_back(make_text(name, std::move(normalized), config.tokenizer));
    return;
  }
  std::size_t index = 0;
  for (auto paragraph : split_paragraphs(normalized)) {
    stream.texts.push_back(
        make_text(name + "#" + std::to_string(index++), std::string(paragraph), config.tokenizer));
  }
}

}  // namespace

TokenStream read_corpus(const std::vector<std::filesystem::path>& paths, const CorpusConfig& config) {
  if (paths.empty()) throw Error(Errc::InvalidArgument, "no input files");
  TokenStream stream;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error(Errc::Io, "cannot read " + path.string());
    append_document(stream, path.string(), buffer.str(), config);
  }
  return stream;
}

TokenStream corpus_from_strings(const std::vector<std::string>& documents, const CorpusConfig& config) {
  TokenStream stream;
  for (std::size_t k = 0; k < documents.size(); ++k) {
    append_document(stream, "text" + std::to_string(k), documents[k], config);
  }
  return stream;
}

TokenStream filter_tokens(const TokenStream& stream, FilterPolicy policy) {
  const auto keep = [policy](TokenKind kind) {
    switch (policy) {
      case FilterPolicy::KeepAll: return true;
      case FilterPolicy::DropPunctuation: return kind != TokenKind::Punctuation;
      case FilterPolicy::DropPunctuationAndFigures: return kind == TokenKind::Word;
    }
    return true;
  };

  TokenStream out;
  out.texts.reserve(stream.texts.size());
  for (const auto& text : stream.texts) {
    Text filtered{text.name, text.source, {}, text.dropped};
    for (const auto& token : text.tokens) {
      (keep(token.kind) ? filtered.tokens : filtered.dropped).push_back(token);
    }
    std::sort(filtered.dropped.begin(), filtered.dropped.end(),
              [](const Token& a, const Token& b) { return a.span.start < b.span.start; });
    out.texts.push_back(std::move(filtered));
  }
  if (out.token_count() == 0) throw Error(Errc::AllTokensDropped, "no tokens survive filtering");
  return out;
}

TypeTable TypeTable::build(const TokenStream& stream) {
  TypeTable table;
  for (const auto& text : stream.texts) {
    for (const auto& token : text.tokens) {
      auto [it, inserted] = table.index_.try_emplace(token.text, static_cast<TypeId>(table.names_.size()));
      if (inserted) {
        table.names_.push_back(token.text);
        table.counts_.push_back(0);
      }
      ++table.counts_[static_cast<std::size_t>(it->second)];
    }
  }
  return table;
}

TypeTable TypeTable::subset(const std::vector<TypeId>& ids) const {
  TypeTable out;
  for (TypeId id : ids) {
    out.index_.emplace(name(id), static_cast<TypeId>(out.names_.size()));
    out.names_.push_back(name(id));
    out.counts_.push_back(count(id));
  }
  return out;
}

std::optional<TypeId> TypeTable::find(std::string_view type) const {
  auto it = index_.find(type);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int64_t TypeTable::total() const noexcept {
  std::int64_t sum = 0;
  for (auto c : counts_) sum += c;
  return sum;
}

}  // namespace softcut::corpus
