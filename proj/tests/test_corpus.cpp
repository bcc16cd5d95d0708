#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "softcut/corpus.hpp"
#include "softcut/error.hpp"

using namespace softcut;
using namespace softcut::corpus;

namespace {

Errc error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Io;
}

std::vector<std::string> texts_of(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("normalize_input line endings, BOM and NFC") {
  CHECK(normalize_input("abc\r\n") == "abc\n");
  CHECK(normalize_input("a\rb") == "a\nb");
  CHECK(normalize_input("\xEF\xBB\xBFhi") == "hi");
  CHECK(normalize_input("\xEF\xBB\xBFhi", {.strip_bom = false}) == "\xEF\xBB\xBFhi");
  // e + combining acute composes to U+00E9.
  CHECK(normalize_input("e\xCC\x81") == "\xC3\xA9");
}

TEST_CASE("normalize_input errors") {
  CHECK(error_code([] { normalize_input("\xFF"); }) == Errc::InvalidEncoding);
  CHECK(error_code([] { normalize_input("ab\xC3"); }) == Errc::InvalidEncoding);
  CHECK(error_code([] { normalize_input(""); }) == Errc::EmptyInput);
  CHECK(error_code([] { normalize_input("\xEF\xBB\xBF"); }) == Errc::EmptyInput);
}

TEST_CASE("tokenize words and punctuation") {
  const auto tokens = tokenize("Hello, world!");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0] == Token{"Hello", TokenKind::Word, {0, 5}});
  CHECK(tokens[1] == Token{",", TokenKind::Punctuation, {5, 6}});
  CHECK(tokens[2] == Token{"world", TokenKind::Word, {7, 12}});
  CHECK(tokens[3] == Token{"!", TokenKind::Punctuation, {12, 13}});
}

TEST_CASE("tokenize apostrophes and figures") {
  const auto tokens = tokenize(normalize_input("l'\xC3\x89tat 12"));
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].text == "l'\xC3\x89tat");
  CHECK(tokens[0].kind == TokenKind::Word);
  CHECK(tokens[1].text == "12");
  CHECK(tokens[1].kind == TokenKind::Figure);

  // Typographic apostrophe inside a word, plain quote at a word edge.
  CHECK(texts_of(tokenize("aujourd\xE2\x80\x99hui")) == std::vector<std::string>{"aujourd\xE2\x80\x99hui"});
  CHECK(texts_of(tokenize("'tis dogs'")) == std::vector<std::string>{"'", "tis", "dogs", "'"});
  CHECK(texts_of(tokenize("4x4 well-known")) ==
        std::vector<std::string>{"4", "x", "4", "well", "-", "known"});
}

TEST_CASE("tokenize spans skip whitespace") {
  const auto tokens = tokenize("a  b");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].span == ByteSpan{0, 1});
  CHECK(tokens[1].span == ByteSpan{3, 4});
}

TEST_CASE("tokenize case folding touches type strings only") {
  const auto tokens = tokenize("\xC3\x89t\xC3\xA9 The", {.fold_case = true});
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].text == "\xC3\xA9t\xC3\xA9");
  CHECK(tokens[1].text == "the");
  CHECK(tokens[1].span == ByteSpan{6, 9});
}

TEST_CASE("tokenize multi-byte punctuation is one token per code point") {
  const auto tokens = tokenize("\xC2\xAB oui \xC2\xBB");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].kind == TokenKind::Punctuation);
  CHECK(tokens[0].span == ByteSpan{0, 2});
  CHECK(tokens[2].text == "\xC2\xBB");
}

TEST_CASE("split_paragraphs") {
  const auto parts = split_paragraphs("one\ntwo\n\nthree\n  \t\nfour\n");
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == "one\ntwo");
  CHECK(parts[1] == "three");
  CHECK(parts[2] == "four");
  CHECK(split_paragraphs("\n\n").empty());
}

TEST_CASE("filter_tokens") {
  const auto stream = corpus_from_strings({"a , b"});
  const auto filtered = filter_tokens(stream, FilterPolicy::DropPunctuation);
  REQUIRE(filtered.texts.size() == 1);
  CHECK(texts_of(filtered.texts[0].tokens) == std::vector<std::string>{"a", "b"});
  CHECK(texts_of(filtered.texts[0].dropped) == std::vector<std::string>{","});

  CHECK(filter_tokens(stream, FilterPolicy::KeepAll) == stream);

  const auto figures = corpus_from_strings({"a 12 ."});
  CHECK(filter_tokens(figures, FilterPolicy::DropPunctuation).texts[0].tokens.size() == 2);
  CHECK(filter_tokens(figures, FilterPolicy::DropPunctuationAndFigures).texts[0].tokens.size() == 1);

  CHECK(error_code([] { filter_tokens(corpus_from_strings({","}), FilterPolicy::DropPunctuation); }) ==
        Errc::AllTokensDropped);
}

TEST_CASE("filter_tokens keeps dropped tokens in source order") {
  const auto stream = filter_tokens(corpus_from_strings({". a ; b !"}), FilterPolicy::DropPunctuation);
  const auto& dropped = stream.texts[0].dropped;
  REQUIRE(dropped.size() == 3);
  CHECK(dropped[0].span.start < dropped[1].span.start);
  CHECK(dropped[1].span.start < dropped[2].span.start);
}

TEST_CASE("type table ids and counts") {
  const auto table = build_type_table(corpus_from_strings({"a b a b"}));
  CHECK(table.size() == 2);
  CHECK(table.find("a") == 0);
  CHECK(table.find("b") == 1);
  CHECK(table.count(0) == 2);
  CHECK(table.count(1) == 2);
  CHECK(table.total() == 4);
  CHECK_FALSE(table.find("c").has_value());

  const auto single = build_type_table(corpus_from_strings({"x"}));
  CHECK(single.size() == 1);
  CHECK(single.count(0) == 1);

  const auto ordered = build_type_table(corpus_from_strings({"a b c a"}));
  CHECK(ordered.names() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("type table spans texts and subsets renumber") {
  const auto table = build_type_table(corpus_from_strings({"b a", "c b"}));
  CHECK(table.names() == std::vector<std::string>{"b", "a", "c"});
  CHECK(table.counts() == std::vector<std::int64_t>{2, 1, 1});

  const auto sub = table.subset({2, 0});
  CHECK(sub.names() == std::vector<std::string>{"c", "b"});
  CHECK(sub.counts() == std::vector<std::int64_t>{1, 2});
  CHECK(sub.find("b") == 1);
  CHECK_FALSE(sub.find("a").has_value());
}

TEST_CASE("token_count and corpus names") {
  const auto stream = corpus_from_strings({"a b", "c"});
  CHECK(stream.token_count() == 3);
  CHECK(stream.texts[0].name == "text0");
  CHECK(stream.texts[1].name == "text1");
}

TEST_CASE("read_corpus from files") {
  const auto dir = std::filesystem::temp_directory_path() / "softcut_test_corpus";
  std::filesystem::create_directories(dir);
  const auto path = dir / "two.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << "first para\r\n\r\nsecond para\r\n";
  }
  const auto whole = read_corpus({path}, {});
  REQUIRE(whole.texts.size() == 1);
  CHECK(whole.texts[0].source == "first para\n\nsecond para\n");
  CHECK(whole.token_count() == 4);

  CorpusConfig split;
  split.split_paragraphs = true;
  const auto parts = read_corpus({path}, split);
  REQUIRE(parts.texts.size() == 2);
  CHECK(parts.texts[1].source == "second para");
  CHECK(parts.texts[0].name != parts.texts[1].name);

  CHECK(error_code([&] { read_corpus({dir / "missing.txt"}, {}); }) == Errc::Io);

  const auto bad = dir / "bad.txt";
  {
    std::ofstream out(bad, std::ios::binary);
    out << "ok \xFF";
  }
  try {
    read_corpus({bad}, {});
    FAIL("expected InvalidEncoding");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidEncoding);
    CHECK(std::string(e.what()).find("bad.txt") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
