#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "manqa/docmodel.hpp"
#include "manqa/lexicon.hpp"

namespace manqa {

enum class TokenKind { word, command, option, path, varname, special, punct, number };

std::string_view toString(TokenKind kind);
TokenKind parseTokenKind(std::string_view text);

/// Bit set over Face values.
struct Typography {
  unsigned bits = 0;

  void add(Face f) { bits |= 1u << static_cast<unsigned>(f); }
  bool has(Face f) const { return (bits & (1u << static_cast<unsigned>(f))) != 0; }
  bool only(Face f) const { return bits == (1u << static_cast<unsigned>(f)); }
  bool operator==(const Typography&) const = default;
};

struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const CharSpan&) const = default;
};

struct Token {
  std::string surface;
  std::string normalized;
  TokenKind kind = TokenKind::word;
  Typography typography;
  std::size_t sentenceIndex = 0;
  std::size_t wordIndex = 0;
  CharSpan span;
};

struct TokenizedSentence {
  std::string sentenceId;
  std::vector<Token> tokens;
};

class Tokenizer {
 public:
  explicit Tokenizer(const Lexicon& lexicon) : lexicon_(&lexicon) {}

  /// Sentences of one section. Ids are `<idPrefix>/<ordinal>` with the
  /// ordinal starting at 1, e.g. "install.1/DESCRIPTION/1".
  std::vector<TokenizedSentence> tokenize(const SectionText& section, const Registry& registry,
                                          std::string_view idPrefix) const;

  /// Flat classified stream; paragraph breaks are reported through `breaks`
  /// as the index of the first token of each new paragraph.
  std::vector<Token> tokenizeFlat(const SectionText& section, const Registry& registry,
                                  std::vector<std::size_t>* breaks = nullptr) const;

  std::string normalize(std::string_view surface, TokenKind kind) const;

 private:
  const Lexicon* lexicon_;
};

/// Splits at ".", "?" and "!" punct tokens; the terminator stays with the
/// sentence it ends.
std::vector<std::vector<Token>> splitSentences(std::vector<Token> tokens);

/// One token per line: surface TAB kind TAB normalized TAB start-end.
/// Sentences are separated by a blank line.
std::string dumpTokens(const std::vector<TokenizedSentence>& sentences);
std::string dumpToken(const Token& token);
Token parseTokenLine(std::string_view line);
std::vector<std::vector<Token>> parseTokenDump(std::string_view dump);

/// The open-class lemmas a token contributes to a keyword index.
std::vector<std::string> tokenKeywords(const Token& token, const Lexicon& lexicon);

/// Lemma used in facts: the normalized form without the .com/.arg marker.
std::string factLemma(const Token& token);

}  // namespace manqa
