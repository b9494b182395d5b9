#include "manqa/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace manqa {
namespace {

constexpr std::array<std::string_view, 8> kKindNames = {
    "word", "command", "option", "path", "varname", "special", "punct", "number"};

bool isSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool isAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool isAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool isDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool isLower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool isWordChar(char c) { return isAlnum(c) || c == '_'; }

constexpr std::string_view kTrailingPunct = ".,;:!?)]}\"'`>";
constexpr std::string_view kPunctChars = ".,;:?!()[]{}\"'`-";

char closerFor(char opener) {
  switch (opener) {
    case '(': return ')';
    case '[': return ']';
    case '{': return '}';
    case '<': return '>';
    case '`': return '\'';
    default: return opener;
  }
}

char openerFor(char closer) {
  switch (closer) {
    case ')': return '(';
    case ']': return '[';
    case '}': return '{';
    case '>': return '<';
    default: return closer;
  }
}

bool isAbbreviation(std::string_view core) {
  const std::string lower = toLower(core);
  return lower == "e.g." || lower == "i.e." || lower == "etc." || lower == "vs.";
}

struct Piece {
  std::size_t start;
  std::size_t end;
};

// Splits one whitespace-delimited chunk [b, e) into punctuation and core pieces.
std::vector<Piece> splitChunk(std::string_view text, std::size_t b, std::size_t e) {
  const std::size_t chunkEnd = e;
  std::vector<Piece> lead;
  std::vector<Piece> trail;

  while (b < e) {
    const char c = text[b];
    if (std::string_view("([{\"'`<").find(c) == std::string_view::npos) break;
    const std::string_view rest = text.substr(b + 1, e - b - 1);
    const auto pos = rest.find(closerFor(c));
    bool strip = pos == std::string_view::npos;
    if (!strip && c != '<') {
      strip = rest.substr(pos + 1).find_first_not_of(kTrailingPunct) == std::string_view::npos;
    }
    if (!strip) break;
    lead.push_back({b, b + 1});
    ++b;
  }

  while (e > b) {
    const char c = text[e - 1];
    const std::string_view core = text.substr(b, e - b);
    if (c == ')' || c == ']' || c == '}' || c == '>') {
      const auto closers = std::count(core.begin(), core.end(), c);
      const auto openers = std::count(core.begin(), core.end(), openerFor(c));
      if (closers <= openers) break;
    } else if (c == '"' || c == '\'' || c == '`' || c == ',' || c == ';' || c == ':') {
      // always split off
    } else if (c == '.') {
      if (core.find_first_not_of('.') == std::string_view::npos) break;
      if (core.size() >= 3 && core.substr(core.size() - 3) == "...") {
        trail.push_back({e - 3, e});
        e -= 3;
        continue;
      }
      if (isAbbreviation(core)) break;
    } else if (c == '?' || c == '!') {
      const bool keepInToken = c == '?' && e == chunkEnd && e - 1 > b && isWordChar(text[e - 2]) &&
                               e + 1 < text.size() && text[e] == ' ' && isLower(text[e + 1]);
      if (keepInToken) break;
    } else {
      break;
    }
    trail.push_back({e - 1, e});
    --e;
  }

  std::vector<Piece> pieces = std::move(lead);
  if (b < e) pieces.push_back({b, e});
  pieces.insert(pieces.end(), trail.rbegin(), trail.rend());
  return pieces;
}

bool isPunctCore(std::string_view core) {
  if (core.find_first_not_of(kPunctChars) != std::string_view::npos) return false;
  if (core.size() == 1) return true;
  return core.find_first_not_of('.') == std::string_view::npos ||
         core.find_first_not_of('-') == std::string_view::npos;
}

bool isNameLike(std::string_view core) {
  if (core.empty() || !(isAlpha(core[0]) || core[0] == '_')) return false;
  return std::all_of(core.begin(), core.end(),
                     [](char c) { return isAlnum(c) || c == '_' || c == '-' || c == '.' || c == '+'; });
}

bool isOptionShape(std::string_view core) {
  if (core.size() < 2 || core[0] != '-') return false;
  std::size_t i = core[1] == '-' ? 2 : 1;
  if (i >= core.size() || !isAlnum(core[i])) return false;
  return std::all_of(core.begin() + static_cast<std::ptrdiff_t>(i), core.end(),
                     [](char c) { return isAlnum(c) || c == '-' || c == '_' || c == '='; });
}

bool isPathShape(std::string_view core) {
  if (core.find('/') == std::string_view::npos) return false;
  if (!std::any_of(core.begin(), core.end(), isAlnum)) return false;
  return std::all_of(core.begin(), core.end(), [](char c) {
    return isAlnum(c) || std::string_view("/._-~+?*").find(c) != std::string_view::npos;
  });
}

bool isNumberShape(std::string_view core) {
  std::size_t i = 0;
  if (i < core.size() && core[i] == 'v') ++i;
  if (i >= core.size() || !isDigit(core[i])) return false;
  bool lastDot = false;
  for (; i < core.size(); ++i) {
    const char c = core[i];
    if (isDigit(c)) {
      lastDot = false;
    } else if (c == '.' && !lastDot) {
      lastDot = true;
    } else {
      return false;
    }
  }
  return !lastDot;
}

bool isWordShape(std::string_view core) {
  if (core.empty() || !isAlpha(core[0])) return false;
  char prev = core[0];
  for (std::size_t i = 1; i < core.size(); ++i) {
    const char c = core[i];
    if (c == '\'' || c == '-') {
      if (prev == '\'' || prev == '-' || i + 1 == core.size()) return false;
    } else if (!isAlnum(c)) {
      return false;
    }
    prev = c;
  }
  return true;
}

TokenKind classify(std::string_view core, const Typography& typo, const Registry& registry,
                   const Token* previous) {
  if (isPunctCore(core)) return TokenKind::punct;
  if (registry.isCommand(core)) return TokenKind::command;
  if (registry.isArgument(core)) return TokenKind::varname;
  if (isNameLike(core)) {
    if (typo.only(Face::bold)) return TokenKind::command;
    if (typo.only(Face::italic)) return TokenKind::varname;
  }
  if (isOptionShape(core) && previous != nullptr &&
      ((previous->kind == TokenKind::punct && previous->surface == "[") ||
       previous->kind == TokenKind::command || previous->kind == TokenKind::option)) {
    return TokenKind::option;
  }
  if (isPathShape(core)) return TokenKind::path;
  if (isNumberShape(core)) return TokenKind::number;
  if (isWordShape(core)) return TokenKind::word;
  return TokenKind::special;
}

bool endsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string_view toString(TokenKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

TokenKind parseTokenKind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<TokenKind>(i);
  }
  throw std::invalid_argument("unknown token kind: " + std::string(text));
}

std::string Tokenizer::normalize(std::string_view surface, TokenKind kind) const {
  switch (kind) {
    case TokenKind::command:
      return endsWith(surface, ".com") ? std::string(surface) : std::string(surface) + ".com";
    case TokenKind::varname:
      return endsWith(surface, ".arg") ? std::string(surface) : std::string(surface) + ".arg";
    case TokenKind::word:
      return lexicon_->lemmatize(surface);
    default:
      return std::string(surface);
  }
}

std::vector<Token> Tokenizer::tokenizeFlat(const SectionText& section, const Registry& registry,
                                           std::vector<std::size_t>* breaks) const {
  std::vector<Token> tokens;
  const std::string_view text = section.text;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t newlines = 0;
    while (i < text.size() && isSpace(text[i])) {
      if (text[i] == '\n') ++newlines;
      ++i;
    }
    if (i >= text.size()) break;
    if (newlines >= 2 && !tokens.empty() && breaks != nullptr) breaks->push_back(tokens.size());
    std::size_t j = i;
    while (j < text.size() && !isSpace(text[j])) ++j;

    for (const auto& piece : splitChunk(text, i, j)) {
      Token tok;
      tok.surface = std::string(text.substr(piece.start, piece.end - piece.start));
      tok.span = {piece.start, piece.end};
      for (std::size_t k = piece.start; k < piece.end; ++k) tok.typography.add(section.faceAt(k));
      tok.kind = classify(tok.surface, tok.typography, registry, tokens.empty() ? nullptr : &tokens.back());
      tok.normalized = normalize(tok.surface, tok.kind);
      tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

std::vector<TokenizedSentence> Tokenizer::tokenize(const SectionText& section, const Registry& registry,
                                                   std::string_view idPrefix) const {
  std::vector<std::size_t> breaks;
  std::vector<Token> flat = tokenizeFlat(section, registry, &breaks);
  std::vector<TokenizedSentence> out;
  breaks.push_back(flat.size());
  std::size_t begin = 0;
  for (std::size_t brk : breaks) {
    std::vector<Token> paragraph(std::make_move_iterator(flat.begin() + static_cast<std::ptrdiff_t>(begin)),
                                 std::make_move_iterator(flat.begin() + static_cast<std::ptrdiff_t>(brk)));
    begin = brk;
    for (auto& sentence : splitSentences(std::move(paragraph))) {
      TokenizedSentence ts;
      const std::size_t index = out.size();
      ts.sentenceId = std::string(idPrefix) + "/" + std::to_string(index + 1);
      for (std::size_t w = 0; w < sentence.size(); ++w) {
        sentence[w].sentenceIndex = index;
        sentence[w].wordIndex = w;
      }
      ts.tokens = std::move(sentence);
      out.push_back(std::move(ts));
    }
  }
  return out;
}

std::vector<std::vector<Token>> splitSentences(std::vector<Token> tokens) {
  std::vector<std::vector<Token>> out;
  std::vector<Token> current;
  for (auto& t : tokens) {
    const bool terminator =
        t.kind == TokenKind::punct && (t.surface == "." || t.surface == "?" || t.surface == "!");
    current.push_back(std::move(t));
    if (terminator) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string dumpToken(const Token& t) {
  std::ostringstream out;
  out << t.surface << '\t' << toString(t.kind) << '\t' << t.normalized << '\t' << t.span.start << '-'
      << t.span.end;
  return out.str();
}

std::string dumpTokens(const std::vector<TokenizedSentence>& sentences) {
  std::string out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s > 0) out += '\n';
    for (const auto& t : sentences[s].tokens) {
      out += dumpToken(t);
      out += '\n';
    }
  }
  return out;
}

Token parseTokenLine(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 4) throw std::invalid_argument("token line needs 4 fields: " + std::string(line));
  Token t;
  t.surface = std::string(fields[0]);
  t.kind = parseTokenKind(fields[1]);
  t.normalized = std::string(fields[2]);
  const auto dash = fields[3].find('-');
  if (dash == std::string_view::npos) throw std::invalid_argument("bad span: " + std::string(fields[3]));
  t.span.start = std::stoul(std::string(fields[3].substr(0, dash)));
  t.span.end = std::stoul(std::string(fields[3].substr(dash + 1)));
  return t;
}

std::vector<std::vector<Token>> parseTokenDump(std::string_view dump) {
  std::vector<std::vector<Token>> out;
  std::vector<Token> current;
  std::size_t start = 0;
  while (start < dump.size()) {
    auto nl = dump.find('\n', start);
    if (nl == std::string_view::npos) nl = dump.size();
    const auto line = dump.substr(start, nl - start);
    if (line.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      Token t = parseTokenLine(line);
      t.sentenceIndex = out.size();
      t.wordIndex = current.size();
      current.push_back(std::move(t));
    }
    start = nl + 1;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> tokenKeywords(const Token& token, const Lexicon& lexicon) {
  switch (token.kind) {
    case TokenKind::word: {
      const auto a = lexicon.analyze(token.surface);
      if (!a.functionClasses.empty()) return {};
      return {a.lemma};
    }
    case TokenKind::command:
      return {factLemma(token), "command"};
    case TokenKind::varname: {
      std::vector<std::string> out{factLemma(token)};
      if (auto type = lexicon.argumentType(token.surface); type && *type != out.front()) {
        out.push_back(*type);
      }
      return out;
    }
    case TokenKind::option:
      return {token.surface, "option"};
    case TokenKind::path:
      return {token.surface};
    case TokenKind::special: {
      // manual page references such as tar(1)
      const auto& s = token.surface;
      const auto paren = s.find('(');
      if (paren != std::string::npos && paren > 0 && s.back() == ')' && paren + 2 < s.size() &&
          isDigit(s[paren + 1]) && isWordShape(std::string_view(s).substr(0, paren))) {
        return {toLower(s.substr(0, paren))};
      }
      return {};
    }
    default:
      return {};
  }
}

std::string factLemma(const Token& token) {
  switch (token.kind) {
    case TokenKind::command: return token.surface;
    case TokenKind::varname: return toLower(token.surface);
    case TokenKind::word: return token.normalized;
    default: return token.surface;
  }
}

}  // namespace manqa
