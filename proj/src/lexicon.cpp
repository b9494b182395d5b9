#include "manqa/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace manqa {
namespace {

struct ClosedEntry {
  std::string_view word;
  FunctionClass cls;
};

constexpr ClosedEntry kClosedClass[] = {
    {"the", FunctionClass::determiner},       {"a", FunctionClass::determiner},
    {"an", FunctionClass::determiner},        {"this", FunctionClass::determiner},
    {"that", FunctionClass::determiner},      {"these", FunctionClass::determiner},
    {"those", FunctionClass::determiner},     {"each", FunctionClass::determiner},
    {"every", FunctionClass::determiner},     {"any", FunctionClass::determiner},
    {"all", FunctionClass::determiner},       {"some", FunctionClass::determiner},
    {"no", FunctionClass::determiner},        {"its", FunctionClass::determiner},
    {"their", FunctionClass::determiner},     {"your", FunctionClass::determiner},
    {"another", FunctionClass::determiner},   {"which", FunctionClass::whDeterminer},
    {"what", FunctionClass::whDeterminer},    {"of", FunctionClass::preposition},
    {"onto", FunctionClass::preposition},     {"to", FunctionClass::preposition},
    {"into", FunctionClass::preposition},     {"in", FunctionClass::preposition},
    {"on", FunctionClass::preposition},       {"from", FunctionClass::preposition},
    {"with", FunctionClass::preposition},     {"for", FunctionClass::preposition},
    {"by", FunctionClass::preposition},       {"at", FunctionClass::preposition},
    {"about", FunctionClass::preposition},    {"over", FunctionClass::preposition},
    {"under", FunctionClass::preposition},    {"through", FunctionClass::preposition},
    {"within", FunctionClass::preposition},   {"without", FunctionClass::preposition},
    {"after", FunctionClass::preposition},    {"before", FunctionClass::preposition},
    {"between", FunctionClass::preposition},  {"across", FunctionClass::preposition},
    {"against", FunctionClass::preposition},  {"during", FunctionClass::preposition},
    {"like", FunctionClass::preposition},     {"per", FunctionClass::preposition},
    {"than", FunctionClass::preposition},     {"via", FunctionClass::preposition},
    {"as", FunctionClass::preposition},       {"and", FunctionClass::conjunction},
    {"or", FunctionClass::conjunction},       {"if", FunctionClass::subordinator},
    {"when", FunctionClass::subordinator},    {"unless", FunctionClass::subordinator},
    {"whenever", FunctionClass::subordinator}, {"not", FunctionClass::negation},
    {"never", FunctionClass::negation},       {"that", FunctionClass::relative},
    {"which", FunctionClass::relative},       {"who", FunctionClass::relative},
    {"how", FunctionClass::whAdverb},         {"where", FunctionClass::whAdverb},
    {"what", FunctionClass::whPronoun},       {"who", FunctionClass::whPronoun},
    {"can", FunctionClass::auxiliary},        {"could", FunctionClass::auxiliary},
    {"may", FunctionClass::auxiliary},        {"might", FunctionClass::auxiliary},
    {"must", FunctionClass::auxiliary},       {"shall", FunctionClass::auxiliary},
    {"should", FunctionClass::auxiliary},     {"will", FunctionClass::auxiliary},
    {"would", FunctionClass::auxiliary},      {"do", FunctionClass::auxiliary},
    {"does", FunctionClass::auxiliary},       {"did", FunctionClass::auxiliary},
    {"cannot", FunctionClass::auxiliaryNegated},
    {"is", FunctionClass::copula},            {"are", FunctionClass::copula},
    {"was", FunctionClass::copula},           {"were", FunctionClass::copula},
    {"be", FunctionClass::copula},            {"been", FunctionClass::copula},
    {"i", FunctionClass::pronoun},            {"you", FunctionClass::pronoun},
    {"it", FunctionClass::pronoun},           {"they", FunctionClass::pronoun},
    {"we", FunctionClass::pronoun},           {"them", FunctionClass::pronoun},
    {"he", FunctionClass::pronoun},           {"she", FunctionClass::pronoun},
    {"itself", FunctionClass::pronoun},       {"also", FunctionClass::particle},
    {"only", FunctionClass::particle},        {"just", FunctionClass::particle},
    {"then", FunctionClass::particle},        {"too", FunctionClass::particle},
    {"even", FunctionClass::particle},        {"still", FunctionClass::particle},
    {"already", FunctionClass::particle},     {"again", FunctionClass::particle},
};

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::optional<PartOfSpeech> parsePos(std::string_view tag) {
  if (tag == "n") return PartOfSpeech::noun;
  if (tag == "v") return PartOfSpeech::verb;
  if (tag == "adj") return PartOfSpeech::adjective;
  if (tag == "adv") return PartOfSpeech::adverb;
  return std::nullopt;
}

bool endsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool isVowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

}  // namespace

std::string toLower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<FunctionClass> functionClasses(std::string_view lowerSurface) {
  std::vector<FunctionClass> out;
  for (const auto& e : kClosedClass) {
    if (e.word == lowerSurface) out.push_back(e.cls);
  }
  return out;
}

bool hasFunctionClass(std::string_view lowerSurface, FunctionClass cls) {
  return std::any_of(std::begin(kClosedClass), std::end(kClosedClass), [&](const ClosedEntry& e) {
    return e.word == lowerSurface && e.cls == cls;
  });
}

std::filesystem::path Lexicon::defaultDataDir() {
  if (const char* env = std::getenv("MANQA_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return MANQA_DATA_DIR;
}

Lexicon Lexicon::load(const std::filesystem::path& dir) {
  Lexicon lex;
  auto open = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in) throw std::runtime_error("cannot open lexicon file " + (dir / name).string());
    return in;
  };
  {
    auto in = open("lexicon.txt");
    lex.addEntries(in);
  }
  {
    auto in = open("lemmas.txt");
    lex.addExceptions(in);
  }
  {
    auto in = open("argtypes.txt");
    lex.addArgumentTypes(in);
  }
  return lex;
}

// Lines: `lemma tag [tag...]` with tags n, v, adj, adv.
void Lexicon::addEntries(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string lemma;
    fields >> lemma;
    auto& tags = entries_[toLower(lemma)];
    std::string tag;
    while (fields >> tag) {
      auto pos = parsePos(tag);
      if (!pos) throw std::runtime_error("unknown part of speech '" + tag + "' for " + lemma);
      if (std::find(tags.begin(), tags.end(), *pos) == tags.end()) tags.push_back(*pos);
    }
  }
}

// Lines: `surface lemma [s|ed|ing]`.
void Lexicon::addExceptions(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string surface, lemma, form;
    fields >> surface >> lemma >> form;
    if (lemma.empty()) throw std::runtime_error("malformed lemma exception: " + line);
    Inflection infl = Inflection::base;
    if (form == "s") infl = Inflection::s;
    else if (form == "ed") infl = Inflection::ed;
    else if (form == "ing") infl = Inflection::ing;
    exceptions_[toLower(surface)] = {toLower(lemma), infl};
  }
  // A target that is itself an exception key would break idempotence.
  for (const auto& [surface, target] : exceptions_) {
    if (target.first != surface && exceptions_.count(target.first) != 0) {
      throw std::runtime_error("lemma exception target is itself an exception: " + target.first);
    }
  }
}

// Lines: `argname type`.
void Lexicon::addArgumentTypes(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name, type;
    fields >> name >> type;
    if (type.empty()) throw std::runtime_error("malformed argument type line: " + line);
    argumentTypes_[toLower(name)] = toLower(type);
  }
}

bool Lexicon::isKnownBase(std::string_view lemma) const {
  if (entries_.find(lemma) != entries_.end()) return true;
  for (const auto& [surface, target] : exceptions_) {
    if (target.first == lemma) return true;
  }
  return false;
}

const std::vector<PartOfSpeech>& Lexicon::openClasses(std::string_view lemma) const {
  static const std::vector<PartOfSpeech> kNone;
  auto it = entries_.find(lemma);
  return it == entries_.end() ? kNone : it->second;
}

std::string Lexicon::lemmatizeLower(const std::string& w, Inflection* inflection) const {
  auto setInfl = [&](Inflection i) {
    if (inflection != nullptr) *inflection = i;
  };
  setInfl(Inflection::base);
  if (auto it = exceptions_.find(w); it != exceptions_.end()) {
    setInfl(it->second.second);
    return it->second.first;
  }
  if (entries_.find(w) != entries_.end()) return w;

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
    Inflection infl;
    std::size_t minStem;
  };
  static constexpr Rule kRules[] = {
      {"ies", "y", Inflection::s, 2},  {"es", "", Inflection::s, 2},   {"s", "", Inflection::s, 2},
      {"ied", "y", Inflection::ed, 2}, {"ed", "", Inflection::ed, 3},  {"ed", "e", Inflection::ed, 2},
      {"ing", "", Inflection::ing, 3}, {"ing", "e", Inflection::ing, 2},
  };
  auto acceptable = [&](const std::string& c) {
    return entries_.find(c) != entries_.end() && exceptions_.find(c) == exceptions_.end();
  };
  for (const auto& r : kRules) {
    if (!endsWith(w, r.suffix) || w.size() < r.suffix.size() + r.minStem) continue;
    std::string stem = w.substr(0, w.size() - r.suffix.size());
    if (r.suffix == "s" && endsWith(w, "ss")) continue;
    std::string candidate = stem + std::string(r.replacement);
    if (acceptable(candidate)) {
      setInfl(r.infl);
      return candidate;
    }
    // stopped -> stop, mapping -> map
    if (r.replacement.empty() && (r.infl == Inflection::ed || r.infl == Inflection::ing) &&
        stem.size() >= 3 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        !isVowel(stem.back())) {
      std::string undoubled = stem.substr(0, stem.size() - 1);
      if (acceptable(undoubled)) {
        setInfl(r.infl);
        return undoubled;
      }
    }
  }

  // Unknown word: strip a plural ending only when the result is stable.
  std::string fallback = w;
  Inflection fallbackInfl = Inflection::base;
  if (endsWith(w, "ies") && w.size() > 4) {
    fallback = w.substr(0, w.size() - 3) + "y";
    fallbackInfl = Inflection::s;
  } else if (endsWith(w, "s") && w.size() > 3 && !endsWith(w, "ss") && !endsWith(w, "us") &&
             !endsWith(w, "is")) {
    fallback = w.substr(0, w.size() - 1);
    fallbackInfl = Inflection::s;
  }
  if (fallback != w) {
    if (lemmatizeLower(fallback, nullptr) != fallback) return w;
    setInfl(fallbackInfl);
  }
  return fallback;
}

std::string Lexicon::lemmatize(std::string_view surface) const {
  return lemmatizeLower(toLower(surface), nullptr);
}

WordAnalysis Lexicon::analyze(std::string_view surface) const {
  WordAnalysis a;
  const std::string lower = toLower(surface);
  a.functionClasses = functionClasses(lower);
  a.lemma = lemmatizeLower(lower, &a.inflection);
  a.openClasses = openClasses(a.lemma);
  a.known = !a.openClasses.empty() || !a.functionClasses.empty();
  return a;
}

std::optional<std::string> Lexicon::argumentType(std::string_view name) const {
  std::string stem = toLower(name);
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) return std::nullopt;
  if (auto it = argumentTypes_.find(stem); it != argumentTypes_.end()) return it->second;
  if (stem != toLower(name) && entries_.find(stem) != entries_.end()) return stem;
  return std::nullopt;
}

}  // namespace manqa
