#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace manqa {

enum class PartOfSpeech { noun, verb, adjective, adverb };

/// Closed-class membership. A word may belong to several classes
/// ("that" is both a determiner and a relative pronoun).
enum class FunctionClass {
  determiner,
  whDeterminer,
  preposition,
  conjunction,
  subordinator,
  negation,
  relative,
  whAdverb,
  whPronoun,
  auxiliary,
  auxiliaryNegated,
  copula,
  pronoun,
  particle,
};

/// Surface inflection of a word relative to its lemma.
enum class Inflection { base, s, ed, ing };

struct WordAnalysis {
  std::string lemma;
  Inflection inflection = Inflection::base;
  std::vector<FunctionClass> functionClasses;
  std::vector<PartOfSpeech> openClasses;
  bool known = false;
};

class Lexicon {
 public:
  Lexicon() = default;

  /// Reads lexicon.txt, lemmas.txt and argtypes.txt from `dir`.
  static Lexicon load(const std::filesystem::path& dir);
  /// The directory compiled in at build time, overridable with MANQA_DATA_DIR.
  static std::filesystem::path defaultDataDir();

  void addEntries(std::istream& lexicon);
  void addExceptions(std::istream& exceptions);
  void addArgumentTypes(std::istream& argtypes);

  /// Lowercased lemma. Exceptions first, then suffix rules validated against
  /// the known base forms. Idempotent: lemmatize(lemmatize(w)) == lemmatize(w).
  std::string lemmatize(std::string_view surface) const;

  WordAnalysis analyze(std::string_view surface) const;

  const std::vector<PartOfSpeech>& openClasses(std::string_view lemma) const;
  bool isKnownBase(std::string_view lemma) const;

  /// Type noun for an argument name: "filename1" -> "file".
  std::optional<std::string> argumentType(std::string_view name) const;

 private:
  std::string lemmatizeLower(const std::string& lower, Inflection* inflection) const;

  std::map<std::string, std::vector<PartOfSpeech>, std::less<>> entries_;
  std::map<std::string, std::pair<std::string, Inflection>, std::less<>> exceptions_;
  std::map<std::string, std::string, std::less<>> argumentTypes_;
};

std::vector<FunctionClass> functionClasses(std::string_view lowerSurface);
bool hasFunctionClass(std::string_view lowerSurface, FunctionClass cls);
std::string toLower(std::string_view text);

}  // namespace manqa
