#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "manqa/lexicon.hpp"
#include "manqa/tokenizer.hpp"

namespace manqa {

enum class EdgeLabel { subj, obj, iobj, amod, advmod, prep, conj, cond, neg, rel };

std::string_view toString(EdgeLabel label);

/// Syntactic category a token received in one analysis. Tokens tagged
/// `function` or `none` are outside the dependency tree.
enum class Category { none, function, noun, verb, adjective, adverb, pronoun, whPronoun, negation };

bool isContent(Category c);

struct Edge {
  EdgeLabel label = EdgeLabel::subj;
  /// Preposition lemma for prep, conjunction for conj, subordinator for cond.
  std::string lemma;
  std::size_t head = 0;
  std::size_t dependent = 0;
  /// Function word realizing the edge (the preposition, conjunction, ...).
  std::optional<std::size_t> marker;

  auto operator<=>(const Edge&) const = default;
};

enum class Mood { declarative, imperative, whSubject, whObject, whAdverb, yesNo };

struct DependencyParse {
  std::vector<Edge> edges;  // sorted
  std::size_t root = 0;
  std::vector<Category> tags;
  Mood mood = Mood::declarative;
  /// Token carrying the question focus: head of a wh-NP or a wh-pronoun.
  std::optional<std::size_t> whIndex;

  std::optional<std::size_t> headOf(std::size_t token) const;
  const Edge* incoming(std::size_t token) const;
  std::vector<const Edge*> outgoing(std::size_t token) const;
};

struct KeywordBag {
  std::vector<std::pair<std::string, std::size_t>> lemmas;  // (lemma, wordIndex)

  bool operator==(const KeywordBag&) const = default;
};

struct ParseForest {
  TokenizedSentence sentence;
  std::vector<DependencyParse> parses;
  std::optional<KeywordBag> keywordFallback;
  /// Set when every parse violated some filter rule and the forest was kept.
  bool filterFlagged = false;
  /// Set when the analysis count exceeded the cap.
  bool capExceeded = false;

  bool parsed() const { return !parses.empty(); }
};

/// Lexical-association counts for PP attachment:
/// `attach TAB verb|noun TAB headLemma TAB prep TAB objLemma TAB count`.
class AssociationModel {
 public:
  enum class Site { verb, noun };

  static AssociationModel parse(std::istream& in);
  static AssociationModel load(const std::string& path);

  void add(Site site, const std::string& head, const std::string& prep, const std::string& object,
           double count);
  /// Count summed over object lemmas.
  double count(Site site, const std::string& head, const std::string& prep) const;
  bool empty() const { return marginal_.empty(); }

 private:
  std::map<std::tuple<Site, std::string, std::string>, double> marginal_;
};

struct FilterRule {
  std::string name;
  std::function<bool(const DependencyParse&, const TokenizedSentence&)> admits;
};

/// An of-PP attaches only to the immediately preceding noun or to the
/// coordination that noun belongs to.
FilterRule ofAttachmentRule();
std::vector<FilterRule> defaultFilterRules();

struct ParserOptions {
  std::size_t maxParses = 64;
  /// Enables wh-questions, yes/no questions and wh-determiners.
  bool questions = false;
};

class Parser {
 public:
  explicit Parser(const Lexicon& lexicon, ParserOptions options = {})
      : lexicon_(&lexicon), options_(options) {}

  /// All analyses licensed by the grammar, or a keyword bag when none is
  /// licensed or the cap is exceeded.
  ParseForest parse(const TokenizedSentence& sentence) const;

  const ParserOptions& options() const { return options_; }

 private:
  const Lexicon* lexicon_;
  ParserOptions options_;
};

ParseForest applyFilterRules(ParseForest forest, const std::vector<FilterRule>& rules = defaultFilterRules());

/// For each PP with competing attachments keeps the sites whose smoothed
/// score log(c + 0.5) is within 0.1 of the best. An empty model leaves the
/// forest unchanged.
ParseForest disambiguatePP(ParseForest forest, const AssociationModel& model);

/// Open-class lemmas of a sentence (nouns, verbs, adjectives, adverbs plus
/// the typography-derived classes of commands and arguments).
KeywordBag keywordBag(const TokenizedSentence& sentence, const Lexicon& lexicon);

/// Logarithmic attachment score used by disambiguatePP.
double attachmentScore(double count);

}  // namespace manqa
