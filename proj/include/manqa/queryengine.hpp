#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "manqa/kb.hpp"
#include "manqa/lexicon.hpp"
#include "manqa/logform.hpp"
#include "manqa/parser.hpp"
#include "manqa/tokenizer.hpp"

namespace manqa {

enum class Level { L0_synonyms = 0, L1_hyponyms = 1, L2_brokenDeps = 2, L3_keywords = 3 };

std::string_view toString(Level level);
/// Accepts "L0".."L3", "0".."3" and the level names.
Level parseLevel(std::string_view text);

struct Proof {
  std::string sentenceId;
  Bindings bindings;
  std::vector<std::size_t> matchedFacts;  // knowledge-base fact indices
  std::set<std::size_t> coveredWords;
  Level level = Level::L0_synonyms;
  std::size_t interpretation = 0;
};

struct QueryResult {
  std::string sentenceId;
  Level level = Level::L0_synonyms;
  std::vector<Proof> proofs;
  double score = 0;
};

struct CascadeConfig {
  std::size_t minHits = 1;
  Level maxLevel = Level::L3_keywords;
  std::optional<Level> forcedLevel;
};

struct Answer {
  std::string question;
  /// Absent when the question did not parse and went to keywords directly.
  std::optional<Goal> goal;
  std::vector<std::string> keywords;
  /// Highest level executed.
  Level level = Level::L0_synonyms;
  std::vector<QueryResult> results;
};

class QueryEngine {
 public:
  QueryEngine(const KnowledgeBase& kb, const Lexicon& lexicon);

  /// Runs the cascade. Throws EmptyGoal when the question has no content word.
  Answer answer(std::string_view question, const CascadeConfig& config = {}) const;

  TokenizedSentence tokenizeQuestion(std::string_view question) const;
  ParseForest parseQuestion(const TokenizedSentence& question) const;
  std::optional<Goal> goalFor(std::string_view question, Expansion expansion = Expansion::synonyms) const;

  /// All consistent assignments of goal conjuncts to facts of one
  /// (sentence, interpretation), alternatives expanded as given.
  std::vector<Proof> proveConjunctive(const Goal& goal, Level level) const;
  /// One proof per sentence in which every conjunct matches some fact on
  /// its own.
  std::vector<Proof> breakDependencies(const Goal& goal) const;
  std::vector<QueryResult> keywordSearch(const std::vector<std::string>& lemmas) const;

  /// Distinct open-class lemmas of a question.
  std::vector<std::string> questionKeywords(const TokenizedSentence& question) const;

  const KnowledgeBase& kb() const { return *kb_; }
  const Lexicon& lexicon() const { return *lexicon_; }

 private:
  std::vector<QueryResult> runLevel(Level level, const TokenizedSentence& question,
                                    const std::optional<DependencyParse>& parse,
                                    const std::vector<std::string>& keywords) const;

  const KnowledgeBase* kb_;
  const Lexicon* lexicon_;
  Tokenizer tokenizer_;
  Parser parser_;
};

}  // namespace manqa
