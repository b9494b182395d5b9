#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manqa/lexicon.hpp"
#include "manqa/parser.hpp"
#include "manqa/tokenizer.hpp"

namespace manqa {

class Thesaurus;

enum class Functor { object, evt, prop, rel, if_, not_, holds };

std::string_view toString(Functor f);

/// A ground atom. `lemma` is the relation name for rel facts and empty for
/// if/not/holds; `id` is the reified o-/e-/p- identifier where one exists.
struct Fact {
  Functor functor = Functor::object;
  std::string lemma;
  std::string id;
  std::vector<std::string> args;
  std::string sentenceId;
  std::vector<std::size_t> wordSpan;

  bool operator==(const Fact&) const = default;
  bool operator<(const Fact& o) const;
};

/// functor(lemma,id,[args])/sentenceId TAB span. rel facts omit the id,
/// if/not/holds carry the argument list only.
std::string dumpFact(const Fact& fact);
Fact parseFact(std::string_view line);

class FactFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogicalForm {
  std::vector<Fact> facts;
  /// Entity standing for a token when it is an argument (a group entity for
  /// coordinated nouns).
  std::map<std::size_t, std::string> entityOf;
  std::map<std::size_t, std::string> eventOf;
};

LogicalForm translate(const DependencyParse& parse, const TokenizedSentence& sentence, const Lexicon& lexicon);

std::vector<Fact> deriveFacts(const DependencyParse& parse, const TokenizedSentence& sentence,
                              const Lexicon& lexicon);

/// Words such as "contents" that pass a query noun through an of-PP.
bool isTransparentNoun(std::string_view lemma);

// --- goals ------------------------------------------------------------------

/// Arguments are variable names (capitalised) or "_".
struct AtomPattern {
  Functor functor = Functor::object;
  std::string lemma;
  std::vector<std::string> args;
  /// Variable for the reified id (events), or "_".
  std::string id = "_";

  bool operator==(const AtomPattern&) const = default;
};

struct Alternative {
  std::vector<AtomPattern> atoms;
  bool operator==(const Alternative&) const = default;
};

/// Satisfied by any one of its alternatives.
struct Conjunct {
  std::vector<Alternative> alternatives;
  bool operator==(const Conjunct&) const = default;
};

struct Goal {
  std::vector<Conjunct> conjuncts;
  std::string answerVariable;

  std::vector<std::string> variables() const;
};

std::string toString(const AtomPattern& atom);
std::string toString(const Goal& goal);

class EmptyGoal : public std::runtime_error {
 public:
  EmptyGoal() : std::runtime_error("the question has no content words") {}
};

enum class Expansion { synonyms, synonymsAndHyponyms };

/// Conjunctive goal of a parsed question. Lemmas expand into one
/// alternative per member of their expansion set.
Goal deriveGoal(const DependencyParse& questionParse, const TokenizedSentence& question, const Lexicon& lexicon,
                const Thesaurus& thesaurus, Expansion expansion = Expansion::synonyms);

}  // namespace manqa
