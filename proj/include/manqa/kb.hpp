#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "manqa/docmodel.hpp"
#include "manqa/logform.hpp"
#include "manqa/parser.hpp"
#include "manqa/tokenizer.hpp"

namespace manqa {

class ThesaurusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Synonym sets plus a hyponym relation (child < parent).
class Thesaurus {
 public:
  static constexpr std::string_view kHeader = "manqa-thesaurus 1";

  static Thesaurus parse(std::istream& in);
  static Thesaurus load(const std::filesystem::path& path);

  void addSynset(const std::vector<std::string>& lemmas);
  void addHyponym(const std::string& child, const std::string& parent);

  /// The lemma's synset, the lemma itself included.
  std::set<std::string> synonyms(const std::string& lemma) const;
  std::set<std::string> directHyponyms(const std::string& lemma) const;
  std::set<std::string> expand(const std::string& lemma, Expansion mode) const;

  const std::vector<std::set<std::string>>& synsets() const { return synsets_; }
  const std::set<std::pair<std::string, std::string>>& hyponymEdges() const { return hyponyms_; }

  /// The file form, header included.
  std::string serialize() const;
  bool empty() const { return synsets_.empty() && hyponyms_.empty(); }

 private:
  void checkAcyclic() const;

  std::vector<std::set<std::string>> synsets_;
  std::map<std::string, std::size_t> synsetOf_;
  std::set<std::pair<std::string, std::string>> hyponyms_;  // (child, parent)
};

class DuplicateInterpretation : public std::runtime_error {
 public:
  DuplicateInterpretation(const std::string& sentenceId, std::size_t tag)
      : std::runtime_error("interpretation " + std::to_string(tag) + " of " + sentenceId + " already asserted") {}
};

class KbFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StoredFact {
  Fact fact;
  std::size_t interpretation = 0;
};

struct SentenceRecord {
  std::string id;
  std::string page;
  std::string section;
  std::string text;
  std::vector<Token> tokens;
  KeywordBag keywords;
  std::size_t parseCount = 0;
  /// True when the sentence is only available as a keyword bag.
  bool fallback = false;
};

struct PageRecord {
  std::string name;
  std::string sourcePath;
  std::vector<std::pair<std::string, std::string>> sections;  // (name, text)
};

using Bindings = std::map<std::string, std::string>;

class KnowledgeBase {
 public:
  static constexpr std::string_view kHeader = "manqa-kb 1";

  void addPage(PageRecord page);
  void addSentence(SentenceRecord sentence);

  /// Stores the facts of one interpretation of `sentenceId`.
  void assertSentence(const std::string& sentenceId, const std::vector<Fact>& facts, std::size_t interpretationTag);

  /// Facts with exactly this functor and lemma.
  std::vector<std::size_t> lookup(Functor functor, const std::string& lemma) const;
  /// All facts with this functor, whatever their lemma.
  std::vector<std::size_t> lookup(Functor functor) const;

  /// Facts unifiable with `pattern` whose lemma is in `lemmas` (any lemma if
  /// empty). Pattern arguments must be a prefix of the fact's arguments.
  std::vector<std::pair<std::size_t, Bindings>> match(const AtomPattern& pattern,
                                                       const std::set<std::string>& lemmas = {}) const;

  const StoredFact& fact(std::size_t index) const { return facts_.at(index); }
  const std::vector<StoredFact>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }

  /// Fact indices of one (sentence, interpretation).
  const std::vector<std::size_t>& factsOf(const std::string& sentenceId, std::size_t interpretation) const;
  std::vector<std::size_t> interpretations(const std::string& sentenceId) const;

  /// Members of a coordination entity within one interpretation.
  const std::set<std::string>& membersOf(const std::string& sentenceId, std::size_t interpretation,
                                         const std::string& group) const;

  const SentenceRecord* sentence(const std::string& id) const;
  const std::map<std::string, SentenceRecord>& sentences() const { return sentences_; }
  /// Sentence ids in insertion (document) order.
  const std::vector<std::string>& sentenceOrder() const { return sentenceOrder_; }
  std::size_t parseCount(const std::string& sentenceId) const;

  const PageRecord* page(const std::string& name) const;
  std::vector<std::string> pageNames() const;
  std::vector<const SentenceRecord*> sentencesOfPage(const std::string& page) const;

  Thesaurus& thesaurus() { return thesaurus_; }
  const Thesaurus& thesaurus() const { return thesaurus_; }
  Registry& registry() { return registry_; }
  const Registry& registry() const { return registry_; }

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static KnowledgeBase load(std::istream& in);
  static KnowledgeBase load(const std::filesystem::path& path);

 private:
  std::vector<StoredFact> facts_;
  std::map<std::pair<Functor, std::string>, std::vector<std::size_t>> index_;
  std::map<std::pair<std::string, std::size_t>, std::vector<std::size_t>> byInterpretation_;
  std::map<std::pair<std::string, std::size_t>, std::map<std::string, std::set<std::string>>> groups_;
  std::map<std::string, SentenceRecord> sentences_;
  std::vector<std::string> sentenceOrder_;
  std::map<std::string, PageRecord> pages_;
  Thesaurus thesaurus_;
  Registry registry_;
};

/// Binds pattern arguments against fact arguments; `bindings` is extended in
/// place. Returns false on a clash.
bool unifyAtom(const AtomPattern& pattern, const Fact& fact, Bindings& bindings);

}  // namespace manqa
