#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "manqa/indexer.hpp"
#include "manqa/kb.hpp"
#include "manqa/lexicon.hpp"
#include "manqa/logform.hpp"
#include "manqa/queryengine.hpp"

namespace testing_support {

std::filesystem::path fixtureDir();
std::filesystem::path corpusDir();
std::filesystem::path dataDir();

const manqa::Lexicon& lexicon();
manqa::Thesaurus fixtureThesaurus();
manqa::AssociationModel fixtureModel();

/// Indexes the fixture corpus, skipping files whose name is in `exclude`.
manqa::KnowledgeBase corpusKb(const std::set<std::string>& exclude = {});
manqa::KnowledgeBase kbFromSources(const std::vector<std::string>& troffSources);

/// Sentence `sentenceId` of a troff source, tokenized with the page registry.
manqa::TokenizedSentence sentenceOf(const std::string& troff, const std::string& sentenceId);
/// Forest after filter rules and PP disambiguation with the fixture model.
manqa::ParseForest forestOf(const manqa::TokenizedSentence& sentence);

/// Compact fact text, e.g. "object(cp,o1,x1)", "of(x2,x3)", "holds(e1)".
struct PlainFact {
  std::string functor;  // object, evt, prop, if, not, holds, or a rel name
  std::string lemma;
  std::vector<std::string> terms;  // id first where there is one, then args
};
std::vector<PlainFact> parsePlainFacts(const std::string& block);
std::vector<PlainFact> toPlain(const std::vector<manqa::Fact>& facts);
/// True when a bijection between identifiers makes the multisets equal.
bool alphaEquivalent(const std::vector<PlainFact>& a, const std::vector<PlainFact>& b);

/// (sentence, interpretation, matched facts) of one proof.
using ProofKey = std::tuple<std::string, std::size_t, std::vector<std::size_t>>;
/// Exhaustive enumeration of conjunct-to-fact assignments. A pattern
/// variable is satisfied by any value lying in {a} or members(a) for every
/// fact argument a it meets.
std::multiset<ProofKey> bruteForceProofs(const manqa::KnowledgeBase& kb, const manqa::Goal& goal);
std::multiset<ProofKey> keysOf(const std::vector<manqa::Proof>& proofs);

/// Seeded question generator over lemmas of the fixture corpus.
std::vector<std::string> generatedQuestions(std::size_t count, unsigned seed);
/// Hand-written questions used across tests.
const std::vector<std::string>& recordedQuestions();

std::set<std::string> sentenceIds(const std::vector<manqa::QueryResult>& results);

}  // namespace testing_support
