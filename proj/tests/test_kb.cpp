#include <gtest/gtest.h>

#include <sstream>

#include "manqa/kb.hpp"
#include "support.hpp"

using namespace manqa;

namespace {

std::vector<Fact> exampleOne() {
  std::vector<Fact> out;
  for (const char* line : {
           "holds([e1])/s1\t2",
           "object(cp,o1,[x1])/s1\t0",
           "object(command,o2,[x1])/s1\t0",
           "evt(copy,e1,[x1,x2])/s1\t1",
           "object(content,o3,[x2])/s1\t3",
           "object(filename1,o4,[x3])/s1\t5",
           "object(file,o5,[x3])/s1\t5",
           "rel(of,[x2,x3])/s1\t4",
           "object(filename2,o6,[x4])/s1\t7",
           "object(file,o7,[x4])/s1\t7",
           "rel(onto,[e1,x4])/s1\t6",
       }) {
    out.push_back(parseFact(line));
  }
  return out;
}

AtomPattern pattern(Functor f, std::string lemma, std::vector<std::string> args, std::string id = "_") {
  return AtomPattern{f, std::move(lemma), std::move(args), std::move(id)};
}

Thesaurus parseThesaurus(const std::string& text) {
  std::istringstream in(text);
  return Thesaurus::parse(in);
}

}  // namespace

TEST(KnowledgeBase, LookupAfterAssert) {
  KnowledgeBase kb;
  kb.assertSentence("s1", exampleOne(), 1);
  EXPECT_EQ(kb.lookup(Functor::object, "cp").size(), 1u);
  EXPECT_EQ(kb.lookup(Functor::object, "file").size(), 2u);
  EXPECT_EQ(kb.lookup(Functor::rel, "onto").size(), 1u);
  EXPECT_EQ(kb.lookup(Functor::object).size(), 7u);
  EXPECT_TRUE(kb.lookup(Functor::evt, "duplicate").empty());
}

TEST(KnowledgeBase, DuplicateInterpretationIsRejected) {
  KnowledgeBase kb;
  kb.assertSentence("s1", exampleOne(), 1);
  EXPECT_THROW(kb.assertSentence("s1", exampleOne(), 1), DuplicateInterpretation);
  EXPECT_EQ(kb.size(), 11u);
}

TEST(KnowledgeBase, ParseCountCountsInterpretations) {
  KnowledgeBase kb;
  kb.assertSentence("s1", exampleOne(), 1);
  EXPECT_EQ(kb.parseCount("s1"), 1u);
  kb.assertSentence("s1", exampleOne(), 2);
  EXPECT_EQ(kb.parseCount("s1"), 2u);
  EXPECT_EQ(kb.interpretations("s1"), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(kb.parseCount("nope"), 0u);
}

TEST(KnowledgeBase, MatchBindsVariables) {
  KnowledgeBase kb;
  kb.assertSentence("s1", exampleOne(), 1);
  const auto hits = kb.match(pattern(Functor::evt, "copy", {"X", "Y"}, "E"));
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].second.at("X"), "x1");
  EXPECT_EQ(hits[0].second.at("Y"), "x2");
  EXPECT_EQ(hits[0].second.at("E"), "e1");
  const auto both = kb.match(pattern(Functor::evt, "", {"X", "Y"}), {"copy", "duplicate"});
  ASSERT_EQ(both.size(), 1u);
  EXPECT_EQ(both[0].first, hits[0].first);
}

TEST(KnowledgeBase, MatchOnEmptyKb) {
  KnowledgeBase kb;
  EXPECT_TRUE(kb.match(pattern(Functor::object, "directory", {"D"})).empty());
}

TEST(KnowledgeBase, MatchAgreesWithLinearScan) {
  const auto kb = testing_support::corpusKb();
  const std::vector<AtomPattern> patterns = {
      pattern(Functor::object, "file", {"X"}),     pattern(Functor::evt, "copy", {"X", "Y"}, "E"),
      pattern(Functor::evt, "create", {"_", "Y"}), pattern(Functor::rel, "of", {"A", "B"}),
      pattern(Functor::rel, "of", {"A", "A"}),     pattern(Functor::object, "command", {"C"}, "O"),
      pattern(Functor::evt, "remove", {"X"}),
  };
  for (const auto& p : patterns) {
    std::set<std::size_t> want;
    for (std::size_t i = 0; i < kb.size(); ++i) {
      const Fact& f = kb.fact(i).fact;
      if (f.functor != p.functor || f.lemma != p.lemma || f.args.size() < p.args.size()) continue;
      std::map<std::string, std::string> b;
      bool ok = true;
      if (p.id != "_") b[p.id] = f.id;
      for (std::size_t k = 0; k < p.args.size() && ok; ++k) {
        if (p.args[k] == "_") continue;
        auto [it, fresh] = b.emplace(p.args[k], f.args[k]);
        ok = fresh || it->second == f.args[k];
      }
      if (ok) want.insert(i);
    }
    std::set<std::size_t> got;
    for (const auto& [idx, b] : kb.match(p)) got.insert(idx);
    EXPECT_EQ(got, want) << toString(p);
  }
}

TEST(KnowledgeBase, SaveLoadRoundTrip) {
  const auto kb = testing_support::corpusKb();
  std::stringstream first;
  kb.save(first);
  const auto loaded = KnowledgeBase::load(first);
  std::stringstream second;
  loaded.save(second);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(loaded.size(), kb.size());
  EXPECT_EQ(loaded.sentenceOrder(), kb.sentenceOrder());
  EXPECT_EQ(loaded.pageNames(), kb.pageNames());
  EXPECT_EQ(loaded.registry(), kb.registry());
  EXPECT_EQ(loaded.thesaurus().serialize(), kb.thesaurus().serialize());
  for (const auto& id : kb.sentenceOrder()) {
    EXPECT_EQ(loaded.parseCount(id), kb.parseCount(id));
    EXPECT_EQ(loaded.sentence(id)->text, kb.sentence(id)->text);
    EXPECT_EQ(loaded.sentence(id)->keywords, kb.sentence(id)->keywords);
    EXPECT_EQ(loaded.sentence(id)->fallback, kb.sentence(id)->fallback);
  }
}

TEST(KnowledgeBase, LoadRejectsBadInput) {
  std::istringstream noHeader("sentence\tx\n");
  EXPECT_THROW(KnowledgeBase::load(noHeader), KbFormatError);
  std::istringstream badRecord("manqa-kb 1\nwhatever\tx\n");
  EXPECT_THROW(KnowledgeBase::load(badRecord), KbFormatError);
}

TEST(KnowledgeBase, GroupsFromCoordination) {
  KnowledgeBase kb;
  std::vector<Fact> facts;
  for (const char* line : {"object(file,o1,[x1])/s\t0", "object(directory,o2,[x2])/s\t2",
                           "rel(and,[x3,x1])/s\t1", "rel(and,[x3,x2])/s\t1"}) {
    facts.push_back(parseFact(line));
  }
  kb.assertSentence("s", facts, 1);
  EXPECT_EQ(kb.membersOf("s", 1, "x3"), (std::set<std::string>{"x1", "x2"}));
  EXPECT_TRUE(kb.membersOf("s", 1, "x1").empty());
}

TEST(Thesaurus, SynonymExpansion) {
  const auto t = testing_support::fixtureThesaurus();
  EXPECT_EQ(t.expand("copy", Expansion::synonyms), (std::set<std::string>{"copy", "duplicate"}));
  EXPECT_EQ(t.expand("frobnicate", Expansion::synonyms), (std::set<std::string>{"frobnicate"}));
  EXPECT_EQ(t.expand("create", Expansion::synonyms), (std::set<std::string>{"create"}));
}

TEST(Thesaurus, HyponymClosureMatchesOracle) {
  const auto t = testing_support::fixtureThesaurus();
  // closure oracle: repeat union of synsets and direct children until stable
  auto oracle = [&](const std::string& lemma) {
    std::set<std::string> out = {lemma};
    while (true) {
      std::set<std::string> next = out;
      for (const auto& w : out) {
        for (const auto& s : t.synsets()) {
          if (s.count(w)) next.insert(s.begin(), s.end());
        }
        for (const auto& [child, parent] : t.hyponymEdges()) {
          if (parent == w) next.insert(child);
        }
      }
      if (next == out) return out;
      out = std::move(next);
    }
  };
  std::set<std::string> lemmas;
  for (const auto& s : t.synsets()) lemmas.insert(s.begin(), s.end());
  for (const auto& [c, p] : t.hyponymEdges()) lemmas.insert({c, p});
  for (const auto& l : lemmas) EXPECT_EQ(t.expand(l, Expansion::synonymsAndHyponyms), oracle(l)) << l;
  const auto file = t.expand("file", Expansion::synonymsAndHyponyms);
  EXPECT_TRUE(file.count("directory"));
  EXPECT_TRUE(file.count("folder"));
  EXPECT_TRUE(file.count("link"));
}

TEST(Thesaurus, Validation) {
  EXPECT_THROW(parseThesaurus("manqa-thesaurus 1\nsyn: a, b\nsyn: b, c\n"), ThesaurusError);
  EXPECT_THROW(parseThesaurus("manqa-thesaurus 1\nhyp: a < b\nhyp: b < a\n"), ThesaurusError);
  EXPECT_THROW(parseThesaurus("manqa-thesaurus 1\nhyp: a < a\n"), ThesaurusError);
  EXPECT_THROW(parseThesaurus("thesaurus\n"), ThesaurusError);
  EXPECT_NO_THROW(parseThesaurus("manqa-thesaurus 1\n# nothing\n"));
}

TEST(Thesaurus, SerializeRoundTrip) {
  const auto t = testing_support::fixtureThesaurus();
  const auto back = parseThesaurus(t.serialize());
  EXPECT_EQ(back.serialize(), t.serialize());
  EXPECT_EQ(back.synsets(), t.synsets());
  EXPECT_EQ(back.hyponymEdges(), t.hyponymEdges());
}
