#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "manqa/parser.hpp"
#include "support.hpp"

using namespace manqa;
using testing_support::lexicon;

namespace {

const char* kCp =
    ".TH CP 1\n.SH NAME\ncp \\- copy files\n.SH SYNOPSIS\n\\fBcp\\fR \\fIfilename1 filename2\\fR\n"
    ".SH DESCRIPTION\n"
    "\\fBcp\\fR copies the contents of \\fIfilename1\\fR onto \\fIfilename2\\fR.\n"
    "cp copies good files.\n"
    "See also tar(1) cpio(1)\n";

const char* kPlain =
    ".TH T 1\n.SH NAME\nrm, tar, sort, ln \\- tools\n.SH DESCRIPTION\n"
    "rm removes the file from the directory.\n"
    "tar writes the archive to the tape with the name.\n"
    "sort writes the lines of the file to the output in the directory.\n"
    "ln creates the link in the directory of the user.\n"
    "tar reads the file.\n";

TokenizedSentence cpSentence(int n) { return testing_support::sentenceOf(kCp, "cp.1/DESCRIPTION/" + std::to_string(n)); }

std::size_t indexOf(const TokenizedSentence& s, const std::string& surface) {
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (s.tokens[i].surface == surface) return i;
  }
  throw std::runtime_error("no token " + surface);
}

/// Head of the prep edge whose marker is `marker`.
std::optional<std::size_t> ppHead(const DependencyParse& p, std::size_t marker) {
  for (const auto& e : p.edges) {
    if (e.label == EdgeLabel::prep && e.marker == marker) return e.head;
  }
  return std::nullopt;
}

std::set<std::size_t> ppHeads(const ParseForest& f, std::size_t marker) {
  std::set<std::size_t> out;
  for (const auto& p : f.parses) {
    if (auto h = ppHead(p, marker)) out.insert(*h);
  }
  return out;
}

/// Non-crossing attachments for S V NP (P NP)*: each preposition attaches to
/// the verb or to an earlier NP head, and arcs from head to the PP object
/// must nest.
std::set<std::vector<std::size_t>> enumerateAttachments(const TokenizedSentence& s) {
  const Tokenizer tok(lexicon());
  std::size_t verb = 0;
  std::vector<std::size_t> preps;
  std::vector<std::size_t> heads;  // object NP head, then the NP head of each PP
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const auto a = lexicon().analyze(s.tokens[i].surface);
    if (verb == 0 && i > 0 && s.tokens[i].kind == TokenKind::word &&
        std::find(a.openClasses.begin(), a.openClasses.end(), PartOfSpeech::verb) != a.openClasses.end()) {
      verb = i;
    }
    if (hasFunctionClass(toLower(s.tokens[i].surface), FunctionClass::preposition)) preps.push_back(i);
  }
  // an NP head is the token just before the next preposition or the period
  std::size_t next = 0;
  for (std::size_t i = verb + 1; i < s.tokens.size(); ++i) {
    const bool boundary = (next < preps.size() && i == preps[next]) || s.tokens[i].surface == ".";
    if (boundary) {
      heads.push_back(i - 1);
      if (next < preps.size() && i == preps[next]) ++next;
    }
  }
  std::set<std::vector<std::size_t>> out;
  std::vector<std::size_t> choice;
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (k == preps.size()) {
      // arc k spans [choice[k], heads[k + 1]]
      for (std::size_t a = 0; a < preps.size(); ++a) {
        for (std::size_t b = 0; b < preps.size(); ++b) {
          const auto l1 = choice[a], r1 = heads[a + 1], l2 = choice[b], r2 = heads[b + 1];
          if (l1 < l2 && l2 < r1 && r1 < r2) return;
        }
      }
      out.insert(choice);
      return;
    }
    std::vector<std::size_t> sites = {verb};
    for (std::size_t j = 0; j <= k; ++j) sites.push_back(heads[j]);
    for (auto site : sites) {
      choice.push_back(site);
      go(k + 1);
      choice.pop_back();
    }
  };
  go(0);
  return out;
}

std::set<std::vector<std::size_t>> forestAttachments(const ParseForest& f) {
  std::vector<std::size_t> preps;
  for (std::size_t i = 0; i < f.sentence.tokens.size(); ++i) {
    if (hasFunctionClass(toLower(f.sentence.tokens[i].surface), FunctionClass::preposition)) preps.push_back(i);
  }
  std::set<std::vector<std::size_t>> out;
  for (const auto& p : f.parses) {
    std::vector<std::size_t> v;
    for (auto m : preps) v.push_back(ppHead(p, m).value_or(999));
    out.insert(v);
  }
  return out;
}

}  // namespace

TEST(Parser, GoodFilesSingleParse) {
  const auto s = cpSentence(2);
  const auto f = Parser(lexicon()).parse(s);
  ASSERT_EQ(f.parses.size(), 1u);
  std::vector<Edge> want = {
      {EdgeLabel::subj, "", 1, 0, std::nullopt},
      {EdgeLabel::obj, "", 1, 3, std::nullopt},
      {EdgeLabel::amod, "", 3, 2, std::nullopt},
  };
  std::sort(want.begin(), want.end());
  EXPECT_EQ(f.parses[0].edges, want);
  EXPECT_EQ(f.parses[0].root, 1u);
  EXPECT_EQ(f.parses[0].mood, Mood::declarative);
}

TEST(Parser, ExampleOneOntoAlternatives) {
  const auto s = cpSentence(1);
  const auto f = Parser(lexicon()).parse(s);
  ASSERT_TRUE(f.parsed());
  const std::set<std::size_t> want = {indexOf(s, "copies"), indexOf(s, "contents"), indexOf(s, "filename1")};
  EXPECT_EQ(ppHeads(f, indexOf(s, "onto")), want);
}

TEST(Parser, AttachmentsAgreeWithExhaustiveEnumeration) {
  std::vector<TokenizedSentence> sentences = {cpSentence(1)};
  for (int i = 1; i <= 4; ++i) sentences.push_back(testing_support::sentenceOf(kPlain, "t.1/DESCRIPTION/" + std::to_string(i)));
  for (const auto& s : sentences) {
    std::size_t content = 0;
    for (const auto& t : s.tokens) {
      const auto lower = toLower(t.surface);
      if (t.kind != TokenKind::punct && functionClasses(lower).empty()) ++content;
    }
    ASSERT_LE(content, 8u);
    const auto f = Parser(lexicon()).parse(s);
    ASSERT_TRUE(f.parsed()) << s.sentenceId;
    EXPECT_EQ(forestAttachments(f), enumerateAttachments(s)) << s.sentenceId;
  }
}

TEST(Parser, OfRuleKeepsOnlyNounAttachment) {
  const auto s = cpSentence(1);
  const auto raw = Parser(lexicon()).parse(s);
  const std::size_t of = indexOf(s, "of");
  ASSERT_TRUE(ppHeads(raw, of).count(indexOf(s, "copies")));
  const auto filtered = applyFilterRules(raw);
  EXPECT_FALSE(filtered.filterFlagged);
  EXPECT_EQ(ppHeads(filtered, of), std::set<std::size_t>{indexOf(s, "contents")});
}

TEST(Parser, OfRuleVacuousWithoutOfPP) {
  const auto s = testing_support::sentenceOf(kPlain, "t.1/DESCRIPTION/2");
  const auto raw = Parser(lexicon()).parse(s);
  const auto filtered = applyFilterRules(raw);
  EXPECT_EQ(filtered.parses.size(), raw.parses.size());
  EXPECT_FALSE(filtered.filterFlagged);
}

TEST(Parser, AllViolatingForestKeptAndFlagged) {
  const auto s = cpSentence(1);
  auto raw = Parser(lexicon()).parse(s);
  const std::size_t of = indexOf(s, "of");
  std::erase_if(raw.parses, [&](const DependencyParse& p) { return ppHead(p, of) != indexOf(s, "copies"); });
  ASSERT_FALSE(raw.parses.empty());
  const std::size_t n = raw.parses.size();
  const auto filtered = applyFilterRules(raw);
  EXPECT_EQ(filtered.parses.size(), n);
  EXPECT_TRUE(filtered.filterFlagged);
}

TEST(Parser, ModelPrefersVerbAttachment) {
  AssociationModel m;
  m.add(AssociationModel::Site::verb, "copy", "onto", "filename2", 9);
  m.add(AssociationModel::Site::noun, "filename1", "onto", "filename2", 1);
  // direct score computation
  ASSERT_GT(attachmentScore(m.count(AssociationModel::Site::verb, "copy", "onto")),
            attachmentScore(m.count(AssociationModel::Site::noun, "filename1", "onto")) + 0.1);
  ASSERT_GT(attachmentScore(m.count(AssociationModel::Site::verb, "copy", "onto")),
            attachmentScore(m.count(AssociationModel::Site::noun, "content", "onto")) + 0.1);
  const auto s = cpSentence(1);
  const auto f = disambiguatePP(applyFilterRules(Parser(lexicon()).parse(s)), m);
  ASSERT_EQ(f.parses.size(), 1u);
  EXPECT_EQ(ppHead(f.parses[0], indexOf(s, "onto")), indexOf(s, "copies"));
  EXPECT_EQ(ppHead(f.parses[0], indexOf(s, "of")), indexOf(s, "contents"));
}

TEST(Parser, FixtureModelFileGivesSameDecision) {
  const auto s = cpSentence(1);
  const auto f = testing_support::forestOf(s);
  ASSERT_EQ(f.parses.size(), 1u);
  EXPECT_EQ(ppHead(f.parses[0], indexOf(s, "onto")), indexOf(s, "copies"));
}

TEST(Parser, TiedScoresKeepBoth) {
  AssociationModel m;
  m.add(AssociationModel::Site::verb, "copy", "onto", "filename2", 3);
  m.add(AssociationModel::Site::noun, "filename1", "onto", "filename2", 3);
  const auto s = cpSentence(1);
  const auto f = disambiguatePP(applyFilterRules(Parser(lexicon()).parse(s)), m);
  EXPECT_EQ(ppHeads(f, indexOf(s, "onto")), (std::set<std::size_t>{indexOf(s, "copies"), indexOf(s, "filename1")}));
}

TEST(Parser, EmptyModelLeavesForest) {
  const auto s = cpSentence(1);
  const auto filtered = applyFilterRules(Parser(lexicon()).parse(s));
  const auto f = disambiguatePP(filtered, AssociationModel{});
  EXPECT_EQ(f.parses.size(), filtered.parses.size());
}

TEST(Parser, UnparseableFragmentFallsBackToKeywords) {
  const auto s = testing_support::sentenceOf(kCp, "cp.1/DESCRIPTION/3");
  const auto f = Parser(lexicon()).parse(s);
  EXPECT_FALSE(f.parsed());
  ASSERT_TRUE(f.keywordFallback);
  std::set<std::string> lemmas;
  for (const auto& [l, i] : f.keywordFallback->lemmas) lemmas.insert(l);
  EXPECT_EQ(lemmas, (std::set<std::string>{"see", "tar", "cpio"}));
}

TEST(Parser, CapFallsBackToKeywords) {
  const auto s = testing_support::sentenceOf(
      ".TH T 1\n.SH NAME\ntar \\- x\n.SH DESCRIPTION\n"
      "tar writes the file of the user to the tape in the directory with the mode for the user by the name "
      "on the line from the output into the archive.\n",
      "t.1/DESCRIPTION/1");
  ParserOptions opts;
  opts.maxParses = 64;
  const auto f = Parser(lexicon(), opts).parse(s);
  EXPECT_TRUE(f.capExceeded);
  EXPECT_FALSE(f.parsed());
  EXPECT_TRUE(f.keywordFallback.has_value());
}

TEST(Parser, QuestionMoods) {
  const Parser q(lexicon(), ParserOptions{64, true});
  auto moods = [&](const std::string& text) {
    Registry r;
    r.commands = {"cp"};
    const auto s = Tokenizer(lexicon()).tokenize(SectionText::plain(text), r, "question");
    std::set<Mood> out;
    for (const auto& p : q.parse(s.at(0)).parses) out.insert(p.mood);
    return out;
  };
  EXPECT_EQ(moods("Which command copies files?"), std::set<Mood>{Mood::whSubject});
  EXPECT_TRUE(moods("What does cp copy?").count(Mood::whObject));
  EXPECT_EQ(moods("How can I create a directory?"), std::set<Mood>{Mood::whAdverb});
  EXPECT_TRUE(moods("Can cp copy directories?").count(Mood::yesNo));
  // questions are rejected in declarative mode
  const auto s = Tokenizer(lexicon()).tokenize(SectionText::plain("Which command copies files?"), {}, "q");
  EXPECT_FALSE(Parser(lexicon()).parse(s.at(0)).parsed());
}

TEST(Parser, AssociationFileFormat) {
  std::istringstream in(
      "# counts\nattach\tverb\tcopy\tonto\tfilename2\t9\nattach\tverb\tcopy\tonto\tfile\t2\n"
      "attach\tnoun\tfilename1\tonto\tfilename2\t1\n");
  const auto m = AssociationModel::parse(in);
  EXPECT_DOUBLE_EQ(m.count(AssociationModel::Site::verb, "copy", "onto"), 11);
  EXPECT_DOUBLE_EQ(m.count(AssociationModel::Site::noun, "filename1", "onto"), 1);
  EXPECT_DOUBLE_EQ(m.count(AssociationModel::Site::noun, "copy", "onto"), 0);
  std::istringstream bad("attach\tverb\tcopy\n");
  EXPECT_THROW(AssociationModel::parse(bad), std::runtime_error);
}

TEST(Parser, EveryParseIsATree) {
  const Tokenizer tok(lexicon());
  const Parser parser(lexicon());
  for (const auto& f : corpusFiles(testing_support::corpusDir())) {
    const ManPage page = loadManPage(f);
    const Registry reg = buildRegistries(page);
    for (const auto& section : page.sections) {
      for (const auto& s : tok.tokenize(section.body, reg, page.name + "/" + section.name)) {
        for (const auto& p : parser.parse(s).parses) {
          std::vector<int> heads(s.tokens.size(), 0);
          for (const auto& e : p.edges) ++heads[e.dependent];
          for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            if (!isContent(p.tags[i])) {
              EXPECT_EQ(heads[i], 0);
            } else {
              EXPECT_EQ(heads[i], i == p.root ? 0 : 1) << s.sentenceId << " token " << i;
            }
          }
        }
      }
    }
  }
}
