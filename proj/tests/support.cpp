#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "manqa/docmodel.hpp"
#include "manqa/parser.hpp"
#include "manqa/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace manqa;

namespace testing_support {

fs::path fixtureDir() { return MANQA_FIXTURE_DIR; }
fs::path corpusDir() { return fixtureDir() / "corpus"; }
fs::path dataDir() { return MANQA_DATA_DIR; }

const Lexicon& lexicon() {
  static const Lexicon lex = Lexicon::load(dataDir());
  return lex;
}

Thesaurus fixtureThesaurus() { return Thesaurus::load(dataDir() / "thesaurus.txt"); }

AssociationModel fixtureModel() { return AssociationModel::load((dataDir() / "association.txt").string()); }

namespace {

Indexer newIndexer() {
  IndexInputs in;
  in.lexicon = &lexicon();
  in.thesaurus = fixtureThesaurus();
  in.model = fixtureModel();
  return Indexer(std::move(in));
}

}  // namespace

KnowledgeBase corpusKb(const std::set<std::string>& exclude) {
  static std::map<std::set<std::string>, KnowledgeBase> cache;
  auto it = cache.find(exclude);
  if (it == cache.end()) {
    Indexer indexer = newIndexer();
    for (const auto& f : corpusFiles(corpusDir())) {
      if (exclude.count(f.filename().string()) == 0) indexer.addFile(f);
    }
    if (indexer.summary().failures != 0) throw std::runtime_error("fixture corpus failed to index");
    it = cache.emplace(exclude, indexer.take()).first;
  }
  return it->second;
}

KnowledgeBase kbFromSources(const std::vector<std::string>& troffSources) {
  Indexer indexer = newIndexer();
  for (const auto& src : troffSources) indexer.addPage(parseManPage(src));
  return indexer.take();
}

TokenizedSentence sentenceOf(const std::string& troff, const std::string& sentenceId) {
  const ManPage page = parseManPage(troff);
  const Registry registry = buildRegistries(page);
  const Tokenizer tokenizer(lexicon());
  for (const auto& section : page.sections) {
    for (auto& s : tokenizer.tokenize(section.body, registry, page.name + "/" + section.name)) {
      if (s.sentenceId == sentenceId) return s;
    }
  }
  throw std::runtime_error("no sentence " + sentenceId);
}

ParseForest forestOf(const TokenizedSentence& sentence) {
  const Parser parser(lexicon());
  return disambiguatePP(applyFilterRules(parser.parse(sentence)), fixtureModel());
}

// --- alpha-equivalence -------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n\\");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\n\\") - b + 1);
}

PlainFact parseOne(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos) throw std::runtime_error("bad fact " + text);
  PlainFact f;
  f.functor = text.substr(0, open);
  std::string inner = text.substr(open + 1, close - open - 1);
  std::replace(inner.begin(), inner.end(), '[', ' ');
  std::replace(inner.begin(), inner.end(), ']', ' ');
  std::vector<std::string> parts;
  std::stringstream ss(inner);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(trim(p));
  const bool named = f.functor == "object" || f.functor == "evt" || f.functor == "prop";
  if (named) {
    f.lemma = parts.front();
    parts.erase(parts.begin());
  }
  f.terms = parts;
  return f;
}

}  // namespace

std::vector<PlainFact> parsePlainFacts(const std::string& block) {
  std::vector<PlainFact> out;
  std::size_t pos = 0;
  while (true) {
    const auto end = block.find('/', pos);
    if (end == std::string::npos) break;
    const std::string text = trim(block.substr(pos, end - pos));
    out.push_back(parseOne(text));
    const auto dot = block.find('.', end);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return out;
}

std::vector<PlainFact> toPlain(const std::vector<Fact>& facts) {
  std::vector<PlainFact> out;
  for (const auto& f : facts) {
    PlainFact p;
    switch (f.functor) {
      case Functor::object:
      case Functor::evt:
      case Functor::prop:
        p.functor = std::string(toString(f.functor));
        p.lemma = f.lemma;
        p.terms.push_back(f.id);
        break;
      case Functor::rel: p.functor = f.lemma; break;
      case Functor::if_: p.functor = "if"; break;
      case Functor::not_: p.functor = "not"; break;
      case Functor::holds: p.functor = "holds"; break;
    }
    p.terms.insert(p.terms.end(), f.args.begin(), f.args.end());
    out.push_back(std::move(p));
  }
  return out;
}

bool alphaEquivalent(const std::vector<PlainFact>& a, const std::vector<PlainFact>& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  std::map<std::string, std::string> fwd, back;
  std::function<bool(std::size_t)> step = [&](std::size_t i) -> bool {
    if (i == a.size()) return true;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j] || a[i].functor != b[j].functor || a[i].lemma != b[j].lemma ||
          a[i].terms.size() != b[j].terms.size()) {
        continue;
      }
      auto f2 = fwd;
      auto b2 = back;
      bool ok = true;
      for (std::size_t t = 0; t < a[i].terms.size() && ok; ++t) {
        const auto& x = a[i].terms[t];
        const auto& y = b[j].terms[t];
        auto [fi, fnew] = f2.emplace(x, y);
        auto [bi, bnew] = b2.emplace(y, x);
        ok = fi->second == y && bi->second == x;
      }
      if (!ok) continue;
      std::swap(fwd, f2);
      std::swap(back, b2);
      used[j] = true;
      if (step(i + 1)) return true;
      used[j] = false;
      std::swap(fwd, f2);
      std::swap(back, b2);
    }
    return false;
  };
  return step(0);
}

// --- proof oracle ------------------------------------------------------------

std::multiset<ProofKey> bruteForceProofs(const KnowledgeBase& kb, const Goal& goal) {
  std::multiset<ProofKey> out;
  if (goal.conjuncts.empty()) return out;
  for (const auto& sid : kb.sentenceOrder()) {
    for (auto interp : kb.interpretations(sid)) {
      const auto& facts = kb.factsOf(sid, interp);
      std::vector<std::pair<const AtomPattern*, std::size_t>> chosen;

      auto consistent = [&]() {
        std::map<std::string, std::set<std::string>> allowed;
        auto restrict = [&](const std::string& var, std::set<std::string> values) {
          if (var == "_") return true;
          auto [it, fresh] = allowed.emplace(var, values);
          if (!fresh) {
            std::set<std::string> both;
            std::set_intersection(it->second.begin(), it->second.end(), values.begin(), values.end(),
                                  std::inserter(both, both.begin()));
            it->second = std::move(both);
          }
          return !it->second.empty();
        };
        for (const auto& [pattern, idx] : chosen) {
          const Fact& f = kb.fact(idx).fact;
          if (!restrict(pattern->id, {f.id})) return false;
          for (std::size_t i = 0; i < pattern->args.size(); ++i) {
            std::set<std::string> values = kb.membersOf(sid, interp, f.args[i]);
            values.insert(f.args[i]);
            if (!restrict(pattern->args[i], values)) return false;
          }
        }
        return true;
      };

      std::function<void(std::size_t, const Alternative*, std::size_t)> walk =
          [&](std::size_t ci, const Alternative* alt, std::size_t ai) {
            if (ci == goal.conjuncts.size()) {
              if (!consistent()) return;
              std::vector<std::size_t> matched;
              for (const auto& c : chosen) matched.push_back(c.second);
              out.emplace(sid, interp, matched);
              return;
            }
            if (alt == nullptr) {
              for (const auto& a : goal.conjuncts[ci].alternatives) walk(ci, &a, 0);
              return;
            }
            if (ai == alt->atoms.size()) {
              walk(ci + 1, nullptr, 0);
              return;
            }
            const AtomPattern& p = alt->atoms[ai];
            for (auto idx : facts) {
              const Fact& f = kb.fact(idx).fact;
              if (f.functor != p.functor || f.lemma != p.lemma || f.args.size() < p.args.size()) continue;
              chosen.emplace_back(&p, idx);
              walk(ci, alt, ai + 1);
              chosen.pop_back();
            }
          };
      walk(0, nullptr, 0);
    }
  }
  return out;
}

std::multiset<ProofKey> keysOf(const std::vector<Proof>& proofs) {
  std::multiset<ProofKey> out;
  for (const auto& p : proofs) out.emplace(p.sentenceId, p.interpretation, p.matchedFacts);
  return out;
}

// --- questions ---------------------------------------------------------------

namespace {

std::string thirdPerson(const std::string& verb) {
  auto ends = [&](const std::string& s) { return verb.size() >= s.size() && verb.ends_with(s); };
  if (ends("s") || ends("sh") || ends("ch") || ends("x")) return verb + "es";
  if (ends("y") && verb.size() > 1 && std::string("aeiou").find(verb[verb.size() - 2]) == std::string::npos) {
    return verb.substr(0, verb.size() - 1) + "ies";
  }
  return verb + "s";
}

std::string plural(const std::string& noun) { return thirdPerson(noun); }

}  // namespace

std::vector<std::string> generatedQuestions(std::size_t count, unsigned seed) {
  static const std::vector<std::string> verbs = {"copy",   "remove", "create", "change",  "display", "print",
                                                 "read",   "write",  "sort",   "link",    "move",    "delete",
                                                 "show",   "count",  "compare", "compress"};
  static const std::vector<std::string> nouns = {"file",   "directory", "link",  "message", "archive", "permission",
                                                 "owner",  "line",      "output", "process", "mode",    "name",
                                                 "user",   "size",      "date",   "entry"};
  static const std::vector<std::string> commands = {"cp", "rm", "mkdir", "ls", "cat", "tar", "ln", "chmod"};
  std::mt19937 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<std::string> out;
  while (out.size() < count) {
    const auto v = pick(verbs);
    const auto n = pick(nouns);
    switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
      case 0: out.push_back("Which command " + thirdPerson(v) + " " + plural(n) + "?"); break;
      case 1: out.push_back("How can I " + v + " the " + n + "?"); break;
      case 2: out.push_back("What does " + pick(commands) + " " + v + "?"); break;
      case 3: out.push_back("How do I " + v + " " + plural(n) + "?"); break;
      default: out.push_back("Which " + plural(n) + " does " + pick(commands) + " " + v + "?"); break;
    }
  }
  return out;
}

const std::vector<std::string>& recordedQuestions() {
  static const std::vector<std::string> q = {
      "Which command copies files?",
      "How can I create a directory?",
      "What does cp copy?",
      "How do I remove a folder?",
      "What prints a message?",
      "How can I link files?",
      "Which command removes directories?",
      "How can I change the permissions of a file?",
      "What does mkdir create?",
      "Which command displays files?",
      "How can I sort lines?",
      "How do I compress files?",
      "Which command prints the date?",
      "How can I count lines?",
      "What does tar save?",
      "Which command moves files?",
      "How can I change the owner of a file?",
      "How do I delete an empty directory?",
      "What does kill send?",
      "Which command shows the disk usage?",
  };
  return q;
}

std::set<std::string> sentenceIds(const std::vector<QueryResult>& results) {
  std::set<std::string> out;
  for (const auto& r : results) out.insert(r.sentenceId);
  return out;
}

}  // namespace testing_support
