#include "manqa/queryengine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace manqa {

std::string_view toString(Level level) {
  switch (level) {
    case Level::L0_synonyms: return "L0";
    case Level::L1_hyponyms: return "L1";
    case Level::L2_brokenDeps: return "L2";
    case Level::L3_keywords: return "L3";
  }
  return "?";
}

Level parseLevel(std::string_view text) {
  const std::string t = toLower(text);
  if (t == "l0" || t == "0" || t == "synonyms") return Level::L0_synonyms;
  if (t == "l1" || t == "1" || t == "hyponyms") return Level::L1_hyponyms;
  if (t == "l2" || t == "2" || t == "broken" || t == "brokendeps") return Level::L2_brokenDeps;
  if (t == "l3" || t == "3" || t == "keywords") return Level::L3_keywords;
  throw std::invalid_argument("unknown level '" + std::string(text) + "' (expected L0..L3)");
}

QueryEngine::QueryEngine(const KnowledgeBase& kb, const Lexicon& lexicon)
    : kb_(&kb), lexicon_(&lexicon), tokenizer_(lexicon), parser_(lexicon, ParserOptions{64, true}) {}

TokenizedSentence QueryEngine::tokenizeQuestion(std::string_view question) const {
  TokenizedSentence out;
  out.sentenceId = "question/1";
  for (auto& s : tokenizer_.tokenize(SectionText::plain(std::string(question)), kb_->registry(), "question")) {
    for (auto& t : s.tokens) {
      t.sentenceIndex = 0;
      t.wordIndex = out.tokens.size();
      out.tokens.push_back(std::move(t));
    }
  }
  return out;
}

ParseForest QueryEngine::parseQuestion(const TokenizedSentence& question) const {
  auto forest = applyFilterRules(parser_.parse(question));
  // "What does cp copy?" also reads with "does" as the main verb of a WH subject
  auto inverted = [](const DependencyParse& p) {
    return p.mood == Mood::whObject || p.mood == Mood::whAdverb || p.mood == Mood::yesNo;
  };
  std::stable_partition(forest.parses.begin(), forest.parses.end(), inverted);
  return forest;
}

std::optional<Goal> QueryEngine::goalFor(std::string_view question, Expansion expansion) const {
  const auto tokens = tokenizeQuestion(question);
  const auto forest = parseQuestion(tokens);
  if (!forest.parsed()) return std::nullopt;
  return deriveGoal(forest.parses.front(), tokens, *lexicon_, kb_->thesaurus(), expansion);
}

std::vector<std::string> QueryEngine::questionKeywords(const TokenizedSentence& question) const {
  std::vector<std::string> out;
  for (const auto& t : question.tokens) {
    for (auto& k : tokenKeywords(t, *lexicon_)) {
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(std::move(k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proof search

namespace {

class Prover {
 public:
  Prover(const KnowledgeBase& kb, const Goal& goal, const std::string& sentenceId, std::size_t interp, Level level,
         std::vector<Proof>& out)
      : kb_(kb), goal_(goal), sid_(sentenceId), interp_(interp), level_(level), out_(out),
        facts_(kb.factsOf(sentenceId, interp)) {}

  void run() {
    Bindings b;
    std::vector<std::size_t> matched;
    conjunct(0, b, matched);
  }

 private:
  bool bindArg(const std::string& var, const std::string& value, Bindings& b) const {
    if (var == "_") return true;
    auto it = b.find(var);
    if (it == b.end()) {
      b.emplace(var, value);
      return true;
    }
    if (it->second == value) return true;
    // a group argument distributes over its members
    if (kb_.membersOf(sid_, interp_, value).count(it->second)) return true;
    if (kb_.membersOf(sid_, interp_, it->second).count(value)) {
      it->second = value;
      return true;
    }
    return false;
  }

  bool unify(const AtomPattern& a, const Fact& f, Bindings& b) const {
    if (a.functor != f.functor || a.lemma != f.lemma || a.args.size() > f.args.size()) return false;
    if (a.id != "_") {
      auto [it, inserted] = b.emplace(a.id, f.id);
      if (!inserted && it->second != f.id) return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (!bindArg(a.args[i], f.args[i], b)) return false;
    }
    return true;
  }

  void conjunct(std::size_t ci, const Bindings& b, std::vector<std::size_t>& matched) {
    if (ci == goal_.conjuncts.size()) {
      Proof p;
      p.sentenceId = sid_;
      p.bindings = b;
      p.matchedFacts = matched;
      p.level = level_;
      p.interpretation = interp_;
      for (auto idx : matched) {
        const auto& span = kb_.fact(idx).fact.wordSpan;
        p.coveredWords.insert(span.begin(), span.end());
      }
      out_.push_back(std::move(p));
      return;
    }
    for (const auto& alt : goal_.conjuncts[ci].alternatives) atom(ci, alt, 0, b, matched);
  }

  void atom(std::size_t ci, const Alternative& alt, std::size_t ai, const Bindings& b,
            std::vector<std::size_t>& matched) {
    if (ai == alt.atoms.size()) {
      conjunct(ci + 1, b, matched);
      return;
    }
    for (auto idx : facts_) {
      Bindings next = b;
      if (!unify(alt.atoms[ai], kb_.fact(idx).fact, next)) continue;
      matched.push_back(idx);
      atom(ci, alt, ai + 1, next, matched);
      matched.pop_back();
    }
  }

  const KnowledgeBase& kb_;
  const Goal& goal_;
  const std::string& sid_;
  std::size_t interp_;
  Level level_;
  std::vector<Proof>& out_;
  const std::vector<std::size_t>& facts_;
};

bool atomMatchesLoosely(const AtomPattern& a, const Fact& f) {
  return a.functor == f.functor && a.lemma == f.lemma && a.args.size() <= f.args.size();
}

}  // namespace

std::vector<Proof> QueryEngine::proveConjunctive(const Goal& goal, Level level) const {
  std::vector<Proof> out;
  if (goal.conjuncts.empty()) return out;
  std::set<std::pair<std::string, std::size_t>> candidates;
  for (const auto& alt : goal.conjuncts.front().alternatives) {
    if (alt.atoms.empty()) continue;
    const auto& a = alt.atoms.front();
    for (auto idx : kb_->lookup(a.functor, a.lemma)) {
      const auto& sf = kb_->fact(idx);
      candidates.insert({sf.fact.sentenceId, sf.interpretation});
    }
  }
  for (const auto& [sid, interp] : candidates) Prover(*kb_, goal, sid, interp, level, out).run();
  return out;
}

std::vector<Proof> QueryEngine::breakDependencies(const Goal& goal) const {
  std::vector<Proof> out;
  if (goal.conjuncts.empty()) return out;
  // facts of each sentence matching each conjunct, across interpretations
  std::map<std::string, std::vector<std::vector<std::size_t>>> hits;
  for (std::size_t ci = 0; ci < goal.conjuncts.size(); ++ci) {
    for (const auto& alt : goal.conjuncts[ci].alternatives) {
      std::map<std::string, std::vector<std::size_t>> perSentence;
      std::map<std::string, std::size_t> atomsSeen;
      for (const auto& a : alt.atoms) {
        std::set<std::string> seenHere;
        for (auto idx : kb_->lookup(a.functor, a.lemma)) {
          const auto& f = kb_->fact(idx).fact;
          if (!atomMatchesLoosely(a, f)) continue;
          perSentence[f.sentenceId].push_back(idx);
          seenHere.insert(f.sentenceId);
        }
        for (const auto& s : seenHere) ++atomsSeen[s];
      }
      for (auto& [sid, facts] : perSentence) {
        if (atomsSeen[sid] != alt.atoms.size()) continue;
        auto& slot = hits[sid];
        slot.resize(goal.conjuncts.size());
        slot[ci].insert(slot[ci].end(), facts.begin(), facts.end());
      }
    }
  }
  for (auto& [sid, perConjunct] : hits) {
    const bool all = std::all_of(perConjunct.begin(), perConjunct.end(), [](const auto& v) { return !v.empty(); });
    if (!all) continue;
    Proof p;
    p.sentenceId = sid;
    p.level = Level::L2_brokenDeps;
    std::set<std::size_t> facts;
    for (const auto& v : perConjunct) facts.insert(v.begin(), v.end());
    p.matchedFacts.assign(facts.begin(), facts.end());
    for (auto idx : p.matchedFacts) {
      const auto& span = kb_->fact(idx).fact.wordSpan;
      p.coveredWords.insert(span.begin(), span.end());
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<QueryResult> QueryEngine::keywordSearch(const std::vector<std::string>& lemmas) const {
  std::vector<QueryResult> out;
  const std::set<std::string> wanted(lemmas.begin(), lemmas.end());
  for (const auto& id : kb_->sentenceOrder()) {
    const auto& s = kb_->sentences().at(id);
    std::set<std::string> found;
    Proof p;
    p.sentenceId = id;
    p.level = Level::L3_keywords;
    for (const auto& [lemma, idx] : s.keywords.lemmas) {
      if (wanted.count(lemma)) {
        found.insert(lemma);
        p.coveredWords.insert(idx);
      }
    }
    if (found.empty()) continue;
    QueryResult r;
    r.sentenceId = id;
    r.level = Level::L3_keywords;
    r.score = static_cast<double>(found.size());
    r.proofs.push_back(std::move(p));
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const QueryResult& a, const QueryResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.sentenceId < b.sentenceId;
  });
  return out;
}

std::vector<QueryResult> QueryEngine::runLevel(Level level, const TokenizedSentence& question,
                                               const std::optional<DependencyParse>& parse,
                                               const std::vector<std::string>& keywords) const {
  if (level == Level::L3_keywords || !parse) return keywordSearch(keywords);
  const Expansion mode = level == Level::L0_synonyms ? Expansion::synonyms : Expansion::synonymsAndHyponyms;
  const Goal goal = deriveGoal(*parse, question, *lexicon_, kb_->thesaurus(), mode);
  const auto proofs = level == Level::L2_brokenDeps ? breakDependencies(goal) : proveConjunctive(goal, level);
  std::map<std::string, QueryResult> bySentence;
  for (const auto& p : proofs) {
    auto& r = bySentence[p.sentenceId];
    r.sentenceId = p.sentenceId;
    r.level = level;
    r.proofs.push_back(p);
  }
  std::vector<QueryResult> out;
  const double conjuncts = static_cast<double>(goal.conjuncts.size());
  for (auto& [sid, r] : bySentence) {
    if (level == Level::L2_brokenDeps) {
      r.score = conjuncts;
    } else {
      r.score = conjuncts + (1.0 - 1.0 / (1.0 + static_cast<double>(r.proofs.size())));
    }
    out.push_back(std::move(r));
  }
  return out;
}

Answer QueryEngine::answer(std::string_view question, const CascadeConfig& config) const {
  if (config.minHits < 1) throw std::invalid_argument("minHits must be at least 1");
  Answer ans;
  ans.question = std::string(question);
  const auto tokens = tokenizeQuestion(question);
  ans.keywords = questionKeywords(tokens);

  std::optional<DependencyParse> parse;
  const auto forest = parseQuestion(tokens);
  if (forest.parsed()) {
    parse = forest.parses.front();
    ans.goal = deriveGoal(*parse, tokens, *lexicon_, kb_->thesaurus(), Expansion::synonyms);
  } else if (ans.keywords.empty()) {
    throw EmptyGoal();
  }

  Level start = config.forcedLevel.value_or(Level::L0_synonyms);
  if (!parse) start = Level::L3_keywords;
  const Level end = std::max(config.maxLevel, start);

  std::map<std::string, QueryResult> kept;
  for (int l = static_cast<int>(start); l <= static_cast<int>(end); ++l) {
    const auto level = static_cast<Level>(l);
    ans.level = level;
    for (auto& r : runLevel(level, tokens, parse, ans.keywords)) kept.emplace(r.sentenceId, std::move(r));
    if (kept.size() >= config.minHits) break;
  }
  for (auto& [sid, r] : kept) ans.results.push_back(std::move(r));
  std::stable_sort(ans.results.begin(), ans.results.end(), [](const QueryResult& a, const QueryResult& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.score != b.score) return a.score > b.score;
    return a.sentenceId < b.sentenceId;
  });
  return ans;
}

}  // namespace manqa
