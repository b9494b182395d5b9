#include "manqa/kb.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace manqa {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> splitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string joinFrom(const std::vector<std::string>& f, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < f.size(); ++i) {
    if (i > from) out += '\t';
    out += f[i];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Thesaurus

void Thesaurus::addSynset(const std::vector<std::string>& lemmas) {
  std::set<std::string> set;
  for (const auto& l : lemmas) {
    const std::string t = toLower(trim(l));
    if (!t.empty()) set.insert(t);
  }
  if (set.empty()) return;
  for (const auto& l : set) {
    if (synsetOf_.count(l) != 0) throw ThesaurusError("lemma '" + l + "' belongs to two synsets");
  }
  const std::size_t idx = synsets_.size();
  for (const auto& l : set) synsetOf_[l] = idx;
  synsets_.push_back(std::move(set));
}

void Thesaurus::addHyponym(const std::string& child, const std::string& parent) {
  const std::string c = toLower(trim(child));
  const std::string p = toLower(trim(parent));
  if (c.empty() || p.empty()) throw ThesaurusError("hyponym edge needs two lemmas");
  if (c == p) throw ThesaurusError("hyponym edge '" + c + " < " + p + "' is a cycle");
  hyponyms_.insert({c, p});
  checkAcyclic();
}

void Thesaurus::checkAcyclic() const {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [c, p] : hyponyms_) parents[c].push_back(p);
  std::map<std::string, int> state;  // 1 visiting, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    int& st = state[node];
    if (st == 2) return;
    if (st == 1) throw ThesaurusError("hyponym relation has a cycle through '" + node + "'");
    st = 1;
    for (const auto& p : parents[node]) visit(p);
    state[node] = 2;
  };
  for (const auto& [c, p] : hyponyms_) visit(c);
}

Thesaurus Thesaurus::parse(std::istream& in) {
  Thesaurus t;
  std::string line;
  bool header = false;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (!header) {
      if (s != kHeader) throw ThesaurusError("thesaurus must start with '" + std::string(kHeader) + "'");
      header = true;
      continue;
    }
    if (s.rfind("syn:", 0) == 0) {
      std::vector<std::string> lemmas;
      std::stringstream ss(s.substr(4));
      std::string item;
      while (std::getline(ss, item, ',')) lemmas.push_back(item);
      t.addSynset(lemmas);
    } else if (s.rfind("hyp:", 0) == 0) {
      const auto rest = s.substr(4);
      const auto lt = rest.find('<');
      if (lt == std::string::npos) throw ThesaurusError("line " + std::to_string(lineNo) + ": hyp needs 'child < parent'");
      t.addHyponym(rest.substr(0, lt), rest.substr(lt + 1));
    } else {
      throw ThesaurusError("line " + std::to_string(lineNo) + ": expected 'syn:' or 'hyp:'");
    }
  }
  if (!header) throw ThesaurusError("thesaurus header missing");
  return t;
}

Thesaurus Thesaurus::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ThesaurusError("cannot open thesaurus " + path.string());
  return parse(in);
}

std::set<std::string> Thesaurus::synonyms(const std::string& lemma) const {
  auto it = synsetOf_.find(lemma);
  if (it == synsetOf_.end()) return {lemma};
  return synsets_[it->second];
}

std::set<std::string> Thesaurus::directHyponyms(const std::string& lemma) const {
  std::set<std::string> out;
  for (const auto& [c, p] : hyponyms_) {
    if (p == lemma) out.insert(c);
  }
  return out;
}

std::set<std::string> Thesaurus::expand(const std::string& lemma, Expansion mode) const {
  std::set<std::string> out = synonyms(lemma);
  if (mode == Expansion::synonyms) return out;
  std::vector<std::string> work(out.begin(), out.end());
  while (!work.empty()) {
    const std::string cur = work.back();
    work.pop_back();
    for (const auto& child : directHyponyms(cur)) {
      for (const auto& syn : synonyms(child)) {
        if (out.insert(syn).second) work.push_back(syn);
      }
    }
  }
  return out;
}

std::string Thesaurus::serialize() const {
  std::string out(kHeader);
  out += '\n';
  for (const auto& set : synsets_) {
    out += "syn: ";
    bool first = true;
    for (const auto& l : set) {
      if (!first) out += ", ";
      out += l;
      first = false;
    }
    out += '\n';
  }
  for (const auto& [c, p] : hyponyms_) out += "hyp: " + c + " < " + p + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Unification

bool unifyAtom(const AtomPattern& pattern, const Fact& fact, Bindings& bindings) {
  if (pattern.functor != fact.functor) return false;
  if (!pattern.lemma.empty() && pattern.lemma != fact.lemma) return false;
  if (pattern.args.size() > fact.args.size()) return false;
  auto bind = [&](const std::string& var, const std::string& value) {
    if (var == "_") return true;
    auto [it, inserted] = bindings.emplace(var, value);
    return inserted || it->second == value;
  };
  if (!bind(pattern.id, fact.id)) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (!bind(pattern.args[i], fact.args[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Knowledge base

void KnowledgeBase::addPage(PageRecord page) {
  const std::string name = page.name;
  pages_[name] = std::move(page);
}

void KnowledgeBase::addSentence(SentenceRecord sentence) {
  const std::string id = sentence.id;
  if (sentences_.count(id) == 0) sentenceOrder_.push_back(id);
  sentences_[id] = std::move(sentence);
}

void KnowledgeBase::assertSentence(const std::string& sentenceId, const std::vector<Fact>& facts,
                                   std::size_t interpretationTag) {
  const auto key = std::make_pair(sentenceId, interpretationTag);
  if (byInterpretation_.count(key) != 0) throw DuplicateInterpretation(sentenceId, interpretationTag);
  auto& slot = byInterpretation_[key];
  auto& groups = groups_[key];
  for (const auto& f : facts) {
    if (f.sentenceId != sentenceId) {
      throw std::invalid_argument("fact " + dumpFact(f) + " does not belong to " + sentenceId);
    }
    const std::size_t idx = facts_.size();
    facts_.push_back({f, interpretationTag});
    index_[{f.functor, f.lemma}].push_back(idx);
    slot.push_back(idx);
    if (f.functor == Functor::rel && (f.lemma == "and" || f.lemma == "or") && f.args.size() == 2) {
      groups[f.args[0]].insert(f.args[1]);
    }
  }
  auto it = sentences_.find(sentenceId);
  if (it == sentences_.end()) {
    SentenceRecord rec;
    rec.id = sentenceId;
    addSentence(std::move(rec));
    it = sentences_.find(sentenceId);
  }
  ++it->second.parseCount;
}

std::vector<std::size_t> KnowledgeBase::lookup(Functor functor, const std::string& lemma) const {
  auto it = index_.find({functor, lemma});
  return it == index_.end() ? std::vector<std::size_t>{} : it->second;
}

std::vector<std::size_t> KnowledgeBase::lookup(Functor functor) const {
  std::vector<std::size_t> out;
  for (auto it = index_.lower_bound({functor, std::string{}}); it != index_.end() && it->first.first == functor;
       ++it) {
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::size_t, Bindings>> KnowledgeBase::match(const AtomPattern& pattern,
                                                                   const std::set<std::string>& lemmas) const {
  std::vector<std::size_t> candidates;
  AtomPattern p = pattern;
  if (!lemmas.empty()) {
    p.lemma.clear();
    for (const auto& l : lemmas) {
      const auto hits = lookup(pattern.functor, l);
      candidates.insert(candidates.end(), hits.begin(), hits.end());
    }
    std::sort(candidates.begin(), candidates.end());
  } else if (!pattern.lemma.empty()) {
    candidates = lookup(pattern.functor, pattern.lemma);
  } else {
    candidates = lookup(pattern.functor);
  }
  std::vector<std::pair<std::size_t, Bindings>> out;
  for (auto idx : candidates) {
    Bindings b;
    if (unifyAtom(p, facts_[idx].fact, b)) out.emplace_back(idx, std::move(b));
  }
  return out;
}

const std::vector<std::size_t>& KnowledgeBase::factsOf(const std::string& sentenceId,
                                                       std::size_t interpretation) const {
  static const std::vector<std::size_t> kNone;
  auto it = byInterpretation_.find({sentenceId, interpretation});
  return it == byInterpretation_.end() ? kNone : it->second;
}

std::vector<std::size_t> KnowledgeBase::interpretations(const std::string& sentenceId) const {
  std::vector<std::size_t> out;
  for (auto it = byInterpretation_.lower_bound({sentenceId, 0});
       it != byInterpretation_.end() && it->first.first == sentenceId; ++it) {
    out.push_back(it->first.second);
  }
  return out;
}

const std::set<std::string>& KnowledgeBase::membersOf(const std::string& sentenceId, std::size_t interpretation,
                                                      const std::string& group) const {
  static const std::set<std::string> kNone;
  auto it = groups_.find({sentenceId, interpretation});
  if (it == groups_.end()) return kNone;
  auto g = it->second.find(group);
  return g == it->second.end() ? kNone : g->second;
}

const SentenceRecord* KnowledgeBase::sentence(const std::string& id) const {
  auto it = sentences_.find(id);
  return it == sentences_.end() ? nullptr : &it->second;
}

std::size_t KnowledgeBase::parseCount(const std::string& sentenceId) const {
  const auto* s = sentence(sentenceId);
  return s ? s->parseCount : 0;
}

const PageRecord* KnowledgeBase::page(const std::string& name) const {
  auto it = pages_.find(name);
  return it == pages_.end() ? nullptr : &it->second;
}

std::vector<std::string> KnowledgeBase::pageNames() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : pages_) out.push_back(name);
  return out;
}

std::vector<const SentenceRecord*> KnowledgeBase::sentencesOfPage(const std::string& page) const {
  std::vector<const SentenceRecord*> out;
  for (const auto& id : sentenceOrder_) {
    const auto& s = sentences_.at(id);
    if (s.page == page) out.push_back(&s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

void KnowledgeBase::save(std::ostream& out) const {
  using nlohmann::json;
  out << kHeader << '\n';
  for (const auto& c : registry_.commands) out << "cmd\t" << c << '\n';
  for (const auto& a : registry_.argumentNames) out << "arg\t" << a << '\n';
  for (const auto& set : thesaurus_.synsets()) {
    out << "syn";
    for (const auto& l : set) out << '\t' << l;
    out << '\n';
  }
  for (const auto& [c, p] : thesaurus_.hyponymEdges()) out << "hyp\t" << c << '\t' << p << '\n';
  for (const auto& [name, page] : pages_) {
    out << "page\t" << name << '\t' << json(page.sourcePath).dump() << '\n';
    for (const auto& [sec, text] : page.sections) {
      out << "section\t" << name << '\t' << sec << '\t' << json(text).dump() << '\n';
    }
  }
  for (const auto& id : sentenceOrder_) {
    const auto& s = sentences_.at(id);
    out << "sentence\t" << s.id << '\t' << s.page << '\t' << s.section << '\t' << (s.fallback ? 1 : 0) << '\t'
        << json(s.text).dump() << '\n';
    for (const auto& t : s.tokens) out << "token\t" << s.id << '\t' << dumpToken(t) << '\n';
    for (const auto& [lemma, idx] : s.keywords.lemmas) out << "keyword\t" << s.id << '\t' << lemma << '\t' << idx << '\n';
  }
  for (const auto& [key, indices] : byInterpretation_) {
    out << "interp\t" << key.first << '\t' << key.second << '\n';
    for (auto idx : indices) out << "fact\t" << key.second << '\t' << dumpFact(facts_[idx].fact) << '\n';
  }
}

void KnowledgeBase::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write knowledge base " + path.string());
  save(out);
  if (!out) throw std::runtime_error("error writing knowledge base " + path.string());
}

KnowledgeBase KnowledgeBase::load(std::istream& in) {
  using nlohmann::json;
  KnowledgeBase kb;
  std::string line;
  if (!std::getline(in, line) || trim(line) != kHeader) {
    throw KbFormatError("not a knowledge base file (expected header '" + std::string(kHeader) + "')");
  }
  std::size_t lineNo = 1;
  std::string pendingId;
  std::size_t pendingTag = 0;
  std::vector<Fact> pending;
  auto flush = [&] {
    if (!pendingId.empty()) kb.assertSentence(pendingId, pending, pendingTag);
    pending.clear();
    pendingId.clear();
  };
  auto fail = [&](const std::string& what) {
    throw KbFormatError("knowledge base line " + std::to_string(lineNo) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = splitTabs(line);
    const std::string& kind = f[0];
    try {
      if (kind == "cmd" && f.size() == 2) {
        kb.registry_.commands.insert(f[1]);
      } else if (kind == "arg" && f.size() == 2) {
        kb.registry_.argumentNames.insert(f[1]);
      } else if (kind == "syn" && f.size() >= 2) {
        kb.thesaurus_.addSynset({f.begin() + 1, f.end()});
      } else if (kind == "hyp" && f.size() == 3) {
        kb.thesaurus_.addHyponym(f[1], f[2]);
      } else if (kind == "page" && f.size() == 3) {
        PageRecord p;
        p.name = f[1];
        p.sourcePath = json::parse(f[2]).get<std::string>();
        kb.addPage(std::move(p));
      } else if (kind == "section" && f.size() == 4) {
        auto it = kb.pages_.find(f[1]);
        if (it == kb.pages_.end()) fail("section of unknown page " + f[1]);
        it->second.sections.emplace_back(f[2], json::parse(f[3]).get<std::string>());
      } else if (kind == "sentence" && f.size() == 6) {
        SentenceRecord s;
        s.id = f[1];
        s.page = f[2];
        s.section = f[3];
        s.fallback = f[4] == "1";
        s.text = json::parse(f[5]).get<std::string>();
        kb.addSentence(std::move(s));
      } else if (kind == "token" && f.size() >= 3) {
        auto it = kb.sentences_.find(f[1]);
        if (it == kb.sentences_.end()) fail("token of unknown sentence " + f[1]);
        Token t = parseTokenLine(joinFrom(f, 2));
        t.wordIndex = it->second.tokens.size();
        it->second.tokens.push_back(std::move(t));
      } else if (kind == "keyword" && f.size() == 4) {
        auto it = kb.sentences_.find(f[1]);
        if (it == kb.sentences_.end()) fail("keyword of unknown sentence " + f[1]);
        it->second.keywords.lemmas.emplace_back(f[2], std::stoul(f[3]));
      } else if (kind == "interp" && f.size() == 3) {
        flush();
        pendingId = f[1];
        pendingTag = std::stoul(f[2]);
      } else if (kind == "fact" && f.size() >= 3) {
        if (pendingId.empty() || std::stoul(f[1]) != pendingTag) fail("fact outside its interpretation block");
        pending.push_back(parseFact(joinFrom(f, 2)));
      } else {
        fail("unrecognised record '" + kind + "'");
      }
    } catch (const KbFormatError&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  flush();
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open knowledge base " + path.string());
  return load(in);
}

}  // namespace manqa
