#include "manqa/logform.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "manqa/kb.hpp"

namespace manqa {

std::string_view toString(Functor f) {
  switch (f) {
    case Functor::object: return "object";
    case Functor::evt: return "evt";
    case Functor::prop: return "prop";
    case Functor::rel: return "rel";
    case Functor::if_: return "if";
    case Functor::not_: return "not";
    case Functor::holds: return "holds";
  }
  return "?";
}

bool Fact::operator<(const Fact& o) const {
  return std::tie(sentenceId, functor, lemma, id, args, wordSpan) <
         std::tie(o.sentenceId, o.functor, o.lemma, o.id, o.args, o.wordSpan);
}

namespace {

bool needsQuoting(std::string_view lemma) {
  if (lemma.empty()) return true;
  return lemma.find_first_of("(),[]/\t\" \\") != std::string_view::npos || lemma[0] == '_';
}

std::string quoteLemma(const std::string& lemma) {
  return needsQuoting(lemma) ? nlohmann::json(lemma).dump() : lemma;
}

void appendList(std::string& out, const std::vector<std::string>& items) {
  out += '[';
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  out += ']';
}

class FactReader {
 public:
  explicit FactReader(std::string_view text) : text_(text) {}

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(') ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string lemma() {
    if (pos_ < text_.size() && text_[pos_] == '"') {
      const std::size_t start = pos_++;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      expect('"');
      try {
        return nlohmann::json::parse(text_.substr(start, pos_ - start)).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        fail("bad quoted lemma");
      }
    }
    return word();
  }

  std::string word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::string_view(",[]()").find(text_[pos_]) == std::string_view::npos) ++pos_;
    if (start == pos_) fail("empty field");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> list() {
    std::vector<std::string> out;
    expect('[');
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(word());
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      return out;
    }
  }

  std::string rest() {
    auto r = std::string(text_.substr(pos_));
    pos_ = text_.size();
    return r;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FactFormatError("fact dump: " + what + " at column " + std::to_string(pos_ + 1) + " in '" +
                          std::string(text_) + "'");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string dumpFact(const Fact& f) {
  std::string out(toString(f.functor));
  out += '(';
  switch (f.functor) {
    case Functor::object:
    case Functor::evt:
    case Functor::prop:
      out += quoteLemma(f.lemma);
      out += ',';
      out += f.id;
      out += ',';
      appendList(out, f.args);
      break;
    case Functor::rel:
      out += quoteLemma(f.lemma);
      out += ',';
      appendList(out, f.args);
      break;
    default:
      appendList(out, f.args);
      break;
  }
  out += ")/";
  out += f.sentenceId;
  out += '\t';
  for (std::size_t i = 0; i < f.wordSpan.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(f.wordSpan[i]);
  }
  return out;
}

Fact parseFact(std::string_view line) {
  const auto tab = line.rfind('\t');
  if (tab == std::string_view::npos) throw FactFormatError("fact dump: missing word span in '" + std::string(line) + "'");
  FactReader r(line.substr(0, tab));
  Fact f;
  const std::string functor = r.name();
  if (functor == "object") f.functor = Functor::object;
  else if (functor == "evt") f.functor = Functor::evt;
  else if (functor == "prop") f.functor = Functor::prop;
  else if (functor == "rel") f.functor = Functor::rel;
  else if (functor == "if") f.functor = Functor::if_;
  else if (functor == "not") f.functor = Functor::not_;
  else if (functor == "holds") f.functor = Functor::holds;
  else r.fail("unknown functor '" + functor + "'");
  r.expect('(');
  switch (f.functor) {
    case Functor::object:
    case Functor::evt:
    case Functor::prop:
      f.lemma = r.lemma();
      r.expect(',');
      f.id = r.word();
      r.expect(',');
      f.args = r.list();
      break;
    case Functor::rel:
      f.lemma = r.lemma();
      r.expect(',');
      f.args = r.list();
      break;
    default:
      f.args = r.list();
      break;
  }
  r.expect(')');
  r.expect('/');
  f.sentenceId = r.rest();
  if (f.sentenceId.empty()) r.fail("missing sentence id");
  std::string_view span = line.substr(tab + 1);
  while (!span.empty()) {
    const auto comma = span.find(',');
    const auto item = span.substr(0, comma);
    try {
      f.wordSpan.push_back(std::stoul(std::string(item)));
    } catch (const std::exception&) {
      throw FactFormatError("fact dump: bad word index '" + std::string(item) + "'");
    }
    if (comma == std::string_view::npos) break;
    span.remove_prefix(comma + 1);
  }
  return f;
}

bool isTransparentNoun(std::string_view lemma) { return lemma == "content"; }

// ---------------------------------------------------------------------------

namespace {

class Translator {
 public:
  Translator(const DependencyParse& p, const TokenizedSentence& s, const Lexicon& lex)
      : p_(p), s_(s), lex_(lex), n_(s.tokens.size()), member_(n_), group_(n_), event_(n_) {}

  LogicalForm run() {
    allocate();
    for (std::size_t i = 0; i < n_; ++i) emitToken(i);
    for (const auto& e : p_.edges) emitEdge(e);
    emitHolds();
    LogicalForm lf;
    lf.facts = std::move(facts_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (auto r = ref(i); !r.empty()) lf.entityOf[i] = r;
      if (!event_[i].empty()) lf.eventOf[i] = event_[i];
    }
    return lf;
  }

 private:
  Category tag(std::size_t i) const { return i < p_.tags.size() ? p_.tags[i] : Category::none; }
  bool isNominal(std::size_t i) const {
    const auto t = tag(i);
    return t == Category::noun || t == Category::pronoun || t == Category::whPronoun;
  }

  std::string newX() { return "x" + std::to_string(++x_); }
  std::string newE() { return "e" + std::to_string(++e_); }
  std::string newO() { return "o" + std::to_string(++o_); }
  std::string newP() { return "p" + std::to_string(++p_count_); }

  const Edge* subjectEdge(std::size_t head) const {
    for (const auto& e : p_.edges) {
      if (e.label == EdgeLabel::subj && e.head == head) return &e;
    }
    return nullptr;
  }

  bool isPredicate(std::size_t i) const {
    const auto t = tag(i);
    return (t == Category::noun || t == Category::adjective) && subjectEdge(i) != nullptr;
  }

  void allocate() {
    for (std::size_t i = 0; i < n_; ++i) {
      if (isNominal(i)) {
        if (!isPredicate(i)) member_[i] = newX();
        for (const auto& e : p_.edges) {
          if (e.label == EdgeLabel::conj && e.head == i && tag(i) == Category::noun) {
            group_[i] = newX();
            break;
          }
        }
      } else if (tag(i) == Category::verb) {
        event_[i] = newE();
      }
    }
    // copular predicates denote the subject's entity; subjects precede them
    for (std::size_t i = 0; i < n_; ++i) {
      if (tag(i) == Category::noun && isPredicate(i)) member_[i] = ref(subjectEdge(i)->dependent);
    }
  }

  std::string ref(std::size_t i) const {
    if (i >= n_) return {};
    if (!group_[i].empty()) return group_[i];
    if (!member_[i].empty()) return member_[i];
    if (!event_[i].empty()) return event_[i];
    if (tag(i) == Category::adjective) {
      if (const Edge* s = subjectEdge(i)) return ref(s->dependent);
    }
    return {};
  }

  std::string subjectOf(std::size_t verb) {
    if (const Edge* s = subjectEdge(verb)) return ref(s->dependent);
    if (const Edge* in = p_.incoming(verb)) {
      if (in->label == EdgeLabel::conj && tag(in->head) == Category::verb) return subjectOf(in->head);
      if (in->label == EdgeLabel::rel) return ref(in->head);
    }
    auto it = implicit_.find(verb);
    if (it != implicit_.end()) return it->second;
    return implicit_[verb] = newX();
  }

  void add(Functor f, std::string lemma, std::string id, std::vector<std::string> args,
           std::vector<std::size_t> span) {
    std::sort(span.begin(), span.end());
    facts_.push_back({f, std::move(lemma), std::move(id), std::move(args), s_.sentenceId, std::move(span)});
  }

  void emitToken(std::size_t i) {
    const Token& tok = s_.tokens[i];
    const std::string lemma = factLemma(tok);
    switch (tag(i)) {
      case Category::noun: {
        const std::string x = member_[i];
        std::vector<std::size_t> span{i};
        for (const auto& e : p_.edges) {
          if (e.label == EdgeLabel::amod && e.head == i && tag(e.dependent) == Category::noun) {
            span.push_back(e.dependent);
          }
        }
        add(Functor::object, lemma, newO(), {x}, span);
        if (tok.kind == TokenKind::command) {
          add(Functor::object, "command", newO(), {x}, {i});
        } else if (tok.kind == TokenKind::option) {
          add(Functor::object, "option", newO(), {x}, {i});
        } else if (tok.kind == TokenKind::varname) {
          if (auto type = lex_.argumentType(lemma); type && *type != lemma) {
            add(Functor::object, *type, newO(), {x}, {i});
          }
        }
        if (!group_[i].empty()) {
          bool first = true;
          for (const auto& e : p_.edges) {
            if (e.label != EdgeLabel::conj || e.head != i || !e.marker) continue;
            if (first) {
              add(Functor::rel, e.lemma, {}, {group_[i], x}, {*e.marker});
              first = false;
            }
            add(Functor::rel, e.lemma, {}, {group_[i], member_[e.dependent]}, {*e.marker});
          }
        }
        break;
      }
      case Category::adjective: {
        if (const Edge* in = p_.incoming(i); in && in->label == EdgeLabel::amod) {
          add(Functor::prop, lemma, newP(), {member_[in->head]}, {i});
        } else if (const Edge* s = subjectEdge(i)) {
          add(Functor::prop, lemma, newP(), {ref(s->dependent)}, {i});
        }
        break;
      }
      case Category::adverb: {
        if (const Edge* in = p_.incoming(i); in && in->label == EdgeLabel::advmod) {
          if (auto target = ref(in->head); !target.empty()) add(Functor::prop, lemma, newP(), {target}, {i});
        }
        break;
      }
      case Category::verb: {
        std::vector<std::string> args{subjectOf(i)};
        std::string obj, iobj;
        for (const auto& e : p_.edges) {
          if (e.head != i) continue;
          if (e.label == EdgeLabel::obj) obj = ref(e.dependent);
          if (e.label == EdgeLabel::iobj) iobj = ref(e.dependent);
        }
        if (!obj.empty()) args.push_back(obj);
        if (!iobj.empty()) args.push_back(iobj);
        add(Functor::evt, lemma, event_[i], std::move(args), {i});
        break;
      }
      default:
        break;
    }
  }

  void emitEdge(const Edge& e) {
    switch (e.label) {
      case EdgeLabel::amod:
        if (tag(e.dependent) == Category::noun && tag(e.head) == Category::noun) {
          add(Functor::rel, "nn", {}, {member_[e.head], member_[e.dependent]}, {e.dependent});
        }
        break;
      case EdgeLabel::prep: {
        const auto h = ref(e.head);
        const auto d = ref(e.dependent);
        if (!h.empty() && !d.empty()) {
          add(Functor::rel, e.lemma, {}, {h, d}, {e.marker.value_or(e.dependent)});
        }
        break;
      }
      case EdgeLabel::cond:
        if (!event_[e.head].empty() && !event_[e.dependent].empty()) {
          add(Functor::if_, {}, {}, {event_[e.head], event_[e.dependent]}, {e.marker.value_or(e.dependent)});
        }
        break;
      case EdgeLabel::neg:
        if (!event_[e.head].empty()) add(Functor::not_, {}, {}, {event_[e.head]}, {e.dependent});
        break;
      default:
        break;
    }
  }

  void markScope(std::size_t node, bool followConj, std::vector<bool>& scoped) const {
    if (scoped[node]) return;
    scoped[node] = true;
    for (const Edge* e : p_.outgoing(node)) {
      if (!followConj && e->label == EdgeLabel::conj) continue;
      markScope(e->dependent, followConj, scoped);
    }
  }

  void emitHolds() {
    std::vector<bool> scoped(n_, false);
    for (const auto& e : p_.edges) {
      if (e.label == EdgeLabel::cond) {
        std::vector<bool> sub(n_, false);
        markScope(e.head, true, sub);
        for (std::size_t i = 0; i < n_; ++i) scoped[i] = scoped[i] || sub[i];
      } else if (e.label == EdgeLabel::neg) {
        std::vector<bool> sub(n_, false);
        markScope(e.head, false, sub);
        for (std::size_t i = 0; i < n_; ++i) scoped[i] = scoped[i] || sub[i];
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (!event_[i].empty() && !scoped[i]) add(Functor::holds, {}, {}, {event_[i]}, {i});
    }
  }

  const DependencyParse& p_;
  const TokenizedSentence& s_;
  const Lexicon& lex_;
  std::size_t n_;
  std::vector<std::string> member_, group_, event_;
  std::map<std::size_t, std::string> implicit_;
  std::vector<Fact> facts_;
  int x_ = 0, e_ = 0, o_ = 0, p_count_ = 0;
};

}  // namespace

LogicalForm translate(const DependencyParse& parse, const TokenizedSentence& sentence, const Lexicon& lexicon) {
  return Translator(parse, sentence, lexicon).run();
}

std::vector<Fact> deriveFacts(const DependencyParse& parse, const TokenizedSentence& sentence,
                              const Lexicon& lexicon) {
  return translate(parse, sentence, lexicon).facts;
}

// ---------------------------------------------------------------------------
// Goals

std::vector<std::string> Goal::variables() const {
  std::set<std::string> vars;
  for (const auto& c : conjuncts) {
    for (const auto& alt : c.alternatives) {
      for (const auto& a : alt.atoms) {
        for (const auto& v : a.args) {
          if (v != "_") vars.insert(v);
        }
        if (a.id != "_") vars.insert(a.id);
      }
    }
  }
  return {vars.begin(), vars.end()};
}

std::string toString(const AtomPattern& atom) {
  std::string out(toString(atom.functor));
  std::string args;
  appendList(args, atom.args);
  switch (atom.functor) {
    case Functor::object:
    case Functor::evt:
    case Functor::prop:
      return out + "(" + quoteLemma(atom.lemma) + "," + atom.id + "," + args + ")";
    case Functor::rel:
      return out + "(" + quoteLemma(atom.lemma) + "," + args + ")";
    default:
      return out + "(" + args + ")";
  }
}

std::string toString(const Goal& goal) {
  std::ostringstream out;
  for (std::size_t c = 0; c < goal.conjuncts.size(); ++c) {
    if (c) out << ", ";
    const auto& alts = goal.conjuncts[c].alternatives;
    if (alts.size() > 1) out << '(';
    for (std::size_t a = 0; a < alts.size(); ++a) {
      if (a) out << " ; ";
      for (std::size_t k = 0; k < alts[a].atoms.size(); ++k) {
        if (k) out << ", ";
        out << toString(alts[a].atoms[k]);
      }
    }
    if (alts.size() > 1) out << ')';
  }
  out << "  ?" << goal.answerVariable;
  return out.str();
}

namespace {

bool isSpeakerPronoun(std::string_view lower) {
  return lower == "i" || lower == "you" || lower == "we";
}

std::string variableFor(const std::string& id, const std::set<std::string>& wild) {
  if (id.empty() || wild.count(id)) return "_";
  std::string v = id;
  v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
  return v;
}

}  // namespace

Goal deriveGoal(const DependencyParse& questionParse, const TokenizedSentence& question, const Lexicon& lexicon,
                const Thesaurus& thesaurus, Expansion expansion) {
  const LogicalForm lf = translate(questionParse, question, lexicon);

  std::set<std::string> wild;
  for (const auto& [i, ent] : lf.entityOf) {
    if (questionParse.tags[i] == Category::pronoun && isSpeakerPronoun(toLower(question.tokens[i].surface))) {
      wild.insert(ent);
    }
  }
  auto var = [&](const std::string& id) { return variableFor(id, wild); };

  Goal goal;
  bool content = false;
  int fresh = 0;
  for (const auto& f : lf.facts) {
    if (f.functor == Functor::holds) continue;
    AtomPattern atom;
    atom.functor = f.functor;
    atom.lemma = f.lemma;
    for (const auto& a : f.args) atom.args.push_back(var(a));
    if (f.functor == Functor::evt) atom.id = var(f.id);

    Conjunct c;
    if (f.functor == Functor::object || f.functor == Functor::evt || f.functor == Functor::prop) {
      content = true;
      for (const auto& lemma : thesaurus.expand(f.lemma, expansion)) {
        AtomPattern alt = atom;
        alt.lemma = lemma;
        c.alternatives.push_back({{alt}});
      }
      if (f.functor == Functor::object && !isTransparentNoun(f.lemma)) {
        const std::string z = "Z" + std::to_string(++fresh);
        for (const auto& lemma : thesaurus.expand(f.lemma, expansion)) {
          Alternative part;
          part.atoms.push_back({Functor::object, "content", {atom.args[0]}, "_"});
          part.atoms.push_back({Functor::rel, "of", {atom.args[0], z}, "_"});
          part.atoms.push_back({Functor::object, lemma, {z}, "_"});
          c.alternatives.push_back(std::move(part));
        }
      }
    } else {
      c.alternatives.push_back({{atom}});
    }
    if (std::find(goal.conjuncts.begin(), goal.conjuncts.end(), c) == goal.conjuncts.end()) {
      goal.conjuncts.push_back(std::move(c));
    }
  }
  if (!content) throw EmptyGoal();

  std::string answer;
  if ((questionParse.mood == Mood::whSubject || questionParse.mood == Mood::whObject) && questionParse.whIndex) {
    auto it = lf.entityOf.find(*questionParse.whIndex);
    if (it != lf.entityOf.end()) answer = var(it->second);
  }
  if (answer.empty() || answer == "_") {
    auto ev = lf.eventOf.find(questionParse.root);
    if (ev != lf.eventOf.end()) {
      answer = var(ev->second);
    } else if (auto en = lf.entityOf.find(questionParse.root); en != lf.entityOf.end()) {
      answer = var(en->second);
    }
  }
  goal.answerVariable = answer;
  return goal;
}

}  // namespace manqa
