#include "manqa/parser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace manqa {

std::string_view toString(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::subj: return "subj";
    case EdgeLabel::obj: return "obj";
    case EdgeLabel::iobj: return "iobj";
    case EdgeLabel::amod: return "amod";
    case EdgeLabel::advmod: return "advmod";
    case EdgeLabel::prep: return "prep";
    case EdgeLabel::conj: return "conj";
    case EdgeLabel::cond: return "cond";
    case EdgeLabel::neg: return "neg";
    case EdgeLabel::rel: return "rel";
  }
  return "?";
}

bool isContent(Category c) {
  return c != Category::none && c != Category::function;
}

std::optional<std::size_t> DependencyParse::headOf(std::size_t token) const {
  if (const Edge* e = incoming(token)) return e->head;
  return std::nullopt;
}

const Edge* DependencyParse::incoming(std::size_t token) const {
  for (const auto& e : edges) {
    if (e.dependent == token) return &e;
  }
  return nullptr;
}

std::vector<const Edge*> DependencyParse::outgoing(std::size_t token) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges) {
    if (e.head == token) out.push_back(&e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Association model

AssociationModel AssociationModel::parse(std::istream& in) {
  AssociationModel model;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (f.size() != 6 || f[0] != "attach" || (f[1] != "verb" && f[1] != "noun")) {
      throw std::runtime_error("association model line " + std::to_string(lineNo) + " is malformed");
    }
    model.add(f[1] == "verb" ? Site::verb : Site::noun, f[2], f[3], f[4], std::stod(f[5]));
  }
  return model;
}

AssociationModel AssociationModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open association model " + path);
  return parse(in);
}

void AssociationModel::add(Site site, const std::string& head, const std::string& prep,
                           const std::string& /*object*/, double count) {
  marginal_[{site, head, prep}] += count;
}

double AssociationModel::count(Site site, const std::string& head, const std::string& prep) const {
  auto it = marginal_.find({site, head, prep});
  return it == marginal_.end() ? 0.0 : it->second;
}

double attachmentScore(double count) { return std::log(count + 0.5); }

// ---------------------------------------------------------------------------
// Grammar

namespace {

enum class Lex {
  noun, verb, adj, adv, pron, whPron, whDet, det, prep, conj, subord, neg, rel, whAdv, aux, auxNeg,
  cop, particle, comma,
};

struct Reading {
  Lex lex;
  Inflection infl = Inflection::base;
  bool plural = false;
  std::string lemma;
};

std::optional<Lex> lexFor(FunctionClass fc) {
  switch (fc) {
    case FunctionClass::determiner: return Lex::det;
    case FunctionClass::whDeterminer: return Lex::whDet;
    case FunctionClass::preposition: return Lex::prep;
    case FunctionClass::conjunction: return Lex::conj;
    case FunctionClass::subordinator: return Lex::subord;
    case FunctionClass::negation: return Lex::neg;
    case FunctionClass::relative: return Lex::rel;
    case FunctionClass::whAdverb: return Lex::whAdv;
    case FunctionClass::whPronoun: return Lex::whPron;
    case FunctionClass::auxiliary: return Lex::aux;
    case FunctionClass::auxiliaryNegated: return Lex::auxNeg;
    case FunctionClass::copula: return Lex::cop;
    case FunctionClass::pronoun: return Lex::pron;
    case FunctionClass::particle: return Lex::particle;
  }
  return std::nullopt;
}

std::vector<std::vector<Reading>> buildReadings(const TokenizedSentence& s, std::size_t n,
                                                const Lexicon& lex) {
  std::vector<std::vector<Reading>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    auto& r = out[i];
    switch (t.kind) {
      case TokenKind::punct:
        if (t.surface == ",") r.push_back({Lex::comma, Inflection::base, false, ","});
        break;
      case TokenKind::command:
      case TokenKind::varname:
      case TokenKind::path:
      case TokenKind::option:
      case TokenKind::number:
        r.push_back({Lex::noun, Inflection::base, false, factLemma(t)});
        break;
      case TokenKind::special:
        break;
      case TokenKind::word: {
        const auto a = lex.analyze(t.surface);
        const std::string lower = toLower(t.surface);
        for (auto fc : a.functionClasses) {
          if (auto l = lexFor(fc)) r.push_back({*l, Inflection::base, false, lower});
        }
        for (auto pos : a.openClasses) {
          switch (pos) {
            case PartOfSpeech::noun:
              if (a.inflection == Inflection::base || a.inflection == Inflection::s) {
                r.push_back({Lex::noun, a.inflection, a.inflection == Inflection::s, a.lemma});
              }
              break;
            case PartOfSpeech::verb:
              if (a.inflection != Inflection::ing) r.push_back({Lex::verb, a.inflection, false, a.lemma});
              break;
            case PartOfSpeech::adjective:
              if (a.inflection == Inflection::base) r.push_back({Lex::adj, a.inflection, false, a.lemma});
              break;
            case PartOfSpeech::adverb:
              if (a.inflection == Inflection::base) r.push_back({Lex::adv, a.inflection, false, a.lemma});
              break;
          }
        }
        if (a.openClasses.empty() && a.functionClasses.empty()) {
          if (lower.size() > 3 && lower.substr(lower.size() - 2) == "ly") {
            r.push_back({Lex::adv, Inflection::base, false, a.lemma});
          } else if (a.inflection == Inflection::base || a.inflection == Inflection::s) {
            r.push_back({Lex::noun, a.inflection, a.inflection == Inflection::s, a.lemma});
          }
        }
        break;
      }
    }
  }
  return out;
}

bool isNonThirdPronoun(std::string_view lower) {
  return lower == "i" || lower == "you" || lower == "we" || lower == "they";
}

struct State {
  std::size_t pos = 0;
  std::vector<Edge> edges;
  std::vector<Category> tags;
  std::optional<std::size_t> wh;
  Mood mood = Mood::declarative;
};

struct NPInfo {
  std::size_t head = 0;
  std::vector<std::size_t> frontier;
  bool plural = false;
  bool nonThird = false;
  bool wh = false;
  bool startsWithDet = false;
  bool pronoun = false;
};

struct Subject {
  bool plural = false;
  bool nonThird = false;
};

struct VPInfo {
  std::size_t root = 0;
  std::vector<std::size_t> frontier;
};

using NPk = std::function<void(State, const NPInfo&)>;
using VPk = std::function<void(State, const VPInfo&)>;
using Fk = std::function<void(State, const std::vector<std::size_t>&)>;
using Ck = std::function<void(State, std::size_t)>;

struct Abort {};

std::vector<std::size_t> concat(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

class Engine {
 public:
  Engine(const TokenizedSentence& sentence, std::size_t n, const Lexicon& lexicon, const ParserOptions& opts)
      : sentence_(sentence), n_(n), readings_(buildReadings(sentence, n, lexicon)), opts_(opts) {}

  std::vector<DependencyParse> run() {
    State s;
    s.tags.assign(sentence_.tokens.size(), Category::none);
    sentence(s);
    return std::move(results_);
  }

 private:
  static constexpr std::size_t kStepBudget = 400000;

  const Reading* get(std::size_t i, Lex l) const {
    if (i >= n_) return nullptr;
    for (const auto& r : readings_[i]) {
      if (r.lex == l) return &r;
    }
    return nullptr;
  }
  bool has(std::size_t i, Lex l) const { return get(i, l) != nullptr; }

  void tick() {
    if (++steps_ > kStepBudget) throw Abort{};
  }

  static void edge(State& s, EdgeLabel label, std::size_t head, std::size_t dep, std::string lemma = {},
                   std::optional<std::size_t> marker = std::nullopt) {
    s.edges.push_back({label, std::move(lemma), head, dep, marker});
  }

  // --- noun phrases -------------------------------------------------------

  void np(const State& s, bool allowWh, const NPk& k) {
    tick();
    const std::size_t i = s.pos;
    if (i >= n_) return;
    if (has(i, Lex::pron)) {
      State t = s;
      t.tags[i] = Category::pronoun;
      t.pos = i + 1;
      NPInfo info;
      info.head = i;
      info.frontier = {i};
      info.pronoun = true;
      info.nonThird = isNonThirdPronoun(get(i, Lex::pron)->lemma);
      info.plural = get(i, Lex::pron)->lemma == "they";
      k(t, info);
    }
    if (allowWh && has(i, Lex::whPron)) {
      State t = s;
      t.tags[i] = Category::whPronoun;
      t.pos = i + 1;
      t.wh = i;
      NPInfo info;
      info.head = i;
      info.frontier = {i};
      info.wh = true;
      info.pronoun = true;
      k(t, info);
    }
    nominal(s, i, false, false, k);
    if (has(i, Lex::det)) {
      State t = s;
      t.tags[i] = Category::function;
      nominal(t, i + 1, true, false, k);
    }
    if (allowWh && has(i, Lex::whDet)) {
      State t = s;
      t.tags[i] = Category::function;
      nominal(t, i + 1, true, true, k);
    }
  }

  void nominal(const State& s, std::size_t j, bool det, bool wh, const NPk& k) {
    tick();
    for (std::size_t m = j; m < n_; ++m) {
      if (m > j && !has(m - 1, Lex::adj)) break;
      for (std::size_t h = m; h < n_ && has(h, Lex::noun); ++h) {
        bool modifiersOk = true;
        for (std::size_t q = m; q < h; ++q) {
          const Reading* r = get(q, Lex::noun);
          if (r->plural) modifiersOk = false;
        }
        if (!modifiersOk) break;
        State t = s;
        for (std::size_t a = j; a < m; ++a) {
          t.tags[a] = Category::adjective;
          edge(t, EdgeLabel::amod, h, a);
        }
        for (std::size_t q = m; q < h; ++q) {
          t.tags[q] = Category::noun;
          edge(t, EdgeLabel::amod, h, q);
        }
        t.tags[h] = Category::noun;
        t.pos = h + 1;
        if (wh) t.wh = h;
        NPInfo info;
        info.head = h;
        info.frontier = {h};
        info.plural = get(h, Lex::noun)->plural;
        info.wh = wh;
        info.startsWithDet = det;
        k(t, info);
        if (has(h + 1, Lex::rel)) relative(t, info, k);
      }
      if (!has(m, Lex::adj)) break;
    }
  }

  void relative(const State& s, const NPInfo& info, const NPk& k) {
    State t = s;
    const std::size_t r = t.pos;
    t.tags[r] = Category::function;
    t.pos = r + 1;
    const std::string lemma = get(r, Lex::rel)->lemma;
    vp(t, Subject{info.plural, false}, false, false, false, [&](State u, const VPInfo& v) {
      edge(u, EdgeLabel::rel, info.head, v.root, lemma, r);
      NPInfo out = info;
      out.frontier = concat({info.head}, v.frontier);
      k(std::move(u), out);
    });
  }

  void npCoord(const State& s, bool allowWh, const NPk& k) {
    np(s, allowWh, [&](State t, const NPInfo& a) {
      k(t, a);
      coordTail(t, a, {}, k);
    });
  }

  void coordTail(const State& s, const NPInfo& a, const std::vector<std::size_t>& commaEdges, const NPk& k) {
    tick();
    const std::size_t p = s.pos;
    if (has(p, Lex::conj)) {
      State t = s;
      t.tags[p] = Category::function;
      t.pos = p + 1;
      const std::string lemma = get(p, Lex::conj)->lemma;
      np(t, false, [&](State u, const NPInfo& b) {
        if (b.wh) return;
        for (auto idx : commaEdges) u.edges[idx].lemma = lemma;
        edge(u, EdgeLabel::conj, a.head, b.head, lemma, p);
        NPInfo c = a;
        c.frontier = concat({a.head}, b.frontier);
        c.plural = lemma == "and" || b.plural;
        c.pronoun = false;
        k(std::move(u), c);
      });
    }
    if (has(p, Lex::comma)) {
      State t = s;
      t.tags[p] = Category::function;
      t.pos = p + 1;
      np(t, false, [&](State u, const NPInfo& b) {
        if (b.pronoun) return;
        auto pending = commaEdges;
        pending.push_back(u.edges.size());
        edge(u, EdgeLabel::conj, a.head, b.head, ",", p);
        NPInfo c = a;
        c.frontier = concat({a.head}, b.frontier);
        coordTail(u, c, pending, k);
      });
    }
  }

  // --- prepositional phrases ---------------------------------------------

  void ppTail(const State& s, const std::vector<std::size_t>& frontier, const Fk& k) {
    tick();
    k(s, frontier);
    const std::size_t p = s.pos;
    if (!has(p, Lex::prep)) return;
    State t = s;
    t.tags[p] = Category::function;
    t.pos = p + 1;
    const std::string lemma = get(p, Lex::prep)->lemma;
    npCoord(t, false, [&](State u, const NPInfo& o) {
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        State v = u;
        edge(v, EdgeLabel::prep, frontier[i], o.head, lemma, p);
        std::vector<std::size_t> next(frontier.begin(), frontier.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        next = concat(std::move(next), o.frontier);
        ppTail(v, next, k);
      }
    });
  }

  // --- verb phrases --------------------------------------------------------

  // finite: agreement with `subj`, auxiliaries and copula allowed.
  // base: bare infinitive after an auxiliary or in imperatives.
  void vp(const State& s, Subject subj, bool base, bool objectGap, bool tail, const VPk& k) {
    tick();
    const std::size_t i = s.pos;
    if (i >= n_) return;
    if (!base && !objectGap && has(i, Lex::cop)) copular(s, tail, k);
    if (!base && (has(i, Lex::aux) || has(i, Lex::auxNeg))) {
      State t = s;
      std::vector<std::size_t> negs;
      if (has(i, Lex::auxNeg)) {
        t.tags[i] = Category::negation;
        negs.push_back(i);
      } else {
        t.tags[i] = Category::function;
      }
      t.pos = i + 1;
      verbGroup(t, subj, true, negs, {}, objectGap, tail, k);
    }
    verbGroup(s, subj, base, {}, {}, objectGap, tail, k);
  }

  void verbGroup(const State& s, Subject subj, bool requireBase, const std::vector<std::size_t>& negs,
                 const std::vector<std::size_t>& advs, bool objectGap, bool tail, const VPk& k) {
    tick();
    const std::size_t i = s.pos;
    if (i >= n_) return;
    if (has(i, Lex::neg)) {
      State t = s;
      t.tags[i] = Category::negation;
      t.pos = i + 1;
      verbGroup(t, subj, requireBase, concat(negs, {i}), advs, objectGap, tail, k);
    }
    if (has(i, Lex::particle)) {
      State t = s;
      t.tags[i] = Category::function;
      t.pos = i + 1;
      verbGroup(t, subj, requireBase, negs, advs, objectGap, tail, k);
    }
    if (has(i, Lex::adv)) {
      State t = s;
      t.tags[i] = Category::adverb;
      t.pos = i + 1;
      verbGroup(t, subj, requireBase, negs, concat(advs, {i}), objectGap, tail, k);
    }
    const Reading* r = get(i, Lex::verb);
    if (r == nullptr) return;
    if (requireBase) {
      if (r->infl != Inflection::base) return;
    } else {
      if (r->infl == Inflection::s && (subj.plural || subj.nonThird)) return;
      if (r->infl == Inflection::base && !(subj.plural || subj.nonThird)) return;
    }
    State t = s;
    t.tags[i] = Category::verb;
    for (auto n : negs) edge(t, EdgeLabel::neg, i, n);
    for (auto a : advs) edge(t, EdgeLabel::advmod, i, a);
    t.pos = i + 1;
    complements(t, i, subj, requireBase, objectGap, tail, k);
  }

  void complements(const State& s, std::size_t verb, Subject subj, bool requireBase, bool objectGap, bool tail,
                   const VPk& k) {
    after(s, verb, {verb}, subj, requireBase, tail, k);
    if (objectGap) return;
    npCoord(s, false, [&](State u, const NPInfo& o) {
      if (o.wh) return;
      {
        State u1 = u;
        edge(u1, EdgeLabel::obj, verb, o.head);
        after(u1, verb, concat({verb}, o.frontier), subj, requireBase, tail, k);
      }
      if (o.pronoun) return;
      npCoord(u, false, [&](State w, const NPInfo& o2) {
        if (!o2.startsWithDet || o2.wh) return;
        edge(w, EdgeLabel::iobj, verb, o.head);
        edge(w, EdgeLabel::obj, verb, o2.head);
        after(w, verb, concat({verb}, o2.frontier), subj, requireBase, tail, k);
      });
    });
  }

  void after(const State& s, std::size_t verb, const std::vector<std::size_t>& frontier, Subject subj,
             bool requireBase, bool tail, const VPk& k) {
    if (!tail) {
      k(s, VPInfo{verb, frontier});
      return;
    }
    ppTail(s, frontier, [&](State u, const std::vector<std::size_t>& f) {
      finish(u, verb, f, subj, requireBase, k);
      if (has(u.pos, Lex::adv)) {
        State v = u;
        v.tags[u.pos] = Category::adverb;
        edge(v, EdgeLabel::advmod, verb, u.pos);
        v.pos = u.pos + 1;
        finish(v, verb, {verb}, subj, requireBase, k);
      }
    });
  }

  void finish(const State& s, std::size_t verb, const std::vector<std::size_t>& frontier, Subject subj,
              bool requireBase, const VPk& k) {
    k(s, VPInfo{verb, frontier});
    const std::size_t p = s.pos;
    if (!has(p, Lex::conj)) return;
    State t = s;
    t.tags[p] = Category::function;
    t.pos = p + 1;
    const std::string lemma = get(p, Lex::conj)->lemma;
    vp(t, subj, requireBase, false, true, [&](State u, const VPInfo& second) {
      if (u.tags[second.root] != Category::verb) return;
      edge(u, EdgeLabel::conj, verb, second.root, lemma, p);
      k(std::move(u), VPInfo{verb, second.frontier});
    });
  }

  void copular(const State& s, bool tail, const VPk& k) {
    State t = s;
    t.tags[s.pos] = Category::function;
    t.pos = s.pos + 1;
    if (has(t.pos, Lex::particle)) {
      t.tags[t.pos] = Category::function;
      ++t.pos;
    }
    auto predicate = [&](State u, std::size_t head, const std::vector<std::size_t>& frontier) {
      if (!tail) {
        k(std::move(u), VPInfo{head, frontier});
        return;
      }
      ppTail(u, frontier, [&](State v, const std::vector<std::size_t>& f) { k(std::move(v), VPInfo{head, f}); });
    };
    npCoord(t, false, [&](State u, const NPInfo& p) {
      if (p.pronoun || p.wh) return;
      predicate(std::move(u), p.head, p.frontier);
    });
    if (has(t.pos, Lex::adj)) {
      State u = t;
      u.tags[t.pos] = Category::adjective;
      u.pos = t.pos + 1;
      predicate(std::move(u), t.pos, {t.pos});
    }
  }

  // --- clauses -------------------------------------------------------------

  void clause(const State& s, bool allowWh, const Ck& k) {
    npCoord(s, allowWh, [&](State t, const NPInfo& subj) {
      ppTail(t, subj.frontier, [&](State u, const std::vector<std::size_t>&) {
        vp(u, Subject{subj.plural, subj.nonThird}, false, false, true, [&](State v, const VPInfo& vp) {
          edge(v, EdgeLabel::subj, vp.root, subj.head);
          v.mood = subj.wh ? Mood::whSubject : Mood::declarative;
          k(std::move(v), vp.root);
        });
      });
    });
  }

  void mainClause(const State& s, const Ck& k) {
    clause(s, opts_.questions, k);
    vp(s, Subject{}, true, false, true, [&](State v, const VPInfo& vp) {
      v.mood = Mood::imperative;
      k(std::move(v), vp.root);
    });
  }

  void sentence(const State& s) {
    if (has(0, Lex::subord)) {
      State t = s;
      t.tags[0] = Category::function;
      t.pos = 1;
      const std::string lemma = get(0, Lex::subord)->lemma;
      clause(t, false, [&](State u, std::size_t condRoot) {
        auto rest = [&](const State& w) {
          mainClause(w, [&](State x, std::size_t root) {
            edge(x, EdgeLabel::cond, root, condRoot, lemma, 0);
            complete(x, root);
          });
        };
        if (has(u.pos, Lex::comma)) {
          State w = u;
          w.tags[u.pos] = Category::function;
          w.pos = u.pos + 1;
          rest(w);
        }
        rest(u);
      });
    }
    mainClause(s, [&](State u, std::size_t root) {
      complete(u, root);
      auto trailing = [&](const State& w) {
        const std::size_t p = w.pos;
        if (!has(p, Lex::subord)) return;
        State x = w;
        x.tags[p] = Category::function;
        x.pos = p + 1;
        const std::string lemma = get(p, Lex::subord)->lemma;
        clause(x, false, [&](State y, std::size_t condRoot) {
          edge(y, EdgeLabel::cond, root, condRoot, lemma, p);
          complete(y, root);
        });
      };
      if (has(u.pos, Lex::comma)) {
        State w = u;
        w.tags[u.pos] = Category::function;
        w.pos = u.pos + 1;
        trailing(w);
      }
      trailing(u);
    });
    if (opts_.questions) questions(s);
  }

  void questions(const State& s) {
    // WH-NP AUX SUBJ V : "What does cp do?", "Which files does rm remove?"
    np(s, true, [&](State t, const NPInfo& wh) {
      if (!wh.wh) return;
      auxSubjectVerb(t, true, [&](State u, std::size_t root) {
        if (u.tags[root] != Category::verb) return;
        edge(u, EdgeLabel::obj, root, wh.head);
        u.mood = Mood::whObject;
        complete(u, root);
      });
    });
    // WH-ADV AUX SUBJ VP : "How can I create a directory?"
    if (has(0, Lex::whAdv)) {
      State t = s;
      t.tags[0] = Category::function;
      t.pos = 1;
      auxSubjectVerb(t, false, [&](State u, std::size_t root) {
        u.mood = Mood::whAdverb;
        complete(u, root);
      });
    }
    // AUX SUBJ VP : "Can cp copy directories?"
    auxSubjectVerb(s, false, [&](State u, std::size_t root) {
      u.mood = Mood::yesNo;
      complete(u, root);
    });
  }

  void auxSubjectVerb(const State& s, bool objectGap, const Ck& k) {
    const std::size_t a = s.pos;
    if (!has(a, Lex::aux)) return;
    State t = s;
    t.tags[a] = Category::function;
    t.pos = a + 1;
    npCoord(t, false, [&](State u, const NPInfo& subj) {
      if (subj.wh) return;
      vp(u, Subject{subj.plural, subj.nonThird}, true, objectGap, true, [&](State v, const VPInfo& vp) {
        edge(v, EdgeLabel::subj, vp.root, subj.head);
        k(std::move(v), vp.root);
      });
    });
  }

  // --- completion ----------------------------------------------------------

  bool isTree(const State& s, std::size_t root) const {
    std::vector<int> heads(s.tags.size(), 0);
    for (const auto& e : s.edges) {
      if (e.dependent >= heads.size() || !isContent(s.tags[e.dependent])) return false;
      ++heads[e.dependent];
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (!isContent(s.tags[i])) {
        if (s.tags[i] == Category::none) return false;
        continue;
      }
      const int expected = i == root ? 0 : 1;
      if (heads[i] != expected) return false;
    }
    return true;
  }

  void complete(State s, std::size_t root) {
    if (s.pos != n_) return;
    if (!isTree(s, root)) return;
    DependencyParse p;
    std::sort(s.edges.begin(), s.edges.end());
    p.edges = std::move(s.edges);
    p.root = root;
    p.tags = std::move(s.tags);
    p.mood = s.mood;
    p.whIndex = s.wh;
    for (const auto& existing : results_) {
      if (existing.edges == p.edges && existing.root == p.root) return;
    }
    results_.push_back(std::move(p));
    if (results_.size() > opts_.maxParses) throw Abort{};
  }

  const TokenizedSentence& sentence_;
  std::size_t n_;
  std::vector<std::vector<Reading>> readings_;
  const ParserOptions& opts_;
  std::vector<DependencyParse> results_;
  std::size_t steps_ = 0;
};

std::size_t contentEnd(const TokenizedSentence& s) {
  std::size_t n = s.tokens.size();
  while (n > 0) {
    const Token& t = s.tokens[n - 1];
    if (t.kind == TokenKind::punct && (t.surface == "." || t.surface == "?" || t.surface == "!")) {
      --n;
    } else {
      break;
    }
  }
  return n;
}

}  // namespace

KeywordBag keywordBag(const TokenizedSentence& sentence, const Lexicon& lexicon) {
  KeywordBag bag;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    for (auto& lemma : tokenKeywords(sentence.tokens[i], lexicon)) bag.lemmas.emplace_back(std::move(lemma), i);
  }
  return bag;
}

ParseForest Parser::parse(const TokenizedSentence& sentence) const {
  ParseForest forest;
  forest.sentence = sentence;
  const std::size_t n = contentEnd(sentence);
  if (n > 0) {
    Engine engine(sentence, n, *lexicon_, options_);
    try {
      forest.parses = engine.run();
    } catch (const Abort&) {
      forest.parses.clear();
      forest.capExceeded = true;
    }
  }
  if (forest.parses.empty()) forest.keywordFallback = keywordBag(sentence, *lexicon_);
  return forest;
}

// ---------------------------------------------------------------------------
// Filter rules

FilterRule ofAttachmentRule() {
  return {"of-attaches-to-preceding-noun", [](const DependencyParse& p, const TokenizedSentence&) {
            for (const auto& e : p.edges) {
              if (e.label != EdgeLabel::prep || e.lemma != "of" || !e.marker) continue;
              std::optional<std::size_t> preceding;
              for (std::size_t i = *e.marker; i-- > 0;) {
                if (p.tags[i] == Category::noun) {
                  preceding = i;
                  break;
                }
              }
              if (!preceding) return false;
              if (e.head == *preceding) continue;
              bool coordinated = false;
              for (const auto& c : p.edges) {
                if (c.label == EdgeLabel::conj && c.head == e.head && c.dependent == *preceding) coordinated = true;
              }
              if (!coordinated) return false;
            }
            return true;
          }};
}

std::vector<FilterRule> defaultFilterRules() { return {ofAttachmentRule()}; }

ParseForest applyFilterRules(ParseForest forest, const std::vector<FilterRule>& rules) {
  if (forest.parses.empty()) return forest;
  std::vector<DependencyParse> kept;
  for (const auto& p : forest.parses) {
    const bool ok = std::all_of(rules.begin(), rules.end(),
                                [&](const FilterRule& r) { return r.admits(p, forest.sentence); });
    if (ok) kept.push_back(p);
  }
  if (kept.empty()) {
    forest.filterFlagged = true;
  } else {
    forest.parses = std::move(kept);
  }
  return forest;
}

// ---------------------------------------------------------------------------
// PP disambiguation

ParseForest disambiguatePP(ParseForest forest, const AssociationModel& model) {
  if (model.empty() || forest.parses.size() < 2) return forest;
  std::set<std::size_t> markers;
  for (const auto& p : forest.parses) {
    for (const auto& e : p.edges) {
      if (e.label == EdgeLabel::prep && e.marker) markers.insert(*e.marker);
    }
  }
  const auto& tokens = forest.sentence.tokens;
  for (std::size_t marker : markers) {
    auto headFor = [&](const DependencyParse& p) -> std::optional<std::size_t> {
      for (const auto& e : p.edges) {
        if (e.label == EdgeLabel::prep && e.marker == marker) return e.head;
      }
      return std::nullopt;
    };
    std::map<std::size_t, double> scores;
    std::string prep;
    for (const auto& p : forest.parses) {
      auto h = headFor(p);
      if (!h || scores.count(*h) != 0) continue;
      for (const auto& e : p.edges) {
        if (e.label == EdgeLabel::prep && e.marker == marker) prep = e.lemma;
      }
      const auto site = p.tags[*h] == Category::verb ? AssociationModel::Site::verb : AssociationModel::Site::noun;
      scores[*h] = attachmentScore(model.count(site, factLemma(tokens[*h]), prep));
    }
    if (scores.size() < 2) continue;
    double best = -1e300;
    for (const auto& [h, sc] : scores) best = std::max(best, sc);
    std::vector<DependencyParse> kept;
    for (auto& p : forest.parses) {
      auto h = headFor(p);
      if (!h || best - scores[*h] <= 0.1) kept.push_back(std::move(p));
    }
    forest.parses = std::move(kept);
  }
  return forest;
}

}  // namespace manqa
