#include "manqa/presenter.hpp"

#include <algorithm>
#include <stdexcept>

namespace manqa {

HighlightedSentence computeIntensities(const QueryResult& result, const KnowledgeBase& kb) {
  HighlightedSentence h;
  h.sentenceId = result.sentenceId;
  const SentenceRecord* s = kb.sentence(result.sentenceId);
  if (s == nullptr) return h;
  for (const auto& t : s->tokens) h.words.push_back({t.surface, 0});
  for (const auto& p : result.proofs) {
    for (auto w : p.coveredWords) {
      if (w < h.words.size()) ++h.words[w].intensity;
    }
  }
  for (const auto& w : h.words) h.maxIntensity = std::max(h.maxIntensity, w.intensity);
  return h;
}

std::size_t bucketFor(std::size_t intensity, std::size_t maxIntensity, std::size_t k) {
  if (intensity == 0 || maxIntensity == 0) return 0;
  return (intensity * k + maxIntensity - 1) / maxIntensity;
}

std::vector<std::size_t> buckets(const HighlightedSentence& h, std::size_t k) {
  std::vector<std::size_t> out;
  for (const auto& w : h.words) out.push_back(bucketFor(w.intensity, h.maxIntensity, k));
  return out;
}

namespace {

bool attachesLeft(const std::string& s) {
  return s == "," || s == "." || s == ";" || s == ":" || s == "?" || s == "!" || s == ")" || s == "]";
}

}  // namespace

std::string renderTerminal(const HighlightedSentence& h, std::size_t k, bool color) {
  if (k < 2 || k > 23) throw std::invalid_argument("palette size must be between 2 and 23");
  const auto b = buckets(h, k);
  std::string out;
  for (std::size_t i = 0; i < h.words.size(); ++i) {
    const auto& w = h.words[i];
    if (i > 0 && !attachesLeft(w.surface)) out += ' ';
    if (!color || b[i] == 0) {
      out += w.surface;
      continue;
    }
    const std::size_t shade = 232 + (b[i] * 23 + k - 1) / k;
    out += "\x1b[48;5;" + std::to_string(shade) + "m";
    out += shade >= 244 ? "\x1b[30m" : "\x1b[97m";
    out += w.surface;
    out += "\x1b[0m";
  }
  return out;
}

PageView renderPage(const std::string& pageName, const std::vector<QueryResult>& results, const KnowledgeBase& kb) {
  const PageRecord* page = kb.page(pageName);
  if (page == nullptr) throw UnknownPage(pageName);
  PageView view;
  view.name = page->name;
  const auto sentences = kb.sentencesOfPage(pageName);
  for (const auto& [secName, text] : page->sections) {
    SectionView sec;
    sec.name = secName;
    sec.text = text;
    for (const auto* s : sentences) {
      if (s->section != secName || s->tokens.empty()) continue;
      sec.sentences.push_back({s->id, s->tokens.front().span.start, s->tokens.back().span.end});
      for (const auto& r : results) {
        if (r.sentenceId != s->id) continue;
        const auto h = computeIntensities(r, kb);
        for (std::size_t i = 0; i < h.words.size() && i < s->tokens.size(); ++i) {
          if (h.words[i].intensity == 0) continue;
          sec.highlights.push_back({s->tokens[i].span.start, s->tokens[i].span.end, h.words[i].intensity, s->id});
        }
      }
    }
    view.sections.push_back(std::move(sec));
  }
  return view;
}

nlohmann::json toJson(const Answer& answer, const KnowledgeBase& kb) {
  using nlohmann::json;
  json results = json::array();
  for (const auto& r : answer.results) {
    const auto h = computeIntensities(r, kb);
    json words = json::array();
    for (const auto& w : h.words) words.push_back({{"surface", w.surface}, {"intensity", w.intensity}});
    const SentenceRecord* s = kb.sentence(r.sentenceId);
    results.push_back({{"sentenceId", r.sentenceId},
                       {"page", s ? s->page : std::string{}},
                       {"level", std::string(toString(r.level))},
                       {"words", std::move(words)},
                       {"score", r.score},
                       {"proofCount", r.proofs.size()}});
  }
  json out = {{"question", answer.question}, {"level", std::string(toString(answer.level))}, {"results", results}};
  out["goal"] = answer.goal ? json(toString(*answer.goal)) : json(nullptr);
  return out;
}

nlohmann::json toJson(const PageView& view) {
  using nlohmann::json;
  json sections = json::array();
  for (const auto& s : view.sections) {
    json anchors = json::array();
    for (const auto& a : s.sentences) anchors.push_back({{"sentenceId", a.sentenceId}, {"start", a.start}, {"end", a.end}});
    json spans = json::array();
    for (const auto& h : s.highlights) {
      spans.push_back({{"sentenceId", h.sentenceId}, {"start", h.start}, {"end", h.end}, {"intensity", h.intensity}});
    }
    sections.push_back({{"name", s.name}, {"text", s.text}, {"sentences", anchors}, {"highlights", spans}});
  }
  return {{"name", view.name}, {"sections", sections}};
}

}  // namespace manqa
