#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "manqa/kb.hpp"
#include "manqa/queryengine.hpp"

namespace manqa {

struct HighlightedWord {
  std::string surface;
  std::size_t intensity = 0;
};

struct HighlightedSentence {
  std::string sentenceId;
  std::vector<HighlightedWord> words;
  std::size_t maxIntensity = 0;
};

class UnknownPage : public std::runtime_error {
 public:
  explicit UnknownPage(const std::string& name) : std::runtime_error("unknown page " + name) {}
};

/// intensity(w) = number of proofs whose covered words include w.
HighlightedSentence computeIntensities(const QueryResult& result, const KnowledgeBase& kb);

/// ceil(intensity * k / maxIntensity); 0 stays 0.
std::size_t bucketFor(std::size_t intensity, std::size_t maxIntensity, std::size_t k);
std::vector<std::size_t> buckets(const HighlightedSentence& h, std::size_t k);

/// Words joined by single spaces; highlighted words get a grey-ramp
/// background, brighter for higher buckets.
std::string renderTerminal(const HighlightedSentence& h, std::size_t k = 4, bool color = true);

struct HighlightSpan {
  std::size_t start = 0;  // byte offsets into the section text
  std::size_t end = 0;
  std::size_t intensity = 0;
  std::string sentenceId;
};

struct SentenceAnchor {
  std::string sentenceId;
  std::size_t start = 0;
  std::size_t end = 0;
};

struct SectionView {
  std::string name;
  std::string text;
  std::vector<SentenceAnchor> sentences;
  std::vector<HighlightSpan> highlights;
};

struct PageView {
  std::string name;
  std::vector<SectionView> sections;
};

PageView renderPage(const std::string& pageName, const std::vector<QueryResult>& results, const KnowledgeBase& kb);

/// {question, goal, level, results:[{sentenceId, page, level, words, score, proofCount}]}
nlohmann::json toJson(const Answer& answer, const KnowledgeBase& kb);
nlohmann::json toJson(const PageView& view);

}  // namespace manqa
