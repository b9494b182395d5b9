#include "manqa/indexer.hpp"

#include <algorithm>

#include "manqa/logform.hpp"
#include "manqa/tokenizer.hpp"

namespace manqa {

Indexer::Indexer(IndexInputs inputs) : in_(std::move(inputs)) {
  if (in_.lexicon == nullptr) throw std::invalid_argument("indexer needs a lexicon");
  kb_.thesaurus() = in_.thesaurus;
  kb_.registry().merge(in_.overrides);
}

void Indexer::addPage(const ManPage& page) {
  Registry registry = buildRegistries(page);
  registry.merge(in_.overrides);
  kb_.registry().merge(registry);

  const Tokenizer tokenizer(*in_.lexicon);
  const Parser parser(*in_.lexicon);

  PageRecord rec;
  rec.name = page.name;
  rec.sourcePath = page.sourcePath;
  for (const auto& s : page.sections) rec.sections.emplace_back(s.name, s.body.text);
  kb_.addPage(std::move(rec));
  ++summary_.pages;

  for (const auto& section : page.sections) {
    if (section.name == "SYNOPSIS") continue;
    const auto sentences = tokenizer.tokenize(section.body, registry, page.name + "/" + section.name);
    for (const auto& sentence : sentences) {
      auto forest = disambiguatePP(applyFilterRules(parser.parse(sentence)), in_.model);

      SentenceRecord sr;
      sr.id = sentence.sentenceId;
      sr.page = page.name;
      sr.section = section.name;
      const auto start = sentence.tokens.front().span.start;
      sr.text = section.body.text.substr(start, sentence.tokens.back().span.end - start);
      sr.tokens = sentence.tokens;
      sr.keywords = keywordBag(sentence, *in_.lexicon);
      sr.fallback = !forest.parsed();
      kb_.addSentence(std::move(sr));
      ++summary_.sentences;

      if (!forest.parsed()) {
        ++summary_.unparsed;
        continue;
      }
      for (std::size_t k = 0; k < forest.parses.size(); ++k) {
        const auto facts = deriveFacts(forest.parses[k], sentence, *in_.lexicon);
        kb_.assertSentence(sentence.sentenceId, facts, k + 1);
        summary_.facts += facts.size();
      }
    }
  }
}

bool Indexer::addFile(const std::filesystem::path& path) {
  try {
    addPage(loadManPage(path));
    return true;
  } catch (const std::exception& e) {
    ++summary_.failures;
    summary_.errors.push_back(path.filename().string() + ": " + e.what());
    return false;
  }
}

void Indexer::addDirectory(const std::filesystem::path& dir) {
  for (const auto& f : corpusFiles(dir)) addFile(f);
}

std::vector<std::filesystem::path> corpusFiles(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace manqa
