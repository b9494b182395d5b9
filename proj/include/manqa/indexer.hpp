#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "manqa/docmodel.hpp"
#include "manqa/kb.hpp"
#include "manqa/lexicon.hpp"
#include "manqa/parser.hpp"

namespace manqa {

struct IndexSummary {
  std::size_t pages = 0;
  std::size_t sentences = 0;
  std::size_t facts = 0;
  std::size_t failures = 0;
  /// Sentences stored as keyword bags only.
  std::size_t unparsed = 0;
  std::vector<std::string> errors;
};

struct IndexInputs {
  const Lexicon* lexicon = nullptr;
  Thesaurus thesaurus;
  AssociationModel model;
  Registry overrides;
};

class Indexer {
 public:
  explicit Indexer(IndexInputs inputs);

  /// Adds one page; sentences of every section except SYNOPSIS are stored.
  void addPage(const ManPage& page);
  /// Parses and adds a file; malformed files are counted, not thrown.
  bool addFile(const std::filesystem::path& path);
  /// Every regular file of `dir`, in name order.
  void addDirectory(const std::filesystem::path& dir);

  const IndexSummary& summary() const { return summary_; }
  KnowledgeBase& kb() { return kb_; }
  KnowledgeBase take() { return std::move(kb_); }

 private:
  IndexInputs in_;
  KnowledgeBase kb_;
  IndexSummary summary_;
};

/// Man pages in `dir`, sorted by file name.
std::vector<std::filesystem::path> corpusFiles(const std::filesystem::path& dir);

}  // namespace manqa
