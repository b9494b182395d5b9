#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace manqa {

enum class Face { plain, bold, italic };

struct FaceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  Face face = Face::plain;

  bool operator==(const FaceSpan&) const = default;
};

/// Section body plus contiguous face runs covering every byte.
struct SectionText {
  std::string text;
  std::vector<FaceSpan> faces;

  Face faceAt(std::size_t offset) const;
  static SectionText plain(std::string text);
};

struct Section {
  std::string name;
  SectionText body;
};

struct ManPage {
  std::string name;
  std::vector<Section> sections;
  std::string sourcePath;

  const Section* find(std::string_view sectionName) const;
};

class MalformedSource : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command and argument names harvested from NAME and SYNOPSIS.
/// Commands match case-sensitively; argument names are stored lowercased
/// and match case-insensitively.
struct Registry {
  std::set<std::string> commands;
  std::set<std::string> argumentNames;

  bool isCommand(std::string_view word) const;
  bool isArgument(std::string_view word) const;
  void merge(const Registry& other);
  bool empty() const { return commands.empty() && argumentNames.empty(); }

  bool operator==(const Registry&) const = default;
};

/// Parses the supported troff subset: .TH, .SH, .SS, .B, .I, .BR, .RB,
/// .IR, .RI, .BI, .IB, paragraph macros (.PP .LP .P .TP .IP .sp .br),
/// comments, and the inline faces \fB \fI \fR \fP. Any other macro is
/// dropped and the rest of its line kept as plain text.
ManPage parseManPage(std::string_view source, const std::string& sourcePath = {});
ManPage loadManPage(const std::filesystem::path& path);

Registry buildRegistries(const ManPage& page);

/// Override file: one name per line, prefixed `cmd:` or `arg:`.
Registry parseRegistryOverrides(std::istream& in);

}  // namespace manqa
