#include "manqa/docmodel.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "manqa/lexicon.hpp"

namespace manqa {

Face SectionText::faceAt(std::size_t offset) const {
  auto it = std::upper_bound(faces.begin(), faces.end(), offset,
                             [](std::size_t off, const FaceSpan& s) { return off < s.end; });
  if (it == faces.end() || offset < it->start) return Face::plain;
  return it->face;
}

SectionText SectionText::plain(std::string text) {
  SectionText s;
  s.text = std::move(text);
  if (!s.text.empty()) s.faces.push_back({0, s.text.size(), Face::plain});
  return s;
}

const Section* ManPage::find(std::string_view sectionName) const {
  for (const auto& s : sections) {
    if (s.name == sectionName) return &s;
  }
  return nullptr;
}

bool Registry::isCommand(std::string_view word) const {
  return commands.find(std::string(word)) != commands.end();
}

bool Registry::isArgument(std::string_view word) const {
  return argumentNames.find(toLower(word)) != argumentNames.end();
}

void Registry::merge(const Registry& other) {
  commands.insert(other.commands.begin(), other.commands.end());
  argumentNames.insert(other.argumentNames.begin(), other.argumentNames.end());
}

namespace {

class BodyBuilder {
 public:
  void append(std::string_view text, Face face) {
    if (text.empty()) return;
    const std::size_t start = body_.text.size();
    body_.text.append(text);
    auto& runs = body_.faces;
    if (!runs.empty() && runs.back().face == face && runs.back().end == start) {
      runs.back().end = body_.text.size();
    } else {
      runs.push_back({start, body_.text.size(), face});
    }
  }

  void newline() {
    if (!body_.text.empty() && body_.text.back() != '\n') append("\n", Face::plain);
  }

  void paragraph() {
    if (body_.text.empty()) return;
    if (body_.text.size() >= 2 && body_.text.compare(body_.text.size() - 2, 2, "\n\n") == 0) {
      return;
    }
    newline();
    append("\n", Face::plain);
  }

  SectionText finish() {
    auto& t = body_.text;
    std::size_t end = t.size();
    while (end > 0 && std::isspace(static_cast<unsigned char>(t[end - 1]))) --end;
    t.resize(end);
    auto& runs = body_.faces;
    while (!runs.empty() && runs.back().start >= end) runs.pop_back();
    if (!runs.empty()) runs.back().end = std::min(runs.back().end, end);
    return std::move(body_);
  }

 private:
  SectionText body_;
};

// Expands escapes and inline font changes of one text line.
void appendInline(BodyBuilder& out, std::string_view line, Face& current, Face& previous) {
  std::string pending;
  auto flush = [&] {
    out.append(pending, current);
    pending.clear();
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c != '\\' || i + 1 >= line.size()) {
      pending.push_back(c);
      continue;
    }
    const char n = line[++i];
    switch (n) {
      case 'f': {
        if (i + 1 >= line.size()) break;
        const char f = line[++i];
        flush();
        Face next = current;
        if (f == 'B') next = Face::bold;
        else if (f == 'I') next = Face::italic;
        else if (f == 'R') next = Face::plain;
        else if (f == 'P') next = previous;
        previous = current;
        current = next;
        break;
      }
      case '-': pending.push_back('-'); break;
      case 'e':
      case '\\': pending.push_back('\\'); break;
      case '&':
      case '|':
      case '^': break;
      case ' ': pending.push_back(' '); break;
      case '"': i = line.size(); break;  // comment to end of line
      case '(': {
        // two-character glyph names; only dashes and bullets matter here
        const std::string_view glyph = line.substr(i + 1, 2);
        i += std::min<std::size_t>(2, line.size() - i - 1);
        if (glyph == "em" || glyph == "en" || glyph == "mi" || glyph == "hy") pending.push_back('-');
        else if (glyph == "bu") pending.push_back('*');
        break;
      }
      default: pending.push_back(n); break;
    }
  }
  flush();
}

std::vector<std::string> macroArguments(std::string_view rest) {
  std::vector<std::string> args;
  std::size_t i = 0;
  while (i < rest.size()) {
    while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t')) ++i;
    if (i >= rest.size()) break;
    std::string arg;
    if (rest[i] == '"') {
      ++i;
      while (i < rest.size() && rest[i] != '"') arg.push_back(rest[i++]);
      ++i;
    } else {
      while (i < rest.size() && rest[i] != ' ' && rest[i] != '\t') arg.push_back(rest[i++]);
    }
    args.push_back(std::move(arg));
  }
  return args;
}

bool isParagraphMacro(std::string_view m) {
  return m == "PP" || m == "LP" || m == "P" || m == "TP" || m == "IP" || m == "sp" || m == "SS" ||
         m == "HP";
}

Face faceFor(char c) {
  if (c == 'B') return Face::bold;
  if (c == 'I') return Face::italic;
  return Face::plain;
}

}  // namespace

ManPage parseManPage(std::string_view source, const std::string& sourcePath) {
  ManPage page;
  page.sourcePath = sourcePath;

  bool inSection = false;
  std::string sectionName;
  BodyBuilder body;
  Face current = Face::plain;
  Face previous = Face::plain;

  auto closeSection = [&] {
    if (!inSection) return;
    page.sections.push_back({sectionName, body.finish()});
    body = BodyBuilder{};
    current = previous = Face::plain;
  };

  std::istringstream in{std::string(source)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(".\\\"", 0) == 0 || line.rfind("'\\\"", 0) == 0) continue;
    if (!line.empty() && (line[0] == '.' || line[0] == '\'')) {
      std::string_view rest(line);
      rest.remove_prefix(1);
      const auto nameEnd = rest.find_first_of(" \t");
      const std::string macro(rest.substr(0, nameEnd));
      const std::string_view argText =
          nameEnd == std::string_view::npos ? std::string_view{} : rest.substr(nameEnd + 1);
      const auto args = macroArguments(argText);

      if (macro == "TH") {
        if (!args.empty()) {
          page.name = toLower(args[0]);
          if (args.size() > 1) page.name += "." + args[1];
        }
        continue;
      }
      if (macro == "SH") {
        closeSection();
        inSection = true;
        std::string name;
        for (const auto& a : args) {
          if (!name.empty()) name += ' ';
          name += a;
        }
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
        sectionName = name;
        continue;
      }
      if (!inSection) continue;
      if (isParagraphMacro(macro)) {
        body.paragraph();
        if (macro == "SS" || macro == "TP" || macro == "IP") {
          // headings and tags keep their text as a paragraph of their own
          if (macro == "SS" && !args.empty()) {
            std::string heading;
            for (const auto& a : args) heading += (heading.empty() ? "" : " ") + a;
            appendInline(body, heading, current, previous);
            body.paragraph();
          }
        }
        continue;
      }
      if (macro == "br") {
        body.newline();
        continue;
      }
      if (macro == "B" || macro == "I") {
        Face f = faceFor(macro[0]);
        std::string joined;
        for (const auto& a : args) joined += (joined.empty() ? "" : " ") + a;
        Face saved = current;
        current = f;
        appendInline(body, joined, current, previous);
        current = saved;
        body.newline();
        continue;
      }
      if (macro.size() == 2 && std::string_view("BIR").find(macro[0]) != std::string_view::npos &&
          std::string_view("BIR").find(macro[1]) != std::string_view::npos && macro[0] != macro[1]) {
        Face saved = current;
        for (std::size_t k = 0; k < args.size(); ++k) {
          current = faceFor(macro[k % 2]);
          appendInline(body, args[k], current, previous);
        }
        current = saved;
        body.newline();
        continue;
      }
      // unsupported macro: keep its arguments as plain text
      if (!argText.empty()) {
        Face saved = current;
        current = Face::plain;
        appendInline(body, argText, current, previous);
        current = saved;
        body.newline();
      }
      continue;
    }
    if (!inSection) continue;
    if (line.find_first_not_of(" \t") == std::string::npos) {
      body.paragraph();
      continue;
    }
    appendInline(body, line, current, previous);
    body.newline();
  }
  closeSection();

  if (page.sections.empty()) {
    throw MalformedSource("no section macro found" +
                          (sourcePath.empty() ? std::string{} : " in " + sourcePath));
  }
  if (page.name.empty() && !sourcePath.empty()) {
    page.name = std::filesystem::path(sourcePath).filename().string();
  }
  return page;
}

ManPage loadManPage(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseManPage(buf.str(), path.string());
}

namespace {

bool allFace(const SectionText& s, std::size_t b, std::size_t e, Face f) {
  for (std::size_t i = b; i < e; ++i) {
    if (s.faceAt(i) != f) return false;
  }
  return b < e;
}

}  // namespace

Registry buildRegistries(const ManPage& page) {
  Registry reg;
  if (const Section* name = page.find("NAME")) {
    std::string_view text = name->body.text;
    auto dash = text.find(" - ");
    if (dash == std::string_view::npos) dash = text.find(" -- ");
    std::string_view head = text.substr(0, dash);
    std::size_t i = 0;
    while (i < head.size()) {
      auto comma = head.find(',', i);
      if (comma == std::string_view::npos) comma = head.size();
      std::string word(head.substr(i, comma - i));
      word.erase(0, word.find_first_not_of(" \t\n"));
      word.erase(word.find_last_not_of(" \t\n") + 1);
      if (!word.empty() && word.find_first_of(" \t\n") == std::string::npos) {
        reg.commands.insert(word);
      }
      i = comma + 1;
    }
  }
  if (const Section* syn = page.find("SYNOPSIS")) {
    const auto& body = syn->body;
    const std::string& t = body.text;
    std::size_t i = 0;
    constexpr std::string_view kTrim = "[]{}|.,;";
    while (i < t.size()) {
      while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
      std::size_t j = i;
      while (j < t.size() && !std::isspace(static_cast<unsigned char>(t[j]))) ++j;
      std::size_t b = i, e = j;
      while (b < e && kTrim.find(t[b]) != std::string_view::npos) ++b;
      while (e > b && kTrim.find(t[e - 1]) != std::string_view::npos) --e;
      if (b < e && std::isalnum(static_cast<unsigned char>(t[b]))) {
        const std::string word = t.substr(b, e - b);
        if (allFace(body, b, e, Face::bold)) reg.commands.insert(word);
        else if (allFace(body, b, e, Face::italic)) reg.argumentNames.insert(toLower(word));
      }
      i = j;
    }
  }
  return reg;
}

Registry parseRegistryOverrides(std::istream& in) {
  Registry reg;
  std::string line;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty() || line[0] == '#') continue;
    std::string value = line.size() > 4 ? line.substr(4) : std::string{};
    value.erase(0, value.find_first_not_of(" \t"));
    if (value.empty()) throw std::runtime_error("override line without a name -> " + line);
    if (line.rfind("cmd:", 0) == 0) {
      reg.commands.insert(value);
    } else if (line.rfind("arg:", 0) == 0) {
      reg.argumentNames.insert(toLower(value));
    } else {
      throw std::runtime_error("override line must start with cmd: or arg: -> " + line);
    }
  }
  return reg;
}

}  // namespace manqa
