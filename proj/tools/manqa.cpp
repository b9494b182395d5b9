#include <unistd.h>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "manqa/indexer.hpp"
#include "manqa/kb.hpp"
#include "manqa/logform.hpp"
#include "manqa/presenter.hpp"
#include "manqa/queryengine.hpp"
#include "manqa/service.hpp"

namespace fs = std::filesystem;
using namespace manqa;

namespace {

struct Options {
  std::string dataDir;
  // index
  std::string corpus;
  std::string out;
  std::string thesaurus;
  std::string model;
  std::string overrides;
  // query
  std::string kbPath;
  std::string question;
  bool json = false;
  std::size_t minHits = 1;
  std::string maxLevel = "L3";
  std::string forcedLevel;
  std::size_t palette = 4;
  bool noColor = false;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string staticDir;
  // inspect
  std::string file;
};

fs::path dataDir(const Options& o) { return o.dataDir.empty() ? Lexicon::defaultDataDir() : fs::path(o.dataDir); }

CascadeConfig cascade(const Options& o) {
  CascadeConfig c;
  c.minHits = o.minHits;
  c.maxLevel = parseLevel(o.maxLevel);
  if (!o.forcedLevel.empty()) c.forcedLevel = parseLevel(o.forcedLevel);
  return c;
}

int runIndex(const Options& o) {
  const fs::path data = dataDir(o);
  const Lexicon lexicon = Lexicon::load(data);
  IndexInputs in;
  in.lexicon = &lexicon;
  const fs::path thes = o.thesaurus.empty() ? data / "thesaurus.txt" : fs::path(o.thesaurus);
  if (!o.thesaurus.empty() || fs::exists(thes)) in.thesaurus = Thesaurus::load(thes);
  const fs::path model = o.model.empty() ? data / "association.txt" : fs::path(o.model);
  if (!o.model.empty() || fs::exists(model)) in.model = AssociationModel::load(model.string());
  if (!o.overrides.empty()) {
    std::ifstream f(o.overrides);
    if (!f) throw std::runtime_error("cannot open overrides " + o.overrides);
    in.overrides = parseRegistryOverrides(f);
  }
  if (!fs::is_directory(o.corpus)) throw std::runtime_error("corpus directory " + o.corpus + " not found");

  Indexer indexer(std::move(in));
  indexer.addDirectory(o.corpus);
  for (const auto& e : indexer.summary().errors) std::cerr << "warning: " << e << '\n';
  indexer.kb().save(fs::path(o.out));
  const auto& s = indexer.summary();
  std::cout << "pages=" << s.pages << " sentences=" << s.sentences << " facts=" << s.facts
            << " unparsed=" << s.unparsed << " failures=" << s.failures << '\n';
  return 0;
}

std::optional<KnowledgeBase> openKb(const std::string& path) {
  if (!fs::exists(path)) {
    std::cerr << "error: knowledge base " << path << " does not exist\n";
    return std::nullopt;
  }
  return KnowledgeBase::load(fs::path(path));
}

int printAnswer(const QueryEngine& engine, const KnowledgeBase& kb, const std::string& question, const Options& o) {
  const CascadeConfig config = cascade(o);
  Answer ans;
  try {
    ans = engine.answer(question, config);
  } catch (const EmptyGoal& e) {
    if (o.json) {
      std::cout << nlohmann::json{{"question", question}, {"level", "none"}, {"results", nlohmann::json::array()}}.dump(2)
                << '\n';
    } else {
      std::cout << "no answer: " << e.what() << '\n';
    }
    return 1;
  }
  if (o.json) {
    std::cout << toJson(ans, kb).dump(2) << '\n';
  } else {
    const bool color = !o.noColor && isatty(STDOUT_FILENO);
    if (ans.results.empty()) std::cout << "no answer\n";
    for (const auto& r : ans.results) {
      const auto h = computeIntensities(r, kb);
      std::cout << '[' << toString(r.level) << "] " << r.sentenceId << "  " << renderTerminal(h, o.palette, color)
                << '\n';
    }
  }
  return ans.results.empty() ? 1 : 0;
}

int runQuery(const Options& o) {
  auto kb = openKb(o.kbPath);
  if (!kb) return 2;
  const Lexicon lexicon = Lexicon::load(dataDir(o));
  const QueryEngine engine(*kb, lexicon);
  return printAnswer(engine, *kb, o.question, o);
}

int runRepl(const Options& o) {
  auto kb = openKb(o.kbPath);
  if (!kb) return 2;
  const Lexicon lexicon = Lexicon::load(dataDir(o));
  const QueryEngine engine(*kb, lexicon);
  std::string line;
  while (true) {
    std::cout << "? " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == "quit" || line == "exit") break;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    printAnswer(engine, *kb, line, o);
  }
  return 0;
}

HttpServer* g_server = nullptr;

int runServe(const Options& o) {
  auto kb = openKb(o.kbPath);
  if (!kb) return 2;
  const Lexicon lexicon = Lexicon::load(dataDir(o));
  const Service service(*kb, lexicon, cascade(o));
  std::optional<fs::path> staticDir;
  if (!o.staticDir.empty()) staticDir = o.staticDir;
  HttpServer server(service, staticDir);
  const int port = server.bind(o.host, o.port);
  if (port < 0) {
    std::cerr << "error: cannot bind " << o.host << ':' << o.port << '\n';
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "listening on http://" << o.host << ':' << port << '\n' << std::flush;
  server.listen();
  return 0;
}

int runInspect(const Options& o) {
  const Lexicon lexicon = Lexicon::load(dataDir(o));
  const ManPage page = loadManPage(o.file);
  const Registry registry = buildRegistries(page);
  const Tokenizer tokenizer(lexicon);
  const Parser parser(lexicon);
  AssociationModel model;
  const fs::path modelPath = o.model.empty() ? dataDir(o) / "association.txt" : fs::path(o.model);
  if (fs::exists(modelPath)) model = AssociationModel::load(modelPath.string());
  std::cout << "page " << page.name << '\n';
  for (const auto& c : registry.commands) std::cout << "cmd " << c << '\n';
  for (const auto& a : registry.argumentNames) std::cout << "arg " << a << '\n';
  for (const auto& section : page.sections) {
    if (section.name == "SYNOPSIS") continue;
    for (const auto& s : tokenizer.tokenize(section.body, registry, page.name + "/" + section.name)) {
      std::cout << "\n== " << s.sentenceId << '\n';
      for (const auto& t : s.tokens) std::cout << "  " << dumpToken(t) << '\n';
      const auto forest = disambiguatePP(applyFilterRules(parser.parse(s)), model);
      if (!forest.parsed()) {
        std::cout << "  keywords:";
        for (const auto& [l, i] : keywordBag(s, lexicon).lemmas) std::cout << ' ' << l;
        std::cout << (forest.capExceeded ? " (parse cap exceeded)" : "") << '\n';
        continue;
      }
      for (std::size_t k = 0; k < forest.parses.size(); ++k) {
        std::cout << "  -- interpretation " << k + 1 << '\n';
        for (const auto& e : forest.parses[k].edges) {
          std::cout << "    " << toString(e.label) << (e.lemma.empty() ? "" : "(" + e.lemma + ")") << ' '
                    << s.tokens[e.head].surface << " -> " << s.tokens[e.dependent].surface << '\n';
        }
        for (const auto& f : deriveFacts(forest.parses[k], s, lexicon)) std::cout << "    " << dumpFact(f) << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"manqa: answer extraction over Unix manual pages"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);
  Options o;
  app.add_option("--data-dir", o.dataDir, "Directory with lexicon, lemma and argument-type tables");

  auto* idx = app.add_subcommand("index", "Index a directory of man pages into a knowledge base");
  idx->add_option("--corpus", o.corpus, "Corpus directory")->required();
  idx->add_option("--out", o.out, "Knowledge base file to write")->required();
  idx->add_option("--thesaurus", o.thesaurus, "Thesaurus file");
  idx->add_option("--model", o.model, "PP association counts");
  idx->add_option("--overrides", o.overrides, "Registry override file (cmd:/arg: lines)");

  auto addQueryFlags = [&](CLI::App* c) {
    c->add_flag("--json", o.json, "Print the structured result record");
    c->add_option("--min-hits", o.minHits, "Answers needed before the cascade stops")->check(CLI::PositiveNumber);
    c->add_option("--max-level", o.maxLevel, "Last cascade level (L0..L3)");
    c->add_option("--forced-level", o.forcedLevel, "Start the cascade at this level");
    c->add_option("--palette", o.palette, "Number of highlight shades")->check(CLI::Range(2, 23));
    c->add_flag("--no-color", o.noColor, "Plain text output");
  };

  auto* query = app.add_subcommand("query", "Answer one question");
  query->add_option("kb", o.kbPath, "Knowledge base file")->required();
  query->add_option("question", o.question, "Question in English")->required();
  addQueryFlags(query);

  auto* repl = app.add_subcommand("repl", "Interactive question loop");
  repl->add_option("kb", o.kbPath, "Knowledge base file")->required();
  addQueryFlags(repl);

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("kb", o.kbPath, "Knowledge base file")->required();
  serve->add_option("--port", o.port, "Port (0 picks a free port)");
  serve->add_option("--host", o.host, "Address to bind");
  serve->add_option("--static", o.staticDir, "Directory with UI assets served at /");
  serve->add_option("--min-hits", o.minHits)->check(CLI::PositiveNumber);
  serve->add_option("--max-level", o.maxLevel);

  auto* inspect = app.add_subcommand("inspect", "Show tokens, parses and facts of one man page");
  inspect->add_option("file", o.file, "Man page source")->required()->check(CLI::ExistingFile);
  inspect->add_option("--model", o.model, "PP association counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*idx) return runIndex(o);
    if (*query) return runQuery(o);
    if (*repl) return runRepl(o);
    if (*serve) return runServe(o);
    if (*inspect) return runInspect(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
