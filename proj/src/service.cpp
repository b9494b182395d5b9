#include "manqa/service.hpp"

#include "httplib.h"
#include "manqa/presenter.hpp"

namespace manqa {

namespace {

constexpr const char* kIndexHtml = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>manqa</title>
<style>
body{font-family:sans-serif;max-width:60em;margin:2em auto}
.hit{margin:.4em 0}.sid{font-family:monospace;margin-right:.6em}
.b1{background:#eee}.b2{background:#ccc}.b3{background:#999}.b4{background:#555;color:#fff}
</style></head><body>
<form id="f"><input id="q" size="60" placeholder="How can I create a directory?"> <button>Ask</button></form>
<div id="out"></div>
<script>
const out=document.getElementById('out');
document.getElementById('f').onsubmit=async e=>{
  e.preventDefault();
  const q=document.getElementById('q').value.trim();
  if(!q)return;
  const r=await fetch('/api/query',{method:'POST',body:JSON.stringify({question:q})});
  if(!r.ok){out.textContent='error '+r.status;return;}
  const rec=await r.json();
  out.innerHTML='';
  for(const h of rec.results){
    const max=Math.max(1,...h.words.map(w=>w.intensity));
    const d=document.createElement('div');d.className='hit';
    const a=document.createElement('a');a.className='sid';a.textContent=h.sentenceId;
    a.href='/api/pages/'+encodeURIComponent(h.page)+'?q='+encodeURIComponent(q);d.appendChild(a);
    for(const w of h.words){
      const s=document.createElement('span');
      const b=w.intensity?Math.ceil(w.intensity*4/max):0;
      if(b)s.className='b'+b;
      s.title=w.intensity;s.textContent=w.surface+' ';d.appendChild(s);
    }
    out.appendChild(d);
  }
};
</script></body></html>
)";

ServiceResponse jsonResponse(int status, const nlohmann::json& j) {
  return {status, "application/json", j.dump()};
}

ServiceResponse error(int status, const std::string& message) {
  return jsonResponse(status, {{"error", message}});
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

Service::Service(const KnowledgeBase& kb, const Lexicon& lexicon, CascadeConfig defaults)
    : kb_(kb), engine_(kb, lexicon), defaults_(defaults) {}

nlohmann::json Service::record(const std::string& question, const CascadeConfig& config) const {
  try {
    return toJson(engine_.answer(question, config), kb_);
  } catch (const EmptyGoal&) {
    return {{"question", question}, {"level", "none"}, {"results", nlohmann::json::array()}};
  }
}

ServiceResponse Service::query(const std::string& requestBody) const {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(requestBody);
  } catch (const nlohmann::json::exception&) {
    return error(400, "request body must be JSON");
  }
  if (!req.is_object() || !req.contains("question") || !req["question"].is_string()) {
    return error(400, "missing question");
  }
  const std::string question = trimmed(req["question"].get<std::string>());
  if (question.empty()) return error(400, "empty question");
  CascadeConfig config = defaults_;
  try {
    if (req.contains("minHits")) {
      const auto n = req["minHits"].get<long long>();
      if (n < 1) return error(400, "minHits must be at least 1");
      config.minHits = static_cast<std::size_t>(n);
    }
    if (req.contains("forcedLevel") && !req["forcedLevel"].is_null()) {
      config.forcedLevel = parseLevel(req["forcedLevel"].get<std::string>());
    }
    if (req.contains("maxLevel")) config.maxLevel = parseLevel(req["maxLevel"].get<std::string>());
  } catch (const std::exception& e) {
    return error(400, e.what());
  }
  return jsonResponse(200, record(question, config));
}

ServiceResponse Service::pages() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& name : kb_.pageNames()) list.push_back(name);
  return jsonResponse(200, list);
}

ServiceResponse Service::page(const std::string& name, const std::string& question) const {
  if (kb_.page(name) == nullptr) return error(404, "unknown page " + name);
  std::vector<QueryResult> results;
  const std::string q = trimmed(question);
  if (!q.empty()) {
    try {
      results = engine_.answer(q, defaults_).results;
    } catch (const EmptyGoal&) {
    }
  }
  auto view = toJson(renderPage(name, results, kb_));
  view["question"] = q;
  return jsonResponse(200, view);
}

// ---------------------------------------------------------------------------

HttpServer::HttpServer(const Service& service, std::optional<std::filesystem::path> staticDir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.contentType);
  };
  server_->Post("/api/query", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.query(req.body));
  });
  server_->Get("/api/pages", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, service_.pages());
  });
  server_->Get(R"(/api/pages/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    const std::string q = req.has_param("q") ? req.get_param_value("q") : std::string{};
    send(res, service_.page(req.matches[1].str(), q));
  });
  if (staticDir) {
    server_->set_mount_point("/", staticDir->string());
  } else {
    server_->Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kIndexHtml, "text/html; charset=utf-8");
    });
  }
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

}  // namespace manqa
