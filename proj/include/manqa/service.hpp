#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "manqa/kb.hpp"
#include "manqa/lexicon.hpp"
#include "manqa/queryengine.hpp"

namespace httplib {
class Server;
}

namespace manqa {

struct ServiceResponse {
  int status = 200;
  std::string contentType = "application/json";
  std::string body;
};

/// Request handling independent of the transport.
class Service {
 public:
  Service(const KnowledgeBase& kb, const Lexicon& lexicon, CascadeConfig defaults = {});

  ServiceResponse query(const std::string& requestBody) const;
  ServiceResponse pages() const;
  ServiceResponse page(const std::string& name, const std::string& question) const;

  /// Structured record for a question, as printed by `query --json`.
  nlohmann::json record(const std::string& question, const CascadeConfig& config) const;

  const CascadeConfig& defaults() const { return defaults_; }

 private:
  const KnowledgeBase& kb_;
  QueryEngine engine_;
  CascadeConfig defaults_;
};

class HttpServer {
 public:
  HttpServer(const Service& service, std::optional<std::filesystem::path> staticDir = std::nullopt);
  ~HttpServer();

  /// Binds to host:port (port 0 picks a free one) and returns the port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  const Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace manqa
