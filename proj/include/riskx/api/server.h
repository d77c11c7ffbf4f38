#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "riskx/api/service.h"
#include "riskx/narrate/completion_client.h"
#include "riskx/narrate/generator.h"

namespace httplib {
class Server;
}

namespace riskx::api {

struct ServerConfig {
  std::string model_path;
  // CSV of reference rows for global importance. Empty means a synthetic
  // cohort of 500 rows.
  std::string reference_path;
  std::string data_dir = "riskx-data";
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string ui_origin = "*";
  narrate::NarrateConfig narrate;
  // Used instead of an HTTP client built from narrate.completion when set.
  std::shared_ptr<narrate::CompletionClient> completion_client;
  std::chrono::milliseconds narrative_timeout{25000};
};

// Fills port from PORT, ui_origin from UI_ORIGIN, data_dir from
// RISKX_DATA_DIR and narrate from the NARRATE_* variables. Fields left
// unset in the environment keep their current values.
void ApplyEnvironment(ServerConfig& config);

// Everything the service needs, loaded from `config`. The model checksum is
// the SHA-256 of the model file bytes.
struct ServiceBundle {
  std::shared_ptr<const model::TreeEnsemble> ensemble;
  std::shared_ptr<const narrate::NarrativeGenerator> generator;
  std::shared_ptr<store::Store> store;
  std::shared_ptr<const Service> service;
};
ServiceBundle BuildService(const ServerConfig& config);

// HTTP transport over Service. Every request, whatever its method or path,
// goes to Service::Handle, except CORS preflight which is answered with 204.
class HttpServer {
 public:
  HttpServer(std::shared_ptr<const Service> service, std::string ui_origin);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port, or -1 on failure. Port 0 picks a free one.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  std::shared_ptr<const Service> service_;
  std::string ui_origin_;
  std::unique_ptr<httplib::Server> server_;
};

// Builds the service from `config` and serves until the process is stopped.
// Returns a process exit code.
int Serve(const ServerConfig& config);

}  // namespace riskx::api
