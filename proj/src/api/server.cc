#include "riskx/api/server.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "riskx/common/checksum.h"
#include "riskx/model/dataset.h"
#include "riskx/model/synthetic.h"
#include "riskx/narrate/completion_client.h"
#include "riskx/narrate/knowledge_base.h"
#include "riskx/narrate/lexicon.h"
#include "riskx/narrate/prompt.h"

namespace riskx::api {
namespace {

constexpr std::size_t kMaxPayloadBytes = 1 << 20;
constexpr std::size_t kSyntheticReferenceRows = 500;
constexpr std::uint64_t kSyntheticReferenceSeed = 7;

std::string Env(const char* name) {
  const char* value = std::getenv(name);
  return value ? value : "";
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

void ApplyEnvironment(ServerConfig& config) {
  if (const std::string port = Env("PORT"); !port.empty()) {
    try {
      config.port = std::stoi(port);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "PORT must be an integer", "PORT");
    }
  }
  if (const std::string origin = Env("UI_ORIGIN"); !origin.empty()) {
    config.ui_origin = origin;
  }
  if (const std::string dir = Env("RISKX_DATA_DIR"); !dir.empty()) {
    config.data_dir = dir;
  }
  config.narrate = narrate::NarrateConfigFromEnv();
}

ServiceBundle BuildService(const ServerConfig& config) {
  const model::FeatureSchema& schema = model::DefaultSchema();
  const std::string bytes = ReadFile(config.model_path);
  ServiceBundle bundle;
  bundle.ensemble = std::make_shared<const model::TreeEnsemble>(
      model::LoadModel(bytes, schema));

  const std::vector<model::PatientRecord> reference =
      config.reference_path.empty()
          ? model::MakeSyntheticCohort(kSyntheticReferenceRows,
                                       kSyntheticReferenceSeed)
                .rows
          : model::LoadDatasetCsv(config.reference_path, schema,
                                  /*require_label=*/false)
                .rows;
  narrate::KnowledgeBase kb = narrate::BuildKnowledgeBase(
      schema, narrate::ComputeGlobalImportance(*bundle.ensemble, reference));
  std::vector<narrate::FewShotExample> few_shots =
      narrate::DefaultFewShots(schema, kb);
  std::shared_ptr<narrate::CompletionClient> client = config.completion_client;
  if (!client && !config.narrate.completion.base_url.empty()) {
    client = std::make_shared<narrate::HttpCompletionClient>(
        config.narrate.completion);
  }
  narrate::DirectionLexicon lexicon =
      config.narrate.lexicon_path.empty()
          ? narrate::DefaultLexicon()
          : narrate::LoadLexiconFile(config.narrate.lexicon_path);
  bundle.generator = std::make_shared<const narrate::NarrativeGenerator>(
      std::move(kb), std::move(few_shots), std::move(client),
      std::move(lexicon));
  bundle.store = std::make_shared<store::Store>(config.data_dir, schema);

  ServiceOptions options;
  options.model_checksum = Sha256Hex(bytes);
  options.default_narrative_mode = config.narrate.default_mode;
  options.narrative_timeout = config.narrative_timeout;
  bundle.service = std::make_shared<const Service>(
      bundle.ensemble, schema, bundle.generator, bundle.store, options);
  return bundle;
}

HttpServer::HttpServer(std::shared_ptr<const Service> service,
                       std::string ui_origin)
    : service_(std::move(service)),
      ui_origin_(std::move(ui_origin)),
      server_(std::make_unique<httplib::Server>()) {
  server_->set_payload_max_length(kMaxPayloadBytes);
  server_->set_default_headers({
      {"Access-Control-Allow-Origin", ui_origin_},
      {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
      {"Access-Control-Allow-Headers", "Content-Type, X-User"},
      {"Vary", "Origin"},
  });
  // Catch-all handlers rather than a pre-routing hook: httplib reads the
  // request body only after pre-routing.
  const auto dispatch = [this](const httplib::Request& req,
                               httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    request.query.insert(req.params.begin(), req.params.end());
    if (req.has_header("X-User")) {
      request.user_id = req.get_header_value("X-User");
    }
    request.body = req.body;
    const ApiResponse response = service_->Handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json");
  };
  constexpr char kAnyPath[] = R"(/.*)";
  server_->Get(kAnyPath, dispatch);
  server_->Post(kAnyPath, dispatch);
  server_->Put(kAnyPath, dispatch);
  server_->Patch(kAnyPath, dispatch);
  server_->Delete(kAnyPath, dispatch);
  server_->Options(kAnyPath,
                   [](const httplib::Request&, httplib::Response& res) {
                     res.status = 204;
                   });
  // Transport-level failures such as an oversized body still get the
  // envelope.
  server_->set_error_handler(
      [](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const std::string code = res.status == 413 ? "PAYLOAD_TOO_LARGE"
                                                   : "HTTP_" + std::to_string(res.status);
        res.set_content(
            ErrorResponse(res.status, code, httplib::status_message(res.status))
                .body.dump(),
            "application/json");
      });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::ListenAfterBind() { return server_->listen_after_bind(); }

void HttpServer::Stop() {
  if (server_->is_running()) server_->stop();
}

void HttpServer::WaitUntilReady() const { server_->wait_until_ready(); }

int Serve(const ServerConfig& config) {
  const ServiceBundle bundle = BuildService(config);
  HttpServer server(bundle.service, config.ui_origin);
  const int port = server.Bind(config.host, config.port);
  if (port < 0) {
    std::cerr << "cannot bind " << config.host << ":" << config.port << "\n";
    return 2;
  }
  std::clog << "riskx listening on " << config.host << ":" << port << "\n";
  return server.ListenAfterBind() ? 0 : 2;
}

}  // namespace riskx::api
