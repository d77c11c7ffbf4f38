#include "api_harness.h"

#include <atomic>
#include <random>

#include "riskx/common/error.h"

namespace riskx::testing {
namespace {

std::filesystem::path FreshDirectory() {
  static std::atomic<int> counter{0};
  std::random_device entropy;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("riskx_api_" + std::to_string(entropy()) + "_" +
       std::to_string(counter++));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

ApiHarness::ApiHarness(HarnessOptions options)
    : options_(std::move(options)), dir_(FreshDirectory()) {
  api::ServerConfig config;
  config.model_path = options_.model_path;
  config.data_dir = dir_.string();
  config.ui_origin = options_.ui_origin;
  config.narrate.default_mode = options_.default_mode;
  config.completion_client = options_.client;
  config.narrative_timeout = options_.narrative_timeout;
  bundle_ = api::BuildService(config);
}

ApiHarness::~ApiHarness() {
  if (server_) server_->Stop();
  if (listener_.joinable()) listener_.join();
  std::error_code ignored;
  std::filesystem::remove_all(dir_, ignored);
}

int ApiHarness::StartHttp() {
  if (server_) return port_;
  server_ = std::make_unique<api::HttpServer>(bundle_.service,
                                              options_.ui_origin);
  port_ = server_->Bind("127.0.0.1", 0);
  if (port_ < 0) throw Error(ErrorCode::kIoError, "cannot bind loopback");
  listener_ = std::thread([this] { server_->ListenAfterBind(); });
  server_->WaitUntilReady();
  return port_;
}

httplib::Client ApiHarness::Client() {
  httplib::Client client("127.0.0.1", StartHttp());
  client.set_read_timeout(30, 0);
  return client;
}

api::ApiResponse ApiHarness::Call(const std::string& method,
                                  const std::string& path,
                                  const std::string& body,
                                  const std::string& user) const {
  api::ApiRequest request;
  request.method = method;
  const std::size_t query = path.find('?');
  request.path = path.substr(0, query);
  if (query != std::string::npos) {
    const std::string text = path.substr(query + 1);
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('&', start);
      if (end == std::string::npos) end = text.size();
      const std::string pair = text.substr(start, end - start);
      const std::size_t eq = pair.find('=');
      if (!pair.empty()) {
        request.query.emplace(pair.substr(0, eq),
                              eq == std::string::npos ? "" : pair.substr(eq + 1));
      }
      start = end + 1;
    }
  }
  request.user_id = user;
  request.body = body;
  return bundle_.service->Handle(request);
}

nlohmann::json ReferenceRecordJson() {
  return {{"age", 52},          {"sex", 1},
          {"bmi", 24.7},        {"fasting_glucose", 104},
          {"systolic_bp", 131}, {"family_history", 1},
          {"physical_activity", 60}, {"smoking", 1}};
}

}  // namespace riskx::testing
