#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>
#include "riskx/common/error.h"
#include "riskx/model/feature_schema.h"
#include "riskx/model/tree_ensemble.h"
#include "riskx/narrate/generator.h"
#include "riskx/store/store.h"

namespace riskx::api {

struct ApiRequest {
  std::string method;  // "GET", "POST", ...
  std::string path;
  std::multimap<std::string, std::string> query;
  std::string user_id = "local";  // From the X-User header.
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// "UncontrollableFeature" -> "UNCONTROLLABLE_FEATURE".
std::string EnvelopeCode(ErrorCode code);

// {"code", "message", "field_path"}.
ApiResponse ErrorResponse(int status, std::string code, std::string message,
                          std::string field_path = "");

struct ServiceOptions {
  std::string version = "1.0.0";
  std::string model_checksum;
  narrate::NarrativeMode default_narrative_mode =
      narrate::NarrativeMode::kTemplate;
  // How long /v1/explain waits for the narrative branch before answering
  // with template cards.
  std::chrono::milliseconds narrative_timeout{25000};
};

// Transport-independent request handling for every /v1 endpoint. All members
// are immutable after construction except the store, which serializes its
// own writes, so Handle() may be called from many threads at once.
class Service {
 public:
  Service(std::shared_ptr<const model::TreeEnsemble> ensemble,
          const model::FeatureSchema& schema,
          std::shared_ptr<const narrate::NarrativeGenerator> generator,
          std::shared_ptr<store::Store> store, ServiceOptions options);

  // Routes by method and path. Unknown paths give 404 and known paths with
  // the wrong method 405, both with the error envelope.
  ApiResponse Handle(const ApiRequest& request) const;

  ApiResponse Health() const;
  ApiResponse Schema() const;
  ApiResponse Estimate(std::string_view body) const;
  ApiResponse Explain(std::string_view body) const;
  ApiResponse Logs(const std::string& user_id, std::string_view body) const;
  ApiResponse Simulate(const std::string& user_id, std::string_view body) const;
  ApiResponse History(const std::string& user_id,
                      const std::optional<std::string>& days) const;

 private:
  std::shared_ptr<const model::TreeEnsemble> ensemble_;
  const model::FeatureSchema& schema_;
  std::shared_ptr<const narrate::NarrativeGenerator> generator_;
  std::shared_ptr<store::Store> store_;
  ServiceOptions options_;
};

}  // namespace riskx::api
