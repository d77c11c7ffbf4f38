#include "riskx/narrate/completion_client.h"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include "riskx/common/error.h"

namespace riskx::narrate {

HttpCompletionClient::HttpCompletionClient(CompletionConfig config)
    : config_(std::move(config)) {}

std::string HttpCompletionClient::Complete(const PromptDocument& prompt) {
  const std::string& url = config_.base_url;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "completion base URL needs a scheme: " + url);
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  std::string path =
      path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  path += "/chat/completions";

  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", 0},
      {"max_tokens", config_.max_tokens},
      {"response_format", {{"type", "json_object"}}},
      {"messages",
       {{{"role", "system"}, {"content", prompt.system_text}},
        {{"role", "user"}, {"content", prompt.user_text}}}}};

  const httplib::Result result =
      client.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    throw Error(ErrorCode::kIoError,
                "completion request failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kIoError, "completion endpoint returned HTTP " +
                                         std::to_string(result->status));
  }
  const nlohmann::json reply =
      nlohmann::json::parse(result->body, nullptr, /*allow_exceptions=*/false);
  const nlohmann::json::json_pointer content_path("/choices/0/message/content");
  if (reply.is_discarded() || !reply.contains(content_path) ||
      !reply[content_path].is_string()) {
    throw Error(ErrorCode::kMalformedDocument,
                "completion reply has no choices[0].message.content");
  }
  return reply[content_path].get<std::string>();
}

}  // namespace riskx::narrate
