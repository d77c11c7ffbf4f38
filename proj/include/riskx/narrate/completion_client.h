#pragma once

#include <string>

#include "riskx/narrate/prompt.h"

namespace riskx::narrate {

// Remote chat-completion endpoint. Implementations throw riskx::Error on any
// transport or protocol failure and return the raw assistant text otherwise.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string Complete(const PromptDocument& prompt) = 0;
};

struct CompletionConfig {
  std::string base_url;  // "https://api.example.com/v1"; empty = not set.
  std::string api_key;
  std::string model = "gpt-4o";
  int timeout_seconds = 10;
  int max_tokens = 1500;
};

// OpenAI-style POST {base_url}/chat/completions with temperature 0.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(CompletionConfig config);
  std::string Complete(const PromptDocument& prompt) override;

 private:
  CompletionConfig config_;
};

}  // namespace riskx::narrate
