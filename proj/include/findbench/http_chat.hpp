#pragma once

#include <chrono>
#include <mutex>

#include "findbench/agent.hpp"

namespace findbench {

// Token-bucket limiter: at most `rps` requests started per second,
// shared across concurrent dialogues.
class RateLimiter {
 public:
  explicit RateLimiter(double rps) : rps_(rps), tokens_(rps > 0 ? 1.0 : 0.0),
                                     last_(std::chrono::steady_clock::now()) {}

  // Blocks until a token is available (no-op when unlimited).
  void acquire();

 private:
  double rps_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

// Chat-completion client for OpenAI-style endpoints: POSTs
// {model, messages, temperature} and reads choices[0].message.content.
// The credential comes from the environment variable named in the
// config; requests retry 3 times with backoff before giving up.
class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(std::string endpoint_url, std::string model, std::string credential_env,
                 double temperature, RateLimiter* limiter = nullptr);

  std::optional<std::string> complete(const std::vector<ChatMessage>& messages,
                                      std::string* error) override;

 private:
  std::string host_;
  int port_ = 80;
  std::string path_;
  std::string model_;
  std::string credential_env_;
  double temperature_;
  RateLimiter* limiter_;
};

}  // namespace findbench
