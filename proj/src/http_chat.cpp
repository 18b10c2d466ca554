#include "findbench/http_chat.hpp"

#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace findbench {

void RateLimiter::acquire() {
  if (rps_ <= 0.0) return;
  while (true) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      tokens_ += rps_ * std::chrono::duration<double>(now - last_).count();
      last_ = now;
      if (tokens_ > rps_) tokens_ = rps_;  // burst cap of one second
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

HttpChatClient::HttpChatClient(std::string endpoint_url, std::string model,
                               std::string credential_env, double temperature,
                               RateLimiter* limiter)
    : model_(std::move(model)), credential_env_(std::move(credential_env)),
      temperature_(temperature), limiter_(limiter) {
  std::string url = endpoint_url;
  const std::string http = "http://";
  const std::string https = "https://";
  if (url.rfind(https, 0) == 0) {
    throw std::runtime_error("https endpoints need a TLS build; use an http proxy URL");
  }
  if (url.rfind(http, 0) == 0) url = url.substr(http.size());
  const auto slash = url.find('/');
  std::string hostport = slash == std::string::npos ? url : url.substr(0, slash);
  path_ = slash == std::string::npos ? "/v1/chat/completions" : url.substr(slash);
  const auto colon = hostport.find(':');
  if (colon == std::string::npos) {
    host_ = hostport;
    port_ = 80;
  } else {
    host_ = hostport.substr(0, colon);
    port_ = std::stoi(hostport.substr(colon + 1));
  }
}

std::optional<std::string> HttpChatClient::complete(const std::vector<ChatMessage>& messages,
                                                    std::string* error) {
  nlohmann::json body;
  body["model"] = model_;
  body["temperature"] = temperature_;
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = msgs;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!credential_env_.empty()) {
    if (const char* key = std::getenv(credential_env_.c_str()))
      headers.insert({"Authorization", std::string("Bearer ") + key});
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(50 * (1 << attempt)));
    if (limiter_) limiter_->acquire();
    httplib::Client client(host_, port_);
    client.set_read_timeout(120, 0);
    const auto res = client.Post(path_.c_str(), headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed";
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      last_error = std::string("bad response body: ") + e.what();
    }
  }
  if (error) *error = last_error;
  return std::nullopt;
}

}  // namespace findbench
