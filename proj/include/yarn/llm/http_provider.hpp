#pragma once

// OpenAI-compatible chat-completions backend. Include only where cpp-httplib
// (and, for https endpoints, OpenSSL) is linked.

#include <chrono>
#include <string>

#include "httplib.h"
#include "yarn/llm/gateway.hpp"

namespace yarn::llm {

struct HttpProviderOptions {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{120};
};

class HttpProvider final : public Provider {
 public:
  explicit HttpProvider(HttpProviderOptions opts) : opts_(std::move(opts)) {
    if (opts_.base_url.empty()) throw ConfigError("chat endpoint URL is empty");
    if (opts_.model.empty()) throw ConfigError("chat model id is empty");
  }

  std::string complete(const ChatRequest& req) override {
    httplib::Client cli(opts_.base_url);
    cli.set_connection_timeout(std::chrono::seconds(10));
    cli.set_read_timeout(opts_.timeout);
    httplib::Headers headers;
    if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);

    json body{{"model", opts_.model},
              {"temperature", req.temperature},
              {"max_tokens", req.max_tokens},
              {"messages",
               json::array({json{{"role", "system"}, {"content", req.system_prompt}},
                            json{{"role", "user"}, {"content", req.user_prompt}}})}};
    auto res = cli.Post(opts_.path, headers, body.dump(), "application/json");
    if (!res) throw TransportError(opts_.base_url + ": " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
      throw TransportError(opts_.base_url + ": HTTP " + std::to_string(res->status));
    if (res->status != 200)
      throw ProviderUnavailable(opts_.base_url + ": HTTP " + std::to_string(res->status) + " " + res->body);
    auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty())
      throw TransportError(opts_.base_url + ": malformed completion response");
    const auto& msg = j["choices"][0]["message"];
    if (!msg.contains("content") || !msg["content"].is_string())
      throw TransportError(opts_.base_url + ": completion without text content");
    return msg["content"].get<std::string>();
  }

  std::string name() const override { return "http(" + opts_.base_url + ")"; }

 private:
  HttpProviderOptions opts_;
};

}  // namespace yarn::llm
