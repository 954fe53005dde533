#pragma once

// Remote embedding endpoint: POST {"model", "input": [texts]} and read back
// {"data": [{"embedding": [...]}, ...]} (the OpenAI embeddings shape).

#include <chrono>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "yarn/embedding/backends.hpp"

namespace yarn::embedding {

struct RemoteBackendOptions {
  std::string base_url;
  std::string path = "/v1/embeddings";
  std::string model = kDefaultModelId;
  std::string api_key;
  std::chrono::seconds timeout{60};
};

class RemoteBackend final : public EmbeddingBackend {
 public:
  explicit RemoteBackend(RemoteBackendOptions opts) : opts_(std::move(opts)) {
    if (opts_.base_url.empty()) throw ConfigError("embedding endpoint URL is empty");
  }

  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override {
    httplib::Client cli(opts_.base_url);
    cli.set_connection_timeout(std::chrono::seconds(10));
    cli.set_read_timeout(opts_.timeout);
    httplib::Headers headers;
    if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);
    nlohmann::json body{{"model", opts_.model}, {"input", texts}};
    auto res = cli.Post(opts_.path, headers, body.dump(), "application/json");
    if (!res) throw BackendTransportError(opts_.base_url + ": " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
      throw BackendTransportError(opts_.base_url + ": HTTP " + std::to_string(res->status));
    if (res->status != 200)
      throw EmbeddingUnavailable(opts_.base_url + ": HTTP " + std::to_string(res->status));
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("data") || !j["data"].is_array())
      throw EmbeddingUnavailable(opts_.base_url + ": malformed embedding response");
    std::vector<Vector> out;
    for (const auto& d : j["data"]) {
      if (!d.is_object() || !d.contains("embedding") || !d["embedding"].is_array())
        throw EmbeddingUnavailable(opts_.base_url + ": embedding entry without a vector");
      out.emplace_back(d["embedding"].get<std::vector<double>>());
    }
    if (out.size() != texts.size())
      throw EmbeddingUnavailable(opts_.base_url + ": expected " + std::to_string(texts.size()) + " vectors, got " +
                                 std::to_string(out.size()));
    return out;
  }

  std::string model_id() const override { return opts_.model; }

 private:
  RemoteBackendOptions opts_;
};

}  // namespace yarn::embedding
