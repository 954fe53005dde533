#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/text.hpp"
#include "yarn/embedding/backends.hpp"
#include "yarn/embedding/vector.hpp"

namespace yarn::embedding {

struct EmbedderOptions {
  int max_retries = 2;
  std::chrono::milliseconds backoff{100};
  // Line-delimited cache {"model_id", "key", "text", "vector"}; records for
  // other model ids are ignored on load.
  std::optional<std::filesystem::path> cache_file;
};

// Text -> vector with a content-hash cache. Safe for concurrent callers; two
// threads may compute the same key, and since the backend is deterministic
// the first insertion wins with an identical value.
class Embedder {
 public:
  explicit Embedder(std::shared_ptr<EmbeddingBackend> backend, EmbedderOptions opts = {})
      : backend_(std::move(backend)), opts_(std::move(opts)) {
    if (!backend_) throw std::invalid_argument("embedder needs a backend");
    model_id_ = backend_->model_id();
    if (opts_.cache_file) load_cache(*opts_.cache_file);
  }

  Embedder(const Embedder&) = delete;
  Embedder& operator=(const Embedder&) = delete;

  static std::string cache_key(std::string_view normalized_text) {
    return text::hex64(text::fnv1a64(normalized_text));
  }

  Vector embed(std::string_view raw) {
    auto norm = text::normalize(raw);
    if (norm.empty()) throw std::invalid_argument("cannot embed empty text");
    auto key = cache_key(norm);
    {
      std::shared_lock lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto vecs = call_backend({norm});
    return insert(key, norm, std::move(vecs.front()));
  }

  // Embeds every uncached text in one backend call.
  void prefetch(const std::vector<std::string>& raws) {
    std::vector<std::string> todo;
    std::vector<std::string> keys;
    {
      std::shared_lock lock(mu_);
      std::unordered_map<std::string, bool> seen;
      for (const auto& r : raws) {
        auto norm = text::normalize(r);
        if (norm.empty()) throw std::invalid_argument("cannot embed empty text");
        auto key = cache_key(norm);
        if (cache_.count(key) || seen.count(key)) continue;
        seen[key] = true;
        todo.push_back(norm);
        keys.push_back(key);
      }
    }
    if (todo.empty()) return;
    auto vecs = call_backend(todo);
    for (std::size_t i = 0; i < todo.size(); ++i) insert(keys[i], todo[i], std::move(vecs[i]));
  }

  std::size_t backend_calls() const noexcept { return backend_calls_.load(); }
  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t dim() const {
    std::shared_lock lock(mu_);
    return dim_;
  }
  std::size_t cache_size() const {
    std::shared_lock lock(mu_);
    return cache_.size();
  }

 private:
  std::vector<Vector> call_backend(const std::vector<std::string>& texts) {
    auto backoff = opts_.backoff;
    for (int attempt = 0;; ++attempt) {
      try {
        ++backend_calls_;
        auto out = backend_->embed_batch(texts);
        if (out.size() != texts.size())
          throw EmbeddingUnavailable("backend returned " + std::to_string(out.size()) + " vectors for " +
                                     std::to_string(texts.size()) + " texts");
        return out;
      } catch (const BackendTransportError& e) {
        if (attempt >= opts_.max_retries)
          throw EmbeddingUnavailable(std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                                     " attempts)");
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
  }

  Vector insert(const std::string& key, const std::string& norm, Vector v) {
    if (v.dim() == 0) throw DegenerateVector("backend returned an empty vector for '" + norm + "'");
    if (!v.is_finite()) throw DegenerateVector("non-finite entry in vector for '" + norm + "'");
    if (v.is_zero()) throw DegenerateVector("backend returned the zero vector for '" + norm + "'");
    bool inserted = false;
    {
      std::unique_lock lock(mu_);
      if (dim_ == 0) dim_ = v.dim();
      if (v.dim() != dim_) throw DimensionError(dim_, v.dim());
      inserted = cache_.emplace(key, v).second;
    }
    if (inserted && opts_.cache_file) persist(key, norm, v);
    return v;
  }

  void persist(const std::string& key, const std::string& norm, const Vector& v) {
    nlohmann::json rec{{"model_id", model_id_}, {"key", key}, {"text", norm}, {"vector", v.values}};
    std::lock_guard lock(file_mu_);
    if (opts_.cache_file->has_parent_path()) std::filesystem::create_directories(opts_.cache_file->parent_path());
    std::ofstream out(*opts_.cache_file, std::ios::app);
    out << rec.dump() << '\n';
  }

  void load_cache(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      auto rec = nlohmann::json::parse(line, nullptr, false);
      // A torn trailing line from an interrupted run is skipped.
      if (rec.is_discarded() || rec.value("model_id", "") != model_id_) continue;
      Vector v(rec.at("vector").get<std::vector<double>>());
      if (dim_ == 0) dim_ = v.dim();
      if (v.dim() != dim_) throw DimensionError(dim_, v.dim());
      cache_.emplace(rec.at("key").get<std::string>(), std::move(v));
    }
  }

  std::shared_ptr<EmbeddingBackend> backend_;
  EmbedderOptions opts_;
  std::string model_id_;
  mutable std::shared_mutex mu_;
  std::mutex file_mu_;
  std::unordered_map<std::string, Vector> cache_;
  std::size_t dim_ = 0;
  std::atomic<std::size_t> backend_calls_{0};
};

}  // namespace yarn::embedding
