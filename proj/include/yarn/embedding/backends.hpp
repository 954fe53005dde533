#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/text.hpp"
#include "yarn/embedding/vector.hpp"

namespace yarn::embedding {

// Default sentence-embedding model for remote backends.
inline constexpr const char* kDefaultModelId = "sentence-transformers/all-MiniLM-L6-v2";

// Transient backend failure; the embedder retries these.
class BackendTransportError : public Error {
 public:
  explicit BackendTransportError(const std::string& what) : Error("embedding transport: " + what) {}
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  // One vector per input text, same order.
  virtual std::vector<Vector> embed_batch(const std::vector<std::string>& texts) = 0;
  virtual std::string model_id() const = 0;
};

// Offline test backend: the text's content hash seeds a pseudorandom unit
// vector. Equal texts give equal vectors; distinct texts are nearly
// orthogonal in high dimension.
class HashProjectionBackend final : public EmbeddingBackend {
 public:
  explicit HashProjectionBackend(std::size_t dim = 384) : dim_(dim) {
    if (dim_ == 0) throw std::invalid_argument("embedding dim must be positive");
  }

  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(project(t));
    return out;
  }

  std::string model_id() const override { return "hash-projection-" + std::to_string(dim_); }

 private:
  Vector project(const std::string& t) const {
    std::mt19937_64 rng(text::splitmix64(text::fnv1a64(t)));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    auto uniform = [&rng] {
      // (0, 1], 53 random bits
      return (static_cast<double>(rng() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
    };
    std::vector<double> v(dim_);
    double norm = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
      // Box-Muller; standard normal components give a uniform direction.
      double r = std::sqrt(-2.0 * std::log(uniform()));
      v[i] = r * std::cos(kTwoPi * uniform());
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return Vector(std::move(v));
  }

  std::size_t dim_;
};

// Precomputed vectors keyed by normalized text. Accepts either a JSON object
// {"text": [..], ...} or line-delimited records {"text": .., "vector": [..]}.
class FileBackend final : public EmbeddingBackend {
 public:
  FileBackend(const std::filesystem::path& path, std::string model_id) : model_id_(std::move(model_id)) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read vector file " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto whole = nlohmann::json::parse(content, nullptr, false);
    if (!whole.is_discarded() && whole.is_object() && !whole.contains("text")) {
      for (const auto& [k, v] : whole.items()) add(k, v.get<std::vector<double>>());
      return;
    }
    std::istringstream lines(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (text::is_blank(line)) continue;
      auto rec = nlohmann::json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.contains("text") || !rec.contains("vector"))
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed vector record");
      add(rec["text"].get<std::string>(), rec["vector"].get<std::vector<double>>());
    }
  }

  FileBackend(std::map<std::string, std::vector<double>> table, std::string model_id)
      : model_id_(std::move(model_id)) {
    for (auto& [k, v] : table) add(k, std::move(v));
  }

  std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      auto it = table_.find(text::normalize(t));
      if (it == table_.end()) throw EmbeddingUnavailable("no precomputed vector for '" + t + "'");
      out.push_back(it->second);
    }
    return out;
  }

  std::string model_id() const override { return model_id_; }

 private:
  void add(const std::string& k, std::vector<double> v) { table_[text::normalize(k)] = Vector(std::move(v)); }

  std::string model_id_;
  std::map<std::string, Vector> table_;
};

}  // namespace yarn::embedding
