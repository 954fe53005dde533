#pragma once

// Run configuration. A JSON file supplies values; command-line flags override
// it. Credentials never appear in the file, only the names of the environment
// variables holding them.
//
// {
//   "rng_seed": 42,                     required
//   "store_root": "yarn-store",
//   "threads": 4,
//   "parallel_specs": false,
//   "max_in_flight": 4,
//   "max_attempts": 3,
//   "max_retries": 3,
//   "beam_n": {"mcq": 2, "arn": 3},
//   "log_requests": true,
//   "models": {
//     "qwen":  {"provider": "http", "base_url": "http://localhost:8000", "model": "...",
//               "api_key_env": "QWEN_API_KEY", "timeout_s": 120, "prompts_dir": "..."},
//     "mock":  {"provider": "mock", "fixtures_dir": "tests/fixtures/planted/replies"}
//   },
//   "embedding": {"backend": "remote", "base_url": "...", "model": "...", "api_key_env": "..."}
//                 or {"backend": "hash", "dim": 384}
//                 or {"backend": "file", "path": "vectors.jsonl", "model": "..."}
// }

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "yarn/bench/dataset.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/embedding/backends.hpp"

namespace yarn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct ModelConfig {
  std::string provider = "mock";  // mock | http
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env;
  int timeout_s = 120;
  std::optional<fs::path> fixtures_dir;
  std::optional<fs::path> prompts_dir;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct EmbeddingConfig {
  std::string backend = "hash";  // hash | file | remote
  std::size_t dim = 384;
  std::optional<fs::path> path;
  std::string base_url;
  std::string endpoint_path = "/v1/embeddings";
  std::string model = embedding::kDefaultModelId;
  std::string api_key_env;
  int timeout_s = 60;
  friend bool operator==(const EmbeddingConfig&, const EmbeddingConfig&) = default;
};

struct RunConfig {
  std::optional<std::uint64_t> rng_seed;
  fs::path store_root = "yarn-store";
  int threads = 4;
  bool parallel_specs = false;
  int max_in_flight = 4;
  int max_attempts = 3;
  int max_retries = 3;
  std::map<std::string, int> beam_n{{"mcq", 2}, {"arn", 3}};
  bool log_requests = true;
  std::map<std::string, ModelConfig> models;
  EmbeddingConfig embedding;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) throw ConfigError(where + ": unknown field '" + k + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

inline void read_path(const json& j, const char* key, std::optional<fs::path>& out, const std::string& where) {
  if (!j.contains(key)) return;
  std::string s;
  read(j, key, s, where);
  out = fs::path(s);
}

}  // namespace detail

// Relative paths in the file resolve against the file's directory.
inline RunConfig config_from_json(const json& j, const fs::path& base_dir = {}) {
  detail::only_keys(j,
                    {"rng_seed", "store_root", "threads", "parallel_specs", "max_in_flight", "max_attempts",
                     "max_retries", "beam_n", "log_requests", "models", "embedding"},
                    "config");
  auto rel = [&](const fs::path& p) { return p.is_absolute() || base_dir.empty() ? p : base_dir / p; };
  RunConfig c;
  if (j.contains("rng_seed")) {
    std::uint64_t s = 0;
    detail::read(j, "rng_seed", s, "config");
    c.rng_seed = s;
  }
  std::string store;
  detail::read(j, "store_root", store, "config");
  if (!store.empty()) c.store_root = rel(store);
  detail::read(j, "threads", c.threads, "config");
  detail::read(j, "parallel_specs", c.parallel_specs, "config");
  detail::read(j, "max_in_flight", c.max_in_flight, "config");
  detail::read(j, "max_attempts", c.max_attempts, "config");
  detail::read(j, "max_retries", c.max_retries, "config");
  detail::read(j, "log_requests", c.log_requests, "config");
  if (j.contains("beam_n")) {
    detail::only_keys(j["beam_n"], {"mcq", "arn"}, "config.beam_n");
    detail::read(j["beam_n"], "mcq", c.beam_n["mcq"], "config.beam_n");
    detail::read(j["beam_n"], "arn", c.beam_n["arn"], "config.beam_n");
  }
  if (j.contains("models")) {
    if (!j["models"].is_object()) throw ConfigError("config.models must be an object");
    for (const auto& [tag, mj] : j["models"].items()) {
      const std::string where = "config.models." + tag;
      detail::only_keys(mj, {"provider", "base_url", "path", "model", "api_key_env", "timeout_s", "fixtures_dir",
                             "prompts_dir"},
                        where);
      ModelConfig m;
      detail::read(mj, "provider", m.provider, where);
      detail::read(mj, "base_url", m.base_url, where);
      detail::read(mj, "path", m.path, where);
      detail::read(mj, "model", m.model, where);
      detail::read(mj, "api_key_env", m.api_key_env, where);
      detail::read(mj, "timeout_s", m.timeout_s, where);
      detail::read_path(mj, "fixtures_dir", m.fixtures_dir, where);
      detail::read_path(mj, "prompts_dir", m.prompts_dir, where);
      if (m.fixtures_dir) m.fixtures_dir = rel(*m.fixtures_dir);
      if (m.prompts_dir) m.prompts_dir = rel(*m.prompts_dir);
      c.models[tag] = m;
    }
  }
  if (j.contains("embedding")) {
    const auto& ej = j["embedding"];
    detail::only_keys(ej, {"backend", "dim", "path", "base_url", "endpoint_path", "model", "api_key_env", "timeout_s"},
                      "config.embedding");
    auto& e = c.embedding;
    detail::read(ej, "backend", e.backend, "config.embedding");
    detail::read(ej, "dim", e.dim, "config.embedding");
    detail::read_path(ej, "path", e.path, "config.embedding");
    if (e.path) e.path = rel(*e.path);
    detail::read(ej, "base_url", e.base_url, "config.embedding");
    detail::read(ej, "endpoint_path", e.endpoint_path, "config.embedding");
    detail::read(ej, "model", e.model, "config.embedding");
    detail::read(ej, "api_key_env", e.api_key_env, "config.embedding");
    detail::read(ej, "timeout_s", e.timeout_s, "config.embedding");
  }
  return c;
}

inline RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  return config_from_json(j, path.parent_path());
}

// Command-line values; each one set replaces the file value.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> store_root;
  std::optional<int> threads;
  // Serve model "default" from a mock reply directory.
  std::optional<fs::path> fixtures_dir;
};

inline RunConfig apply_overrides(RunConfig c, const Overrides& o) {
  if (o.seed) c.rng_seed = o.seed;
  if (o.store_root) c.store_root = *o.store_root;
  if (o.threads) c.threads = *o.threads;
  if (o.fixtures_dir) {
    ModelConfig m;
    m.provider = "mock";
    m.fixtures_dir = *o.fixtures_dir;
    c.models["default"] = m;
  }
  return c;
}

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

// Everything checkable before any work: seed present, sane limits, known
// providers, credentials present in the environment.
inline void validate_config(const RunConfig& c, const EnvLookup& env = process_env) {
  if (!c.rng_seed) throw ConfigError("rng_seed is required (config file or --seed)");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (c.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (c.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  for (const auto& [k, b] : c.beam_n)
    if (b < 1) throw ConfigError("beam_n." + k + " must be >= 1");
  auto need_env = [&](const std::string& var, const std::string& who) {
    if (!var.empty() && !env(var)) throw ConfigError(who + ": environment variable " + var + " is not set");
  };
  for (const auto& [tag, m] : c.models) {
    const std::string who = "model '" + tag + "'";
    if (m.provider == "mock") {
      if (!m.fixtures_dir) throw ConfigError(who + ": mock provider needs fixtures_dir");
    } else if (m.provider == "http") {
      if (m.base_url.empty() || m.model.empty()) throw ConfigError(who + ": http provider needs base_url and model");
      need_env(m.api_key_env, who);
    } else {
      throw ConfigError(who + ": unknown provider '" + m.provider + "'");
    }
  }
  const auto& e = c.embedding;
  if (e.backend == "hash") {
    if (e.dim == 0) throw ConfigError("embedding.dim must be positive");
  } else if (e.backend == "file") {
    if (!e.path) throw ConfigError("file embedding backend needs a path");
  } else if (e.backend == "remote") {
    if (e.base_url.empty()) throw ConfigError("remote embedding backend needs base_url");
    need_env(e.api_key_env, "embedding");
  } else {
    throw ConfigError("unknown embedding backend '" + e.backend + "'");
  }
}

inline json to_json(const RunConfig& c) {
  json models = json::object();
  for (const auto& [tag, m] : c.models) {
    json mj{{"provider", m.provider}};
    if (m.provider == "http")
      mj.update({{"base_url", m.base_url}, {"path", m.path}, {"model", m.model}, {"api_key_env", m.api_key_env},
                 {"timeout_s", m.timeout_s}});
    if (m.fixtures_dir) mj["fixtures_dir"] = m.fixtures_dir->string();
    if (m.prompts_dir) mj["prompts_dir"] = m.prompts_dir->string();
    models[tag] = mj;
  }
  json e{{"backend", c.embedding.backend}};
  if (c.embedding.backend == "hash") e["dim"] = c.embedding.dim;
  if (c.embedding.backend == "file") e.update({{"path", c.embedding.path->string()}, {"model", c.embedding.model}});
  if (c.embedding.backend == "remote")
    e.update({{"base_url", c.embedding.base_url}, {"model", c.embedding.model}, {"api_key_env", c.embedding.api_key_env}});
  json j{{"store_root", c.store_root.string()},
         {"threads", c.threads},
         {"parallel_specs", c.parallel_specs},
         {"max_in_flight", c.max_in_flight},
         {"max_attempts", c.max_attempts},
         {"max_retries", c.max_retries},
         {"beam_n", c.beam_n},
         {"log_requests", c.log_requests},
         {"models", models},
         {"embedding", e}};
  if (c.rng_seed) j["rng_seed"] = *c.rng_seed;
  return j;
}

}  // namespace yarn::cli
