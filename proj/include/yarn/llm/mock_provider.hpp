#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "yarn/llm/gateway.hpp"

namespace yarn::llm {

// Replays recorded replies keyed by request tag. Lookup order for tag
// "a/b/c": in-memory entry, <dir>/a/b/c.txt, then the nearest
// <dir>/a/b/_default.txt, <dir>/a/_default.txt, <dir>/_default.txt.
// A tag with no fixture is a hard ProviderUnavailable (never retried).
class MockProvider final : public Provider {
 public:
  MockProvider() = default;
  explicit MockProvider(std::filesystem::path fixture_dir) : dir_(std::move(fixture_dir)) {
    if (!std::filesystem::is_directory(*dir_))
      throw ConfigError("mock fixture directory '" + dir_->string() + "' does not exist");
  }

  void add(std::string tag, std::string reply) {
    std::lock_guard lock(mu_);
    memory_[std::move(tag)] = std::move(reply);
  }

  std::string complete(const ChatRequest& req) override {
    {
      std::lock_guard lock(mu_);
      requests_.push_back(req);
      if (auto it = memory_.find(req.tag); it != memory_.end()) return it->second;
    }
    if (dir_) {
      if (req.tag.find("..") != std::string::npos)
        throw ProviderUnavailable("mock: illegal tag '" + req.tag + "'");
      if (auto r = read(*dir_ / (req.tag + ".txt"))) return *r;
      std::filesystem::path prefix = std::filesystem::path(req.tag).parent_path();
      while (true) {
        if (auto r = read(*dir_ / prefix / "_default.txt")) return *r;
        if (prefix.empty()) break;
        prefix = prefix.parent_path();
      }
    }
    throw ProviderUnavailable("mock: no fixture for tag '" + req.tag + "'");
  }

  std::string name() const override { return "mock"; }

  std::vector<ChatRequest> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }
  std::size_t request_count() const {
    std::lock_guard lock(mu_);
    return requests_.size();
  }

 private:
  static std::optional<std::string> read(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::optional<std::filesystem::path> dir_;
  std::map<std::string, std::string> memory_;
  std::vector<ChatRequest> requests_;
  mutable std::mutex mu_;
};

}  // namespace yarn::llm
