#pragma once

// On-disk layout under one root:
//   reps/<model_tag>/<story_id>.json   representations
//   embeddings/<model_id>.jsonl         embedding cache
//   logs/run.jsonl                      provider replies
//   reports/                            evaluation outputs
// Every file write goes through a temp file and an atomic rename.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/json_io.hpp"
#include "yarn/core/model.hpp"
#include "yarn/core/text.hpp"

namespace yarn::store {

namespace fs = std::filesystem;

// File-name-safe form of an id: [A-Za-z0-9._-] kept, anything else as %XX.
inline std::string safe_name(std::string_view id) {
  if (id.empty() || id == "." || id == "..") throw std::invalid_argument("unusable id '" + std::string(id) + "'");
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '.' || c == '_' || c == '-') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

inline void atomic_write(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  static std::atomic<std::uint64_t> counter{0};
  auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  auto tmp = path;
  tmp += ".tmp." + text::hex64(tid ^ (counter++ * 0x9E3779B97F4A7C15ULL));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Store {
 public:
  explicit Store(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) throw ConfigError("store root not usable: " + root_.string());
  }

  const fs::path& root() const noexcept { return root_; }
  fs::path reps_dir(const std::string& model_tag) const { return root_ / "reps" / safe_name(model_tag); }
  fs::path rep_path(const std::string& model_tag, const std::string& story_id) const {
    return reps_dir(model_tag) / (safe_name(story_id) + ".json");
  }
  fs::path embedding_cache(const std::string& model_id) const {
    return root_ / "embeddings" / (safe_name(model_id) + ".jsonl");
  }
  fs::path run_log() const { return root_ / "logs" / "run.jsonl"; }
  fs::path reports_dir() const { return root_ / "reports"; }

  std::optional<Representation> load(const std::string& model_tag, const std::string& story_id) const {
    auto p = rep_path(model_tag, story_id);
    if (!fs::exists(p)) return std::nullopt;
    auto j = nlohmann::json::parse(read_text(p), nullptr, false);
    if (j.is_discarded()) throw Error("corrupt representation file " + p.string());
    return representation_from_json(j);
  }

  void save(const std::string& model_tag, const Representation& rep) const {
    validate_representation(rep);
    atomic_write(rep_path(model_tag, rep.story_id), to_json(rep).dump(2) + "\n");
  }

  std::vector<std::string> model_tags() const {
    std::vector<std::string> out;
    if (fs::is_directory(root_ / "reps"))
      for (const auto& e : fs::directory_iterator(root_ / "reps"))
        if (e.is_directory()) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t count_reps(const std::string& model_tag) const {
    std::size_t n = 0;
    if (fs::is_directory(reps_dir(model_tag)))
      for (const auto& e : fs::directory_iterator(reps_dir(model_tag)))
        if (e.path().extension() == ".json") ++n;
    return n;
  }

 private:
  fs::path root_;
};

}  // namespace yarn::store
