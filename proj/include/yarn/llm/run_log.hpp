#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "yarn/core/errors.hpp"

namespace yarn::llm {

// Append-only, line-delimited record of every provider reply:
// {"tag": ..., "request_hash": ..., "reply": ...}. Writes are serialized.
class RunLog {
 public:
  explicit RunLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(path_, std::ios::app);
    if (!out_) throw Error("cannot open run log " + path_.string());
  }

  void append(const std::string& tag, const std::string& hash, const std::string& reply) {
    nlohmann::json rec{{"tag", tag}, {"request_hash", hash}, {"reply", reply}};
    std::lock_guard lock(mu_);
    out_ << rec.dump() << '\n';
    out_.flush();
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mu_;
};

// Turns a run log into a mock-fixture directory: one <tag>.txt per tag
// holding the last recorded reply. Returns the number of fixtures written.
inline std::size_t harvest_fixtures(const std::filesystem::path& log_path,
                                    const std::filesystem::path& out_dir) {
  std::ifstream in(log_path);
  if (!in) throw Error("cannot read run log " + log_path.string());
  std::map<std::string, std::string> last;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.contains("tag") || !rec.contains("reply"))
      throw Error("malformed run log record at line " + std::to_string(lineno));
    last[rec["tag"].get<std::string>()] = rec["reply"].get<std::string>();
  }
  for (const auto& [tag, reply] : last) {
    if (tag.find("..") != std::string::npos) throw Error("refusing fixture tag '" + tag + "'");
    auto path = out_dir / (tag + ".txt");
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << reply;
  }
  return last.size();
}

}  // namespace yarn::llm
