#pragma once

// Benchmark items, one JSON object per line:
//   {"item_id": "...", "base_text": "...", "target_texts": ["...", ...],
//    "gold_index": 0, "category": "near-far"}
// MCQ-style items carry exactly 4 targets; ARN-style items exactly 2 plus a
// category.

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/model.hpp"
#include "yarn/core/text.hpp"

namespace yarn::bench {

enum class DatasetSchema { mcq, arn };

inline std::string_view to_string(DatasetSchema s) { return s == DatasetSchema::mcq ? "mcq" : "arn"; }

inline std::optional<DatasetSchema> parse_schema(std::string_view s) {
  if (s == "mcq") return DatasetSchema::mcq;
  if (s == "arn") return DatasetSchema::arn;
  return std::nullopt;
}

inline std::size_t target_count(DatasetSchema s) { return s == DatasetSchema::mcq ? 4 : 2; }

// Default beam width per benchmark.
inline int default_beam(DatasetSchema s) { return s == DatasetSchema::mcq ? 2 : 3; }

struct BenchmarkItem {
  std::string item_id;
  Story base;
  std::vector<Story> targets;
  std::size_t gold_index = 0;
  std::optional<ArnCategory> category;

  std::vector<Story> stories() const {
    std::vector<Story> all{base};
    all.insert(all.end(), targets.begin(), targets.end());
    return all;
  }
  friend bool operator==(const BenchmarkItem&, const BenchmarkItem&) = default;
};

inline std::string base_story_id(const std::string& item_id) { return item_id + "-base"; }
inline std::string target_story_id(const std::string& item_id, std::size_t i) {
  return item_id + "-t" + std::to_string(i);
}

inline std::vector<BenchmarkItem> parse_dataset(std::istream& in, DatasetSchema schema) {
  std::vector<BenchmarkItem> items;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::is_blank(line)) continue;
    auto fail = [&](const std::string& why) { throw DatasetError(lineno, why); };
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail("not a JSON object");
    for (const auto& [k, _] : j.items())
      if (k != "item_id" && k != "base_text" && k != "target_texts" && k != "gold_index" && k != "category")
        fail("unknown field '" + k + "'");
    if (!j.contains("item_id") || !j["item_id"].is_string() || text::is_blank(j["item_id"].get<std::string>()))
      fail("missing item_id");
    const auto id = j["item_id"].get<std::string>();
    if (id.find('/') != std::string::npos || id.find("..") != std::string::npos)
      fail("item_id may not contain '/' or '..'");
    if (!ids.insert(id).second) fail("duplicate item_id '" + id + "'");
    if (!j.contains("base_text") || !j["base_text"].is_string() || text::is_blank(j["base_text"].get<std::string>()))
      fail("missing base_text");
    if (!j.contains("target_texts") || !j["target_texts"].is_array()) fail("missing target_texts");
    const auto& tt = j["target_texts"];
    if (tt.size() != target_count(schema))
      fail(std::string(to_string(schema)) + " items need " + std::to_string(target_count(schema)) + " targets, got " +
           std::to_string(tt.size()));
    if (!j.contains("gold_index") || !j["gold_index"].is_number_integer()) fail("missing gold_index");
    auto gold = j["gold_index"].get<long long>();
    if (gold < 0 || static_cast<std::size_t>(gold) >= tt.size()) fail("gold_index out of range");

    BenchmarkItem item{id, Story(base_story_id(id), j["base_text"].get<std::string>(), StoryRole::base), {},
                       static_cast<std::size_t>(gold), std::nullopt};
    for (std::size_t i = 0; i < tt.size(); ++i) {
      if (!tt[i].is_string() || text::is_blank(tt[i].get<std::string>())) fail("empty target text");
      item.targets.emplace_back(target_story_id(id, i), tt[i].get<std::string>(), StoryRole::target);
    }
    if (j.contains("category")) {
      if (!j["category"].is_string()) fail("category must be a string");
      item.category = parse_enum<ArnCategory>(j["category"].get<std::string>());
      if (!item.category) fail("unknown category '" + j["category"].get<std::string>() + "'");
    }
    if (schema == DatasetSchema::arn && !item.category) fail("arn items need a category");
    const DatasetMeta meta{std::string(to_string(schema)), id, item.category};
    item.base.dataset_meta = meta;
    for (auto& t : item.targets) t.dataset_meta = meta;
    items.push_back(std::move(item));
  }
  if (items.empty()) throw DatasetError(lineno, "dataset has no items");
  return items;
}

inline std::vector<BenchmarkItem> load_dataset(const std::filesystem::path& path, DatasetSchema schema) {
  std::ifstream in(path);
  if (!in) throw DatasetError(0, "cannot read " + path.string());
  return parse_dataset(in, schema);
}

}  // namespace yarn::bench
