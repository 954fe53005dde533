#pragma once

// Pure reply parsers, one per extraction task. Each takes the JSON payload
// pulled out of a model reply and either returns the parsed layer or throws
// ReplyError with the reason.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/model.hpp"
#include "yarn/core/text.hpp"
#include "yarn/llm/gateway.hpp"

namespace yarn::extraction {

using json = nlohmann::json;

class ReplyError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// The per-item list of a reply: a bare array, or the "results" array of an
// object.
inline const json& items_of(const json& payload) {
  if (payload.is_array()) return payload;
  if (payload.is_object() && payload.contains("results") && payload["results"].is_array())
    return payload["results"];
  throw ReplyError("expected an array or an object with a 'results' array");
}

// A string item, or the first of `keys` present on an object item.
inline std::string field_of(const json& item, std::initializer_list<const char*> keys) {
  if (item.is_string()) return item.get<std::string>();
  if (item.is_object())
    for (const char* k : keys)
      if (item.contains(k) && item[k].is_string()) return item[k].get<std::string>();
  throw ReplyError("item without a usable label: " + item.dump());
}

inline void expect_count(std::size_t got, std::size_t want, std::string_view what) {
  if (got != want)
    throw ReplyError("expected " + std::to_string(want) + " " + std::string(what) + ", got " + std::to_string(got));
}

// Lowercase, trim whitespace, and turn each run of spaces, hyphens or
// underscores into one underscore.
inline std::string canonical_label(std::string_view raw) {
  auto t = text::to_lower(text::trim(raw));
  std::string out;
  for (char c : t) {
    bool sep = c == ' ' || c == '\t' || c == '-' || c == '_';
    if (!sep) {
      out += c;
    } else if (out.empty() || out.back() != '_') {
      out += '_';
    }
  }
  return out;
}

}  // namespace detail

// Event list. Accepts a JSON array of strings or {"events": [...]}.
inline std::vector<std::string> parse_events(const json& payload) {
  const json& arr = payload.is_object() && payload.contains("events") ? payload["events"] : payload;
  if (!arr.is_array()) throw ReplyError("expected an array of event phrases");
  std::vector<std::string> out;
  for (const auto& e : arr) {
    if (!e.is_string()) throw ReplyError("event phrases must be strings");
    out.push_back(text::trim(e.get<std::string>()));
  }
  return out;
}

// Models sometimes emit the event list as bare lines inside brackets, without
// quotes. This parser tries strict JSON first, then reads such a list line by
// line.
inline std::optional<json> lenient_event_payload(std::string_view raw) {
  if (auto j = llm::extract_payload(raw)) return j;
  auto seg = llm::delimited_segment(raw);
  std::string_view body = seg ? std::string_view(*seg) : raw;
  auto open = body.find('[');
  auto close = body.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
  json arr = json::array();
  std::string inner(body.substr(open + 1, close - open - 1));
  std::size_t start = 0;
  while (start <= inner.size()) {
    auto nl = inner.find('\n', start);
    std::string line = text::trim(inner.substr(start, nl == std::string::npos ? std::string::npos : nl - start));
    start = nl == std::string::npos ? inner.size() + 1 : nl + 1;
    while (!line.empty() && (line.back() == ',' || line.back() == '"')) line.pop_back();
    while (!line.empty() && line.front() == '"') line.erase(line.begin());
    line = text::trim(line);
    if (line.empty() || line == "...") continue;
    arr.push_back(line);
  }
  if (arr.empty()) return std::nullopt;
  return arr;
}

// Temporal indices, one per unit: [2, 1, ...] or results[].temporal_index.
// Values must be >= 1; the result is rank-compressed so the minimum is 1 and
// ties stay ties.
inline std::vector<int> parse_temporal(const json& payload, std::size_t n_units) {
  const json& items = detail::items_of(payload);
  std::vector<int> raw;
  for (const auto& it : items) {
    const json* v = &it;
    if (it.is_object()) {
      if (!it.contains("temporal_index")) throw ReplyError("result without temporal_index");
      v = &it["temporal_index"];
    }
    if (!v->is_number_integer()) throw ReplyError("temporal index must be an integer");
    int x = v->get<int>();
    if (x < 1) throw ReplyError("temporal index must be >= 1");
    raw.push_back(x);
  }
  detail::expect_count(raw.size(), n_units, "temporal indices");
  std::set<int> distinct(raw.begin(), raw.end());
  std::vector<int> out;
  for (int x : raw) out.push_back(static_cast<int>(std::distance(distinct.begin(), distinct.find(x))) + 1);
  return out;
}

// "HEALTH_AWARENESS" -> {health, awareness}. Splits on the last underscore or
// hyphen (spaces count as separators too); a single token becomes the root.
inline ConceptualAbstraction parse_frame_name(std::string_view frame, int level) {
  auto canon = detail::canonical_label(frame);
  if (canon.empty()) throw ReplyError("empty frame name");
  auto cut = canon.rfind('_');
  ConceptualAbstraction a;
  a.level = level;
  if (cut == std::string::npos) {
    a.root = canon;
  } else {
    a.modifier = canon.substr(0, cut);
    a.root = canon.substr(cut + 1);
  }
  if (a.root.empty()) throw ReplyError("frame name without a root: '" + std::string(frame) + "'");
  return a;
}

inline std::vector<ConceptualAbstraction> parse_conceptual(const json& payload, std::size_t n_units, int level) {
  const json& items = detail::items_of(payload);
  std::vector<ConceptualAbstraction> out;
  for (const auto& it : items) out.push_back(parse_frame_name(detail::field_of(it, {"frame_name", "frame"}), level));
  detail::expect_count(out.size(), n_units, "frames");
  return out;
}

// Closed-set label match: case-insensitive, surrounding whitespace ignored,
// internal spaces or hyphens read as underscores. Anything else is rejected.
inline JointLabel parse_joint_label(std::string_view raw) {
  auto j = parse_enum<JointLabel>(detail::canonical_label(raw));
  if (!j) throw ReplyError("out-of-vocabulary evaluative label '" + std::string(raw) + "'");
  return *j;
}

inline ArcStage parse_arc_stage(std::string_view raw) {
  auto s = parse_enum<ArcStage>(detail::canonical_label(raw));
  if (!s) throw ReplyError("out-of-vocabulary arc stage '" + std::string(raw) + "'");
  return *s;
}

inline std::vector<EvaluativeLabel> parse_evaluative(const json& payload, std::size_t n_units) {
  const json& items = detail::items_of(payload);
  std::vector<EvaluativeLabel> out;
  for (const auto& it : items)
    out.push_back(EvaluativeLabel::from_joint(parse_joint_label(detail::field_of(it, {"label", "joint_label"}))));
  detail::expect_count(out.size(), n_units, "evaluative labels");
  return out;
}

inline std::vector<ArcLabel> parse_arc(const json& payload, std::size_t n_units) {
  const json& items = detail::items_of(payload);
  std::vector<ArcLabel> out;
  for (const auto& it : items) out.push_back({parse_arc_stage(detail::field_of(it, {"stage", "label"}))});
  detail::expect_count(out.size(), n_units, "arc labels");
  if (std::none_of(out.begin(), out.end(), [](const ArcLabel& a) { return a.stage == ArcStage::main_event; }))
    throw ReplyError("no main event in arc labels");
  return out;
}

inline std::vector<std::string> parse_stage0(const json& payload, std::size_t n_groups) {
  const json& items = detail::items_of(payload);
  std::vector<std::string> out;
  for (const auto& it : items) {
    auto label = text::trim(detail::field_of(it, {"abstraction", "label"}));
    if (label.empty()) throw ReplyError("empty stage abstraction");
    out.push_back(label);
  }
  detail::expect_count(out.size(), n_groups, "stage abstractions");
  return out;
}

inline std::string parse_stage1(const json& payload) {
  std::string label;
  if (payload.is_object() && payload.contains("abstraction") && payload["abstraction"].is_string())
    label = payload["abstraction"].get<std::string>();
  else if (payload.is_array() && payload.size() == 1)
    label = detail::field_of(payload[0], {"abstraction", "label"});
  else
    throw ReplyError("expected {\"abstraction\": ...}");
  label = text::trim(label);
  if (label.empty()) throw ReplyError("empty story-level abstraction");
  return label;
}

}  // namespace yarn::extraction
