#pragma once

// Prompt templates for the extraction tasks and the baselines.
//
// A template is a system part and a user part with {{name}} placeholders.
// Built-in defaults can be overridden per task by files named
// <task>.system.txt and <task>.user.txt in a prompts directory.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "yarn/core/errors.hpp"

namespace yarn::extraction {

struct PromptTemplate {
  std::string system;
  std::string user;
};

// Replaces every {{name}}. A placeholder without a value is an error, as is an
// unterminated one.
inline std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (true) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      return out;
    }
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw std::invalid_argument("unterminated placeholder in template");
    out.append(tmpl.substr(pos, open - pos));
    std::string name(tmpl.substr(open + 2, close - open - 2));
    auto it = vars.find(name);
    if (it == vars.end()) throw std::invalid_argument("template placeholder '" + name + "' has no value");
    out += it->second;
    pos = close + 2;
  }
}

namespace detail {

inline const std::map<std::string, PromptTemplate>& builtin_prompts() {
  static const std::map<std::string, PromptTemplate> p{
      {"events",
       {R"(You split short stories into event phrases.
An event phrase is a short span naming one thing that happens or holds: an action, a state, a decision, an intention or a reason.
Rules:
- One event per phrase. Split clauses with separate verbs.
- Keep the story's wording and name the participant in every phrase.
- Cover the whole story; do not add events that are not there.
- Do not repeat an event.
Answer with a JSON array of strings between <JSON> and </JSON>.

Example
Story: Ana missed the bus. She walked to school in the rain and arrived late.
<JSON>
["Ana missed the bus", "Ana walked to school in the rain", "Ana arrived late"]
</JSON>)",
        "Story: {{story}}"}},
      {"temporal",
       {R"(You order the events of a story in time.
Give each event a position starting from 1 for the earliest. Events that happen at the same time share a position.
The order in the text may differ from the order in time.
Answer with a JSON array of integers, one per event in the given order, between <JSON> and </JSON>.

Example
Story: He smiled. Yesterday he had won the race.
Events:
1. He smiled
2. He had won the race
<JSON>
[2, 1]
</JSON>)",
        "Story: {{story}}\nEvents:\n{{phrases}}"}},
      {"conceptual_level0",
       {R"(You label each event phrase with one semantic frame written MODIFIER_ROOT.
ROOT is one noun-like word for the core event or state. MODIFIER is one word that specifies it.
Drop names and domain details.
For every phrase give a short rationale, then the frame.
Return <JSON>{"results": [{"id": ..., "original_phrase": ..., "rationale": ..., "frame_name": ...}]}</JSON> with one entry per phrase, in order.

Example
Phrases: [{"id": "p1", "text": "Ana missed the bus"}]
<JSON>
{"results": [{"id": "p1", "original_phrase": "Ana missed the bus", "rationale": "A planned ride was lost.", "frame_name": "TRANSPORT_MISS"}]}
</JSON>)",
        "Story: {{story}}\nPhrases: {{phrases}}"}},
      {"conceptual_level1",
       {R"(You generalize semantic frames one level up.
Each phrase comes with its current frame MODIFIER_ROOT. Give a more general frame in the same MODIFIER_ROOT form that would also fit events from unrelated domains.
For every phrase give a short rationale, then the frame.
Return <JSON>{"results": [{"id": ..., "original_phrase": ..., "rationale": ..., "frame_name": ...}]}</JSON> with one entry per phrase, in order.

Example
Phrases: [{"id": "p1", "text": "Ana missed the bus", "frame": "TRANSPORT_MISS"}]
<JSON>
{"results": [{"id": "p1", "original_phrase": "Ana missed the bus", "rationale": "Losing an expected opportunity.", "frame_name": "OPPORTUNITY_LOSS"}]}
</JSON>)",
        "Story: {{story}}\nPhrases: {{phrases}}"}},
      {"evaluative",
       {R"(You label each event by its function and its value for the main character.
Function: state (a condition that holds on its own), action (an active change), outcome (a condition caused by earlier events).
Value: positive, negative or neutral.
Use the joint label: struggle (negative state), ease (positive state), effort (positive action), indifference (negative action), gain (positive outcome), loss (negative outcome), neutral_state, neutral_action, neutral_outcome.
Return <JSON>{"results": [{"id": ..., "rationale": ..., "label": ...}]}</JSON> with one entry per phrase, in order.)",
        "Story: {{story}}\nPhrases: {{phrases}}"}},
      {"arc",
       {R"(You place each event of a story on its narrative arc.
Stages: background (context before the story), main event (the central situation), challenge (a problem for the main character), action (what the character does about it), conclusion (how it ends).
Every story has at least one main event.
Return <JSON>{"results": [{"id": ..., "rationale": ..., "stage": ...}]}</JSON> with one entry per phrase, in order.)",
        "Story: {{story}}\nPhrases: {{phrases}}"}},
      {"stage0",
       {R"(Events of a story are grouped by narrative stage. Write one short abstract label for each group that says what the group does in the story, without names or domain details.
Return <JSON>{"results": [{"stage": ..., "rationale": ..., "abstraction": ...}]}</JSON> with one entry per group, in the given order.)",
        "Story: {{story}}\nGroups:\n{{groups}}"}},
      {"stage1",
       {R"(You are given only abstract descriptions of a story: one label per narrative stage, the stage sequence and the evaluative sequence of its events.
Write one short phrase that states the story's overall pattern in general terms.
Return <JSON>{"rationale": ..., "abstraction": ...}</JSON>.)",
        "Stage labels:\n{{stage_labels}}\nArc sequence: {{arc_sequence}}\nEvaluative sequence: {{evaluative_sequence}}"}},
      {"baseline_zs",
       {R"(You compare stories by their underlying structure. {{instruction}}
Reply with just one number: the number of the chosen candidate.)",
        "Base story:\n{{base}}\n\nCandidates:\n{{targets}}"}},
      {"baseline_cot",
       {R"(You compare stories by their underlying structure. {{instruction}}
Think step by step, then reply with <JSON>{"rationale": ..., "answer": <number of the chosen candidate>}</JSON>.)",
        "Base story:\n{{base}}\n\nCandidates:\n{{targets}}"}},
  };
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

class PromptSet {
 public:
  PromptSet() : prompts_(detail::builtin_prompts()) {}

  // Built-ins overridden by whatever template files exist in `dir`.
  static PromptSet from_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("prompts directory not found: " + dir.string());
    PromptSet s;
    for (auto& [task, t] : s.prompts_) {
      auto sys = dir / (task + ".system.txt");
      auto usr = dir / (task + ".user.txt");
      if (std::filesystem::exists(sys)) t.system = detail::read_file(sys);
      if (std::filesystem::exists(usr)) t.user = detail::read_file(usr);
    }
    return s;
  }

  const PromptTemplate& get(const std::string& task) const {
    auto it = prompts_.find(task);
    if (it == prompts_.end()) throw std::invalid_argument("no prompt for task '" + task + "'");
    return it->second;
  }

  void set(const std::string& task, PromptTemplate t) { prompts_[task] = std::move(t); }

 private:
  std::map<std::string, PromptTemplate> prompts_;
};

}  // namespace yarn::extraction
