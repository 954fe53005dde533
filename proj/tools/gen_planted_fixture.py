#!/usr/bin/env python3
"""Writes the mock-provider fixture sets under tests/fixtures/.

planted/  12 two-target items, 3 per category. The correct target repeats the
          base story's abstract plot (same frame roots, evaluative labels, arc
          and stage labels) in its own wording; the distractor tells a
          different plot. Replies for every extraction task plus the two
          baselines are written as <task>/<story_id>.txt.
edge/     a one-event story (single-element scoring) and an item whose two
          targets abstract identically (tie-break).
johnny/   the worked example story, an analog and a distractor.

Usage: gen_planted_fixture.py [out_dir]   (default: tests/fixtures)
"""

import json
import os
import shutil
import sys

CATEGORIES = ["near-far", "far-far", "near-near", "far-near"]
DOMAINS = ["sport", "garden", "shop", "music"]
ARC = ["background", "main_event", "challenge", "action", "conclusion"]

PLOTS = [
    {
        "roots": ["aspiration", "commitment", "obstacle", "perseverance", "achievement"],
        "level1": ["DESIRE_GOAL", "INVESTMENT_PLAN", "BARRIER_HARDSHIP", "EFFORT_PERSISTENCE", "SUCCESS_OUTCOME"],
        "evaluative": ["neutral_state", "effort", "struggle", "effort", "gain"],
        "stage0": ["setting a goal", "taking on a commitment", "meeting resistance", "pushing through",
                   "reaching the goal"],
        "stage1": "persistence overcomes obstacles",
        "phrases": {
            "sport": ["{n} dreamed of finishing a marathon", "{n} signed up for a spring race",
                      "{n} injured an ankle in training", "{n} kept training on a bike while healing",
                      "{n} crossed the finish line"],
            "garden": ["{n} wanted to grow prize tomatoes", "{n} entered the county fair",
                       "a late frost killed the first seedlings", "{n} replanted and covered the beds each night",
                       "{n} won a ribbon at the fair"],
            "shop": ["{n} hoped to open a bakery", "{n} rented a small storefront",
                     "the oven broke in the first week", "{n} baked in a neighbor's kitchen for a month",
                     "the bakery filled with regular customers"],
            "music": ["{n} wanted to play in the city orchestra", "{n} booked an audition",
                      "{n} sprained a finger before the audition", "{n} practiced slow scales every evening",
                      "{n} earned a seat in the orchestra"],
        },
    },
    {
        "roots": ["comfort", "neglect", "warning", "dismissal", "collapse"],
        "level1": ["SECURITY_STATE", "CARE_LAPSE", "RISK_SIGNAL", "ADVICE_REJECTION", "FAILURE_OUTCOME"],
        "evaluative": ["ease", "indifference", "neutral_outcome", "indifference", "loss"],
        "stage0": ["a secure position", "letting care slip", "an ignored signal", "brushing off advice",
                   "paying the price"],
        "stage1": "ignoring warnings leads to loss",
        "phrases": {
            "sport": ["{n} was the fastest player on the team", "{n} skipped stretching before games",
                      "the coach said a torn muscle was likely", "{n} laughed off the coach",
                      "{n} tore a hamstring and missed the season"],
            "garden": ["{n} had a lush backyard lawn", "{n} stopped watering during the heat",
                       "a neighbor said the grass was browning", "{n} shrugged and kept ignoring it",
                       "the whole lawn died by August"],
            "shop": ["{n} ran a busy corner shop", "{n} stopped checking the freezer",
                     "a customer said the ice cream felt soft", "{n} waved the complaint away",
                     "{n} threw out a week of spoiled stock"],
            "music": ["{n} owned a fine old violin", "{n} left the violin next to the radiator",
                      "a teacher said the wood could crack", "{n} did not move the case",
                      "the violin split along the seam"],
        },
    },
    {
        "roots": ["scarcity", "kindness", "sacrifice", "hardship", "gratitude"],
        "level1": ["NEED_CONTEXT", "HELP_OFFER", "COST_BEARING", "PERSONAL_STRAIN", "RECIPROCITY_RETURN"],
        "evaluative": ["struggle", "effort", "loss", "struggle", "gain"],
        "stage0": ["a community in need", "giving freely", "bearing the cost", "lean times",
                   "generosity repaid"],
        "stage1": "kindness comes back around",
        "phrases": {
            "sport": ["{n}'s club had no money for new nets", "{n} coached the children for free",
                      "{n} gave up weekend pay to do it", "{n} struggled to cover rent that winter",
                      "the parents raised funds to thank {n}"],
            "garden": ["the village had little fresh food", "{n} shared vegetables with every neighbor",
                       "{n} gave away the seeds saved for spring", "{n}'s own plot came up thin",
                       "the neighbors replanted {n}'s garden together"],
            "shop": ["the town's only bakery had closed", "{n} sold bread below cost",
                     "{n} skipped a salary for months", "{n} nearly lost the shop",
                     "customers held a fundraiser to keep it open"],
            "music": ["the school could not afford lessons", "{n} taught piano to students at no charge",
                      "{n} sold a second piano to buy music books", "{n} went without a concert season",
                      "former students played a benefit concert for {n}"],
        },
    },
    {
        "roots": ["talent", "arrogance", "rivalry", "complacency", "defeat"],
        "level1": ["ABILITY_STATUS", "PRIDE_DISPLAY", "COMPETITION_ARRIVAL", "PREPARATION_NEGLECT",
                   "HUMILIATION_OUTCOME"],
        "evaluative": ["ease", "neutral_action", "neutral_state", "indifference", "loss"],
        "stage0": ["early superiority", "open boasting", "a new contender", "resting on laurels",
                   "a humbling loss"],
        "stage1": "pride comes before a fall",
        "phrases": {
            "sport": ["{n} was the club chess champion", "{n} bragged about never losing",
                      "a quiet newcomer challenged {n}", "{n} did not bother to prepare",
                      "{n} lost the match in twenty moves"],
            "garden": ["{n} always grew the biggest pumpkins", "{n} mocked the other growers",
                       "a young grower entered the contest", "{n} skipped feeding the vines that month",
                       "{n}'s pumpkin placed last"],
            "shop": ["{n}'s cafe was the most popular on the street", "{n} sneered at the new cart across the road",
                     "the cart started selling cheaper coffee", "{n} refused to change anything",
                     "{n}'s regulars moved to the cart"],
            "music": ["{n} was the star pianist at the conservatory", "{n} boasted about sight-reading anything",
                      "a rival chose a hard modern piece for the contest", "{n} did not practice the set piece",
                      "{n} stumbled through the final round"],
        },
    },
]

NAMES = ["Ana", "Ben", "Cora", "Dev", "Elif", "Femi", "Gus", "Hana", "Ivo", "Jun", "Kira", "Luca",
         "Mina", "Nico", "Oda", "Pia", "Quin", "Rosa", "Sami", "Tove", "Uma", "Vik", "Wren", "Yara",
         "Zane", "Abel", "Bea", "Cyd", "Dana", "Eli", "Fay", "Gil", "Hugo", "Iris", "Jace", "Kai"]


def sentence(phrase):
    return phrase[0].upper() + phrase[1:] + "."


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def jblock(payload, lead=""):
    body = json.dumps(payload, ensure_ascii=False)
    return (lead + "\n" if lead else "") + "<JSON>" + body + "</JSON>"


class StorySpec:
    """One story: phrases in text order plus the plot position of each."""

    def __init__(self, sid, plot, domain, name, modifier, order):
        self.sid = sid
        self.plot = plot
        self.order = order  # order[i] = plot step of the i-th phrase in the text
        self.phrases = [plot["phrases"][domain][s].format(n=name) for s in order]
        self.modifier = modifier
        self.text = " ".join(sentence(p) for p in self.phrases)


def write_story_replies(root, st, variant):
    """variant picks among equivalent reply shapes so parsers see several."""
    p = st.plot
    n = len(st.phrases)
    if variant % 2 == 0:
        events = jblock(st.phrases, "Here are the events.")
    else:
        events = jblock({"events": st.phrases})
    write(f"{root}/events/{st.sid}.txt", events)
    temporal = [s + 1 for s in st.order]
    if variant % 2 == 0:
        write(f"{root}/temporal/{st.sid}.txt", jblock(temporal))
    else:
        write(f"{root}/temporal/{st.sid}.txt",
              jblock({"results": [{"id": f"p{i + 1}", "temporal_index": t} for i, t in enumerate(temporal)]}))
    c0 = [{"id": f"p{i + 1}", "rationale": "r", "frame_name": f"{st.modifier}_{p['roots'][s]}".upper()}
          for i, s in enumerate(st.order)]
    write(f"{root}/conceptual_level0/{st.sid}.txt", jblock({"results": c0}))
    c1 = [{"id": f"p{i + 1}", "frame_name": p["level1"][s]} for i, s in enumerate(st.order)]
    write(f"{root}/conceptual_level1/{st.sid}.txt", jblock({"results": c1}))
    ev = [p["evaluative"][s] for s in st.order]
    if variant % 3 == 1:
        ev = [e.replace("_", " ").title() for e in ev]
    write(f"{root}/evaluative/{st.sid}.txt",
          jblock({"results": [{"id": f"p{i + 1}", "label": e} for i, e in enumerate(ev)]}))
    arc = [ARC[s] for s in st.order]
    write(f"{root}/arc/{st.sid}.txt",
          jblock({"results": [{"id": f"p{i + 1}", "stage": a.replace("_", " ")} for i, a in enumerate(arc)]}))
    # One unit per stage, so groups follow plot order.
    write(f"{root}/stage0/{st.sid}.txt",
          jblock({"results": [{"abstraction": lbl} for lbl in p["stage0"][:n]]}))
    write(f"{root}/stage1/{st.sid}.txt", jblock({"rationale": "r", "abstraction": p["stage1"]}))


def planted(out):
    root = f"{out}/planted"
    shutil.rmtree(root, ignore_errors=True)
    replies = f"{root}/replies"
    lines = []
    for k in range(12):
        cat = CATEGORIES[k % 4]
        correct_near, distractor_near = (c == "near" for c in cat.split("-"))
        pb = k % 4
        pd = (pb + 1 + (k // 4)) % 4
        if pd == pb:
            pd = (pd + 1) % 4
        db = (k + k // 4) % 4
        dc = db if correct_near else (db + 1) % 4
        dd = db if distractor_near else (db + 2) % 4
        item_id = f"arn-{k + 1:02d}"
        names = NAMES[3 * k:3 * k + 3]
        flashback = k % 3 == 2
        base = StorySpec(f"{item_id}-base", PLOTS[pb], DOMAINS[db], names[0], DOMAINS[db], [0, 1, 2, 3, 4])
        correct = StorySpec("", PLOTS[pb], DOMAINS[dc], names[1], DOMAINS[dc],
                            [4, 0, 1, 2, 3] if flashback else [0, 1, 2, 3, 4])
        distractor = StorySpec("", PLOTS[pd], DOMAINS[dd], names[2], DOMAINS[dd], [0, 1, 2, 3, 4])
        gold = k % 2
        targets = [correct, distractor] if gold == 0 else [distractor, correct]
        for i, t in enumerate(targets):
            t.sid = f"{item_id}-t{i}"
        for v, st in enumerate([base] + targets):
            write_story_replies(replies, st, k + v)
        lines.append(json.dumps({"item_id": item_id, "base_text": base.text,
                                 "target_texts": [t.text for t in targets], "gold_index": gold,
                                 "category": cat}))
    write(f"{root}/dataset.jsonl", "\n".join(lines) + "\n")
    # Baselines: ZS always names candidate 2 (buried in prose); CoT always 1.
    write(f"{replies}/baseline_zs/_default.txt", "After reading both, I pick candidate 2 as the closer match.")
    write(f"{replies}/baseline_cot/_default.txt",
          'Both share a setting, but the first mirrors the lesson.\n<JSON>{"rationale": "same lesson", "answer": 1}</JSON>')


def edge(out):
    root = f"{out}/edge"
    shutil.rmtree(root, ignore_errors=True)
    replies = f"{root}/replies"
    p0 = PLOTS[0]

    def one_unit(sid, phrase, stage0):
        write(f"{replies}/events/{sid}.txt", jblock([phrase]))
        write(f"{replies}/temporal/{sid}.txt", jblock([1]))
        write(f"{replies}/conceptual_level0/{sid}.txt", jblock(["SPORT_ACHIEVEMENT"]))
        write(f"{replies}/evaluative/{sid}.txt", jblock(["gain"]))
        write(f"{replies}/arc/{sid}.txt", jblock(["main event"]))
        write(f"{replies}/stage0/{sid}.txt", jblock([stage0]))
        write(f"{replies}/stage1/{sid}.txt", jblock({"abstraction": "a single triumph"}))

    one_unit("solo-base", "Ana won the race", "a decisive win")
    one_unit("solo-t0", "Ben lost the race", "a painful defeat")
    one_unit("solo-t1", "Cora took first place", "a decisive win")

    # Two targets with identical abstractions but different wording.
    tie_base = StorySpec("tie-base", p0, "sport", "Dev", "sport", [0, 1, 2, 3, 4])
    t0 = StorySpec("tie-t0", p0, "garden", "Elif", "garden", [0, 1, 2, 3, 4])
    t1 = StorySpec("tie-t1", p0, "music", "Femi", "music", [0, 1, 2, 3, 4])
    for v, st in enumerate([tie_base, t0, t1]):
        write_story_replies(replies, st, v)
    lines = [
        {"item_id": "solo", "base_text": "Ana won the race.", "target_texts": ["Ben lost the race.",
                                                                              "Cora took first place."],
         "gold_index": 1, "category": "far-far"},
        {"item_id": "tie", "base_text": tie_base.text, "target_texts": [t0.text, t1.text], "gold_index": 0,
         "category": "far-far"},
    ]
    write(f"{root}/dataset.jsonl", "\n".join(json.dumps(x) for x in lines) + "\n")


JOHNNY = ("Johnny had too many projects and too many short deadlines, and he was stressed. He kept working as hard "
          "as he could to finish everything. His boss noticed how hard he was working and offered him a raise.")


def johnny(out):
    root = f"{out}/johnny"
    shutil.rmtree(root, ignore_errors=True)
    replies = f"{root}/replies"
    stories = {
        "johnny-base": {
            "events": ["Johnny had too many projects", "Johnny had too many short deadlines", "Johnny was stressed",
                       "Johnny kept working hard", "Johnny finished everything",
                       "Johnny's boss noticed his hard work", "Johnny's boss offered a raise"],
            "c0": ["TASKS_WORKLOAD", "TIME_PRESSURE", "EMOTION_STRESS", "WORK_DEDICATION", "TASKS_COMPLETION",
                   "WORK_RECOGNITION", "WORK_REWARD"],
            "c1": ["DEMAND_OVERLOAD", "TIME_CONSTRAINT", "EMOTION_STRAIN", "EFFORT_PERSISTENCE", "GOAL_ACHIEVEMENT",
                   "SOCIAL_ACKNOWLEDGEMENT", "MATERIAL_REWARD"],
            "ev": ["struggle", "struggle", "struggle", "effort", "gain", "gain", "gain"],
            "arc": ["main event", "main event", "challenge", "action", "action", "conclusion", "conclusion"],
            "stage0": ["work overload", "stress from workload", "persistent effort and completion",
                       "reward for dedication"],
            "stage1": "hard work is rewarded",
        },
        "johnny-t0": {
            "events": ["Maria's garden was overrun by weeds", "Maria felt discouraged", "Maria weeded every morning",
                       "The garden won first prize at the fair"],
            "c0": ["GARDEN_OVERGROWTH", "EMOTION_DISCOURAGEMENT", "GARDEN_DEDICATION", "CONTEST_REWARD"],
            "c1": ["DEMAND_OVERLOAD", "EMOTION_STRAIN", "EFFORT_PERSISTENCE", "MATERIAL_REWARD"],
            "ev": ["struggle", "struggle", "effort", "gain"],
            "arc": ["main event", "challenge", "action", "conclusion"],
            "stage0": ["garden overload", "discouragement", "persistent care", "reward for dedication"],
            "stage1": "hard work is rewarded",
        },
        "johnny-t1": {
            "events": ["Johnny had many projects", "Johnny took a long vacation", "Johnny's projects were cancelled"],
            "c0": ["TASKS_WORKLOAD", "LEISURE_BREAK", "TASKS_CANCELLATION"],
            "c1": ["DEMAND_OVERLOAD", "REST_RETREAT", "PLAN_ABANDONMENT"],
            "ev": ["neutral_state", "ease", "loss"],
            "arc": ["background", "main event", "conclusion"],
            "stage0": ["a busy schedule", "stepping away", "work lost"],
            "stage1": "absence has a cost",
        },
    }
    texts = {
        "johnny-base": JOHNNY,
        "johnny-t0": ("Maria's garden was overrun by weeds, and she felt discouraged. She weeded every morning "
                      "for a month. That summer the garden won first prize at the fair."),
        "johnny-t1": ("Johnny had many projects at work. He took a long vacation in the mountains. When he came "
                      "back, his projects had been cancelled."),
    }
    for sid, s in stories.items():
        n = len(s["events"])
        write(f"{replies}/events/{sid}.txt", jblock(s["events"]))
        write(f"{replies}/temporal/{sid}.txt", jblock(list(range(1, n + 1))))
        write(f"{replies}/conceptual_level0/{sid}.txt", jblock({"results": [{"frame_name": f} for f in s["c0"]]}))
        write(f"{replies}/conceptual_level1/{sid}.txt", jblock({"results": s["c1"]}))
        write(f"{replies}/evaluative/{sid}.txt", jblock({"results": [{"label": e} for e in s["ev"]]}))
        write(f"{replies}/arc/{sid}.txt", jblock({"results": [{"stage": a} for a in s["arc"]]}))
        write(f"{replies}/stage0/{sid}.txt", jblock({"results": [{"abstraction": a} for a in s["stage0"]]}))
        write(f"{replies}/stage1/{sid}.txt", jblock({"abstraction": s["stage1"]}))
    item = {"item_id": "johnny", "base_text": texts["johnny-base"],
            "target_texts": [texts["johnny-t0"], texts["johnny-t1"]], "gold_index": 0, "category": "far-near"}
    write(f"{root}/dataset.jsonl", json.dumps(item) + "\n")
    write(f"{root}/vectors.jsonl", johnny_vectors())


# Concept axes for the planted Johnny vectors: labels that play the same role
# in both stories load on the same axis.
JOHNNY_AXES = {
    "work overload": {"overload": 1.0, "work": 0.3},
    "garden overload": {"overload": 1.0, "garden": 0.3},
    "a busy schedule": {"overload": 0.5, "work": 0.5},
    "stress from workload": {"distress": 1.0, "work": 0.3},
    "discouragement": {"distress": 1.0, "garden": 0.1},
    "persistent effort and completion": {"persist": 1.0, "work": 0.3},
    "persistent care": {"persist": 1.0, "garden": 0.3},
    "reward for dedication": {"reward": 1.0},
    "stepping away": {"rest": 1.0},
    "work lost": {"loss": 1.0, "work": 0.4},
    "hard work is rewarded": {"reward": 0.8, "persist": 0.6},
    "absence has a cost": {"rest": 0.6, "loss": 0.8},
    "main event": {"arc_main": 1.0},
    "challenge": {"arc_challenge": 1.0},
    "action": {"arc_action": 1.0},
    "conclusion": {"arc_conclusion": 1.0},
    "background": {"arc_background": 1.0},
}


def johnny_vectors():
    axes = sorted({a for v in JOHNNY_AXES.values() for a in v})
    lines = []
    for i, (label, load) in enumerate(sorted(JOHNNY_AXES.items())):
        # A small label-specific offset keeps distinct labels from tying.
        vec = [load.get(a, 0.0) + 0.01 * ((i * 7 + k * 3) % 5) for k, a in enumerate(axes)]
        lines.append(json.dumps({"text": label, "vector": [round(x, 4) for x in vec]}))
    return "\n".join(lines) + "\n"


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")
    planted(out)
    edge(out)
    johnny(out)


if __name__ == "__main__":
    main()
