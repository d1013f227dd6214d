#!/usr/bin/env python3
# Copyright (c) 2026, nlprog contributors
# SPDX-License-Identifier: Apache-2.0
# Regenerates the last-letter fixture and its teachable mock script.
# The mock answers a question correctly only when the prompt carries the
# CONCAT-RULE token, which it hands out as its revision text.
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
NAMES = """Alma Bruno Celia Dario Elsa Felix Greta Hugo Irma Jonas Karla Lukas Mira
Nadia Oscar Pablo Quinn Rosa Simon Tilda Ugo Vera Walt Xenia Yusuf Zora Arlo Bea
Cyril Dina Emil Fern Gus Hana Ivo June Kurt Lena Milo Nell Otto Pia Rex Sage Theo
Uma Vito Wren Yara Zeke""".split()

rng = random.Random(20261019)
seen = set()
samples = []
while len(samples) < 200:
    words = rng.sample(NAMES, rng.randint(2, 4))
    phrase = " ".join(words)
    if phrase in seen:
        continue
    seen.add(phrase)
    answer = "".join(w[-1] for w in words).lower()
    samples.append({
        "id": f"llc-{len(samples):03d}",
        "question": f'Take the last letters of each words in "{phrase}" and concatenate them.',
        "answer": answer,
        "meta": {"phrase": phrase},
    })

with open(HERE / "llc.jsonl", "w") as f:
    for s in samples:
        f.write(json.dumps(s) + "\n")

rule = "CONCAT-RULE: take the last letter of every word, in order, and join them into one lowercase string."
script = [
    {"match": "summarize the similar solutions in", "response": rule},
    {"match": "Wrong output:", "response": "Solution 1: " + rule + "\nSolution 2: do not skip any word."},
]
for s in samples:
    phrase = s["meta"]["phrase"]
    letters = ", ".join(w[-1] for w in phrase.split())
    script.append({
        "match_kind": "all_of",
        "match": ["CONCAT-RULE", f'"{phrase}"'],
        "response": f"The last letters are {letters}. So the answer is {s['answer']}.",
    })
script.append({"match_kind": "regex", "match": "[\\s\\S]",
               "response": "I am not sure how to combine the words. The answer is unknown."})

with open(HERE / "teachable.mock.json", "w") as f:
    json.dump(script, f, indent=1)
    f.write("\n")
