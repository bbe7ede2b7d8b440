#!/usr/bin/env python3
"""Recount fixture_corpus.json statistics independently of the Rust code.

Usage: python3 recount_stats.py fixture_corpus.json > fixture_stats.golden.json
"""
import json
import re
import sys

CJK = "㐀-䶿一-鿿豈-﫿\U00020000-\U0002A6DF\U0002A700-\U0002EBEF\U00030000-\U0003134F"
WORD = rf"(?:(?![{CJK}])\w)+"
TOKEN = re.compile(rf"[{CJK}]|{WORD}(?:(?<=[0-9])\.(?=[0-9]){WORD})*")
TYPES = ["Extraction", "Numerical Reasoning", "Counterfactual", "Comparison", "Yes/No", "Unanswerable"]


def tokens(text):
    return TOKEN.findall(text)


def avg_max(values, n):
    return {"avg": sum(values) / n if n else 0.0, "max": max(values, default=0)}


def main(path):
    with open(path, encoding="utf-8") as f:
        examples = json.load(f)
    turns = [t for ex in examples for t in ex["turns"]]
    n, q = len(examples), len(turns)
    bigrams, matrix = {}, {}
    for t in turns:
        toks = [w.lower() for w in tokens(t["question"])]
        if toks:
            key = " ".join(toks[:2])
            bigrams[key] = bigrams.get(key, 0) + 1
        row = matrix.setdefault(str(t["turn"]), {})
        for e in t["evidence"]:
            row[e] = row.get(e, 0) + 1
    report = {
        "example_count": n,
        "qa_pairs_per_example": avg_max([len(ex["turns"]) for ex in examples], n),
        "segments_per_passage": avg_max([len(ex["segments"]) for ex in examples], n),
        "tokens_per_passage": avg_max([sum(len(tokens(s)) for s in ex["segments"]) for ex in examples], n),
        "tokens_per_question": avg_max([len(tokens(t["question"])) for t in turns], q),
        "tokens_per_answer": avg_max([len(tokens(t["answer"])) for t in turns], q),
        "evidences_per_question": avg_max([len(t["evidence"]) for t in turns], q),
        "qa_type_distribution": {k: sum(t["type"] == k for t in turns) / q for k in TYPES},
        "question_prefix_bigrams": bigrams,
        "evidence_position_matrix": matrix,
    }
    json.dump(report, sys.stdout, ensure_ascii=False, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
