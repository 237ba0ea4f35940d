#!/usr/bin/env python3
"""Regenerate the shipped embedding fixtures and the synonym-triple texts.

The toy table is built so the three scoring families disagree the way the
comparison command demonstrates: every content word of the reference has a
synonym at cosine ~0.912 (> 0.9), all synonyms share one "register" offset
direction (so the paraphrase's *mean* embedding tilts away from the
reference's mean, dragging the average-embedding score down), and unrelated
words are orthogonal. The n-gram candidate swaps a single word for an
orthogonal one, keeping bigram overlap high.
"""

from __future__ import annotations

import math
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

BASE_WORDS = ["young", "kid", "rides", "one", "bike", "down", "main", "road"]
SYNONYMS = ["youthful", "child", "cycles", "single", "bicycle", "along", "primary", "street"]
UNRELATED = "cow"
OFFSET = 0.45  # synonym cosine = 1/sqrt(1 + OFFSET^2) ~ 0.9119
DIM = 10  # 8 base dims + shared register dim + 1 for the unrelated word

REFERENCE = "young kid rides one bike down main road"
CANDIDATE_NGRAM = "young kid rides one cow down main road"
CANDIDATE_SYNONYM = "youthful child cycles single bicycle along primary street"


def format_row(token: str, values) -> str:
    return token + " " + " ".join(f"{v:.8f}" for v in values)


def toy_rows() -> list[str]:
    norm = math.sqrt(1.0 + OFFSET * OFFSET)
    rows = []
    for i, word in enumerate(BASE_WORDS):
        vec = [0.0] * DIM
        vec[i] = 1.0
        rows.append(format_row(word, vec))
    for i, word in enumerate(SYNONYMS):
        vec = [0.0] * DIM
        vec[i] = 1.0 / norm
        vec[8] = OFFSET / norm
        rows.append(format_row(word, vec))
    vec = [0.0] * DIM
    vec[9] = 1.0
    rows.append(format_row(UNRELATED, vec))
    return rows


def ortho_rows() -> list[str]:
    rows = []
    for i, word in enumerate("abcd"):
        vec = [0.0] * 4
        vec[i] = 1.0
        rows.append(format_row(word, vec))
    return rows


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    rows = toy_rows()
    (FIXTURES / "toy_embeddings.txt").write_text(
        f"{len(rows)} {DIM}\n" + "\n".join(rows) + "\n", encoding="utf-8"
    )
    ortho = ortho_rows()
    (FIXTURES / "ortho_embeddings.txt").write_text(
        f"{len(ortho)} 4\n" + "\n".join(ortho) + "\n", encoding="utf-8"
    )
    triple = FIXTURES / "synonym_triple"
    triple.mkdir(exist_ok=True)
    (triple / "reference.txt").write_text(REFERENCE + "\n", encoding="utf-8")
    (triple / "candidates.txt").write_text(
        CANDIDATE_NGRAM + "\n" + CANDIDATE_SYNONYM + "\n", encoding="utf-8"
    )
    print(f"wrote fixtures under {FIXTURES}")


if __name__ == "__main__":
    main()
