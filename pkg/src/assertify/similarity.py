"""Few-shot example selection via cosine similarity over token counts.

Methods are vectorized as bags of lexical tokens (term frequencies). Two
vectors are aligned over the union of their vocabularies, absent tokens
counting zero, which realizes the equal-size zero padding the cosine
formula needs.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .javasrc.lexer import lex_tokens_loose

DEFAULT_K = 3
DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class MethodVector:
    counts: tuple[tuple[str, int], ...]  # sorted (token, frequency) pairs

    @classmethod
    def from_text(cls, text: str) -> "MethodVector":
        c = Counter(lex_tokens_loose(text))
        return cls(counts=tuple(sorted(c.items())))

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(v * v for _, v in self.counts))

    def __bool__(self) -> bool:
        return any(v > 0 for _, v in self.counts)


def cosine_similarity(a: MethodVector, b: MethodVector) -> float:
    """cos(A, B) = A.B / (|A| |B|); 0.0 when either vector is empty."""
    da, db = a.as_dict(), b.as_dict()
    if not da or not db:
        return 0.0
    if len(da) > len(db):
        da, db = db, da
    dot = sum(v * db.get(t, 0) for t, v in da.items())
    denom = a.norm * b.norm
    return dot / denom if denom else 0.0


def select_similar(
    candidate: MethodVector,
    fsl: list[tuple[str, MethodVector]],
    k: int = DEFAULT_K,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[tuple[str, float]]:
    """Top-k FSL methods with similarity >= threshold, descending.

    Ties are broken by record id ascending, so selection is deterministic.
    """
    if not candidate:
        raise ValueError("candidate method vector is empty")
    scored = [
        (rid, cosine_similarity(candidate, vec))
        for rid, vec in fsl
    ]
    kept = [(rid, s) for rid, s in scored if s >= threshold]
    kept.sort(key=lambda rs: (-rs[1], rs[0]))
    return kept[:k]
