"""Weight-aggregated TF-IDF ranking of matched documents.

Each document's score is the sum over expanded terms of the term weight
times its TF-IDF within the match set. Zero-scored documents are kept
below positive ones, ties break by ascending document id, and the sorted
list is truncated to the cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .cloudsim import MatchSet
from .errors import ConsistencyError
from .expand import ExpandedTerm


@dataclass
class RankEntry:
    doc_id: str
    gamma: float
    breakdown: dict[str, float]


@dataclass
class RankedResult:
    entries: list[RankEntry]
    cutoff: int


def rank(delta: MatchSet, terms: Sequence[ExpandedTerm], cutoff: int = 10) -> RankedResult:
    """Score every matched document and return the ordered, truncated list.

    The term sequence must be the one the match request was built from:
    frequencies in the match set are aligned positionally.
    """
    if delta.n_terms != len(terms):
        raise ConsistencyError(
            f"match set carries {delta.n_terms} terms but {len(terms)} were supplied"
        )
    if any(t.weight is None for t in terms):
        raise ConsistencyError("all term weights must be filled before ranking")

    n = len(delta.docs)
    df = [sum(1 for doc in delta.docs if doc.freqs[i] > 0) for i in range(len(terms))]

    entries: list[RankEntry] = []
    for doc in delta.docs:
        breakdown: dict[str, float] = {}
        gamma = 0.0
        for i, term in enumerate(terms):
            f = doc.freqs[i]
            contribution = 0.0
            if f > 0 and df[i] > 0 and doc.token_count > 0:
                tfidf = (f / doc.token_count) * math.log(1.0 + n / df[i])
                contribution = float(term.weight) * tfidf
            breakdown[term.term] = contribution
            gamma += contribution
        entries.append(RankEntry(doc_id=doc.doc_id, gamma=gamma, breakdown=breakdown))

    entries.sort(key=lambda e: (-e.gamma, e.doc_id))
    return RankedResult(entries=entries[:cutoff], cutoff=cutoff)
