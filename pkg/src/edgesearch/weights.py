"""Provenance-based weighting of expanded query terms.

Name-entities state the search intention directly and take the maximum
weight. Context keywords are weighted by the contribution ratio of the
query keyword that produced them. Derived synonyms are weighted by their
similarity to the user-interest label, clamped to [0, eta_max].
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lexstore
from .context import ContextBundle
from .errors import ConsistencyError
from .expand import ExpandedQuerySet, ExpandedTerm, Provenance, fill_weight
from .interest import InterestProfile
from .lexstore import EmbeddingTable


@dataclass(frozen=True)
class WeightConfig:
    eta_max: float = 1.0

    def __post_init__(self) -> None:
        if self.eta_max <= 0:
            raise ValueError("eta_max must be positive")


def _context_weight(term: ExpandedTerm, c: ContextBundle, eta_max: float) -> float:
    if not c.context:
        raise ConsistencyError("context terms present but the context set is empty")
    if term.parent is None or term.parent not in c.contributions:
        raise ConsistencyError(f"context term {term.term!r} has no contributing keyword")
    return eta_max * len(c.contributions[term.parent]) / len(c.context)


def assign_weights(
    p: ExpandedQuerySet,
    c: ContextBundle,
    theta: InterestProfile | None,
    emb: EmbeddingTable,
    cfg: WeightConfig,
) -> ExpandedQuerySet:
    """Return a copy of p with every term's weight filled in."""
    weighted: list[ExpandedTerm] = []
    for term in p.terms:
        if term.provenance is Provenance.NAME_ENTITY:
            weight = cfg.eta_max
        elif term.provenance is Provenance.CONTEXT:
            weight = _context_weight(term, c, cfg.eta_max)
        else:
            sim = None
            if theta is not None:
                sim = lexstore.similarity(emb, term.term, theta.theta)
            weight = max(0.0, sim) if sim is not None else 0.0
        weighted.append(fill_weight(term, min(max(weight, 0.0), cfg.eta_max)))
    return ExpandedQuerySet(terms=weighted, mu=p.mu, original=p.original)
