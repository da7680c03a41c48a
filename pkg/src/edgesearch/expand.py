"""Context-guided query expansion.

Each surviving query keyword nominates synonym candidates from the
lexical database and the embedding neighborhood. A candidate is scored
by summing its similarity to every context keyword; only candidates
strictly above the mean of all computable scores survive. Context
keywords and name-entities always join the expanded set.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from enum import Enum

from . import lexstore
from .context import ContextBundle, QueryText
from .lexstore import EmbeddingTable, LexicalDatabase


class Provenance(str, Enum):
    NAME_ENTITY = "NAME_ENTITY"
    CONTEXT = "CONTEXT"
    DERIVED = "DERIVED"


@dataclass(frozen=True)
class ExpandedTerm:
    term: str
    provenance: Provenance
    parent: str | None = None
    weight: float | None = None


@dataclass
class ExpandedQuerySet:
    terms: list[ExpandedTerm]
    mu: float | None
    original: QueryText

    def term_strings(self) -> list[str]:
        return [t.term for t in self.terms]


def context_similarity(
    candidate: str, c: ContextBundle, emb: EmbeddingTable
) -> float | None:
    """Sum of similarities between the candidate and each context keyword.

    Pairs where either side is out of vocabulary are skipped; the result
    is None when no pair was computable.
    """
    total = 0.0
    computed = False
    for keyword in c.context:
        sim = lexstore.similarity(emb, candidate, keyword)
        if sim is not None:
            total += sim
            computed = True
    return total if computed else None


def nominate_synonyms(
    q: str, db: LexicalDatabase, emb: EmbeddingTable, k: int
) -> set[str]:
    """Union of database synonyms and the k nearest embedding neighbors of q."""
    nominated = set(lexstore.synonyms(db, q, "n"))
    if not db.lookup(q, "n"):
        nominated |= lexstore.synonyms(db, q, "v")
    nominated |= {word for word, _ in lexstore.nearest_neighbors(emb, q, k)}
    nominated.discard(q)
    nominated.discard(q.lower())
    return nominated


def _eligible_keywords(q: QueryText, c: ContextBundle) -> list[str]:
    entity_lows = set()
    for span in c.name_entities:
        entity_lows.update(part.lower() for part in span.split())
    ordered: list[str] = []
    for token in q.tokens:
        low = token.low
        if low in c.trimmed and low not in entity_lows and low not in ordered:
            ordered.append(low)
    return ordered


def mean_threshold_survivors(
    scored: list[tuple[str, str, float]],
) -> tuple[float | None, list[tuple[str, str, float]]]:
    """Keep candidates scoring strictly above the mean of all scores."""
    if not scored:
        return None, []
    mu = statistics.mean(score for _, _, score in scored)
    return mu, [(t, p, s) for t, p, s in scored if s > mu]


def expand(
    q: QueryText,
    c: ContextBundle,
    db: LexicalDatabase,
    emb: EmbeddingTable,
    k: int = 10,
) -> ExpandedQuerySet:
    """Build the expanded query set from a query and its context bundle."""
    scored: list[tuple[str, str, float]] = []
    for keyword in _eligible_keywords(q, c):
        for candidate in sorted(nominate_synonyms(keyword, db, emb, k)):
            score = context_similarity(candidate, c, emb)
            if score is not None:
                scored.append((candidate, keyword, score))

    mu, survivors = mean_threshold_survivors(scored)

    terms: dict[str, ExpandedTerm] = {}
    for candidate, keyword, _score in survivors:
        terms.setdefault(
            candidate.lower(),
            ExpandedTerm(candidate, Provenance.DERIVED, parent=keyword),
        )

    contributor = {
        keyword: parent
        for parent, keywords in c.contributions.items()
        for keyword in keywords
    }
    for keyword in sorted(c.context):
        terms[keyword.lower()] = ExpandedTerm(
            keyword, Provenance.CONTEXT, parent=contributor.get(keyword)
        )
    for span in sorted(c.name_entities):
        terms[span.lower()] = ExpandedTerm(span, Provenance.NAME_ENTITY)

    return ExpandedQuerySet(terms=list(terms.values()), mu=mu, original=q)


def fill_weight(term: ExpandedTerm, weight: float) -> ExpandedTerm:
    return replace(term, weight=weight)
