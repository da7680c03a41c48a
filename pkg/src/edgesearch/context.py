"""Query context identification.

From a raw query this derives the trimmed keyword set, the name-entity
spans, and per-keyword gloss distillations: each surviving keyword is
sense-disambiguated by gloss overlap against the rest of the query, its
chosen definition is distilled into keywords, and their union forms the
context set. Contribution bookkeeping records which query keyword added
which context keyword.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import keyext, lexstore
from .keyext import Token
from .stopwords import is_stopword


@dataclass
class QueryText:
    raw: str
    tokens: list[Token]

    @classmethod
    def from_raw(cls, raw: str) -> "QueryText":
        if not raw or not raw.strip():
            raise ValueError("query must be non-empty")
        tokens = [t for sentence in keyext.tokenize(raw) for t in sentence]
        return cls(raw=raw, tokens=tokens)


@dataclass
class ContextBundle:
    context: set[str] = field(default_factory=set)
    name_entities: set[str] = field(default_factory=set)
    contributions: dict[str, set[str]] = field(default_factory=dict)
    trimmed: set[str] = field(default_factory=set)


def _first_sense(db: lexstore.LexicalDatabase, lemma: str) -> lexstore.Synset | None:
    synsets = db.lookup(lemma, "n") or db.lookup(lemma, "v")
    return synsets[0] if synsets else None


def _gloss_bag(gloss: str) -> Counter:
    bag: Counter = Counter()
    for sentence in keyext.tokenize(gloss):
        for token in sentence:
            word = "".join(c for c in token.low if c.isalnum() or c in "-'")
            if len(word) >= 2 and not is_stopword(word):
                bag[word] += 1
    return bag


def lesk_disambiguate(
    q: str, rest: set[str], db: lexstore.LexicalDatabase
) -> lexstore.Synset | None:
    """Pick the sense of q whose gloss best overlaps the rest of the query.

    The overlap context is the bag of the other keywords plus the gloss
    tokens of their first senses; overlap is counted with multiplicity.
    Ties keep the earlier (more frequent) sense. Returns None when q has
    no synset at all, in which case the caller skips q.
    """
    senses = db.lookup(q, "n") or db.lookup(q, "v")
    if not senses:
        return None

    ctx: Counter = Counter()
    for word in sorted(rest):
        ctx[word] += 1
        first = _first_sense(db, word)
        if first is not None:
            ctx.update(_gloss_bag(first.gloss))

    best = senses[0]
    best_overlap = -1
    for sense in senses:
        bag = _gloss_bag(sense.gloss)
        overlap = sum(min(count, ctx[token]) for token, count in bag.items())
        if overlap > best_overlap:
            best, best_overlap = sense, overlap
    return best


def _capitalized(token: Token) -> bool:
    return token.text[0].isupper() and any(c.isalpha() for c in token.text)


def _units(
    tokens: list[Token], db: lexstore.LexicalDatabase
) -> list[tuple[str, Token | str]]:
    """Group maximal capitalized runs into entity spans; dissolve non-entities."""
    units: list[tuple[str, Token | str]] = []
    i = 0
    while i < len(tokens):
        if _capitalized(tokens[i]):
            j = i
            while j < len(tokens) and _capitalized(tokens[j]):
                j += 1
            span = " ".join(t.text for t in tokens[i:j])
            if j - i > 1 and lexstore.is_name_entity(db, span, query_initial=(i == 0)):
                units.append(("entity", span))
                i = j
                continue
            for k in range(i, j):
                if lexstore.is_name_entity(db, tokens[k].text, query_initial=(k == 0)):
                    units.append(("entity", tokens[k].text))
                else:
                    units.append(("token", tokens[k]))
            i = j
        else:
            units.append(("token", tokens[i]))
            i += 1
    return units


def identify_context(q: QueryText, db: lexstore.LexicalDatabase) -> ContextBundle:
    """Derive context keywords, name-entities, and contribution counts.

    Every original token is considered for entity-hood. The remaining
    tokens are trimmed by keyword extraction (entities are kept out of
    the trim so their casing does not crowd out common keywords);
    survivors are disambiguated and their gloss keywords pooled. A
    keyword set emptied by trimming falls back to all non-stopword
    tokens so a query never silently loses its expansion.
    """
    units = _units(q.tokens, db)

    bundle = ContextBundle()
    entity_lows: set[str] = set()
    for kind, unit in units:
        if kind == "entity":
            bundle.name_entities.add(str(unit))
            entity_lows.add(str(unit).lower())

    remainder = [unit for kind, unit in units if kind == "token"]
    trimmed = {ks.term for ks in keyext.select_keywords(" ".join(t.text for t in remainder))}
    if not trimmed:
        trimmed = {
            t.low
            for t in remainder
            if not is_stopword(t.low) and len([c for c in t.low if c.isalnum()]) >= 2
        }
    bundle.trimmed = trimmed

    seen: set[str] = set()
    ordered_context: dict[str, str] = {}  # keyword -> contributing q
    for token in remainder:
        low = token.low
        if low in seen or low not in trimmed:
            continue
        seen.add(low)
        sense = lesk_disambiguate(low, trimmed - {low}, db)
        if sense is None:
            continue
        contributed: set[str] = set()
        for ks in keyext.select_keywords(sense.gloss):
            term = ks.term
            # A span plays only the entity role, never the context role.
            if term in ordered_context or term in entity_lows:
                continue
            ordered_context[term] = low
            contributed.add(term)
        bundle.contributions[low] = contributed

    bundle.context = set(ordered_context)
    return bundle
