"""Unsupervised single-document keyword extraction.

Scores unigram candidates with five local statistical features (casing,
position, normalized frequency, left/right context relatedness, sentence
dispersion), combined as

    S(t) = (rel * pos) / (case + freq / rel + sent / rel)

where a lower score marks a more important term. Used to trim queries,
to distill dictionary definitions into context keywords, and to pick
representative index keywords.
"""

from __future__ import annotations

import math
import re
import statistics
from dataclasses import dataclass, field

from .stopwords import is_stopword

# Tokens that keep a trailing dot and never end a sentence.
ABBREVIATIONS = frozenset([
    "e.g.", "i.e.", "etc.", "vs.", "cf.", "al.", "dr.", "mr.", "mrs.",
    "ms.", "prof.", "fig.", "st.", "no.", "inc.", "ltd.", "co.",
])

_INITIALS = re.compile(r"^(?:[A-Za-z]\.){2,}$")
_LEAD_PUNCT = "\"'`([{<,;:.!?-"
_TRAIL_SOFT = "\"'`)]}>,;:"
_TERMINAL = ".!?"


@dataclass(frozen=True)
class Token:
    """A surface token with its lowercase form."""

    text: str
    low: str


@dataclass
class TermCandidate:
    """Occurrence statistics for one normalized unigram term."""

    surface: str
    occurrences: list[tuple[int, int]] = field(default_factory=list)
    cased_count: int = 0
    acronym_count: int = 0

    @property
    def tf(self) -> int:
        return len(self.occurrences)


@dataclass(frozen=True)
class KeywordScore:
    term: str
    score: float


def _split_chunk(chunk: str) -> tuple[str, bool]:
    """Clean one whitespace-delimited chunk; report whether it ends a sentence."""
    core = chunk.lstrip(_LEAD_PUNCT).rstrip(_TRAIL_SOFT)
    if not core:
        return "", False
    if core[-1] in _TERMINAL:
        if core.lower() in ABBREVIATIONS or _INITIALS.match(core):
            return core, False
        return core.rstrip(_TERMINAL).rstrip(_TRAIL_SOFT), True
    return core, False


def tokenize(text: str) -> list[list[Token]]:
    """Split text into sentences of tokens, preserving original casing.

    Sentences end at ".", "!" or "?" followed by whitespace, except after
    known abbreviations and multi-letter initials such as "J.K.".
    """
    sentences: list[list[Token]] = []
    current: list[Token] = []
    for chunk in text.split():
        core, ends_sentence = _split_chunk(chunk)
        if core:
            current.append(Token(core, core.lower()))
        if ends_sentence and current:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


def _is_candidate(token: Token) -> bool:
    if is_stopword(token.low):
        return False
    alnum = [c for c in token.low if c.isalnum()]
    return len(alnum) >= 2


def _collect_candidates(sentences: list[list[Token]]) -> dict[str, TermCandidate]:
    candidates: dict[str, TermCandidate] = {}
    for si, sentence in enumerate(sentences):
        for ti, token in enumerate(sentence):
            if not _is_candidate(token):
                continue
            cand = candidates.get(token.low)
            if cand is None:
                cand = candidates[token.low] = TermCandidate(token.low)
            cand.occurrences.append((si, ti))
            if token.text[0].isupper():
                cand.cased_count += 1
            letters = [c for c in token.text if c.isalpha()]
            if len(letters) > 1 and all(c.isupper() for c in letters):
                cand.acronym_count += 1
    return candidates


def _score_candidates(
    candidates: dict[str, TermCandidate], sentences: list[list[Token]]
) -> dict[str, float]:
    if not candidates:
        return {}
    tfs = [c.tf for c in candidates.values()]
    max_tf = max(tfs)
    tf_norm = statistics.mean(tfs) + statistics.pstdev(tfs)
    n_sentences = len(sentences)

    scores: dict[str, float] = {}
    for term, cand in candidates.items():
        case = max(cand.cased_count, cand.acronym_count) / (1.0 + math.log(cand.tf))
        pos = math.log(math.log(3.0 + statistics.median(si for si, _ in cand.occurrences)))
        freq = cand.tf / tf_norm

        left: list[str] = []
        right: list[str] = []
        for si, ti in cand.occurrences:
            sentence = sentences[si]
            if ti > 0 and _is_candidate(sentence[ti - 1]):
                left.append(sentence[ti - 1].low)
            if ti + 1 < len(sentence) and _is_candidate(sentence[ti + 1]):
                right.append(sentence[ti + 1].low)
        dl = len(set(left)) / len(left) if left else 0.0
        dr = len(set(right)) / len(right) if right else 0.0
        rel = 1.0 + (dl + dr) * cand.tf / max_tf

        sent = len({si for si, _ in cand.occurrences}) / n_sentences
        scores[term] = (rel * pos) / (case + freq / rel + sent / rel)
    return scores


def _ranked_keywords(text: str) -> list[KeywordScore]:
    sentences = tokenize(text)
    candidates = _collect_candidates(sentences)
    scores = _score_candidates(candidates, sentences)
    ranked = sorted(scores.items(), key=lambda kv: (kv[1], kv[0]))
    return [KeywordScore(term, score) for term, score in ranked]


def extract_keywords(text: str, k: int) -> list[KeywordScore]:
    """Return up to k keywords ordered by ascending score (best first)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return _ranked_keywords(text)[:k]


def select_keywords(text: str, k: int = 20) -> list[KeywordScore]:
    """Keyword selection with a short-text rule.

    Texts shorter than 10 tokens keep every candidate scoring strictly
    below the candidate mean, so tiny inputs are not over-pruned to a
    fixed k; longer texts keep the best k.
    """
    ranked = _ranked_keywords(text)
    if not ranked:
        return []
    n_tokens = sum(len(s) for s in tokenize(text))
    if n_tokens < 10:
        mean = statistics.mean(ks.score for ks in ranked)
        return [ks for ks in ranked if ks.score < mean]
    return ranked[:k]
