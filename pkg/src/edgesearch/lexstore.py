"""Lexical resources: a WordNet-format database and a word-embedding table.

Both resources are immutable after loading and safe for concurrent reads.
The database is parsed from the plain-text WordNet 3.x layout
(``index.<pos>`` / ``data.<pos>``); embeddings from word2vec text format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ResourceError

POS_FILES = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}


@dataclass(frozen=True)
class Synset:
    id: str
    pos: str
    lemmas: tuple[str, ...]
    gloss: str
    hypernyms: tuple[str, ...] = ()
    instance_hypernyms: tuple[str, ...] = ()


@dataclass
class LexicalDatabase:
    synsets: dict[str, Synset] = field(default_factory=dict)
    # (lemma, pos) -> synset ids in sense-frequency order
    lemma_index: dict[tuple[str, str], list[str]] = field(default_factory=dict)

    def lookup(self, lemma: str, pos: str) -> list[Synset]:
        """Resolve a lemma to its synsets, trying a plural strip as fallback."""
        key = normalize_lemma(lemma)
        for form in _lookup_forms(key):
            ids = self.lemma_index.get((form, pos))
            if ids:
                return [self.synsets[sid] for sid in ids]
        return []


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def get(self, word: str) -> np.ndarray | None:
        vec = self.vectors.get(word)
        if vec is None:
            vec = self.vectors.get(word.lower())
        return vec


def normalize_lemma(lemma: str) -> str:
    return lemma.strip().lower().replace(" ", "_")


def _lookup_forms(lemma: str) -> list[str]:
    forms = [lemma]
    if lemma.endswith("s") and len(lemma) > 2:
        forms.append(lemma[:-1])
    if lemma.endswith("es") and len(lemma) > 3:
        forms.append(lemma[:-2])
    return forms


def _is_license_line(line: str) -> bool:
    return line.startswith("  ")


def _parse_index_line(line: str, where: str) -> tuple[str, str, list[str]]:
    fields = line.split()
    try:
        lemma = fields[0].lower()
        pos = fields[1]
        synset_cnt = int(fields[2])
        p_cnt = int(fields[3])
        rest = fields[4 + p_cnt :]
        # rest = sense_cnt tagsense_cnt offsets...
        offsets = rest[2 : 2 + synset_cnt]
        if len(offsets) != synset_cnt:
            raise IndexError
        for off in offsets:
            int(off)
    except (IndexError, ValueError):
        raise ParseError(f"{where}: malformed index line") from None
    return lemma, pos, offsets


def _parse_data_line(line: str, pos: str, where: str) -> Synset:
    if " | " in line:
        head, gloss = line.split(" | ", 1)
    else:
        head, gloss = line, ""
    fields = head.split()
    try:
        offset = fields[0]
        int(offset)
        w_cnt = int(fields[3], 16)
        words = [fields[4 + 2 * i] for i in range(w_cnt)]
        ptr_base = 4 + 2 * w_cnt
        p_cnt = int(fields[ptr_base])
        hypernyms = []
        instance_hypernyms = []
        for i in range(p_cnt):
            sym, target, target_pos, _src = fields[ptr_base + 1 + 4 * i : ptr_base + 5 + 4 * i]
            if sym == "@":
                hypernyms.append(f"{target}-{target_pos}")
            elif sym == "@i":
                instance_hypernyms.append(f"{target}-{target_pos}")
    except (IndexError, ValueError):
        raise ParseError(f"{where}: malformed data line") from None
    if not words:
        raise ParseError(f"{where}: synset without lemmas")
    if not gloss.strip():
        raise ParseError(f"{where}: synset without gloss")
    return Synset(
        id=f"{offset}-{pos}",
        pos=pos,
        lemmas=tuple(w.lower() for w in words),
        gloss=gloss.strip(),
        hypernyms=tuple(hypernyms),
        instance_hypernyms=tuple(instance_hypernyms),
    )


def load_lexical_database(path: str | Path) -> LexicalDatabase:
    """Load a WordNet 3.x format database directory.

    Lines starting with two spaces (the license header) are skipped.
    Raises ResourceError when no index/data file pair is present and
    ParseError (naming file and line) on malformed content.
    """
    root = Path(path)
    if not root.is_dir():
        raise ResourceError(f"lexical database directory not found: {root}")

    db = LexicalDatabase()
    loaded_any = False
    for name, pos in POS_FILES.items():
        index_path = root / f"index.{name}"
        data_path = root / f"data.{name}"
        if not index_path.exists() and not data_path.exists():
            continue
        if not (index_path.exists() and data_path.exists()):
            raise ResourceError(f"incomplete database: need both index.{name} and data.{name}")
        loaded_any = True

        for lineno, line in enumerate(data_path.read_text(encoding="utf-8").splitlines(), 1):
            if _is_license_line(line) or not line.strip():
                continue
            synset = _parse_data_line(line.rstrip(), pos, f"{data_path.name}:{lineno}")
            db.synsets[synset.id] = synset

        for lineno, line in enumerate(index_path.read_text(encoding="utf-8").splitlines(), 1):
            if _is_license_line(line) or not line.strip():
                continue
            lemma, line_pos, offsets = _parse_index_line(line.rstrip(), f"{index_path.name}:{lineno}")
            ids = [f"{off}-{line_pos}" for off in offsets]
            for sid in ids:
                if sid not in db.synsets:
                    raise ParseError(
                        f"{index_path.name}:{lineno}: offset {sid} not present in data.{name}"
                    )
            db.lemma_index[(lemma, line_pos)] = ids

    if not loaded_any:
        raise ResourceError(f"no WordNet index/data files under {root}")

    _validate(db)
    return db


def _validate(db: LexicalDatabase) -> None:
    for (lemma, _pos), ids in db.lemma_index.items():
        for sid in ids:
            if lemma not in db.synsets[sid].lemmas:
                raise ParseError(f"index entry {lemma!r} missing from synset {sid}")
    for synset in db.synsets.values():
        for rel in synset.hypernyms + synset.instance_hypernyms:
            if rel not in db.synsets:
                raise ParseError(f"synset {synset.id} points to unknown synset {rel}")


def synonyms(db: LexicalDatabase, lemma: str, pos: str) -> set[str]:
    """Union of lemmas over all synsets of (lemma, pos), excluding lemma itself.

    Multi-word lemmas are returned with spaces instead of underscores.
    Unknown lemmas yield the empty set.
    """
    key = normalize_lemma(lemma)
    out: set[str] = set()
    for synset in db.lookup(lemma, pos):
        for other in synset.lemmas:
            if other not in _lookup_forms(key):
                out.add(other.replace("_", " "))
    return out


def is_name_entity(db: LexicalDatabase, token_span: str, query_initial: bool = False) -> bool:
    """Decide whether a query span names an entity.

    A capitalized span is an entity when its synsets carry only
    instance-hypernym relations (the proper-noun marker), or when it is
    mid-query and has no common-noun synset at all.
    """
    stripped = token_span.strip()
    if not stripped or not stripped[0].isupper():
        return False
    synsets = db.lookup(stripped, "n")
    if synsets:
        return all(s.instance_hypernyms and not s.hypernyms for s in synsets)
    return not query_initial


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load a word2vec text format embedding table."""
    p = Path(path)
    if not p.exists():
        raise ResourceError(f"embedding file not found: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ResourceError(f"embedding file empty: {p}")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"{p.name}:1: expected '<count> <dim>' header")
    try:
        count, dim = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"{p.name}:1: expected '<count> <dim>' header") from None

    table = EmbeddingTable(dim=dim)
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != dim + 1:
            raise ParseError(f"{p.name}:{lineno}: expected {dim} components")
        try:
            vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        except ValueError:
            raise ParseError(f"{p.name}:{lineno}: non-numeric component") from None
        table.vectors[fields[0]] = vec
    if not table.vectors:
        raise ResourceError(f"embedding file has no vectors: {p}")
    if len(table.vectors) != count:
        raise ParseError(f"{p.name}: header count {count} != {len(table.vectors)} vectors")
    return table


def cosine(table: EmbeddingTable, a: str, b: str) -> float | None:
    """Cosine of two vocabulary words; None when either is out of vocabulary."""
    va, vb = table.get(a), table.get(b)
    return _vector_cosine(va, vb)


def _vector_cosine(va: np.ndarray | None, vb: np.ndarray | None) -> float | None:
    if va is None or vb is None:
        return None
    na = math.sqrt(float(np.dot(va, va)))
    nb = math.sqrt(float(np.dot(vb, vb)))
    if na == 0.0 or nb == 0.0:
        return None
    return float(np.dot(va, vb)) / (na * nb)


def phrase_vector(table: EmbeddingTable, phrase: str) -> np.ndarray | None:
    """Mean vector of the in-vocabulary constituent words; None if all are OOV."""
    parts = phrase.replace("_", " ").split()
    vecs = []
    for part in parts:
        vec = table.get(part)
        if vec is not None and float(np.dot(vec, vec)) > 0.0:
            vecs.append(vec)
    if not vecs:
        return None
    return np.mean(vecs, axis=0)


def similarity(table: EmbeddingTable, a: str, b: str) -> float | None:
    """Cosine between (possibly multi-word) terms via mean phrase vectors."""
    return _vector_cosine(phrase_vector(table, a), phrase_vector(table, b))


def nearest_neighbors(table: EmbeddingTable, word: str, k: int) -> list[tuple[str, float]]:
    """k nearest vocabulary words by cosine, excluding the word itself."""
    if k <= 0:
        return []
    ref = phrase_vector(table, word)
    if ref is None:
        return []
    scored: list[tuple[str, float]] = []
    for other in table.vectors:
        if other == word or other == word.lower():
            continue
        sim = _vector_cosine(ref, table.vectors[other])
        if sim is not None:
            scored.append((other, sim))
    scored.sort(key=lambda ws: (-ws[1], ws[0]))
    return scored[:k]
