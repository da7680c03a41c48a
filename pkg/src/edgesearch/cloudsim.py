"""Cloud-tier stand-in: inverted index plus exhaustive pattern matching.

The index is built over plain or deterministically-encrypted tokens and
answers term and phrase lookups only; it never sees weights, glosses, or
embeddings. Token tags come from a keyed hash, so equal tokens map to
equal tags and exact matching works over ciphertext. Document bodies use
a synthetic-IV stream encryption: they are never searched, only returned,
and the derived IV keeps re-ingestion bit-identical. Deterministic tags
leak token-equality frequencies; acceptable under the honest-edge model.
"""

from __future__ import annotations

import hashlib
import hmac
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import keyext
from .errors import ConfigError, CorpusError, EdgeSearchError, ParseError
from .stopwords import is_stopword

log = logging.getLogger(__name__)

TAG_HEX_LEN = 64  # sha256 hex digest


class Mode(str, Enum):
    PLAIN = "PLAIN"
    ENCRYPTED = "ENCRYPTED"


@dataclass
class DocumentRecord:
    doc_id: str
    token_count: int
    stored_body: bytes
    title: bytes  # utf-8 in PLAIN mode, ciphertext in ENCRYPTED mode


@dataclass
class InvertedIndex:
    mode: Mode
    # token -> list of (doc_id, term frequency, positions)
    postings: dict[str, list[tuple[str, int, tuple[int, ...]]]] = field(default_factory=dict)
    doc_table: dict[str, DocumentRecord] = field(default_factory=dict)

    @property
    def doc_count(self) -> int:
        return len(self.doc_table)


@dataclass(frozen=True)
class SearchToken:
    value: str
    phrase: tuple[str, ...] = ()


@dataclass
class MatchedDoc:
    doc_id: str
    token_count: int
    freqs: list[int]  # aligned with the request's token list


@dataclass
class MatchSet:
    docs: list[MatchedDoc] = field(default_factory=list)
    n_terms: int = 0

    @property
    def doc_ids(self) -> list[str]:
        return [d.doc_id for d in self.docs]


def normalize_token(token: str) -> str:
    return "".join(c for c in token.lower() if c.isalnum())


def encrypt_token(key: bytes, token: str) -> str:
    """Deterministic keyed tag for one normalized token (64 hex chars)."""
    if not token:
        raise EdgeSearchError("cannot encrypt an empty token")
    return hmac.new(key, b"tok:" + token.encode("utf-8"), hashlib.sha256).hexdigest()


def _keystream(key: bytes, iv: bytes, length: int) -> bytes:
    out = bytearray()
    counter = 0
    while len(out) < length:
        out += hmac.new(key, b"ks:" + iv + counter.to_bytes(4, "big"), hashlib.sha256).digest()
        counter += 1
    return bytes(out[:length])


def encrypt_body(key: bytes, label: str, data: bytes) -> bytes:
    """Stream-encrypt bytes under a synthetic IV derived from the content."""
    iv = hmac.new(key, b"iv:" + label.encode("utf-8") + b":" + data, hashlib.sha256).digest()[:16]
    return iv + bytes(a ^ b for a, b in zip(data, _keystream(key, iv, len(data))))


def decrypt_body(key: bytes, blob: bytes) -> bytes:
    iv, ct = blob[:16], blob[16:]
    return bytes(a ^ b for a, b in zip(ct, _keystream(key, iv, len(ct))))


def ingest(corpus_dir: str | Path, mode: Mode, key: bytes | None = None) -> InvertedIndex:
    """Tokenize every document in the directory and build the index.

    The file name without extension is the document id. Unreadable files
    are skipped with a warning; an empty corpus is an error.
    """
    if mode is Mode.ENCRYPTED and key is None:
        raise ConfigError("encrypted ingestion requires a key")
    root = Path(corpus_dir)
    if not root.is_dir():
        raise CorpusError(f"corpus directory not found: {root}")

    index = InvertedIndex(mode=mode)
    raw_postings: dict[str, dict[str, list[int]]] = {}
    for path in sorted(p for p in root.iterdir() if p.is_file() and not p.name.startswith(".")):
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            log.warning("skipping unreadable document %s: %s", path.name, exc)
            continue
        doc_id = path.stem
        tokens = [t for sentence in keyext.tokenize(text) for t in sentence]
        title = next((line.strip() for line in text.splitlines() if line.strip()), doc_id)

        for position, token in enumerate(tokens):
            norm = normalize_token(token.low)
            if len(norm) < 2 or is_stopword(norm):
                continue
            index_key = encrypt_token(key, norm) if mode is Mode.ENCRYPTED else norm
            raw_postings.setdefault(index_key, {}).setdefault(doc_id, []).append(position)

        body = text.encode("utf-8")
        title_bytes = title[:120].encode("utf-8")
        if mode is Mode.ENCRYPTED:
            assert key is not None
            body = encrypt_body(key, doc_id, body)
            title_bytes = encrypt_body(key, doc_id + "#title", title_bytes)
        index.doc_table[doc_id] = DocumentRecord(
            doc_id=doc_id, token_count=len(tokens), stored_body=body, title=title_bytes
        )

    if not index.doc_table:
        raise CorpusError(f"no readable documents in {root}")

    for index_key in sorted(raw_postings):
        index.postings[index_key] = [
            (doc_id, len(positions), tuple(positions))
            for doc_id, positions in sorted(raw_postings[index_key].items())
        ]
    return index


def make_search_token(term: str, mode: Mode, key: bytes | None = None) -> SearchToken | None:
    """Edge-side construction of the wire token for one expanded term."""
    words = [normalize_token(w) for w in term.replace("_", " ").split()]
    words = [w for w in words if w]
    if not words:
        return None
    if mode is Mode.ENCRYPTED:
        if key is None:
            raise ConfigError("encrypted search requires a key")
        words = [encrypt_token(key, w) for w in words]
    if len(words) == 1:
        return SearchToken(value=words[0])
    return SearchToken(value=" ".join(words), phrase=tuple(words))


def _doc_positions(idx: InvertedIndex, token: str) -> dict[str, tuple[int, ...]]:
    return {doc_id: positions for doc_id, _, positions in idx.postings.get(token, [])}


def _phrase_freq(idx: InvertedIndex, phrase: tuple[str, ...]) -> dict[str, int]:
    per_token = [_doc_positions(idx, tok) for tok in phrase]
    docs = set(per_token[0])
    for positions in per_token[1:]:
        docs &= set(positions)
    freqs: dict[str, int] = {}
    for doc_id in docs:
        rest = [set(positions[doc_id]) for positions in per_token[1:]]
        count = sum(
            1
            for start in per_token[0][doc_id]
            if all(start + offset + 1 in rest[offset] for offset in range(len(rest)))
        )
        if count:
            freqs[doc_id] = count
    return freqs


def _term_freqs(idx: InvertedIndex, term: SearchToken) -> dict[str, int]:
    if term.phrase:
        return _phrase_freq(idx, term.phrase)
    return {doc_id: freq for doc_id, freq, _ in idx.postings.get(term.value, [])}


def match(idx: InvertedIndex, terms: list[SearchToken]) -> MatchSet:
    """Exhaustive pattern matching: postings union plus adjacency for phrases.

    Returns per-document frequencies aligned with the request's term list.
    No ranking and no weights; the cloud tier never sees them.
    """
    if not terms:
        raise ValueError("terms must be non-empty")
    freq_maps = [_term_freqs(idx, term) for term in terms]
    matched = sorted(set().union(*freq_maps))
    result = MatchSet(n_terms=len(terms))
    for doc_id in matched:
        result.docs.append(
            MatchedDoc(
                doc_id=doc_id,
                token_count=idx.doc_table[doc_id].token_count,
                freqs=[fm.get(doc_id, 0) for fm in freq_maps],
            )
        )
    return result


def tfidf(idx: InvertedIndex, term: SearchToken, doc_id: str, delta: MatchSet) -> float:
    """Length-normalized term frequency scaled by smoothed inverse document
    frequency counted within the match set."""
    if doc_id not in {d.doc_id for d in delta.docs}:
        raise ValueError(f"document {doc_id} not in the match set")
    freqs = _term_freqs(idx, term)
    f = freqs.get(doc_id, 0)
    if f == 0:
        return 0.0
    df = sum(1 for d in delta.docs if freqs.get(d.doc_id, 0) > 0)
    if df == 0:
        return 0.0
    return (f / idx.doc_table[doc_id].token_count) * math.log(1.0 + len(delta.docs) / df)


# ---------------------------------------------------------------------------
# Index snapshot
# ---------------------------------------------------------------------------


def save_index(idx: InvertedIndex, path: str | Path) -> None:
    """Write the documented single-file snapshot (header, postings, doc table)."""
    lines = ["#edgesearch-index v1", f"mode={idx.mode.value}", f"doc_count={idx.doc_count}", "[postings]"]
    for token in sorted(idx.postings):
        entries = ";".join(
            f"{doc_id}:{freq}:{','.join(map(str, positions))}"
            for doc_id, freq, positions in idx.postings[token]
        )
        lines.append(f"{token}\t{entries}")
    lines.append("[docs]")
    for doc_id in sorted(idx.doc_table):
        rec = idx.doc_table[doc_id]
        lines.append(
            f"{doc_id}\t{rec.token_count}\t{rec.title.hex()}\t{rec.stored_body.hex()}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_index(path: str | Path) -> InvertedIndex:
    p = Path(path)
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "#edgesearch-index v1":
        raise ParseError(f"{p.name}:1: not an index snapshot")
    idx = InvertedIndex(mode=Mode(lines[1].split("=", 1)[1]))
    section = None
    for lineno, line in enumerate(lines[2:], 3):
        if line.startswith("["):
            section = line
            continue
        if not line.strip() or line.startswith("doc_count="):
            continue
        if section == "[postings]":
            token, entries = line.split("\t", 1)
            posting = []
            for entry in entries.split(";"):
                doc_id, freq, positions = entry.split(":")
                posting.append(
                    (doc_id, int(freq), tuple(int(x) for x in positions.split(",") if x))
                )
            idx.postings[token] = posting
        elif section == "[docs]":
            doc_id, token_count, title_hex, body_hex = line.split("\t")
            idx.doc_table[doc_id] = DocumentRecord(
                doc_id=doc_id,
                token_count=int(token_count),
                stored_body=bytes.fromhex(body_hex),
                title=bytes.fromhex(title_hex),
            )
        else:
            raise ParseError(f"{p.name}:{lineno}: content outside a section")
    return idx
