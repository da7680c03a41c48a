"""Independent brute-force recomputation of the expansion threshold step.

Shares nothing with the package internals: its own database parser, its
own cosine arithmetic (math module over plain lists), its own nearest
neighbor scan. Used to cross-check mu and the surviving derived set.
"""

import math
from pathlib import Path


def parse_wordnet(root):
    """Minimal standalone parser for the fixture database files."""
    root = Path(root)
    synsets = {}
    index = {}
    for name, pos in (("noun", "n"), ("verb", "v")):
        data = root / f"data.{name}"
        if not data.exists():
            continue
        for line in data.read_text().splitlines():
            if line.startswith("  ") or not line.strip():
                continue
            head, gloss = line.split(" | ", 1)
            fields = head.split()
            w_cnt = int(fields[3], 16)
            words = [fields[4 + 2 * i].lower() for i in range(w_cnt)]
            synsets[f"{fields[0]}-{pos}"] = words
        for line in (root / f"index.{name}").read_text().splitlines():
            if line.startswith("  ") or not line.strip():
                continue
            fields = line.split()
            lemma, p_cnt, synset_cnt = fields[0], int(fields[3]), int(fields[2])
            offsets = fields[4 + p_cnt + 2 : 4 + p_cnt + 2 + synset_cnt]
            index[(lemma, pos)] = [f"{off}-{pos}" for off in offsets]
    return synsets, index


def wordnet_synonyms(synsets, index, lemma):
    forms = [lemma]
    if lemma.endswith("s") and len(lemma) > 2:
        forms.append(lemma[:-1])
    if lemma.endswith("es") and len(lemma) > 3:
        forms.append(lemma[:-2])
    ids = []
    for pos in ("n", "v"):
        for form in forms:
            if (form, pos) in index:
                ids = index[(form, pos)]
                break
        if ids:
            break
    out = set()
    for sid in ids:
        for word in synsets[sid]:
            if word not in forms:
                out.add(word.replace("_", " "))
    return out


def load_vectors(path):
    lines = Path(path).read_text().splitlines()
    vectors = {}
    for line in lines[1:]:
        if line.strip():
            fields = line.split()
            vectors[fields[0]] = [float(x) for x in fields[1:]]
    return vectors


def cos(u, v):
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0 or nv == 0:
        return None
    return dot / (nu * nv)


def term_vector(vectors, term):
    parts = [vectors[w] for w in term.replace("_", " ").split() if w in vectors and any(vectors[w])]
    if not parts:
        return None
    return [sum(col) / len(parts) for col in zip(*parts)]


def knn(vectors, word, k):
    ref = term_vector(vectors, word)
    if ref is None or k <= 0:
        return []
    scored = []
    for other, vec in vectors.items():
        if other == word:
            continue
        c = cos(ref, vec)
        if c is not None:
            scored.append((other, c))
    scored.sort(key=lambda wc: (-wc[1], wc[0]))
    return [w for w, _ in scored[:k]]


def context_score(vectors, candidate, context_set):
    cand = term_vector(vectors, candidate)
    if cand is None:
        return None
    total, computed = 0.0, False
    for keyword in context_set:
        ref = term_vector(vectors, keyword)
        if ref is None:
            continue
        c = cos(cand, ref)
        if c is not None:
            total += c
            computed = True
    return total if computed else None


def recompute_expansion(wordnet_dir, vectors_path, eligible_keywords, context_set, k=10):
    """Return (mu, surviving derived term set) the brute-force way."""
    synsets, index = parse_wordnet(wordnet_dir)
    vectors = load_vectors(vectors_path)
    scored = []
    for q in eligible_keywords:
        nominated = wordnet_synonyms(synsets, index, q) | set(knn(vectors, q, k))
        nominated.discard(q)
        for cand in sorted(nominated):
            score = context_score(vectors, cand, context_set)
            if score is not None:
                scored.append((cand, score))
    if not scored:
        return None, set()
    mu = sum(s for _, s in scored) / len(scored)
    return mu, {cand for cand, score in scored if score > mu}
