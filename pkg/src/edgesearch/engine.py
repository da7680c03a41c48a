"""Pipeline assembly: the deployable edge tier behind the CLI and HTTP API.

The engine owns the immutable lexical resources, the interest models,
and a handle to the cloud backend. Everything that crosses the
cloud-facing boundary goes through the backend's match() call, so the
privacy split is a single seam that tests can instrument and deployments
can point at a remote service.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import urllib.request
from pathlib import Path

from . import cloudsim, context, interest, keyext, lexstore, rank
from .cloudsim import InvertedIndex, MatchSet, Mode, SearchToken
from .config import AppConfig
from .errors import EdgeSearchError, InterestUnavailableError, TrainingError
from .evalharness import PASS_THROUGH, SEMANTIC_VARIANT
from .expand import ExpandedTerm, Provenance, expand
from .interest import ClickRecord, HistoryStore, InterestProfile, NBModel, RNNModel
from .stopwords import is_stopword
from .weights import WeightConfig, assign_weights


class LocalCloudBackend:
    """In-process stand-in for the cloud tier: pattern matching only."""

    def __init__(self, index: InvertedIndex):
        self.index = index

    def match(self, tokens: list[SearchToken]) -> MatchSet:
        return cloudsim.match(self.index, tokens)


class RemoteCloudBackend:
    """Client for a remote cloud tier speaking the documented /match contract.

    Drop-in replacement for the local simulator: assign it to
    SearchEngine.backend and the pipeline is unchanged.
    """

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def match(self, tokens: list[SearchToken]) -> MatchSet:
        payload = json.dumps(
            {"tokens": [{"value": t.value, "phrase": list(t.phrase)} for t in tokens]}
        ).encode("utf-8")
        request = urllib.request.Request(
            self.base_url + "/match",
            data=payload,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        with urllib.request.urlopen(request, timeout=self.timeout) as response:
            body = json.load(response)
        return MatchSet(
            docs=[
                cloudsim.MatchedDoc(d["doc_id"], d["token_count"], list(d["freqs"]))
                for d in body["docs"]
            ],
            n_terms=body["n_terms"],
        )


class SearchEngine:
    def __init__(self, cfg: AppConfig):
        self.cfg = cfg
        self.mode = cfg.mode
        self.key = cfg.key_bytes() if cfg.mode is Mode.ENCRYPTED else None
        self.db = lexstore.load_lexical_database(cfg.wordnet_dir)
        self.emb = lexstore.load_embeddings(cfg.embeddings_path)
        self.weight_cfg = WeightConfig(eta_max=cfg.eta_max)
        self.histories = HistoryStore(cfg.data_dir, capacity=cfg.history_n)
        self.nb: NBModel | None = None
        if cfg.nb_corpus_dir:
            self.nb = interest.train_nb(load_labeled_corpus(cfg.nb_corpus_dir))
        self._swap_lock = threading.Lock()
        self.index = cloudsim.ingest(cfg.corpus_dir, cfg.mode, self.key)
        self.backend = LocalCloudBackend(self.index)
        self._rnn_cache: dict[str, RNNModel | None] = {}
        self._user_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- index lifecycle ----------------------------------------------------

    def reingest(self) -> int:
        """Rebuild the index from the corpus directory and swap it atomically."""
        index = cloudsim.ingest(self.cfg.corpus_dir, self.mode, self.key)
        with self._swap_lock:
            self.index = index
            self.backend = LocalCloudBackend(index)
        return index.doc_count

    # -- interest -----------------------------------------------------------

    def _rnn_path(self, user_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in user_id)
        return Path(self.cfg.data_dir) / "models" / f"{safe}.rnn"

    def _rnn_model(self, user_id: str) -> RNNModel | None:
        if user_id not in self._rnn_cache:
            path = self._rnn_path(user_id)
            self._rnn_cache[user_id] = interest.load_rnn(path) if path.exists() else None
        return self._rnn_cache[user_id]

    def interest_profile(self, user_id: str) -> InterestProfile | None:
        history = self.histories.load_labels(user_id)
        try:
            return interest.predict_interest(
                self._rnn_model(user_id), history, self.cfg.default_interest
            )
        except InterestUnavailableError:
            return None

    def _user_lock(self, user_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._user_locks.setdefault(user_id, threading.Lock())

    def feedback(self, user_id: str, record: ClickRecord) -> str:
        if self.nb is None:
            raise EdgeSearchError("no topic classifier configured (nb_corpus_dir unset)")
        unknown = [d for d in record.clicked_doc_ids if d not in self.index.doc_table]
        if unknown:
            raise EdgeSearchError(f"unknown documents in feedback: {unknown}")
        by_dwell = sorted(
            zip(record.clicked_doc_ids, record.dwell_seconds), key=lambda x: -x[1]
        )
        bags = [self._doc_tokens(doc_id) for doc_id, _ in by_dwell]
        label = interest.session_interest(self.nb, bags)
        with self._user_lock(user_id):
            self.histories.append(user_id, record, label)
        return label

    def train_interest(
        self, user_id: str, epochs: int = 300, learning_rate: float = 0.5, seed: int = 0
    ) -> RNNModel:
        labels = self.histories.load_labels(user_id).sequence
        if len(labels) < 2:
            raise TrainingError("need at least two history entries to train")
        n = self.cfg.history_n
        examples = [(labels[max(0, i - n) : i], labels[i]) for i in range(1, len(labels))]
        model = interest.rnn_train(
            examples,
            epochs=epochs,
            learning_rate=learning_rate,
            seed=seed,
            hidden_dim=self.cfg.rnn_hidden,
        )
        interest.save_rnn(model, self._rnn_path(user_id))
        self._rnn_cache[user_id] = model
        return model

    # -- documents ----------------------------------------------------------

    def _doc_record(self, doc_id: str) -> cloudsim.DocumentRecord:
        record = self.index.doc_table.get(doc_id)
        if record is None:
            raise EdgeSearchError(f"unknown document: {doc_id}")
        return record

    def doc_body(self, doc_id: str) -> str:
        record = self._doc_record(doc_id)
        body = record.stored_body
        if self.mode is Mode.ENCRYPTED:
            assert self.key is not None
            body = cloudsim.decrypt_body(self.key, body)
        return body.decode("utf-8")

    def doc_title(self, doc_id: str) -> str:
        record = self._doc_record(doc_id)
        title = record.title
        if self.mode is Mode.ENCRYPTED:
            assert self.key is not None
            title = cloudsim.decrypt_body(self.key, title)
        return title.decode("utf-8")

    def _doc_tokens(self, doc_id: str) -> list[str]:
        text = self.doc_body(doc_id)
        return [t.low for sentence in keyext.tokenize(text) for t in sentence]

    # -- search -------------------------------------------------------------

    def _tokens_for_terms(self, terms: list[ExpandedTerm]) -> tuple[list[ExpandedTerm], list[SearchToken]]:
        kept: list[ExpandedTerm] = []
        tokens: list[SearchToken] = []
        for term in terms:
            token = cloudsim.make_search_token(term.term, self.mode, self.key)
            if token is not None:
                kept.append(term)
                tokens.append(token)
        return kept, tokens

    def _passthrough_terms(self, query: context.QueryText) -> list[ExpandedTerm]:
        seen: list[str] = []
        for token in query.tokens:
            norm = cloudsim.normalize_token(token.low)
            if norm and norm not in seen:
                seen.append(norm)
        return [ExpandedTerm(t, Provenance.DERIVED, weight=1.0) for t in seen]

    def search(
        self,
        user_id: str,
        raw_query: str,
        variant: str = SEMANTIC_VARIANT,
        top: int | None = None,
    ) -> dict:
        """Run one query through the pipeline and assemble the response."""
        cutoff = top or self.cfg.cutoff
        query = context.QueryText.from_raw(raw_query)

        t0 = time.perf_counter()
        theta: InterestProfile | None = None
        bundle = None
        mu = None
        if variant == PASS_THROUGH:
            terms = self._passthrough_terms(query)
        else:
            bundle = context.identify_context(query, self.db)
            p = expand(query, bundle, self.db, self.emb, k=self.cfg.knn_k)
            theta = self.interest_profile(user_id)
            p = assign_weights(p, bundle, theta, self.emb, self.weight_cfg)
            terms = p.terms
            mu = p.mu
        terms, tokens = self._tokens_for_terms(terms)
        t1 = time.perf_counter()

        delta = self.backend.match(tokens) if tokens else MatchSet(n_terms=0)
        t2 = time.perf_counter()

        ranked = rank.rank(delta, terms, cutoff=cutoff)
        t3 = time.perf_counter()

        results = []
        for entry in ranked.entries:
            item = {
                "doc_id": entry.doc_id,
                "title": self.doc_title(entry.doc_id),
                "score": entry.gamma,
                "breakdown": entry.breakdown,
            }
            if self.mode is Mode.PLAIN:
                item["snippet"] = self.doc_body(entry.doc_id)[:160]
            results.append(item)

        query_id = hashlib.sha256(
            f"{user_id}|{raw_query}|{self.mode.value}|{variant}".encode("utf-8")
        ).hexdigest()[:16]

        return {
            "query": raw_query,
            "query_id": query_id,
            "user_id": user_id,
            "mode": self.mode.value,
            "variant": variant,
            "results": results,
            "trace": {
                "trimmed": sorted(bundle.trimmed) if bundle else [],
                "context": sorted(bundle.context) if bundle else [],
                "name_entities": sorted(bundle.name_entities) if bundle else [],
                "mu": mu,
                "theta": (
                    {"label": theta.theta, "confidence": theta.confidence, "source": theta.source}
                    if theta
                    else None
                ),
                "terms": [
                    {
                        "term": t.term,
                        "provenance": t.provenance.value,
                        "parent": t.parent,
                        "weight": t.weight,
                    }
                    for t in terms
                ],
            },
            "timings": {
                "expansion_ms": (t1 - t0) * 1000.0,
                "match_ms": (t2 - t1) * 1000.0,
                "rank_ms": (t3 - t2) * 1000.0,
            },
        }

    def ranked_doc_ids(self, raw_query: str, variant: str = SEMANTIC_VARIANT) -> list[str]:
        """Evaluation entry point: ranked document ids for one query."""
        response = self.search("eval", raw_query, variant=variant)
        return [r["doc_id"] for r in response["results"]]


def load_labeled_corpus(root: str | Path) -> list[tuple[list[str], str]]:
    """Read a seed corpus laid out as <root>/<label>/*.txt into token bags."""
    base = Path(root)
    if not base.is_dir():
        raise EdgeSearchError(f"labeled corpus directory not found: {base}")
    docs: list[tuple[list[str], str]] = []
    for label_dir in sorted(p for p in base.iterdir() if p.is_dir()):
        for path in sorted(label_dir.glob("*.txt")):
            tokens = [
                t.low
                for sentence in keyext.tokenize(path.read_text(encoding="utf-8"))
                for t in sentence
                if not is_stopword(t.low)
            ]
            if tokens:
                docs.append((tokens, label_dir.name))
    return docs
