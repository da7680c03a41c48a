import math

import pytest

from edgesearch import cloudsim
from edgesearch.cloudsim import Mode, SearchToken
from edgesearch.errors import ConfigError, CorpusError, EdgeSearchError

KEY = bytes.fromhex("11" * 32)
KEY2 = bytes.fromhex("22" * 32)


class TestEncryptToken:
    def test_deterministic(self):
        assert cloudsim.encrypt_token(KEY, "network") == cloudsim.encrypt_token(KEY, "network")

    def test_key_separation(self):
        assert cloudsim.encrypt_token(KEY, "network") != cloudsim.encrypt_token(KEY2, "network")

    def test_fixed_length_hex(self):
        for token in ("a", "network", "x" * 100, "München".lower()):
            tag = cloudsim.encrypt_token(KEY, token)
            assert len(tag) == 64
            int(tag, 16)  # valid hex

    def test_empty_token_rejected(self):
        with pytest.raises(EdgeSearchError):
            cloudsim.encrypt_token(KEY, "")


class TestBodyEncryption:
    def test_roundtrip(self):
        blob = cloudsim.encrypt_body(KEY, "doc1", b"some document body")
        assert cloudsim.decrypt_body(KEY, blob) == b"some document body"

    def test_ciphertext_differs_from_plaintext(self):
        body = b"confidential words inside"
        blob = cloudsim.encrypt_body(KEY, "doc1", body)
        assert body not in blob

    def test_distinct_documents_distinct_ciphertexts(self):
        a = cloudsim.encrypt_body(KEY, "doc1", b"same body")
        b = cloudsim.encrypt_body(KEY, "doc2", b"same body")
        assert a != b


class TestIngest:
    def test_single_doc_postings(self, tmp_path):
        (tmp_path / "d.txt").write_text("cat sat")
        idx = cloudsim.ingest(tmp_path, Mode.PLAIN)
        assert idx.postings["cat"] == [("d", 1, (0,))]
        assert idx.postings["sat"] == [("d", 1, (1,))]
        assert idx.doc_table["d"].token_count == 2

    def test_tiny_fixture_document_frequencies(self, tiny_corpus):
        idx = cloudsim.ingest(tiny_corpus, Mode.PLAIN)
        # Hand counts: "cat" occurs in doc1 (twice) and doc2 (once).
        assert [(d, f) for d, f, _ in idx.postings["cat"]] == [("doc1", 2), ("doc2", 1)]
        assert idx.doc_count == 3

    def test_stopwords_and_single_chars_not_indexed(self, tiny_corpus):
        idx = cloudsim.ingest(tiny_corpus, Mode.PLAIN)
        assert "the" not in idx.postings
        assert "a" not in idx.postings

    def test_structural_isomorphism_under_encryption(self, tiny_corpus):
        plain = cloudsim.ingest(tiny_corpus, Mode.PLAIN)
        enc = cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED, KEY)
        assert len(plain.postings) == len(enc.postings)
        for token, posting in plain.postings.items():
            tag = cloudsim.encrypt_token(KEY, token)
            assert enc.postings[tag] == posting

    def test_no_plaintext_token_in_encrypted_index(self, tiny_corpus):
        plain = cloudsim.ingest(tiny_corpus, Mode.PLAIN)
        enc = cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED, KEY)
        serialized = " ".join(enc.postings) + " ".join(
            rec.stored_body.hex() + rec.title.hex() for rec in enc.doc_table.values()
        )
        for token in plain.postings:
            assert token not in serialized

    def test_reingestion_bit_identical(self, tiny_corpus):
        a = cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED, KEY)
        b = cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED, KEY)
        assert a.postings == b.postings
        assert {d: (r.token_count, r.stored_body, r.title) for d, r in a.doc_table.items()} == {
            d: (r.token_count, r.stored_body, r.title) for d, r in b.doc_table.items()
        }

    def test_empty_corpus_rejected(self, tmp_path):
        with pytest.raises(CorpusError):
            cloudsim.ingest(tmp_path, Mode.PLAIN)

    def test_unreadable_file_skipped(self, tmp_path, caplog):
        (tmp_path / "good.txt").write_text("fine words here")
        (tmp_path / "bad.txt").write_bytes(b"\xff\xfe\x00binary")
        with caplog.at_level("WARNING"):
            idx = cloudsim.ingest(tmp_path, Mode.PLAIN)
        assert idx.doc_count == 1
        assert any("bad.txt" in r.message for r in caplog.records)

    def test_encrypted_requires_key(self, tiny_corpus):
        with pytest.raises(ConfigError):
            cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED)

    def test_positions_strictly_increasing_frequencies_positive(self, planted_corpus):
        idx = cloudsim.ingest(planted_corpus, Mode.PLAIN)
        for posting in idx.postings.values():
            for _doc, freq, positions in posting:
                assert freq >= 1
                assert freq == len(positions)
                assert list(positions) == sorted(set(positions))


class TestMatch:
    @pytest.fixture()
    def idx(self, tiny_corpus):
        return cloudsim.ingest(tiny_corpus, Mode.PLAIN)

    def test_term_in_two_docs(self, idx):
        delta = cloudsim.match(idx, [SearchToken("cat")])
        assert delta.doc_ids == ["doc1", "doc2"]
        assert [d.freqs for d in delta.docs] == [[2], [1]]

    def test_phrase_adjacency(self, idx):
        token = cloudsim.make_search_token("european commission", Mode.PLAIN)
        delta = cloudsim.match(idx, [token])
        assert delta.doc_ids == ["doc2", "doc3"]

    def test_phrase_requires_adjacency(self, tmp_path):
        (tmp_path / "d1.txt").write_text("european trade commission")
        (tmp_path / "d2.txt").write_text("the european commission met")
        idx = cloudsim.ingest(tmp_path, Mode.PLAIN)
        token = cloudsim.make_search_token("european commission", Mode.PLAIN)
        delta = cloudsim.match(idx, [token])
        assert delta.doc_ids == ["d2"]

    def test_no_match_is_valid_empty(self, idx):
        delta = cloudsim.match(idx, [SearchToken("zzqx")])
        assert delta.docs == []

    def test_union_over_terms(self, idx):
        delta = cloudsim.match(idx, [SearchToken("purred"), SearchToken("bark")])
        assert delta.doc_ids == ["doc1", "doc3"]
        assert [d.freqs for d in delta.docs] == [[1, 0], [0, 1]]

    def test_empty_request_rejected(self, idx):
        with pytest.raises(ValueError):
            cloudsim.match(idx, [])

    def test_encrypted_match_equals_plain(self, tiny_corpus):
        # Encryption-transparency oracle: run both modes, compare results.
        plain_idx = cloudsim.ingest(tiny_corpus, Mode.PLAIN)
        enc_idx = cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED, KEY)
        for term in ("cat", "dog", "european commission", "bark", "zzqx"):
            plain_delta = cloudsim.match(plain_idx, [cloudsim.make_search_token(term, Mode.PLAIN)])
            enc_delta = cloudsim.match(
                enc_idx, [cloudsim.make_search_token(term, Mode.ENCRYPTED, KEY)]
            )
            assert plain_delta.doc_ids == enc_delta.doc_ids
            assert [d.freqs for d in plain_delta.docs] == [d.freqs for d in enc_delta.docs]


class TestTfidf:
    def test_direct_formula(self, tmp_path):
        # f=2, |doc|=10, |delta|=4, df=2 -> 0.2 * ln(3)
        for i, body in enumerate(
            [
                "cat cat filler filler filler filler filler filler filler filler",
                "cat mouse filler filler filler filler filler filler filler filler",
                "mouse mouse filler filler filler filler filler filler filler filler",
                "mouse bird filler filler filler filler filler filler filler filler",
            ]
        ):
            (tmp_path / f"d{i}.txt").write_text(body)
        idx = cloudsim.ingest(tmp_path, Mode.PLAIN)
        tokens = [SearchToken("cat"), SearchToken("mouse"), SearchToken("bird")]
        delta = cloudsim.match(idx, tokens)
        assert len(delta.docs) == 4
        value = cloudsim.tfidf(idx, SearchToken("cat"), "d0", delta)
        assert value == pytest.approx(0.2 * math.log(3.0), abs=1e-12)
        assert value == pytest.approx(0.21972245773362198, abs=1e-9)

    def test_absent_term_zero(self, tiny_corpus):
        idx = cloudsim.ingest(tiny_corpus, Mode.PLAIN)
        delta = cloudsim.match(idx, [SearchToken("cat")])
        assert cloudsim.tfidf(idx, SearchToken("bark"), "doc1", delta) == 0.0

    def test_ubiquitous_term_stays_positive(self, tmp_path):
        (tmp_path / "d1.txt").write_text("word other")
        (tmp_path / "d2.txt").write_text("word thing")
        idx = cloudsim.ingest(tmp_path, Mode.PLAIN)
        delta = cloudsim.match(idx, [SearchToken("word")])
        value = cloudsim.tfidf(idx, SearchToken("word"), "d1", delta)
        assert value == pytest.approx(0.5 * math.log(2.0), abs=1e-12)
        assert value > 0


class TestSnapshot:
    def test_roundtrip(self, tiny_corpus, tmp_path):
        for mode, key in ((Mode.PLAIN, None), (Mode.ENCRYPTED, KEY)):
            idx = cloudsim.ingest(tiny_corpus, mode, key)
            path = tmp_path / f"{mode.value}.snapshot"
            cloudsim.save_index(idx, path)
            loaded = cloudsim.load_index(path)
            assert loaded.mode == idx.mode
            assert loaded.postings == idx.postings
            assert {d: (r.token_count, r.stored_body, r.title) for d, r in loaded.doc_table.items()} == {
                d: (r.token_count, r.stored_body, r.title) for d, r in idx.doc_table.items()
            }

    def test_snapshot_deterministic(self, tiny_corpus, tmp_path):
        idx = cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED, KEY)
        a, b = tmp_path / "a", tmp_path / "b"
        cloudsim.save_index(idx, a)
        cloudsim.save_index(cloudsim.ingest(tiny_corpus, Mode.ENCRYPTED, KEY), b)
        assert a.read_bytes() == b.read_bytes()


class TestMakeSearchToken:
    def test_single_word_normalized(self):
        assert cloudsim.make_search_token("Network!", Mode.PLAIN) == SearchToken("network")

    def test_multiword_phrase(self):
        token = cloudsim.make_search_token("J.K. Rowling", Mode.PLAIN)
        assert token.phrase == ("jk", "rowling")

    def test_punctuation_only_none(self):
        assert cloudsim.make_search_token("--", Mode.PLAIN) is None

    def test_encrypted_values_are_tags(self):
        token = cloudsim.make_search_token("motor vehicle", Mode.ENCRYPTED, KEY)
        assert all(len(part) == 64 for part in token.phrase)
