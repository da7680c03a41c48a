from pathlib import Path

import pytest

from edgesearch import lexstore
from edgesearch.cloudsim import Mode
from edgesearch.config import AppConfig
from edgesearch.engine import SearchEngine

FIXTURES = Path(__file__).parent / "fixtures"

TEST_KEY_HEX = "aa" * 32


@pytest.fixture(scope="session")
def wordnet_dir() -> Path:
    return FIXTURES / "wordnet"


@pytest.fixture(scope="session")
def db(wordnet_dir):
    return lexstore.load_lexical_database(wordnet_dir)


@pytest.fixture(scope="session")
def emb():
    return lexstore.load_embeddings(FIXTURES / "embeddings" / "vectors50.txt")


@pytest.fixture(scope="session")
def tiny_emb():
    return lexstore.load_embeddings(FIXTURES / "embeddings" / "tiny.txt")


@pytest.fixture(scope="session")
def tiny_corpus() -> Path:
    return FIXTURES / "corpora" / "tiny"


@pytest.fixture(scope="session")
def planted_corpus() -> Path:
    return FIXTURES / "corpora" / "planted"


@pytest.fixture
def make_config(tmp_path):
    """Factory for AppConfig objects rooted at a per-test data directory."""

    def _make(mode: Mode = Mode.PLAIN, corpus: str = "planted", **overrides) -> AppConfig:
        defaults = dict(
            wordnet_dir=str(FIXTURES / "wordnet"),
            embeddings_path=str(FIXTURES / "embeddings" / "vectors50.txt"),
            corpus_dir=str(FIXTURES / "corpora" / corpus),
            data_dir=str(tmp_path / "data"),
            nb_corpus_dir=str(FIXTURES / "nb_corpus"),
            mode=mode,
            key_hex=TEST_KEY_HEX if mode is Mode.ENCRYPTED else None,
            default_interest="technology",
        )
        defaults.update(overrides)
        return AppConfig(**defaults)

    return _make


@pytest.fixture
def make_engine(make_config):
    def _make(**kwargs) -> SearchEngine:
        return SearchEngine(make_config(**kwargs))

    return _make


def pytest_terminal_summary(terminalreporter):
    """Print one pass/fail line per acceptance criterion."""
    results: dict[str, str] = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                name = nodeid.split("::")[-1]
                results[name] = "PASS" if status == "passed" else "FAIL"
    if not results:
        return
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        CRITERIA = {}
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in results.items():
        label = CRITERIA.get(name, name)
        terminalreporter.write_line(f"{outcome}  {label}")


def write_config_file(path: Path, cfg: AppConfig) -> Path:
    lines = ["[edgesearch]"]
    lines.append(f"wordnet_dir = {cfg.wordnet_dir}")
    lines.append(f"embeddings_path = {cfg.embeddings_path}")
    lines.append(f"corpus_dir = {cfg.corpus_dir}")
    lines.append(f"data_dir = {cfg.data_dir}")
    if cfg.nb_corpus_dir:
        lines.append(f"nb_corpus_dir = {cfg.nb_corpus_dir}")
    lines.append(f"mode = {cfg.mode.value.lower()}")
    if cfg.key_hex:
        lines.append(f"key = {cfg.key_hex}")
    if cfg.default_interest:
        lines.append(f"default_interest = {cfg.default_interest}")
    lines.append(f"cutoff = {cfg.cutoff}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
