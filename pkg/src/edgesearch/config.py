"""Application configuration.

Config files use INI key-value format with a single [edgesearch]
section; EDGESEARCH_KEY and EDGESEARCH_DATA_DIR environment variables
override the file.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from pathlib import Path

from .cloudsim import Mode
from .errors import ConfigError

SECTION = "edgesearch"


@dataclass
class AppConfig:
    wordnet_dir: str
    embeddings_path: str
    corpus_dir: str
    data_dir: str
    nb_corpus_dir: str | None = None
    mode: Mode = Mode.PLAIN
    key_hex: str | None = None
    cutoff: int = 10
    knn_k: int = 10
    history_n: int = 20
    rnn_hidden: int = 16
    eta_max: float = 1.0
    default_interest: str | None = None
    host: str = "127.0.0.1"
    port: int = 8080
    ui_dir: str | None = None

    def __post_init__(self) -> None:
        for name in ("cutoff", "knn_k", "history_n", "rnn_hidden"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.eta_max <= 0:
            raise ConfigError("eta_max must be positive")
        if self.mode is Mode.ENCRYPTED:
            self.key_bytes()  # validates presence and shape

    def key_bytes(self) -> bytes:
        if not self.key_hex:
            raise ConfigError("encrypted mode requires a 64-hex-character key")
        try:
            key = bytes.fromhex(self.key_hex)
        except ValueError:
            raise ConfigError("key must be hex-encoded") from None
        if len(key) != 32:
            raise ConfigError("key must encode exactly 32 bytes")
        return key


def load_config(path: str | Path) -> AppConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    parser = configparser.ConfigParser()
    try:
        parser.read(p, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from None
    if SECTION not in parser:
        raise ConfigError(f"{p}: missing [{SECTION}] section")
    section = parser[SECTION]

    def get(name: str, default: str | None = None) -> str | None:
        return section.get(name, default)

    required = {}
    for name in ("wordnet_dir", "embeddings_path", "corpus_dir", "data_dir"):
        value = get(name)
        if name == "data_dir":
            value = os.environ.get("EDGESEARCH_DATA_DIR") or value
        if not value:
            raise ConfigError(f"{p}: missing required key {name!r}")
        required[name] = value

    mode_raw = (get("mode", "plain") or "plain").upper()
    if mode_raw not in Mode.__members__:
        raise ConfigError(f"{p}: mode must be plain or encrypted, got {mode_raw!r}")

    try:
        return AppConfig(
            **required,
            nb_corpus_dir=get("nb_corpus_dir"),
            mode=Mode[mode_raw],
            key_hex=os.environ.get("EDGESEARCH_KEY") or section.get("key"),
            cutoff=int(get("cutoff", "10")),
            knn_k=int(get("knn_k", "10")),
            history_n=int(get("history_n", "20")),
            rnn_hidden=int(get("rnn_hidden", "16")),
            eta_max=float(get("eta_max", "1.0")),
            default_interest=get("default_interest"),
            host=get("host", "127.0.0.1") or "127.0.0.1",
            port=int(get("port", "8080")),
            ui_dir=get("ui_dir"),
        )
    except ValueError as exc:
        raise ConfigError(f"{p}: bad numeric value ({exc})") from None
