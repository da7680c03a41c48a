"""Benchmark evaluation: graded average-precision at 10 and F-1.

Judgment files are machine-readable stand-ins for human relevance
labels: a three-value scale per (query, document) plus optional gold
relevant-document sets. Reports are written deterministically so
repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ParseError

LABELS = ("HIGH", "PARTIAL", "IRRELEVANT")

PASS_THROUGH = "pass_through"
SEMANTIC_VARIANT = "semantic"


@dataclass
class BenchmarkSuite:
    name: str
    queries: list[tuple[str, str]]  # (acronym, query text)


@dataclass
class Judgments:
    labels: dict[str, dict[str, str]] = field(default_factory=dict)
    gold: dict[str, set[str]] = field(default_factory=dict)


def load_suite(path: str | Path, name: str | None = None) -> BenchmarkSuite:
    """Load a tab-separated suite file: acronym<TAB>query text."""
    p = Path(path)
    queries: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"{p.name}:{lineno}: expected 'ACRONYM<TAB>query'")
        acronym, text = parts[0].strip(), parts[1].strip()
        if acronym in seen:
            raise ParseError(f"{p.name}:{lineno}: duplicate acronym {acronym}")
        seen.add(acronym)
        queries.append((acronym, text))
    return BenchmarkSuite(name=name or p.stem, queries=queries)


def load_judgments(path: str | Path) -> Judgments:
    p = Path(path)
    data = json.loads(p.read_text(encoding="utf-8"))
    judgments = Judgments()
    for acronym, docs in data.get("labels", {}).items():
        for doc_id, label in docs.items():
            if label not in LABELS:
                raise ParseError(f"{p.name}: bad label {label!r} for {acronym}/{doc_id}")
        judgments.labels[acronym] = dict(docs)
    for acronym, doc_ids in data.get("gold", {}).items():
        judgments.gold[acronym] = set(doc_ids)
    return judgments


def tsap_at_10(ranked: list[str], judgments: Mapping[str, str]) -> float:
    """Graded average precision at cutoff 10.

    Position i (from 1) contributes 1/i for a highly relevant document,
    1/(2i) for a partially relevant one, and 0 otherwise; the sum is
    divided by the cutoff, so fewer than 10 results contribute nothing
    for the missing positions.
    """
    total = 0.0
    for i, doc_id in enumerate(ranked[:10], 1):
        label = judgments.get(doc_id)
        if label == "HIGH":
            total += 1.0 / i
        elif label == "PARTIAL":
            total += 1.0 / (2 * i)
    return total / 10.0


def f1(ranked: list[str], gold: set[str]) -> tuple[float, float, float]:
    """Precision, recall, and F-1 of the ranked list against the gold set."""
    if not gold:
        raise ValueError("gold set must be non-empty")
    hits = len(set(ranked) & gold)
    precision = hits / len(ranked) if ranked else 0.0
    recall = hits / len(gold)
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


@dataclass
class QueryOutcome:
    acronym: str
    query: str
    n_results: int
    tsap: float | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None


@dataclass
class ScoreReport:
    suite: str
    variant: str
    mode: str
    outcomes: list[QueryOutcome]
    mean_tsap: float | None
    mean_f1: float | None


def run_benchmark(engine, suite: BenchmarkSuite, judgments: Judgments, variant: str) -> ScoreReport:
    """Run every suite query through the engine and score the rankings.

    Queries without judgments are reported unjudged and excluded from
    the means.
    """
    outcomes: list[QueryOutcome] = []
    for acronym, text in suite.queries:
        ranked = engine.ranked_doc_ids(text, variant=variant)
        outcome = QueryOutcome(acronym=acronym, query=text, n_results=len(ranked))
        labels = judgments.labels.get(acronym)
        if labels is not None:
            outcome.tsap = tsap_at_10(ranked, labels)
        gold = judgments.gold.get(acronym)
        if gold:
            outcome.precision, outcome.recall, outcome.f1 = f1(ranked, gold)
        outcomes.append(outcome)

    tsaps = [o.tsap for o in outcomes if o.tsap is not None]
    f1s = [o.f1 for o in outcomes if o.f1 is not None]
    return ScoreReport(
        suite=suite.name,
        variant=variant,
        mode=engine.mode.value,
        outcomes=outcomes,
        mean_tsap=sum(tsaps) / len(tsaps) if tsaps else None,
        mean_f1=sum(f1s) / len(f1s) if f1s else None,
    )


def report_to_json(report: ScoreReport) -> str:
    payload = {
        "suite": report.suite,
        "variant": report.variant,
        "mode": report.mode,
        "mean_tsap": report.mean_tsap,
        "mean_f1": report.mean_f1,
        "queries": [
            {
                "acronym": o.acronym,
                "query": o.query,
                "n_results": o.n_results,
                "tsap": o.tsap,
                "precision": o.precision,
                "recall": o.recall,
                "f1": o.f1,
            }
            for o in report.outcomes
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _cell(value: float | None) -> str:
    return f"{value:.4f}" if value is not None else "-"


def render_table(report: ScoreReport) -> str:
    """Aligned plain-text table mirroring the per-query and mean scores."""
    header = f"suite={report.suite} variant={report.variant} mode={report.mode}"
    rows = [("query", "results", "tsap@10", "precision", "recall", "f1")]
    for o in report.outcomes:
        rows.append(
            (o.acronym, str(o.n_results), _cell(o.tsap), _cell(o.precision), _cell(o.recall), _cell(o.f1))
        )
    rows.append(("MEAN", "", _cell(report.mean_tsap), "", "", _cell(report.mean_f1)))
    widths = [max(len(r[i]) for r in rows) for i in range(6)]
    lines = [header]
    for r in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r)).rstrip())
    return "\n".join(lines) + "\n"


def comparison_table(a: ScoreReport, b: ScoreReport) -> str:
    lines = [
        f"suite={a.suite} mode={a.mode}: {a.variant} vs {b.variant}",
        f"{'metric':<12}{a.variant:>14}{b.variant:>14}",
        f"{'mean tsap@10':<12}{_cell(a.mean_tsap):>14}{_cell(b.mean_tsap):>14}",
        f"{'mean f1':<12}{_cell(a.mean_f1):>14}{_cell(b.mean_f1):>14}",
    ]
    return "\n".join(lines) + "\n"
