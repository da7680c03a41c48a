"""Command-line interface: ingest, search, serve, eval, train-interest,
encrypt-corpus.

Exit codes: 0 success, 1 usage, 2 configuration or resource problem,
3 runtime failure.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import click

from . import cloudsim, evalharness
from .cloudsim import Mode
from .config import AppConfig, load_config
from .engine import SearchEngine
from .errors import ConfigError, CorpusError, EdgeSearchError, ResourceError

BUILTIN_SUITES = ("bbc", "rfc")


def _load_cfg(ctx: click.Context) -> AppConfig:
    return load_config(ctx.obj["config_path"])


@click.group()
@click.option("--config", "-c", "config_path", required=True, type=click.Path(), help="Config file (INI).")
@click.pass_context
def cli(ctx: click.Context, config_path: str) -> None:
    """Edge-tier semantic search over a pattern-matching backend."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@cli.command()
@click.option("--mode", type=click.Choice(["plain", "encrypted"]), default=None, help="Override config mode.")
@click.option("--out", type=click.Path(), default=None, help="Index snapshot path (default: <data_dir>/index.snapshot).")
@click.pass_context
def ingest(ctx: click.Context, mode: str | None, out: str | None) -> None:
    """Build the inverted index from the corpus and write a snapshot."""
    cfg = _load_cfg(ctx)
    if mode:
        cfg.mode = Mode[mode.upper()]
        cfg.__post_init__()
    key = cfg.key_bytes() if cfg.mode is Mode.ENCRYPTED else None
    index = cloudsim.ingest(cfg.corpus_dir, cfg.mode, key)
    snapshot = Path(out) if out else Path(cfg.data_dir) / "index.snapshot"
    snapshot.parent.mkdir(parents=True, exist_ok=True)
    cloudsim.save_index(index, snapshot)
    click.echo(f"indexed {index.doc_count} documents ({cfg.mode.value}) -> {snapshot}")


@cli.command()
@click.option("--query", "-q", required=True)
@click.option("--user", "-u", default="default")
@click.option("--top", type=int, default=None)
@click.option("--variant", type=click.Choice(["semantic", "pass_through"]), default="semantic")
@click.pass_context
def search(ctx: click.Context, query: str, user: str, top: int | None, variant: str) -> None:
    """One-shot search: print the ranked table and the expansion trace."""
    engine = SearchEngine(_load_cfg(ctx))
    response = engine.search(user, query, variant=variant, top=top)
    trace = response["trace"]
    click.echo(f"query: {query}  (mode={response['mode']}, variant={variant})")
    if trace["context"]:
        click.echo("context: " + ", ".join(trace["context"]))
    if trace["name_entities"]:
        click.echo("name-entities: " + ", ".join(trace["name_entities"]))
    if trace["mu"] is not None:
        click.echo(f"mu: {trace['mu']:.4f}")
    if trace["theta"]:
        theta = trace["theta"]
        click.echo(f"interest: {theta['label']} ({theta['source']}, {theta['confidence']:.3f})")
    terms = ", ".join(f"{t['term']}[{t['provenance'][0]}:{t['weight']:.2f}]" for t in trace["terms"])
    if terms:
        click.echo("expanded: " + terms)
    click.echo(f"{'#':<3}{'doc':<24}{'score':<12}title")
    for i, result in enumerate(response["results"], 1):
        click.echo(f"{i:<3}{result['doc_id']:<24}{result['score']:<12.6f}{result['title'][:60]}")
    if not response["results"]:
        click.echo("(no results)")


@cli.command()
@click.pass_context
def serve(ctx: click.Context) -> None:
    """Run the HTTP API."""
    from .service import serve as run_service

    run_service(_load_cfg(ctx))


def _resolve_suite(name_or_path: str) -> evalharness.BenchmarkSuite:
    if name_or_path in BUILTIN_SUITES:
        ref = resources.files("edgesearch").joinpath(f"data/suites/{name_or_path}.tsv")
        with resources.as_file(ref) as path:
            return evalharness.load_suite(path, name=name_or_path)
    return evalharness.load_suite(name_or_path)


@cli.command("eval")
@click.option("--suite", required=True, help="Built-in suite name (bbc, rfc) or a TSV path.")
@click.option("--judgments", "judgments_path", type=click.Path(exists=True), default=None)
@click.option("--variant", type=click.Choice(["semantic", "pass_through", "both"]), default="both")
@click.option("--out", type=click.Path(), default=None, help="Report directory (default: <data_dir>/reports).")
@click.pass_context
def eval_cmd(ctx: click.Context, suite: str, judgments_path: str | None, variant: str, out: str | None) -> None:
    """Run a benchmark suite and write JSON + text reports."""
    cfg = _load_cfg(ctx)
    engine = SearchEngine(cfg)
    bench = _resolve_suite(suite)
    judgments = (
        evalharness.load_judgments(judgments_path) if judgments_path else evalharness.Judgments()
    )
    out_dir = Path(out) if out else Path(cfg.data_dir) / "reports"
    out_dir.mkdir(parents=True, exist_ok=True)

    variants = ["semantic", "pass_through"] if variant == "both" else [variant]
    reports = []
    for v in variants:
        report = evalharness.run_benchmark(engine, bench, judgments, variant=v)
        stem = f"{bench.name}-{v}-{engine.mode.value.lower()}"
        (out_dir / f"{stem}.json").write_text(evalharness.report_to_json(report), encoding="utf-8")
        (out_dir / f"{stem}.txt").write_text(evalharness.render_table(report), encoding="utf-8")
        click.echo(evalharness.render_table(report))
        reports.append(report)
    if len(reports) == 2:
        comparison = evalharness.comparison_table(reports[0], reports[1])
        (out_dir / f"{bench.name}-comparison-{engine.mode.value.lower()}.txt").write_text(
            comparison, encoding="utf-8"
        )
        click.echo(comparison)


@cli.command("train-interest")
@click.option("--user", "-u", default="default")
@click.option("--epochs", type=int, default=300)
@click.option("--lr", "learning_rate", type=float, default=0.5)
@click.option("--seed", type=int, default=0)
@click.pass_context
def train_interest(ctx: click.Context, user: str, epochs: int, learning_rate: float, seed: int) -> None:
    """Train the per-user interest predictor from the recorded history."""
    engine = SearchEngine(_load_cfg(ctx))
    model = engine.train_interest(user, epochs=epochs, learning_rate=learning_rate, seed=seed)
    click.echo(f"trained interest model for {user}: labels={','.join(model.labels)}")


@cli.command("encrypt-corpus")
@click.option("--out", required=True, type=click.Path(), help="Directory for encrypted copies.")
@click.pass_context
def encrypt_corpus(ctx: click.Context, out: str) -> None:
    """Write randomized-encrypted copies of every corpus document."""
    cfg = _load_cfg(ctx)
    key = cfg.key_bytes()
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    count = 0
    for path in sorted(Path(cfg.corpus_dir).iterdir()):
        if not path.is_file() or path.name.startswith("."):
            continue
        blob = cloudsim.encrypt_body(key, path.stem, path.read_bytes())
        (out_dir / f"{path.stem}.enc").write_bytes(blob)
        count += 1
    click.echo(f"encrypted {count} documents -> {out_dir}")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ConfigError, ResourceError, CorpusError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except EdgeSearchError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
