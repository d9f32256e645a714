"""Command-line pipeline: build-space, classify, evaluate, sweep.

Each stage reads and writes plain files (binary space, JSONL predictions,
JSON report, CSV sweep grid) so stages can be run, inspected, and resumed
independently. All outputs are byte-identical given the same inputs,
flags, and seed. Exit codes: 0 success, 1 input or validation error,
2 internal error.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import click

from .corpus import Document, DocSource, QuIndicator, load_documents
from .errors import FormatError, LabelError, LsaquError
from .evaluation import ClassMetrics, confusion, metrics
from .space import SemanticSpace, build_space, load_space, save_space
from .subspace import (
    DEFAULT_TOP_N,
    DEFAULT_VARIANCE_THRESHOLD,
    Prediction,
    RulePath,
    build_subspace,
    classify_all,
)
from .weighting import WeightingKind

logger = logging.getLogger(__name__)

UNCLASSIFIABLE = "unclassifiable"

_WEIGHTING_BY_FLAG = {
    "log-entropy": WeightingKind.LOG_ENTROPY,
    "tfidf": WeightingKind.TFIDF,
}

_path_in = click.Path(exists=True, dir_okay=False, path_type=Path)
_path_out = click.Path(dir_okay=False, writable=True, path_type=Path)


def _resolve_seed(flag_seed: int) -> int:
    """The LSAQU_SEED environment variable overrides the --seed flag."""
    env = os.environ.get("LSAQU_SEED")
    if env is None:
        return flag_seed
    try:
        return int(env)
    except ValueError:
        raise click.ClickException(f"LSAQU_SEED must be an integer, got {env!r}")


def _load_corpus(paths: tuple[Path, ...], fmt: str) -> list[Document]:
    """Concatenate corpus files; ids are namespaced per file when several
    files are given so auto-assigned ids cannot collide."""
    docs: list[Document] = []
    for i, path in enumerate(paths, start=1):
        loaded = load_documents(path, DocSource.CORPUS, fmt=fmt)
        if len(paths) > 1:
            loaded = [replace(doc, id=f"c{i}:{doc.id}") for doc in loaded]
        docs.extend(loaded)
    return docs


@click.group()
def cli() -> None:
    """Latent semantic classification of reviews against quality scales."""


@cli.command("build-space")
@click.option(
    "--corpus",
    "corpus_paths",
    multiple=True,
    required=True,
    type=_path_in,
    help="Corpus file (repeatable).",
)
@click.option("--k", default=300, show_default=True, type=int, help="Space dimensions.")
@click.option(
    "--weighting",
    type=click.Choice(sorted(_WEIGHTING_BY_FLAG)),
    default="log-entropy",
    show_default=True,
    help="Term weighting scheme.",
)
@click.option("--out", required=True, type=_path_out, help="Space file to write.")
@click.option(
    "--keep-v/--no-keep-v",
    default=None,
    help="Retain the document factor V (default: only for small corpora).",
)
@click.option("--seed", default=42, show_default=True, type=int, help="SVD start seed.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["jsonl", "text"]),
    default="jsonl",
    show_default=True,
    help="Corpus file format.",
)
@click.option(
    "--method",
    type=click.Choice(["lanczos", "dense"]),
    default="lanczos",
    show_default=True,
    help="SVD solver.",
)
def cmd_build_space(corpus_paths, k, weighting, out, keep_v, seed, fmt, method) -> None:
    """Build the semantic space from corpus files and save it."""
    docs = _load_corpus(corpus_paths, fmt)
    space = build_space(
        docs,
        k=k,
        scheme_kind=_WEIGHTING_BY_FLAG[weighting],
        seed=_resolve_seed(seed),
        keep_v=keep_v,
        method=method,
    )
    save_space(space, out)
    summary = {
        "n_docs": space.meta["n_docs"],
        "vocab_size": space.n_terms,
        "k_requested": space.meta["k_requested"],
        "k_effective": space.k,
        "weighting": space.meta["weighting"],
        "seed": space.meta["seed"],
        "top_singular_values": [float(s) for s in space.sigma[:5]],
        "out": str(out),
    }
    click.echo(json.dumps(summary))


def _prediction_record(pred: Prediction) -> dict:
    return {
        "id": pred.review_id,
        "predicted": pred.predicted.value if pred.predicted else UNCLASSIFIABLE,
        "rule_path": pred.rule_path.value if pred.rule_path else None,
        "neighbors": [
            {"scale_id": nb.scale_id, "label": nb.label.value, "score": nb.score}
            for nb in pred.neighbors
        ],
    }


@cli.command("classify")
@click.option("--space", "space_path", required=True, type=_path_in, help="Space file.")
@click.option("--scales", "scales_path", required=True, type=_path_in, help="Labeled scale items (JSONL).")
@click.option("--reviews", "reviews_path", required=True, type=_path_in, help="Review sentences (JSONL).")
@click.option("--top-n", default=DEFAULT_TOP_N, show_default=True, type=int, help="Neighbors retrieved per review.")
@click.option(
    "--variance-threshold",
    default=DEFAULT_VARIANCE_THRESHOLD,
    show_default=True,
    type=float,
    help="Top-two score gap that decides directly.",
)
@click.option("--out", required=True, type=_path_out, help="Predictions JSONL to write.")
def cmd_classify(space_path, scales_path, reviews_path, top_n, variance_threshold, out) -> None:
    """Fold scales and reviews into the space and label every review."""
    space = load_space(space_path)
    scales = load_documents(scales_path, DocSource.SCALE)
    reviews = load_documents(reviews_path, DocSource.REVIEW)
    sub = build_subspace(scales, reviews, space)
    predictions = classify_all(sub, n=top_n, threshold=variance_threshold)

    with open(out, "w", encoding="utf-8") as fh:
        for pred in predictions:
            fh.write(json.dumps(_prediction_record(pred)) + "\n")

    counts = {path.value: 0 for path in RulePath}
    counts[UNCLASSIFIABLE] = 0
    for pred in predictions:
        key = pred.rule_path.value if pred.rule_path else UNCLASSIFIABLE
        counts[key] += 1
    click.echo(json.dumps({"n_reviews": len(predictions), "rule_paths": counts}))


def _read_predictions(path: Path) -> list[Prediction]:
    """Read back a predictions JSONL file (neighbors are not needed to score)."""
    predictions: list[Prediction] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict) or not isinstance(record.get("id"), str):
            raise FormatError(f"line {lineno}: expected an object with a string 'id'")
        raw = record.get("predicted")
        if raw == UNCLASSIFIABLE:
            predicted, rule_path = None, None
        else:
            if not isinstance(raw, str):
                raise FormatError(f"line {lineno}: missing 'predicted' field")
            try:
                predicted = QuIndicator.from_string(raw)
            except LabelError as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
            rule_path = RulePath(record["rule_path"]) if record.get("rule_path") else None
        predictions.append(
            Prediction(review_id=record["id"], predicted=predicted, rule_path=rule_path)
        )
    return predictions


def _read_gold(path: Path) -> dict[str, QuIndicator]:
    gold: dict[str, QuIndicator] = {}
    for doc in load_documents(path, DocSource.REVIEW):
        if doc.label is None:
            raise LabelError(f"gold record {doc.id!r} has no label")
        gold[doc.id] = doc.label
    return gold


def _report(m: ClassMetrics, cm, predictions_path: Path, gold_path: Path) -> dict:
    return {
        "confusion": {
            "order": [label.value for label in _CLASS_ORDER],
            "grid": cm.grid.tolist(),
            "unclassifiable": cm.unclassifiable.tolist(),
        },
        "per_class": {
            label.value: {
                "precision": round(scores.precision, 6),
                "recall": round(scores.recall, 6),
                "f_measure": round(scores.f_measure, 6),
            }
            for label, scores in m.per_class.items()
        },
        "macro_f": round(m.macro_f, 6),
        "counts": {
            "n_evaluated": cm.n_evaluated,
            "n_correct": int(cm.grid.trace()),
            "n_unclassifiable": int(cm.unclassifiable.sum()),
        },
        "config": {"predictions": str(predictions_path), "gold": str(gold_path)},
        "conventions": {
            "zero_over_zero": 0.0,
            "unclassifiable": "false negative for the gold class",
            "macro_f": "unweighted mean of the three class F-measures",
        },
    }


_CLASS_ORDER = tuple(QuIndicator)


@cli.command("evaluate")
@click.option("--predictions", "predictions_path", required=True, type=_path_in, help="Predictions JSONL.")
@click.option("--gold", "gold_path", required=True, type=_path_in, help="Gold labels (JSONL with id + label).")
@click.option("--out", required=True, type=_path_out, help="Report JSON to write.")
def cmd_evaluate(predictions_path, gold_path, out) -> None:
    """Score predictions against gold labels; prints the macro F-measure."""
    predictions = _read_predictions(predictions_path)
    gold = _read_gold(gold_path)
    cm = confusion(predictions, gold)
    m = metrics(cm)
    report = _report(m, cm, predictions_path, gold_path)
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"{m.macro_f:.6f}")


def _parse_variant(value: str) -> tuple[str, tuple[Path, ...]]:
    name, sep, paths = value.partition("=")
    if not sep or not name or not paths:
        raise click.BadParameter(
            f"expected NAME=path[,path...], got {value!r}", param_hint="--corpus-variant"
        )
    parsed = tuple(Path(p) for p in paths.split(","))
    for p in parsed:
        if not p.is_file():
            raise click.BadParameter(f"corpus file not found: {p}", param_hint="--corpus-variant")
    return name, parsed


SWEEP_COLUMNS = (
    "corpus_variant",
    "weighting",
    "k",
    "f_effectiveness",
    "f_efficiency",
    "f_freedom_from_risk",
    "macro_f",
)


@cli.command("sweep")
@click.option(
    "--corpus-variant",
    "variants",
    multiple=True,
    required=True,
    help="NAME=path[,path...] corpus variant (repeatable).",
)
@click.option(
    "--weighting",
    "weightings",
    multiple=True,
    type=click.Choice(sorted(_WEIGHTING_BY_FLAG)),
    default=("log-entropy",),
    show_default=True,
    help="Weighting scheme axis (repeatable).",
)
@click.option("--k", "ks", multiple=True, type=int, default=(300,), show_default=True, help="Dimension axis (repeatable).")
@click.option("--scales", "scales_path", required=True, type=_path_in, help="Labeled scale items (JSONL).")
@click.option("--reviews", "reviews_path", required=True, type=_path_in, help="Review sentences (JSONL).")
@click.option("--gold", "gold_path", required=True, type=_path_in, help="Gold labels (JSONL).")
@click.option("--top-n", default=DEFAULT_TOP_N, show_default=True, type=int, help="Neighbors retrieved per review.")
@click.option(
    "--variance-threshold",
    default=DEFAULT_VARIANCE_THRESHOLD,
    show_default=True,
    type=float,
    help="Top-two score gap that decides directly.",
)
@click.option("--seed", default=42, show_default=True, type=int, help="SVD start seed.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["jsonl", "text"]),
    default="jsonl",
    show_default=True,
    help="Corpus file format.",
)
@click.option("--out", required=True, type=_path_out, help="Grid CSV to write.")
def cmd_sweep(
    variants, weightings, ks, scales_path, reviews_path, gold_path,
    top_n, variance_threshold, seed, fmt, out,
) -> None:
    """Run the full pipeline over every configuration and tabulate F-measures."""
    seed = _resolve_seed(seed)
    parsed_variants = [_parse_variant(v) for v in variants]
    scales = load_documents(scales_path, DocSource.SCALE)
    reviews = load_documents(reviews_path, DocSource.REVIEW)
    gold = _read_gold(gold_path)

    rows = []
    seen_configs: set[tuple] = set()
    for name, paths in parsed_variants:
        docs = _load_corpus(paths, fmt)
        for weighting in weightings:
            for k in ks:
                config = (name, weighting, k)
                if config in seen_configs:
                    logger.warning("duplicate configuration %r skipped", config)
                    continue
                seen_configs.add(config)
                space = build_space(
                    docs, k=k, scheme_kind=_WEIGHTING_BY_FLAG[weighting], seed=seed
                )
                sub = build_subspace(scales, reviews, space)
                predictions = classify_all(sub, n=top_n, threshold=variance_threshold)
                m = metrics(confusion(predictions, gold))
                f_by_class = {
                    label: scores.f_measure for label, scores in m.per_class.items()
                }
                rows.append(
                    (
                        name,
                        weighting,
                        k,
                        *(f"{f_by_class[label]:.6f}" for label in _CLASS_ORDER),
                        f"{m.macro_f:.6f}",
                    )
                )

    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(rows)
    click.echo(json.dumps({"rows": len(rows), "out": str(out)}))


def main(argv: list[str] | None = None) -> int:
    """Entry point mapping every failure to the documented exit codes."""
    logging.basicConfig(
        level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except (LsaquError, OSError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
