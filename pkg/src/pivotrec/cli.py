"""Batch entry point: one-shot recommendation and single-pivot scoring.

    pivotrec recommend --input employees.csv --k 5 --theta 0.3 --out batch.json
    pivotrec score --input employees.csv --fn AVG --attr Salary \
        --group Degree,Department

Exit codes: 0 success, 1 runtime failure, 2 usage error. The JSON report of
``recommend`` is byte-identical to the HTTP service's batch response for
the same inputs and oracle cache.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._util import canonical_json
from .dataset import DatasetError, apply_type_overrides, load_table
from .embedding import BaselineEmbeddingProvider
from .pivot import PivotGrid, PivotSpecError, canonicalize
from .recommend import RecommendConfig, SelectionResult, recommend_batch
from .scoring import ScoringParams, score_pivot_detailed
from .semantics import (
    CachingOracle,
    OracleCache,
    RemoteOracle,
    RemoteOracleConfig,
    RuleBasedOracle,
    SemanticOracle,
)


class UsageError(ValueError):
    pass


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV file to analyze")
    p.add_argument("--types", help="JSON sidecar overriding inferred attribute types")
    p.add_argument("--alpha", type=float, default=0.5,
                   help="utility mix weight (1.0 = insightfulness only)")
    p.add_argument("--scoring-json", help="JSON object with scoring parameters")
    p.add_argument("--oracle", choices=["rule", "remote"], default="rule")
    p.add_argument("--oracle-endpoint", help="remote oracle URL")
    p.add_argument("--oracle-token", default="", help="remote oracle bearer token")
    p.add_argument("--oracle-timeout", type=float, default=10.0)
    p.add_argument("--record-cache", help="record oracle answers to this JSONL file")
    p.add_argument("--replay-cache", help="replay oracle answers from this JSONL file")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pivotrec",
        description="Recommend diverse, insightful pivot tables over a CSV dataset",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rec = sub.add_parser("recommend", help="emit a diverse batch of pivot tables")
    _add_common_flags(rec)
    rec.add_argument("--k", type=int, default=5, help="budget: max tables to return")
    rec.add_argument("--theta", type=float, default=0.0,
                     help="minimum pairwise embedding distance in the batch")
    rec.add_argument("--focus", help="comma-separated attributes to restrict to")
    rec.add_argument("--g-max", type=int, default=3)
    rec.add_argument("--p-agg-min", type=float, default=0.4)
    rec.add_argument("--cell-max", type=int, default=256)
    rec.add_argument("--format", choices=["json", "markdown"], default="json")

    score = sub.add_parser("score", help="score one pivot table, with intermediates")
    _add_common_flags(score)
    score.add_argument("--fn", required=True, help="aggregate function (AVG, COUNT, ...)")
    score.add_argument("--attr", required=True, help="aggregate attribute")
    score.add_argument("--group", required=True,
                       help="comma-separated grouping attributes")
    return parser


def build_oracle(args: argparse.Namespace) -> SemanticOracle:
    if args.record_cache and args.replay_cache:
        raise UsageError("--record-cache and --replay-cache are mutually exclusive")
    base: SemanticOracle
    if args.oracle == "remote":
        if not args.oracle_endpoint:
            raise UsageError("--oracle remote requires --oracle-endpoint")
        base = RemoteOracle(
            RemoteOracleConfig(
                endpoint=args.oracle_endpoint,
                auth_token=args.oracle_token,
                timeout=args.oracle_timeout,
            )
        )
    else:
        base = RuleBasedOracle()
    if args.replay_cache:
        return CachingOracle(base, OracleCache(args.replay_cache), record=False)
    if args.record_cache:
        return CachingOracle(base, OracleCache(args.record_cache), record=True)
    return base


def _load_dataset(args: argparse.Namespace):
    path = Path(args.input)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    dataset = load_table(path.read_bytes())
    if args.types:
        overrides = json.loads(Path(args.types).read_text(encoding="utf-8"))
        dataset = apply_type_overrides(dataset, overrides)
    return dataset


def _scoring_params(args: argparse.Namespace) -> ScoringParams:
    payload = {}
    if args.scoring_json:
        payload.update(json.loads(args.scoring_json))
    payload["alpha"] = args.alpha
    return ScoringParams(**payload)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def grid_to_markdown(grid: PivotGrid) -> str:
    """Render a grid as a markdown table; nulls print as empty cells."""
    corner = " x ".join(grid.spec.row_groups) or "-"
    header = [corner] + grid.col_labels()
    lines = ["| " + " | ".join(header) + " |",
             "| " + " | ".join("---" for _ in header) + " |"]
    for i, label in enumerate(grid.row_labels()):
        cells = []
        for j in range(grid.m):
            v = grid.cells[i, j]
            cells.append("" if np.isnan(v) else f"{v:g}")
        lines.append("| " + " | ".join([label] + cells) + " |")
    return "\n".join(lines)


def _batch_markdown(result: SelectionResult) -> str:
    parts = [
        f"# Recommended pivot tables ({len(result.items)})",
        f"achieved diversity: {result.diversity:.4f}"
        + ("  (candidate space exhausted)" if result.exhausted else ""),
    ]
    for rec in result.items:
        card = rec.scorecard
        parts.append(f"\n## {rec.rank}. {rec.spec.query_string()}")
        parts.append(grid_to_markdown(rec.grid))
        parts.append(
            f"utility {card.utility:.3f} = "
            f"insightfulness {card.insightfulness:.3f} / "
            f"interpretability {card.interpretability:.3f}"
        )
        parts.append(
            f"sub-scores: sig {card.s_sig:.2f}, inf {card.s_inf:.2f}, "
            f"cor {card.s_cor:.2f}, ratio {card.s_ratio:.2f}, "
            f"sur {card.s_sur:.2f}, den {card.s_den:.2f}, "
            f"sem {card.s_sem:.2f}, con {card.s_con:.2f}"
        )
    return "\n".join(parts)


def cmd_recommend(args: argparse.Namespace) -> int:
    config = RecommendConfig(
        k=args.k,
        theta=args.theta,
        focus_attrs=tuple(a.strip() for a in args.focus.split(",") if a.strip())
        if args.focus
        else None,
        g_max=args.g_max,
        p_agg_min=args.p_agg_min,
        cell_max=args.cell_max,
        scoring=_scoring_params(args),
    )
    dataset = _load_dataset(args)
    oracle = build_oracle(args)
    result = recommend_batch(dataset, config, oracle, BaselineEmbeddingProvider())
    if args.format == "markdown":
        _emit(_batch_markdown(result), args.out)
    else:
        _emit(canonical_json(result.to_json_dict()), args.out)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    groups = [g.strip() for g in args.group.split(",") if g.strip()]
    spec = canonicalize(args.fn, args.attr, groups)
    dataset = _load_dataset(args)
    oracle = build_oracle(args)
    card, details = score_pivot_detailed(
        dataset, spec, oracle, _scoring_params(args)
    )
    report = {
        "spec": spec.to_json_dict(),
        "scorecard": card.to_json_dict(),
        "details": details.to_json_dict(),
    }
    _emit(canonical_json(report), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "recommend":
            return cmd_recommend(args)
        return cmd_score(args)
    except (UsageError, PivotSpecError, ValueError) as exc:
        sys.stderr.write(canonical_json(
            {"error": {"code": "bad_request", "message": str(exc)}}) + "\n")
        return 2
    except DatasetError as exc:
        sys.stderr.write(canonical_json(
            {"error": {"code": "bad_request", "message": str(exc)}}) + "\n")
        return 1
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(canonical_json(
            {"error": {"code": "internal", "message": str(exc)}}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
