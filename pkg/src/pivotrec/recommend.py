"""Candidate enumeration, greedy diverse selection, and adaptive sessions.

The selection problem: among all candidate pivots, pick at most k
maximizing total utility subject to every pairwise embedding distance
being at least theta. The greedy scan (utility-descending, feasibility
check per draft) is exact at theta = 0; a brute-force oracle over small
pools checks it in tests.
"""

from __future__ import annotations

import copy
import itertools
import time
import uuid
from dataclasses import dataclass, field

from .dataset import Dataset, SchemaError, TEMPORAL
from .embedding import (
    BaselineEmbeddingProvider,
    EmbeddingVector,
    pairwise_distance,
    set_diversity,
)
from .pivot import (
    AGG_FUNCTIONS,
    COUNT,
    DEFAULT_G_MAX,
    CanonicalPivotSpec,
    NUMERIC_AGGS,
    PivotGrid,
    canonicalize,
    materialize,
)
from .scoring import ScoreCard, ScoringParams, score_pivot_detailed
from .semantics import SemanticOracle

ACCEPTED = "accepted"
REJECTED = "rejected"

# With Pr_agg below this floor the aggregate is semantically dubious for V
# and the candidate is dropped before materialization.
DEFAULT_P_AGG_MIN = 0.4

# Estimated cell-count bound (product of grouping distinct counts) beyond
# which conciseness makes a candidate near-worthless.
DEFAULT_CELL_MAX = 256


class FeedbackError(ValueError):
    """Feedback for a pivot that was never recommended in the session."""


class PoolTooLargeError(ValueError):
    """Brute-force selection refused: exponential blowup guard."""


@dataclass(frozen=True)
class RecommendConfig:
    k: int = 5
    theta: float = 0.0
    focus_attrs: tuple[str, ...] | None = None
    g_max: int = DEFAULT_G_MAX
    p_agg_min: float = DEFAULT_P_AGG_MIN
    cell_max: int = DEFAULT_CELL_MAX
    scoring: ScoringParams = field(default_factory=ScoringParams)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("budget k must be >= 1")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0, 1]")
        if self.g_max < 2:
            raise ValueError("g_max must be >= 2")

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "theta": self.theta,
            "focus_attrs": list(self.focus_attrs) if self.focus_attrs else None,
            "g_max": self.g_max,
            "p_agg_min": self.p_agg_min,
            "cell_max": self.cell_max,
            "scoring": self.scoring.to_json_dict(),
        }


def config_from_json(obj: dict) -> RecommendConfig:
    """Parse a config payload; a top-level "alpha" is shorthand for the
    scoring mix weight."""
    scoring_obj = dict(obj.get("scoring") or {})
    if "alpha" in obj:
        scoring_obj.setdefault("alpha", obj["alpha"])
    scoring = ScoringParams(**scoring_obj)
    focus = obj.get("focus_attrs")
    return RecommendConfig(
        k=int(obj.get("k", 5)),
        theta=float(obj.get("theta", 0.0)),
        focus_attrs=tuple(focus) if focus else None,
        g_max=int(obj.get("g_max", DEFAULT_G_MAX)),
        p_agg_min=float(obj.get("p_agg_min", DEFAULT_P_AGG_MIN)),
        cell_max=int(obj.get("cell_max", DEFAULT_CELL_MAX)),
        scoring=scoring,
    )


@dataclass
class Recommendation:
    spec: CanonicalPivotSpec
    grid: PivotGrid
    scorecard: ScoreCard
    embedding: EmbeddingVector
    rank: int = 0

    @property
    def utility(self) -> float:
        return self.scorecard.utility

    @property
    def sort_key(self) -> str:
        return self.spec.query_string()

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_json_dict(),
            "grid": self.grid.to_json_dict(),
            "scorecard": self.scorecard.to_json_dict(),
            "rank": self.rank,
        }


@dataclass
class SelectionResult:
    items: list[Recommendation]
    exhausted: bool
    diversity: float

    def to_json_dict(self) -> dict:
        return {
            "batch": [r.to_json_dict() for r in self.items],
            "diversity": self.diversity,
            "exhausted": self.exhausted,
        }


@dataclass
class Session:
    """Adaptive state: everything ever shown is excluded from later
    batches; accept/reject verdicts are kept as history."""

    dataset: Dataset
    config: RecommendConfig
    id: str = field(default_factory=lambda: uuid.uuid4().hex)
    explored: dict[str, CanonicalPivotSpec] = field(default_factory=dict)
    verdicts: dict[str, str] = field(default_factory=dict)
    history: list[dict] = field(default_factory=list)

    @property
    def accepted(self) -> set[str]:
        return {k for k, v in self.verdicts.items() if v == ACCEPTED}

    @property
    def rejected(self) -> set[str]:
        return {k for k, v in self.verdicts.items() if v == REJECTED}

    def mark_served(self, specs: list[CanonicalPivotSpec]) -> None:
        for spec in specs:
            self.explored[spec.key()] = spec

    def summary(self) -> dict:
        return {
            "session_id": self.id,
            "explored_count": len(self.explored),
            "accepted_count": len(self.accepted),
            "rejected_count": len(self.rejected),
        }


def apply_feedback(session: Session, spec: CanonicalPivotSpec, verdict: str) -> Session:
    """Record an accept/reject for a previously served pivot.

    Idempotent for repeated identical verdicts; a changed verdict replaces
    the old one so accepted and rejected stay disjoint.
    """
    if verdict not in (ACCEPTED, REJECTED):
        raise ValueError(f"verdict must be accepted or rejected, got {verdict!r}")
    key = spec.key()
    if key not in session.explored:
        raise FeedbackError(f"pivot was never recommended in this session: {key}")
    session.verdicts[key] = verdict
    session.history.append({"spec": spec.to_json_dict(), "verdict": verdict,
                            "at": time.time()})
    return session


# ---------------------------------------------------------------------------
# Candidate enumeration
# ---------------------------------------------------------------------------

def _aggregable(d: Dataset, attr_name: str) -> bool:
    meta = d.attribute(attr_name)
    if meta.data_type == TEMPORAL:
        return False
    return d.is_numeric_storage(attr_name)


def enumerate_candidates(
    d: Dataset,
    config: RecommendConfig,
    oracle: SemanticOracle,
    explored: set[str] | frozenset[str] = frozenset(),
) -> list[CanonicalPivotSpec]:
    """All canonical specs worth materializing, sorted by query string.

    Enumerates F(V) with 2..g_max grouping attributes (restricted to the
    focus attributes when set), minus the session's explored specs, then
    prunes: (a) any attribute with significance 0 — the attribute gate
    forces insightfulness to 0; (b) Pr_agg(F, V) below p_agg_min; (c)
    estimated cell count (product of grouping distinct counts) above
    cell_max. The distinct-count product bounds the true cell count from
    above without materializing anything.
    """
    universe = [a.resolved_name for a in d.attributes]
    if config.focus_attrs is not None:
        for attr in config.focus_attrs:
            if attr not in universe:
                raise SchemaError(f"unknown focus attribute {attr!r}")
        universe = [a for a in universe if a in set(config.focus_attrs)]

    significance = {a: oracle.significance(d.attribute(a)) for a in universe}
    significant = [a for a in universe if significance[a] > 0.0]
    pr_agg = {
        a: {fn: oracle.aggregate_validity(fn, d.attribute(a)) for fn in AGG_FUNCTIONS}
        for a in significant
    }
    distinct = {a: d.attribute(a).distinct_count for a in universe}

    specs: list[CanonicalPivotSpec] = []
    for v in significant:
        valid_fns = [
            fn for fn in AGG_FUNCTIONS
            if (fn == COUNT or (fn in NUMERIC_AGGS and _aggregable(d, v)))
            and pr_agg[v][fn] >= config.p_agg_min
        ]
        if not valid_fns:
            continue
        others = [a for a in significant if a != v]
        for size in range(2, config.g_max + 1):
            for combo in itertools.combinations(sorted(others), size):
                estimated = 1
                for a in combo:
                    estimated *= max(1, distinct[a])
                if estimated > config.cell_max:
                    continue
                for fn in valid_fns:
                    spec = canonicalize(fn, v, combo)
                    if spec.key() not in explored:
                        specs.append(spec)
    specs.sort(key=lambda s: s.query_string())
    return specs


# ---------------------------------------------------------------------------
# Scoring and selection
# ---------------------------------------------------------------------------

def score_candidates(
    d: Dataset,
    specs: list[CanonicalPivotSpec],
    oracle: SemanticOracle,
    params: ScoringParams,
    embedder: BaselineEmbeddingProvider | None = None,
) -> tuple[list[Recommendation], list[dict]]:
    """Materialize, score, and embed each spec once.

    Per-spec failures never abort the batch; they are returned alongside
    the drafts.
    """
    embedder = embedder or BaselineEmbeddingProvider()
    drafts: list[Recommendation] = []
    failures: list[dict] = []
    for spec in specs:
        try:
            grid = materialize(d, spec)
            card, _ = score_pivot_detailed(d, spec, oracle, params, grid)
            embedding = embedder.embed_pivot(spec, grid)
        except Exception as exc:  # noqa: BLE001 - recorded, not swallowed
            failures.append({"spec": spec.to_json_dict(), "error": str(exc)})
            continue
        drafts.append(Recommendation(spec=spec, grid=grid, scorecard=card,
                                     embedding=embedding))
    return drafts, failures


def _feasible_with(selected: list, candidate, theta: float) -> bool:
    return all(
        pairwise_distance(candidate.embedding, other.embedding) >= theta
        for other in selected
    )


def greedy_select(drafts: list, config: RecommendConfig) -> SelectionResult:
    """Utility-descending scan adding every draft that keeps the set
    feasible, stopping at k.

    Ties break on the canonical query string, making the output
    deterministic. Exact at theta = 0 (plain top-k); may return fewer than
    k with the ``exhausted`` flag set rather than silently relaxing theta.
    """
    ordered = sorted(drafts, key=lambda r: (-r.utility, r.sort_key))
    selected: list = []
    for draft in ordered:
        if len(selected) >= config.k:
            break
        if _feasible_with(selected, draft, config.theta):
            selected.append(draft)
    items = []
    for i, r in enumerate(selected):
        item = copy.copy(r)
        if hasattr(item, "rank"):
            item.rank = i + 1
        items.append(item)
    return SelectionResult(
        items=items,
        exhausted=len(items) < config.k,
        diversity=set_diversity([r.embedding for r in items]),
    )


def brute_force_select(drafts: list, config: RecommendConfig) -> tuple[list, float]:
    """Exhaustive oracle for small pools: the feasible subset of size <= k
    with maximum total utility (ties: lexicographically smallest sorted
    key list). Refuses pools larger than 20 drafts.
    """
    if len(drafts) > 20:
        raise PoolTooLargeError(f"pool of {len(drafts)} drafts is too large")
    best: tuple[float, list[str]] | None = None
    best_subset: list = []
    for size in range(0, min(config.k, len(drafts)) + 1):
        for subset in itertools.combinations(drafts, size):
            if set_diversity([r.embedding for r in subset]) < config.theta:
                continue
            total = sum(r.utility for r in subset)
            keys = sorted(r.sort_key for r in subset)
            candidate = (-total, keys)
            if best is None or candidate < best:
                best = candidate
                best_subset = list(subset)
    total_utility = sum(r.utility for r in best_subset)
    return best_subset, total_utility


def recommend_batch(
    d: Dataset,
    config: RecommendConfig,
    oracle: SemanticOracle,
    embedder: BaselineEmbeddingProvider | None = None,
    explored: set[str] | frozenset[str] = frozenset(),
    pool_cap: int | None = None,
) -> SelectionResult:
    """One-shot pipeline: enumerate -> score -> greedy select."""
    specs = enumerate_candidates(d, config, oracle, explored)
    if pool_cap is not None and len(specs) > pool_cap:
        raise PoolTooLargeError(
            f"candidate pool of {len(specs)} exceeds cap {pool_cap}; "
            "narrow focus_attrs or lower g_max"
        )
    drafts, _ = score_candidates(d, specs, oracle, config.scoring, embedder)
    return greedy_select(drafts, config)


def next_batch(
    session: Session,
    oracle: SemanticOracle,
    embedder: BaselineEmbeddingProvider | None = None,
    pool_cap: int | None = None,
) -> SelectionResult:
    """Recommend against the session state and mark the batch as served."""
    result = recommend_batch(
        session.dataset,
        session.config,
        oracle,
        embedder,
        explored=set(session.explored),
        pool_cap=pool_cap,
    )
    session.mark_served([r.spec for r in result.items])
    return result
