"""Utility model for a single pivot table.

Insightfulness = significance-gated max of informativeness, trend
(correlation/ratio), and surprise; interpretability = mean of density,
semantic validity, and conciseness; utility = their convex combination.
All scores live in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, TEMPORAL, TEXT
from .pivot import CanonicalPivotSpec, PivotGrid, materialize
from .semantics import (
    SemanticOracle,
    aggregate_phrase,
    correlation_query,
    likert_value,
    outlier_query,
    ratio_query,
)


@dataclass(frozen=True)
class ScoringParams:
    """Thresholds and decay rates for the sub-scores.

    tau_rho     minimum |Pearson rho| before a correlation counts (and
                before the oracle is consulted)
    tau_pi      minimum element-wise ratio for a ratio trend; must be >= 1
                so at most one direction of a pair can contribute
    tau_outlier std-dev multiplier for outlier cells
    tau_c       cell-count knee of the conciseness curve
    z           linear conciseness decay per cell up to tau_c
    lam         exponential conciseness decay rate beyond tau_c
    alpha       insightfulness weight in the final utility mix
    """

    tau_rho: float = 0.5
    tau_pi: float = 2.0
    tau_outlier: float = 4.0
    tau_c: int = 16
    z: float = 0.03
    lam: float = 0.5
    alpha: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau_rho <= 1.0:
            raise ValueError("tau_rho must be in [0, 1]")
        if self.tau_pi < 1.0:
            raise ValueError("tau_pi must be >= 1")
        if self.tau_outlier <= 0 or self.lam <= 0 or self.z < 0:
            raise ValueError("decay/threshold parameters must be positive")
        if self.tau_c < 0 or self.z * self.tau_c > 1.0:
            raise ValueError("z * tau_c must not exceed 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "tau_rho": self.tau_rho,
            "tau_pi": self.tau_pi,
            "tau_outlier": self.tau_outlier,
            "tau_c": self.tau_c,
            "z": self.z,
            "lam": self.lam,
            "alpha": self.alpha,
        }


@dataclass
class ScoreCard:
    """Every sub-score plus the composites, each in [0, 1]."""

    s_sig: float
    s_inf: float
    s_cor: float
    s_ratio: float
    s_trend: float
    s_sur: float
    insightfulness: float
    s_den: float
    s_sem: float
    s_con: float
    interpretability: float
    utility: float
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "s_sig": self.s_sig,
            "s_inf": self.s_inf,
            "s_cor": self.s_cor,
            "s_ratio": self.s_ratio,
            "s_trend": self.s_trend,
            "s_sur": self.s_sur,
            "insightfulness": self.insightfulness,
            "s_den": self.s_den,
            "s_sem": self.s_sem,
            "s_con": self.s_con,
            "interpretability": self.interpretability,
            "utility": self.utility,
        }


@dataclass
class ScoreDetails:
    """Intermediates surfaced for debugging: the normalization spread, the
    trend pairs that survived their gates, and per-row/column outliers."""

    gamma: float = 0.0
    correlation_pairs: list[dict] = field(default_factory=list)
    ratio_pairs: list[dict] = field(default_factory=list)
    outliers: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "correlation_pairs": self.correlation_pairs,
            "ratio_pairs": self.ratio_pairs,
            "outliers": self.outliers,
        }


# ---------------------------------------------------------------------------
# Insightfulness sub-scores
# ---------------------------------------------------------------------------

def significance_score(spec: CanonicalPivotSpec, d: Dataset, oracle: SemanticOracle) -> float:
    """Product of per-attribute significance over {V} union G."""
    score = 1.0
    for attr_name in (spec.agg_attr, *spec.groups):
        score *= oracle.significance(d.attribute(attr_name))
    return score


def _grid_gamma(cells: np.ndarray) -> float:
    finite = cells[np.isfinite(cells)] if cells.size else np.array([])
    if finite.size == 0:
        return 0.0
    return float(finite.max() - finite.min())


def _axis_informativeness(mat: np.ndarray, gamma: float) -> float:
    n, m = mat.shape
    if n < 2 or m == 0 or gamma <= 0:
        return 0.0
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            mutual = np.isfinite(mat[i]) & np.isfinite(mat[j])
            if int(mutual.sum()) < 2:
                continue
            diff = mat[i][mutual] - mat[j][mutual]
            total += float(np.sqrt(np.dot(diff, diff))) / (gamma * m)
    return total / math.comb(n, 2)


def informativeness_score(g: PivotGrid) -> float:
    """Mean pairwise L2 spread of rows (and of columns, symmetrically),
    normalized by the grid value range; the larger of the two."""
    gamma = _grid_gamma(g.cells)
    row = _axis_informativeness(g.cells, gamma)
    col = _axis_informativeness(g.cells.T, gamma)
    return max(row, col)


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    if x.size < 2:
        return None
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.sqrt(np.dot(dx, dx)))
    sy = float(np.sqrt(np.dot(dy, dy)))
    if sx == 0.0 or sy == 0.0:
        return None
    rho = float(np.dot(dx, dy) / (sx * sy))
    # rounding can push |rho| an ulp past 1, which would leak out of [0, 1]
    return min(1.0, max(-1.0, rho))


def _axis_correlation(
    mat: np.ndarray,
    labels: list[str],
    across: list[str],
    fv_phrase: str,
    oracle: SemanticOracle,
    params: ScoringParams,
    axis: str,
    details: ScoreDetails | None,
) -> float:
    n = mat.shape[0]
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            mutual = np.isfinite(mat[i]) & np.isfinite(mat[j])
            rho = _pearson(mat[i][mutual], mat[j][mutual])
            if rho is None or abs(rho) < params.tau_rho:
                continue
            sign = "positive" if rho >= 0 else "negative"
            level = oracle.assess_unlikelihood(
                correlation_query(fv_phrase, labels[i], labels[j], across, sign)
            )
            total += abs(rho) * likert_value(level)
            if details is not None:
                details.correlation_pairs.append(
                    {"axis": axis, "pair": [labels[i], labels[j]],
                     "rho": rho, "level": level}
                )
    return total / math.comb(n, 2)


def correlation_trend_score(
    g: PivotGrid,
    oracle: SemanticOracle,
    params: ScoringParams,
    details: ScoreDetails | None = None,
) -> float:
    """Pairwise |Pearson| above tau_rho, weighted by the oracle-assessed
    unlikelihood of the correlation; max of the row and column sides.

    A pair needs at least two mutually non-null cells (two-point
    correlations count, at |rho| = 1) and nonzero variance on both sides.
    """
    fv = aggregate_phrase(g.spec.agg_fn, g.spec.agg_attr)
    row = _axis_correlation(
        g.cells, g.row_labels(), g.col_labels(), fv, oracle, params, "row", details
    )
    col = _axis_correlation(
        g.cells.T, g.col_labels(), g.row_labels(), fv, oracle, params, "col", details
    )
    return max(row, col)


def _axis_ratio(
    mat: np.ndarray,
    labels: list[str],
    across: list[str],
    fv_phrase: str,
    oracle: SemanticOracle,
    params: ScoringParams,
    axis: str,
    details: ScoreDetails | None,
) -> float:
    n = mat.shape[0]
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            fin_i = np.isfinite(mat[i])
            fin_j = np.isfinite(mat[j])
            # Mismatched nulls make the element-wise ratio undefined.
            if bool(np.any(fin_i != fin_j)):
                continue
            mutual = fin_i & fin_j
            if not bool(mutual.any()):
                continue
            a = mat[i][mutual]
            b = mat[j][mutual]
            if bool(np.any(a <= 0)) or bool(np.any(b <= 0)):
                continue
            pi = float(np.min(a / b))
            if pi < params.tau_pi:
                continue
            level = oracle.assess_unlikelihood(
                ratio_query(fv_phrase, labels[i], labels[j], across, pi)
            )
            total += (1.0 - 1.0 / pi) * likert_value(level)
            if details is not None:
                details.ratio_pairs.append(
                    {"axis": axis, "pair": [labels[i], labels[j]],
                     "min_ratio": pi, "level": level}
                )
    # tau_pi >= 1 lets at most one direction per unordered pair through,
    # so C(n, 2) keeps the score in [0, 1].
    return total / math.comb(n, 2)


def ratio_trend_score(
    g: PivotGrid,
    oracle: SemanticOracle,
    params: ScoringParams,
    details: ScoreDetails | None = None,
) -> float:
    """Persistent element-wise ratios of at least tau_pi between two rows
    (or columns), weighted by oracle-assessed rarity; max of the sides."""
    fv = aggregate_phrase(g.spec.agg_fn, g.spec.agg_attr)
    row = _axis_ratio(
        g.cells, g.row_labels(), g.col_labels(), fv, oracle, params, "row", details
    )
    col = _axis_ratio(
        g.cells.T, g.col_labels(), g.row_labels(), fv, oracle, params, "col", details
    )
    return max(row, col)


def trend_score(s_cor: float, s_ratio: float) -> float:
    return max(s_cor, s_ratio)


def _axis_surprise(
    mat: np.ndarray,
    labels: list[str],
    across: list[str],
    fv_phrase: str,
    oracle: SemanticOracle,
    params: ScoringParams,
    axis: str,
    details: ScoreDetails | None,
) -> float:
    n = mat.shape[0]
    if n == 0:
        return 0.0
    total = 0.0
    for i in range(n):
        row = mat[i]
        finite_idx = np.flatnonzero(np.isfinite(row))
        if finite_idx.size < 2:
            continue
        values = row[finite_idx]
        mu = float(values.mean())
        sigma = float(values.std())
        if sigma == 0.0:
            continue
        outlier_idx = [
            int(j) for j in finite_idx
            if abs(float(row[j]) - mu) >= params.tau_outlier * sigma
        ]
        if not outlier_idx:
            continue
        unlikelihood = 0.0
        for j in outlier_idx:
            level = oracle.assess_unlikelihood(
                outlier_query(fv_phrase, labels[i], across[j], float(row[j]))
            )
            unlikelihood += likert_value(level)
            if details is not None:
                details.outliers.append(
                    {"axis": axis, "group": labels[i], "header": across[j],
                     "value": float(row[j]), "level": level}
                )
        total += 1.0 - unlikelihood / (len(outlier_idx) + 1)
    return total / n


def surprise_score(
    g: PivotGrid,
    oracle: SemanticOracle,
    params: ScoringParams,
    details: ScoreDetails | None = None,
) -> float:
    """Cells at least tau_outlier standard deviations from their row (or
    column) mean, weighted by how unexpected the oracle finds them."""
    fv = aggregate_phrase(g.spec.agg_fn, g.spec.agg_attr)
    row = _axis_surprise(
        g.cells, g.row_labels(), g.col_labels(), fv, oracle, params, "row", details
    )
    col = _axis_surprise(
        g.cells.T, g.col_labels(), g.row_labels(), fv, oracle, params, "col", details
    )
    return max(row, col)


def insightfulness_score(s_sig: float, s_inf: float, s_trend: float, s_sur: float) -> float:
    """The strongest insight signal, gated by attribute significance."""
    return s_sig * max(s_inf, s_trend, s_sur)


# ---------------------------------------------------------------------------
# Interpretability sub-scores
# ---------------------------------------------------------------------------

def density_score(g: PivotGrid) -> float:
    if g.cell_count == 0:
        return 0.0
    return g.non_null_count() / g.cell_count


def semantic_validity_score(
    spec: CanonicalPivotSpec, d: Dataset, oracle: SemanticOracle
) -> float:
    """Fraction of textual grouping attributes times the oracle's fit of
    the aggregate function for V. Temporal attributes count as textual;
    identifier-like ones do not."""
    textual = sum(
        1 for a in spec.groups if d.attribute(a).data_type in (TEXT, TEMPORAL)
    )
    pr_agg = oracle.aggregate_validity(spec.agg_fn, d.attribute(spec.agg_attr))
    return (textual / len(spec.groups)) * pr_agg


def conciseness_score(cell_count: int, params: ScoringParams) -> float:
    """Linear decay up to tau_c cells, exponential beyond; continuous at
    the knee and non-increasing."""
    if cell_count < 0:
        raise ValueError("cell_count must be non-negative")
    if cell_count <= params.tau_c:
        return 1.0 - params.z * cell_count
    return (1.0 - params.z * params.tau_c) * math.exp(
        -params.lam * (cell_count - params.tau_c)
    )


def interpretability_score(s_den: float, s_sem: float, s_con: float) -> float:
    return (s_den + s_sem + s_con) / 3.0


def utility_score(insightfulness: float, interpretability: float, params: ScoringParams) -> float:
    return params.alpha * insightfulness + (1.0 - params.alpha) * interpretability


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

def score_pivot(
    d: Dataset,
    spec: CanonicalPivotSpec,
    oracle: SemanticOracle,
    params: ScoringParams | None = None,
    grid: PivotGrid | None = None,
) -> ScoreCard:
    card, _ = score_pivot_detailed(d, spec, oracle, params, grid)
    return card


def score_pivot_detailed(
    d: Dataset,
    spec: CanonicalPivotSpec,
    oracle: SemanticOracle,
    params: ScoringParams | None = None,
    grid: PivotGrid | None = None,
) -> tuple[ScoreCard, ScoreDetails]:
    """Materialize (unless a grid is supplied) and compute every score."""
    params = params or ScoringParams()
    if grid is None:
        grid = materialize(d, spec)
    details = ScoreDetails(gamma=_grid_gamma(grid.cells))

    s_sig = significance_score(spec, d, oracle)
    s_inf = informativeness_score(grid)
    s_cor = correlation_trend_score(grid, oracle, params, details)
    s_ratio = ratio_trend_score(grid, oracle, params, details)
    s_trend = trend_score(s_cor, s_ratio)
    s_sur = surprise_score(grid, oracle, params, details)
    insight = insightfulness_score(s_sig, s_inf, s_trend, s_sur)

    s_den = density_score(grid)
    s_sem = semantic_validity_score(spec, d, oracle)
    s_con = conciseness_score(grid.cell_count, params)
    interp = interpretability_score(s_den, s_sem, s_con)

    card = ScoreCard(
        s_sig=s_sig,
        s_inf=s_inf,
        s_cor=s_cor,
        s_ratio=s_ratio,
        s_trend=s_trend,
        s_sur=s_sur,
        insightfulness=insight,
        s_den=s_den,
        s_sem=s_sem,
        s_con=s_con,
        interpretability=interp,
        utility=utility_score(insight, interp, params),
        degenerate=grid.cell_count == 0,
    )
    return card, details
