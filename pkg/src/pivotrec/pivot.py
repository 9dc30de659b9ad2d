"""Pivot specs, canonicalization, and the in-memory group-by engine.

A pivot is one aggregate F(V) grouped by attributes G, |G| >= 2. Specs are
canonicalized (G sorted, fixed row/column split) so that semantically equal
pivots are structurally identical, and grids are organization-invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._util import value_to_label
from .dataset import Dataset, SchemaError

COUNT = "COUNT"
SUM = "SUM"
AVG = "AVG"
MIN = "MIN"
MAX = "MAX"

# Canonical listing order of the aggregate-function domain; also the order
# used to repair malformed oracle rankings.
AGG_FUNCTIONS = (COUNT, SUM, AVG, MIN, MAX)

# Aggregates that require numeric cell storage for V.
NUMERIC_AGGS = frozenset({SUM, AVG, MIN, MAX})

# Grouping-attribute cap: conciseness decays so fast beyond a handful of
# cells that wider groupings are near-worthless, and the cap bounds
# candidate enumeration.
DEFAULT_G_MAX = 3


class PivotSpecError(ValueError):
    """Invalid pivot definition (aggregate inside groups, arity, types)."""


@dataclass(frozen=True, order=True)
class CanonicalPivotSpec:
    """One aggregate plus lexicographically sorted grouping attributes."""

    agg_fn: str
    agg_attr: str
    groups: tuple[str, ...]

    @property
    def row_groups(self) -> tuple[str, ...]:
        return self.groups[: self._split()]

    @property
    def col_groups(self) -> tuple[str, ...]:
        return self.groups[self._split():]

    def _split(self) -> int:
        return math.ceil(len(self.groups) / 2)

    def query_string(self) -> str:
        """Canonical query text; the identity used for sorting, session
        bookkeeping, and query embeddings."""
        return (
            f"SELECT {self.agg_fn}({self.agg_attr}) FROM D "
            f"GROUP BY {', '.join(self.groups)}"
        )

    def key(self) -> str:
        return f"{self.agg_fn}({self.agg_attr})|{','.join(self.groups)}"

    def to_json_dict(self) -> dict:
        return {"fn": self.agg_fn, "attr": self.agg_attr, "groups": list(self.groups)}


def canonicalize(agg_fn: str, agg_attr: str, groups: Sequence[str]) -> CanonicalPivotSpec:
    """Build a canonical spec from grouping attributes in any order.

    Raises :class:`PivotSpecError` when the aggregate attribute appears in
    the groups (G and V must be disjoint), on duplicate groups, on fewer
    than two grouping attributes, or on an unknown aggregate function.
    """
    fn = agg_fn.upper()
    if fn not in AGG_FUNCTIONS:
        raise PivotSpecError(f"unknown aggregate function {agg_fn!r}")
    group_list = list(groups)
    if len(set(group_list)) != len(group_list):
        raise PivotSpecError(f"duplicate grouping attributes in {group_list!r}")
    if len(group_list) < 2:
        raise PivotSpecError("a pivot needs at least 2 grouping attributes")
    if agg_attr in group_list:
        raise PivotSpecError(
            f"aggregate attribute {agg_attr!r} may not also be a grouping attribute"
        )
    return CanonicalPivotSpec(fn, agg_attr, tuple(sorted(group_list)))


def spec_from_json(obj: dict) -> CanonicalPivotSpec:
    try:
        return canonicalize(obj["fn"], obj["attr"], obj["groups"])
    except (KeyError, TypeError) as exc:
        raise PivotSpecError(f"malformed spec JSON: {obj!r}") from exc


@dataclass(frozen=True)
class PivotGrid:
    """Materialized n x m grid of nullable numeric cells (NaN = null)."""

    spec: CanonicalPivotSpec
    row_headers: tuple[tuple[str, ...], ...]
    col_headers: tuple[tuple[str, ...], ...]
    cells: np.ndarray  # float64, shape (n, m)

    @property
    def n(self) -> int:
        return len(self.row_headers)

    @property
    def m(self) -> int:
        return len(self.col_headers)

    @property
    def cell_count(self) -> int:
        return self.n * self.m

    def non_null_count(self) -> int:
        if self.cells.size == 0:
            return 0
        return int(np.count_nonzero(~np.isnan(self.cells)))

    def row_labels(self) -> list[str]:
        return ["/".join(h) for h in self.row_headers]

    def col_labels(self) -> list[str]:
        return ["/".join(h) for h in self.col_headers]

    def to_json_dict(self) -> dict:
        cells = [
            [None if np.isnan(v) else float(v) for v in row]
            for row in self.cells.tolist()
        ] if self.cells.size else [[] for _ in range(self.n)]
        return {
            "spec": self.spec.to_json_dict(),
            "row_headers": [list(h) for h in self.row_headers],
            "col_headers": [list(h) for h in self.col_headers],
            "cells": cells,
        }


def materialize(d: Dataset, spec: CanonicalPivotSpec) -> PivotGrid:
    """Run the group-by aggregation and lay the result out on the canonical
    row/column split.

    Rows with a null in any grouping attribute are excluded. COUNT counts
    the rows of each group; SUM/AVG/MIN/MAX aggregate the non-null values
    of V and require numeric storage. A cell is null exactly when its group
    combination has no contributing rows.
    """
    for attr in spec.groups:
        d.attribute(attr)
    v_meta = d.attribute(spec.agg_attr)
    if spec.agg_fn in NUMERIC_AGGS and not d.is_numeric_storage(spec.agg_attr):
        raise PivotSpecError(
            f"{spec.agg_fn} requires a numeric attribute, "
            f"{v_meta.resolved_name!r} is {v_meta.data_type}"
        )

    row_attrs, col_attrs = spec.row_groups, spec.col_groups
    row_cols = [d.column(a) for a in row_attrs]
    col_cols = [d.column(a) for a in col_attrs]
    v_col = d.column(spec.agg_attr)

    groups: dict[tuple[tuple[str, ...], tuple[str, ...]], list] = {}
    for i in range(d.row_count):
        r_vals = [c[i] for c in row_cols]
        c_vals = [c[i] for c in col_cols]
        if any(v is None for v in r_vals) or any(v is None for v in c_vals):
            continue
        rkey = tuple(value_to_label(v) for v in r_vals)
        ckey = tuple(value_to_label(v) for v in c_vals)
        groups.setdefault((rkey, ckey), []).append(v_col[i])

    row_headers = tuple(sorted({rk for rk, _ in groups}))
    col_headers = tuple(sorted({ck for _, ck in groups}))
    row_index = {h: i for i, h in enumerate(row_headers)}
    col_index = {h: j for j, h in enumerate(col_headers)}

    cells = np.full((len(row_headers), len(col_headers)), np.nan, dtype=np.float64)
    for (rkey, ckey), values in groups.items():
        cells[row_index[rkey], col_index[ckey]] = _aggregate(spec.agg_fn, values)
    return PivotGrid(spec=spec, row_headers=row_headers, col_headers=col_headers, cells=cells)


def _aggregate(fn: str, values: list) -> float:
    if fn == COUNT:
        return float(len(values))
    numbers = [v for v in values if v is not None]
    if not numbers:
        return math.nan
    if fn == SUM:
        return float(sum(numbers))
    if fn == AVG:
        return float(sum(numbers) / len(numbers))
    if fn == MIN:
        return float(min(numbers))
    if fn == MAX:
        return float(max(numbers))
    raise PivotSpecError(f"unknown aggregate function {fn!r}")


def transpose(g: PivotGrid) -> PivotGrid:
    """Row/column-swapped view of the grid; an involution."""
    return PivotGrid(
        spec=g.spec,
        row_headers=g.col_headers,
        col_headers=g.row_headers,
        cells=g.cells.T.copy(),
    )


def grid_from_json(obj: dict) -> PivotGrid:
    spec = spec_from_json(obj["spec"])
    rows = tuple(tuple(h) for h in obj["row_headers"])
    cols = tuple(tuple(h) for h in obj["col_headers"])
    cells = np.array(
        [[math.nan if v is None else float(v) for v in row] for row in obj["cells"]],
        dtype=np.float64,
    ).reshape(len(rows), len(cols))
    return PivotGrid(spec=spec, row_headers=rows, col_headers=cols, cells=cells)
