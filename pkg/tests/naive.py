"""Independent row-scan group-by oracle used to cross-check materialize().

Deliberately naive: for every header combination it rescans all rows with
plain Python; no shared code with the engine beyond the dataset container.
"""

from __future__ import annotations

import math

from pivotrec import CanonicalPivotSpec, Dataset
from pivotrec._util import value_to_label


def naive_pivot_cells(
    d: Dataset, spec: CanonicalPivotSpec
) -> dict[tuple[tuple[str, ...], tuple[str, ...]], float]:
    """Mapping of (row header, col header) -> aggregate, only for
    combinations that have at least one contributing row."""
    row_attrs = spec.row_groups
    col_attrs = spec.col_groups

    def labels(attrs: tuple[str, ...], i: int) -> tuple[str, ...] | None:
        out = []
        for a in attrs:
            v = d.columns[a][i]
            if v is None:
                return None
            out.append(value_to_label(v))
        return tuple(out)

    buckets: dict[tuple, list] = {}
    for i in range(d.row_count):
        rkey = labels(row_attrs, i)
        ckey = labels(col_attrs, i)
        if rkey is None or ckey is None:
            continue
        buckets.setdefault((rkey, ckey), []).append(d.columns[spec.agg_attr][i])

    cells: dict[tuple, float] = {}
    for key, values in buckets.items():
        if spec.agg_fn == "COUNT":
            cells[key] = float(len(values))
            continue
        nums = [float(v) for v in values if v is not None]
        if not nums:
            cells[key] = math.nan
        elif spec.agg_fn == "SUM":
            cells[key] = float(sum(nums))
        elif spec.agg_fn == "AVG":
            cells[key] = float(sum(nums)) / len(nums)
        elif spec.agg_fn == "MIN":
            cells[key] = min(nums)
        elif spec.agg_fn == "MAX":
            cells[key] = max(nums)
        else:
            raise AssertionError(spec.agg_fn)
    return cells
