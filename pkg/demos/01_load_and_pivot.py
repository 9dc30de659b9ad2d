"""Load a CSV, inspect inferred attribute types, and materialize pivots.

Run from the repository root:

    python3 demos/01_load_and_pivot.py
"""

from pathlib import Path

from pivotrec import canonicalize, load_table, materialize, transpose
from pivotrec.cli import grid_to_markdown

DATA = Path(__file__).parent / "data" / "employees.csv"


def main() -> None:
    dataset = load_table(DATA.read_bytes())
    print(f"{dataset.row_count} rows, {len(dataset.attributes)} attributes\n")
    for attr in dataset.attributes:
        print(f"  {attr.resolved_name:<12} {attr.data_type:<16} "
              f"{attr.distinct_count} distinct")

    # Grouping order does not matter: specs are canonicalized.
    spec = canonicalize("AVG", "Salary", ["Department", "Degree"])
    print(f"\ncanonical query: {spec.query_string()}")
    print(f"row groups {spec.row_groups}, column groups {spec.col_groups}\n")

    grid = materialize(dataset, spec)
    print(grid_to_markdown(grid))

    print("\ntransposed view:\n")
    print(grid_to_markdown(transpose(grid)))

    # Cells are null when a group combination has no rows; counting the
    # same data shows how uneven the groups are.
    counts = materialize(
        dataset, canonicalize("COUNT", "ID", ["Degree", "Department", "Gender"])
    )
    print("\nheadcounts behind those averages:\n")
    print(grid_to_markdown(counts))


if __name__ == "__main__":
    main()
