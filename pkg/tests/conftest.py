from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pivotrec import (
    Dataset,
    OracleCache,
    ScriptedOracle,
    load_table,
)
from pivotrec.semantics import (
    LIKELY,
    UNLIKELY,
    VERY_LIKELY,
    VERY_UNLIKELY,
    correlation_query,
    ratio_query,
)

DATA_DIR = Path(__file__).parent / "data"

# Oracle answers behind the worked golden example: the likelihood of each
# salary trend, keyed by the exact queries the scorer will issue for the
# AVG(Salary) x (Degree, Department) grid.
GOLDEN_FV = "Average Salary"
GOLDEN_ANSWERS = [
    (correlation_query(GOLDEN_FV, "BS", "MS", ["IT", "Sales"], "positive"),
     {"level": VERY_LIKELY}),
    (correlation_query(GOLDEN_FV, "BS", "PhD", ["IT", "Sales"], "positive"),
     {"level": LIKELY}),
    (correlation_query(GOLDEN_FV, "MS", "PhD", ["IT", "Sales"], "positive"),
     {"level": LIKELY}),
    (correlation_query(GOLDEN_FV, "IT", "Sales", ["BS", "MS", "PhD"], "positive"),
     {"level": LIKELY}),
    (ratio_query(GOLDEN_FV, "PhD", "BS", ["IT", "Sales"], 4.0),
     {"level": VERY_UNLIKELY}),
    (ratio_query(GOLDEN_FV, "PhD", "MS", ["IT", "Sales"], 2.0),
     {"level": UNLIKELY}),
]


@pytest.fixture(scope="session")
def mini_csv() -> bytes:
    return (DATA_DIR / "employees_mini.csv").read_bytes()


@pytest.fixture(scope="session")
def mini_dataset(mini_csv) -> Dataset:
    return load_table(mini_csv)


@pytest.fixture(scope="session")
def employees_csv_path() -> Path:
    return DATA_DIR / "employees.csv"


@pytest.fixture(scope="session")
def employees_dataset(employees_csv_path) -> Dataset:
    return load_table(employees_csv_path.read_bytes())


@pytest.fixture
def golden_oracle() -> ScriptedOracle:
    oracle = ScriptedOracle()
    for query, payload in GOLDEN_ANSWERS:
        oracle.script(query, payload)
    return oracle


@pytest.fixture
def golden_cache_path(tmp_path) -> Path:
    """The golden answers persisted as a replayable JSONL oracle cache."""
    path = tmp_path / "golden_cache.jsonl"
    cache = OracleCache(path)
    for query, payload in GOLDEN_ANSWERS:
        cache.put(query, payload)
    return path
