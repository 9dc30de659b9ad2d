"""Record oracle answers to a JSONL cache, then replay them bit-for-bit.

The cache is content-addressed by the normalized query, so a recorded
remote session replays deterministically on a machine with no network at
all. Here both passes use the offline rule-based provider; the bytes of
the two reports are compared to prove the replay is exact.

    python3 demos/05_record_replay_oracle.py
"""

import tempfile
from pathlib import Path

from pivotrec import (
    CachingOracle,
    OracleCache,
    RuleBasedOracle,
    ScoringParams,
    canonicalize,
    load_table,
    score_pivot,
)
from pivotrec._util import canonical_json

DATA = Path(__file__).parent / "data" / "employees.csv"


def main() -> None:
    dataset = load_table(DATA.read_bytes())
    spec = canonicalize("AVG", "Salary", ["Degree", "Department"])

    with tempfile.TemporaryDirectory() as tmp:
        cache_path = Path(tmp) / "oracle_cache.jsonl"

        recorder = CachingOracle(RuleBasedOracle(), OracleCache(cache_path),
                                 record=True)
        first = score_pivot(dataset, spec, recorder, ScoringParams())
        recorded = len(OracleCache(cache_path))
        print(f"recorded {recorded} oracle answers to {cache_path.name}")

        replayer = CachingOracle(RuleBasedOracle(), OracleCache(cache_path),
                                 record=False)
        second = score_pivot(dataset, spec, replayer, ScoringParams())

        a = canonical_json(first.to_json_dict())
        b = canonical_json(second.to_json_dict())
        print(f"replayed scorecard identical: {a == b}")
        print(f"utility = {second.utility:.4f}")


if __name__ == "__main__":
    main()
