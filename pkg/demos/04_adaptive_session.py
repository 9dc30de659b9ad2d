"""Adaptive session loop: feedback reshapes the next batch.

Every pivot that has been shown is excluded from later batches; focus
attributes narrow the candidate space to what the analyst cares about.

    python3 demos/04_adaptive_session.py
"""

from pathlib import Path

from pivotrec import (
    RecommendConfig,
    RuleBasedOracle,
    Session,
    apply_feedback,
    load_table,
    next_batch,
)

DATA = Path(__file__).parent / "data" / "employees.csv"


def main() -> None:
    dataset = load_table(DATA.read_bytes())
    oracle = RuleBasedOracle()
    config = RecommendConfig(
        k=3, theta=0.1, focus_attrs=("Salary", "Gender", "Degree", "Department")
    )
    session = Session(dataset=dataset, config=config)

    for round_no in range(1, 4):
        result = next_batch(session, oracle)
        print(f"round {round_no}: {len(result.items)} tables")
        for rec in result.items:
            print(f"   {rec.rank}. {rec.spec.query_string():<58} "
                  f"utility {rec.scorecard.utility:.3f}")
        if not result.items:
            print("   candidate space exhausted")
            break
        # accept the best table, reject the rest
        apply_feedback(session, result.items[0].spec, "accepted")
        for rec in result.items[1:]:
            apply_feedback(session, rec.spec, "rejected")
        print(f"   -> accepted {result.items[0].spec.key()}\n")

    print(f"session explored {len(session.explored)} pivots; "
          f"{len(session.accepted)} accepted, {len(session.rejected)} rejected")


if __name__ == "__main__":
    main()
