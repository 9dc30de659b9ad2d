"""Walk through every sub-score of one pivot table.

The rule-based oracle answers every rarity question with "neutral"; swap in
a remote oracle (or a recorded cache) to reproduce LLM-weighted scores.

    python3 demos/02_score_breakdown.py
"""

from pathlib import Path

from pivotrec import (
    RuleBasedOracle,
    ScoringParams,
    canonicalize,
    load_table,
    score_pivot_detailed,
)

DATA = Path(__file__).parent / "data" / "employees.csv"


def main() -> None:
    dataset = load_table(DATA.read_bytes())
    oracle = RuleBasedOracle()
    spec = canonicalize("AVG", "Salary", ["Degree", "Department"])

    card, details = score_pivot_detailed(dataset, spec, oracle, ScoringParams())

    print(spec.query_string(), "\n")
    print(f"significance       {card.s_sig:.3f}   (product over V and G)")
    print(f"informativeness    {card.s_inf:.3f}   (gamma = {details.gamma:,.0f})")
    print(f"correlation trend  {card.s_cor:.3f}")
    for pair in details.correlation_pairs:
        print(f"    {pair['axis']}: {pair['pair'][0]} vs {pair['pair'][1]} "
              f"rho={pair['rho']:+.3f} rarity={pair['level']}")
    print(f"ratio trend        {card.s_ratio:.3f}")
    for pair in details.ratio_pairs:
        print(f"    {pair['axis']}: {pair['pair'][0]} >= "
              f"{pair['min_ratio']:.1f}x {pair['pair'][1]} rarity={pair['level']}")
    print(f"surprise           {card.s_sur:.3f}   "
          f"({len(details.outliers)} outlier cells)")
    print(f"insightfulness     {card.insightfulness:.3f}\n")

    print(f"density            {card.s_den:.3f}")
    print(f"semantic validity  {card.s_sem:.3f}")
    print(f"conciseness        {card.s_con:.3f}")
    print(f"interpretability   {card.interpretability:.3f}\n")
    print(f"utility            {card.utility:.3f}")


if __name__ == "__main__":
    main()
