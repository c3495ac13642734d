"""Replicate the failure-of-compactness family at increasing truncations.

For each n the full family is refuted, every single-deletion subset is
satisfiable, and the conjunction closure fails finite conservativity with an
explicit witness subsentence.
"""
import argparse

from boolkit import syntax
from boolkit.compact import (
    conjunction_closure,
    consistency_oracle,
    faicom_family,
    faicom_signature,
    is_finitely_conservative,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=6)
    args = parser.parse_args()

    for n in range(1, args.max_n + 1):
        sig = faicom_signature(n)
        family = list(faicom_family(n))
        verdict = consistency_oracle(family, sig)
        deletions = []
        for i in range(len(family)):
            rest = family[:i] + family[i + 1 :]
            deletions.append(consistency_oracle(rest, sig).status)
        print(f"n={n}: family {verdict.status} ({verdict.budget_used} nodes);"
              f" single deletions: {sorted(set(deletions))}")
        if n >= 2:
            fc = is_finitely_conservative(conjunction_closure(family), sig)
            witness = (
                sorted(syntax.render(f) for f in fc.report.violating_subset)
                if fc.report is not None and fc.report.violating_subset
                else None
            )
            print(f"      closure finitely conservative: {fc.ok} ({fc.reason});"
                  f" witness subsentence: {witness}")


if __name__ == "__main__":
    main()
