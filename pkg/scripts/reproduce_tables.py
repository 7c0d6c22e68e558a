"""Recompute the catalog invariants and rerun every built-in certificate.

    python3 scripts/reproduce_tables.py [--variety leib3]
"""

import argparse
import time

from algdegen import catalog, degeneration
from algdegen.algebra import derivation_dim, is_anticommutative, is_leibniz, is_lie, left_annihilator, plus_square
from algdegen.catalog import all_refs


def invariants(variety):
    print(f"{'algebra':16} Der  Ann_L  A(+2)  anticomm  leibniz  lie")
    for ref in all_refs(variety):
        A = catalog.get(ref)
        print(f"{str(ref):16} {derivation_dim(A):3}  {left_annihilator(A).dim:5}  {plus_square(A).dim:5}  "
              f"{is_anticommutative(A)!s:8}  {is_leibniz(A)!s:7}  {is_lie(A)}")


def suites():
    for name in degeneration.SUITES:
        t0 = time.perf_counter()
        reports = degeneration.verify_table(name)
        ok = sum(r.valid for r in reports)
        print(f"suite {name}: {ok}/{len(reports)} valid ({time.perf_counter() - t0:.2f}s)")
        for r in reports:
            if r.exceptions:
                print(f"  {r.certificate.name}: exceptions {r.exceptions}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--variety", default=None, choices=[v.value for v in catalog.Variety])
    args = ap.parse_args()
    invariants(args.variety)
    print()
    suites()


if __name__ == "__main__":
    main()
