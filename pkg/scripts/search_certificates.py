"""Bounded monomial search for degeneration certificates between concrete
catalog algebras.  A miss is not a non-degeneration proof.

    python3 scripts/search_certificates.py g3[1] g2 --extra 1
"""

import argparse
import sys
import time

from algdegen.catalog import parse_ref
from algdegen.degeneration import NotFound, SearchBudget, format_certificate, search_certificate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("source")
    ap.add_argument("target")
    ap.add_argument("--extra", type=int, default=1, help="extra monomial terms beyond the diagonal")
    ap.add_argument("--max-candidates", type=int, default=200000)
    args = ap.parse_args()
    budget = SearchBudget(max_extra_terms=args.extra, max_candidates=args.max_candidates)
    t0 = time.perf_counter()
    try:
        cert = search_certificate(parse_ref(args.source), parse_ref(args.target), budget)
    except NotFound as exc:
        print(f"not found: {exc}")
        sys.exit(1)
    print(format_certificate(cert))
    print(f"# found in {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
