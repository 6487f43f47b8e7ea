#!/usr/bin/env python3
"""Build a store from the bundled four-quarter example and print its trend.

Usage: python scripts/build_case_study.py [STORE_DIR]
"""

import sys
from pathlib import Path

from ratlop.casestudy import FIXTURE_BCN, ingest
from ratlop.jsonio import fmt6
from ratlop.timeline import Store


def main() -> int:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("case-study-store")
    store = Store(root)
    records = ingest(store)
    print(f"store: {root.resolve()}")
    print(f"{'period':<10}{'pi':>10}{'dc':>10}{'po':>10}{'ratlop':>10}")
    for record in records:
        scores = record.scores
        print(
            f"{record.period.label:<10}{fmt6(scores.pi):>10}{fmt6(scores.dc):>10}"
            f"{fmt6(scores.po):>10}{fmt6(scores.ratlop):>10}"
        )
    print(f"\nnext: ratlop --store {root} trend {FIXTURE_BCN}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
