"""Counting bounds on PSL2(q): triple deviations and bad translates.

Runs seeded trials and summarises, per group, the clause statuses and the
largest observed/bound ratio for each clause.  A ratio above 1 on an
applicable clause is a violation.

Usage:
    python bounds_report.py [--q 5 7 11 13] [--trials 50] [--seed 0]
"""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict

from quasirandom import make_group
from quasirandom.theorems import bad_set_trials, resolve_k, triple_trials


def summarise(reports):
    status = defaultdict(lambda: defaultdict(int))
    worst = defaultdict(float)
    for rep in reports:
        for c in rep.clauses:
            name = c.name if not c.name.startswith("t=") else "bad-set"
            status[name][c.status] += 1
            if c.status != "n/a" and c.relation == "<=" and c.bound > 0:
                worst[name] = max(worst[name], c.observed / c.bound)
    return status, worst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, nargs="+", default=[5, 7, 11, 13])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    violations = 0
    for q in args.q:
        G = make_group(f"psl2:{q}")
        k, source = resolve_k(G)
        reports = list(triple_trials(G, args.trials, args.seed)) + list(bad_set_trials(G, args.trials, args.seed))
        status, worst = summarise(reports)
        violations += sum(s["fail"] for s in status.values())
        print(f"{G.descriptor} (n={G.order}, k={k} {source})")
        for name, counts in status.items():
            extra = f"  max observed/bound {worst[name]:.3f}" if name in worst else ""
            print(f"  {name:<10} " + " ".join(f"{s}={counts[s]}" for s in ("pass", "fail", "n/a")) + extra)
    return 2 if violations else 0


if __name__ == "__main__":
    sys.exit(main())
