"""Classify every completely multiplicative automaton with few states.

Enumerates minimal automata over a small output alphabet, keeps those that
pass the multiplicativity check and reports each verdict.
"""
import argparse
import time

from autoseq import dfao as D
from autoseq.cli import run_sweep, worker_count


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--max-states", type=int, default=3)
    ap.add_argument("--N", type=int, default=10_000)
    ap.add_argument("--Qmax", type=int, default=100)
    ap.add_argument("--P", type=int, default=1000)
    ap.add_argument("--verbose", action="store_true", help="print every automaton")
    args = ap.parse_args()

    t0 = time.time()
    rows = run_sweep(args.q, args.max_states, args.N, args.Qmax, args.P, min(worker_count(), 8))
    counts = {}
    for a, res in rows:
        counts[res.verdict] = counts.get(res.verdict, 0) + 1
        detail = res.character.name() if res.character else f"bound={res.bound}"
        print(f"{res.verdict}\t{detail}\tstates={a.state_count}\t"
              + " ".join(v.token() for v in D.evaluate_range(a, 16)))
        if args.verbose:
            print(D.dumps(a))
    print(f"# {len(rows)} multiplicative automata: {counts} ({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
