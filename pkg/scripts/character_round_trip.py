"""Compile every primitive character up to a conductor bound and classify it back.

Prints one row per (Q, q) with the number of exact matches, the minimal
state counts and whether empirical kernel inference closes.
"""
import argparse
import time

from autoseq import characters as C
from autoseq import dfao as D
from autoseq import multfun as M


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--Qmax", type=int, default=50)
    ap.add_argument("--bases", type=int, nargs="+", default=[2, 3, 10])
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--prefix", type=int, default=4096)
    ap.add_argument("--no-empirical", action="store_true")
    args = ap.parse_args()

    print("Q\tq\tprimitive\tmatched\tmax_states\tempirical_closed")
    t0 = time.time()
    for Q in range(1, args.Qmax + 1):
        prims = [c for c in C.enumerate_characters(C.build_unit_group(Q)) if C.is_primitive(c)]
        if not prims:
            continue
        for q in args.bases:
            matched, closed, states = 0, 0, 0
            for chi in prims:
                a = C.compile_character(chi, q)
                states = max(states, a.state_count)
                res = C.classify(a, q)
                matched += res.verdict == "CharacterMatch" and res.character == chi
                if not args.no_empirical:
                    rep = M.kernel_empirical(a, q, args.depth, args.prefix)
                    closed += rep.closed and D.equivalent(rep.candidate, a)
            emp = "-" if args.no_empirical else str(closed)
            print(f"{Q}\t{q}\t{len(prims)}\t{matched}\t{states}\t{emp}", flush=True)
    print(f"# {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
