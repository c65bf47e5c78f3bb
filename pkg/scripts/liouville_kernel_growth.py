"""Empirical 2-kernel class counts of the Liouville function by depth and prefix length."""
import argparse

from autoseq import multfun as M


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--prefixes", type=int, nargs="+", default=[64, 256, 1024, 4096])
    args = ap.parse_args()

    lam = M.liouville()
    print("prefix\tclosed\t" + "\t".join(f"d{i}" for i in range(args.depth + 1)))
    for L in args.prefixes:
        rep = M.kernel_empirical(lam, args.q, args.depth, L)
        print(f"{L}\t{'yes' if rep.closed else 'no'}\t" + "\t".join(map(str, rep.level_counts)))


if __name__ == "__main__":
    main()
