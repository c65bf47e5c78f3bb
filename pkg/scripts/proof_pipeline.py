"""Run the residue, prime search and discrete-log parity constructions end to end
and re-verify every certificate."""
import argparse

from autoseq import proofs as P


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--A", type=int, default=2)
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--k0", type=int, default=2)
    ap.add_argument("--t", type=int, nargs="+", default=[2, 3, 7])
    ap.add_argument("--count", type=int, default=3)
    ap.add_argument("--limit", type=int, default=100_000)
    ap.add_argument("--out", help="write certificates here")
    args = ap.parse_args()

    chain = P.run_key2_chain(args.q, args.A, args.primes, args.k0, args.t, args.count, args.limit)
    certs = [chain.ra, chain.search, chain.parity]
    print(f"r_A class {chain.ra.congruence.residue} mod {chain.ra.congruence.modulus}, "
          f"progression {chain.u} mod {chain.v}")
    print(f"primes {chain.primes} with common primitive root {chain.t}; r_A from {chain.r_source}")
    for note in chain.notes:
        print(f"note: {note}")
    for c in certs:
        fails = c.verify()
        print(f"{c.kind}: {'verified' if not fails else 'FAILED ' + '; '.join(fails)}")
    print(f"gamma = {chain.parity.gamma} mod {chain.parity.gamma_modulus}, "
          f"gamma_j = {chain.parity.gammas}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("".join(P.dumps(c) for c in certs))


if __name__ == "__main__":
    main()
