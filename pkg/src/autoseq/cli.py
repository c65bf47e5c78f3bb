"""Command-line entry point.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage or
input error, 3 resource limit exceeded.
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import characters as ch
from . import dfao as fa
from . import multfun as mf
from . import proofs as pf
from .values import MINUS_ONE, ONE, ZERO, OrderLimitExceeded

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    q: int = 2
    N: int = 10_000
    Qmax: int = 100
    P: int = 1000
    depth: int = 7
    prefix: int = 4096
    limit: int = 100_000
    fmt: str = "text"
    seed: int = 0

    def __post_init__(self):
        if self.q < 2:
            raise UsageError("q must be >= 2")
        for name in ("N", "Qmax", "P", "depth", "prefix", "limit"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.fmt not in ("text", "tabular"):
            raise UsageError("format must be text or tabular")


def worker_count() -> int:
    """Worker cap from AUTOSEQ_THREADS; 0 or unset means automatic."""
    raw = os.environ.get("AUTOSEQ_THREADS", "0") or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError("AUTOSEQ_THREADS must be an integer") from None
    return n if n > 0 else (os.cpu_count() or 1)


def emit(rows: list[tuple[str, str]], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "tabular":
        out.write("\t".join(k for k, _ in rows) + "\n")
        out.write("\t".join(v for _, v in rows) + "\n")
    else:
        for k, v in rows:
            out.write(f"{k}: {v}\n")


def load_source(spec: str):
    """A DFAO file, a CM-spec file, or a built-in name."""
    path = Path(spec)
    if path.is_file():
        text = path.read_text()
        first = next((ln.split("#", 1)[0].strip() for ln in text.splitlines()
                      if ln.split("#", 1)[0].strip()), "")
        try:
            return mf.loads(text) if first == "cm" else fa.loads(text)
        except ValueError as e:
            raise UsageError(f"{spec}: {e}") from None
    try:
        return mf.builtin(spec)
    except ValueError as e:
        raise UsageError(f"{spec}: not a readable file or built-in ({e})") from None


def load_dfao(spec: str) -> fa.Dfao:
    src = load_source(spec)
    if not isinstance(src, fa.Dfao):
        raise UsageError(f"{spec} is not an automaton")
    return src


def _params(cfg: RunConfig, *names) -> tuple[str, str]:
    return ("params", " ".join(f"{n}={getattr(cfg, n)}" for n in names))


# -- subcommands ---------------------------------------------------------------

def cmd_eval(cfg, args):
    src = load_source(args.source)
    if args.n < 0:
        raise UsageError("n must be nonnegative")
    emit([("n", str(args.n)), ("value", mf.source_value(src, args.n).token())], cfg.fmt)
    return EXIT_OK


def cmd_kernel(cfg, args):
    rep = fa.kernel_exact(load_dfao(args.dfao))
    emit(rep.lines(), cfg.fmt)
    return EXIT_OK


def cmd_infer(cfg, args):
    src = load_source(args.source)
    rep = mf.kernel_empirical(src, cfg.q, cfg.depth, cfg.prefix)
    counts = rep.level_counts
    steps = sum(b > a for a, b in zip(counts[1:], counts[2:]))
    rows = [_params(cfg, "q", "depth", "prefix")] + rep.lines()
    if rep.closed:
        rows.append(("summary", f"closed at depth {rep.depth} with {rep.size_lower_bound} classes"))
    else:
        rows.append(("summary", f"not closed, {steps} depth levels strictly increasing"))
    emit(rows, cfg.fmt)
    if rep.closed and cfg.fmt == "text":
        sys.stdout.write(fa.dumps(rep.candidate))
    return EXIT_OK if rep.closed else EXIT_NEGATIVE


def cmd_minimize(cfg, args):
    sys.stdout.write(fa.dumps(fa.minimize(load_dfao(args.dfao))))
    return EXIT_OK


def cmd_reverse(cfg, args):
    # loaded automata are already lsd; print the msd form
    sys.stdout.write(fa.dumps(fa.reverse_reading(load_dfao(args.dfao))))
    return EXIT_OK


def cmd_equiv(cfg, args):
    a, b = load_dfao(args.a), load_dfao(args.b)
    if a.q != b.q:
        raise UsageError("automata over different bases")
    n = fa.distinguishing_input(a, b)
    rows = [("equivalent", "yes" if n is None else "no")]
    if n is not None:
        rows += [("witness", str(n)), ("values", f"{fa.evaluate(a, n)} {fa.evaluate(b, n)}")]
    emit(rows, cfg.fmt)
    return EXIT_OK if n is None else EXIT_NEGATIVE


def cmd_k0(cfg, args):
    emit([("k0", str(fa.compute_k0(load_dfao(args.dfao))))], cfg.fmt)
    return EXIT_OK


def cmd_compile_char(cfg, args):
    chars = ch.enumerate_characters(ch.build_unit_group(args.Q))
    if not 0 <= args.index < len(chars):
        raise UsageError(f"index must be in [0, {len(chars)})")
    chi = chars[args.index]
    a = ch.compile_character(chi, cfg.q)
    sys.stdout.write(f"# {chi.name()} conductor {ch.conductor(chi)}\n")
    sys.stdout.write(fa.dumps(a))
    return EXIT_OK


def cmd_classify(cfg, args):
    src = load_source(args.source)
    try:
        res = ch.classify(src, cfg.q, cfg.N, cfg.Qmax, cfg.P)
    except ch.NotCompletelyMultiplicative as e:
        emit([("verdict", "NotCompletelyMultiplicative"), _params(cfg, "q", "N", "Qmax", "P"),
              ("counterexample", str(e))], cfg.fmt)
        return EXIT_NEGATIVE
    emit(res.lines(), cfg.fmt)
    return EXIT_OK if res.positive else EXIT_NEGATIVE


def _write_certs(certs, args):
    text = "".join(pf.dumps(c) for c in certs)
    if args.out:
        Path(args.out).write_text(text)
    return text


def _cert_rows(cert) -> list[tuple[str, str]]:
    fails = cert.verify()
    return [("certificate", cert.kind)] + cert.fields() + [("verified", "yes" if not fails else "no: " + "; ".join(fails))]


def cmd_demo(cfg, args):
    which = args.which
    certs = []
    rows: list[tuple[str, str]] = []
    if which == "key1":
        if not args.dfao:
            raise UsageError("demo key1 needs --dfao")
        certs.append(pf.find_kernel_collision(load_dfao(args.dfao), args.r if args.r is not None else 1))
    elif which == "key":
        ra = pf.construct_rA(cfg.q, args.A, args.primes)
        certs.append(ra)
        u, v = pf.build_uv(ra.congruence, args.k0, args.primes)
        rows += [("u", str(u)), ("v", str(v))]
    elif which == "hb":
        if args.u is None or args.v is None:
            raise UsageError("demo hb needs --u and --v")
        certs.append(pf.hb_search(args.t, args.u, args.v, args.count, cfg.limit, k0=args.k0))
    elif which == "key2":
        chain = pf.run_key2_chain(cfg.q, args.A, args.primes, args.k0, args.t, args.count, cfg.limit)
        certs += [chain.ra, chain.search, chain.parity]
        rows += [("u", str(chain.u)), ("v", str(chain.v)), ("t", str(chain.t)),
                 ("r_source", chain.r_source)] + [("note", n) for n in chain.notes]
    elif which == "zero-prop":
        if not args.f or args.r is None:
            raise UsageError("demo zero-prop needs --f and --r")
        f = load_source(args.f)
        if not isinstance(f, mf.CMFunction):
            raise UsageError("--f must be a CM function")
        certs.append(pf.zero_propagation_demo(f, cfg.q, args.A, args.r, args.k0))
    params = [("params", f"q={cfg.q} limit={cfg.limit} A={args.A} k0={args.k0} count={args.count}")]
    ok = True
    for c in certs:
        crow = _cert_rows(c)
        ok &= crow[-1][1] == "yes"
        emit(params + crow, cfg.fmt)
    if rows:
        emit(rows, cfg.fmt)
    _write_certs(certs, args)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_verify_cert(cfg, args):
    try:
        certs = pf.loads(Path(args.file).read_text())
    except (OSError, ValueError) as e:
        raise UsageError(f"{args.file}: {e}") from None
    if not certs:
        raise UsageError(f"{args.file}: no certificates")
    ok = True
    for c in certs:
        fails = c.verify()
        ok &= not fails
        emit([("certificate", c.kind), ("verified", "yes" if not fails else "no: " + "; ".join(fails))], cfg.fmt)
    return EXIT_OK if ok else EXIT_NEGATIVE


def sweep_automata(q: int, max_states: int, values=(ZERO, ONE, MINUS_ONE)) -> list[fa.Dfao]:
    """Distinct minimal valid automata with at most ``max_states`` states, start 0."""
    seen = {}
    for n in range(1, max_states + 1):
        for flat in itertools.product(range(n), repeat=n * q):
            trans = [flat[s * q:(s + 1) * q] for s in range(n)]
            for outs in itertools.product(values, repeat=n):
                a = fa.Dfao(q, trans, outs, check=False)
                if fa.padding_violation(a) is None:
                    seen.setdefault(fa.minimize(a), None)
    return list(seen)


def _sweep_one(job):
    a, N, Qmax, P = job
    if mf.check_completely_multiplicative(a, N) is not None:
        return None
    return ch.classify(a, a.q, N, Qmax, P)


def run_sweep(q: int, max_states: int, N: int, Qmax: int, P: int, workers: int = 1):
    """Classify every multiplicative automaton of the sweep; results in enumeration order."""
    autos = sweep_automata(q, max_states)
    jobs = [(a, N, Qmax, P) for a in autos]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs, chunksize=16))
    else:
        results = [_sweep_one(j) for j in jobs]
    return [(a, r) for a, r in zip(autos, results) if r is not None]


def cmd_sweep(cfg, args):
    rows = run_sweep(cfg.q, args.max_states, cfg.N, cfg.Qmax, cfg.P, min(worker_count(), 8))
    counts = {}
    for _, res in rows:
        counts[res.verdict] = counts.get(res.verdict, 0) + 1
    emit([_params(cfg, "q", "N", "Qmax", "P"), ("max_states", str(args.max_states)),
          ("multiplicative", str(len(rows)))]
         + [(k, str(v)) for k, v in sorted(counts.items())], cfg.fmt)
    return EXIT_OK if "NotClassified" not in counts else EXIT_NEGATIVE


# -- argument parsing -----------------------------------------------------------

def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=["text", "tabular"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--q", type=int, default=2)

    p = _Parser(prog="autoseq", description="Automatic sequences, characters and kernels.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", parents=[common])
    s.add_argument("source")
    s.add_argument("n", type=int)
    for name in ("kernel", "minimize", "reverse", "k0"):
        sub.add_parser(name, parents=[common]).add_argument("dfao")
    s = sub.add_parser("equiv", parents=[common])
    s.add_argument("a")
    s.add_argument("b")
    s = sub.add_parser("infer", parents=[common])
    s.add_argument("source")
    s.add_argument("--depth", type=int, default=7)
    s.add_argument("--prefix", type=int, default=4096)
    s = sub.add_parser("compile-char", parents=[common])
    s.add_argument("--Q", type=int, required=True)
    s.add_argument("--index", type=int, required=True)
    s = sub.add_parser("classify", parents=[common])
    s.add_argument("source")
    s.add_argument("--N", type=int, default=10_000)
    s.add_argument("--Qmax", type=int, default=100)
    s.add_argument("--P", type=int, default=1000)
    s = sub.add_parser("demo", parents=[common])
    s.add_argument("which", choices=["key1", "key", "hb", "key2", "zero-prop"])
    s.add_argument("--dfao")
    s.add_argument("--f")
    s.add_argument("--A", type=int, default=2)
    s.add_argument("--primes", type=_int_list, default=[3, 5])
    s.add_argument("--k0", type=int, default=2)
    s.add_argument("--t", type=_int_list, default=[2, 3, 7])
    s.add_argument("--u", type=int)
    s.add_argument("--v", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--count", type=int, default=3)
    s.add_argument("--limit", type=int, default=100_000)
    s.add_argument("--out")
    s = sub.add_parser("verify-cert", parents=[common])
    s.add_argument("file")
    s = sub.add_parser("sweep", parents=[common])
    s.add_argument("--max-states", type=int, default=3)
    s.add_argument("--N", type=int, default=10_000)
    s.add_argument("--Qmax", type=int, default=100)
    s.add_argument("--P", type=int, default=1000)
    return p


COMMANDS = {
    "eval": cmd_eval, "kernel": cmd_kernel, "infer": cmd_infer, "minimize": cmd_minimize,
    "reverse": cmd_reverse, "equiv": cmd_equiv, "k0": cmd_k0, "compile-char": cmd_compile_char,
    "classify": cmd_classify, "demo": cmd_demo, "verify-cert": cmd_verify_cert, "sweep": cmd_sweep,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(
            args.subcommand,
            q=args.q,
            N=getattr(args, "N", 10_000),
            Qmax=getattr(args, "Qmax", 100),
            P=getattr(args, "P", 1000),
            depth=getattr(args, "depth", 7),
            prefix=getattr(args, "prefix", 4096),
            limit=getattr(args, "limit", 100_000),
            fmt=args.fmt,
            seed=args.seed,
        )
        worker_count()
        return COMMANDS[args.subcommand](cfg, args)
    except UsageError as e:
        print(f"autoseq: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (fa.StateLimitExceeded, OrderLimitExceeded, OverflowError) as e:
        print(f"autoseq: resource limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except pf.SearchExhausted as e:
        print(f"autoseq: {e}; found {e.found}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (pf.ParityMismatch, pf.NoUnitPrime, pf.NoValidResidue, pf.SideConditionFailed) as e:
        print(f"autoseq: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    except ValueError as e:
        print(f"autoseq: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
