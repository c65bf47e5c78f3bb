"""Deterministic finite automata with output over base-q digits.

The canonical reading order is least-significant digit first (``lsd``): with
it the residual state of a kernel coordinate (i, r) is simply the state
reached on the i base-q digits of r, so kernel classes are states of the
minimal automaton. Automata read most-significant digit first (``msd``) are
accepted and converted with :func:`reverse_reading`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .values import ZERO, UnitValue, from_code, parse_token


class StateLimitExceeded(RuntimeError):
    pass


class DfaoFormatError(ValueError):
    pass


def digits(n: int, q: int) -> list[int]:
    """Base-q digits of n, least significant first; [] for n = 0."""
    out = []
    while n:
        n, d = divmod(n, q)
        out.append(d)
    return out


def from_digits(ds: Iterable[int], q: int) -> int:
    n = 0
    for d in reversed(list(ds)):
        n = n * q + d
    return n


@dataclass(frozen=True, eq=False)
class Dfao:
    """Automaton with ``transitions[s][d]`` and ``outputs[s]``.

    Construction checks totality, digit ranges and that the generated
    sequence is independent of zero padding (trailing zeros for lsd, leading
    zeros for msd) on reachable states.
    """

    q: int
    transitions: tuple[tuple[int, ...], ...]
    outputs: tuple[UnitValue, ...]
    start: int = 0
    msd: bool = False
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(tuple(int(x) for x in row) for row in self.transitions))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        n = len(self.transitions)
        if self.q < 2:
            raise ValueError("base must be >= 2")
        if n == 0 or len(self.outputs) != n:
            raise ValueError("need one output per state and at least one state")
        if not 0 <= self.start < n:
            raise ValueError("start state out of range")
        for row in self.transitions:
            if len(row) != self.q:
                raise ValueError("transition function must be total")
            if any(not 0 <= t < n for t in row):
                raise ValueError("transition target out of range")
        if self.check:
            bad = padding_violation(self)
            if bad is not None:
                raise ValueError(f"zero padding changes the output from state {bad}")

    @property
    def state_count(self) -> int:
        return len(self.transitions)

    @property
    def reading(self) -> str:
        return "msd" if self.msd else "lsd"

    @cached_property
    def table(self) -> np.ndarray:
        return np.array(self.transitions, dtype=np.int64)

    @cached_property
    def output_codes(self) -> np.ndarray:
        return np.array([v.code for v in self.outputs], dtype=np.int64)

    def step(self, state: int, ds: Iterable[int]) -> int:
        for d in ds:
            state = self.transitions[state][d]
        return state

    def residual_state(self, i: int, r: int) -> int:
        """State reached on the i digits of r (lsd automata only)."""
        if self.msd:
            raise ValueError("residual states are defined for lsd automata")
        if not 0 <= r < self.q**i:
            raise ValueError("need 0 <= r < q**i")
        ds = digits(r, self.q)
        return self.step(self.start, ds + [0] * (i - len(ds)))

    def with_start(self, state: int) -> Dfao:
        return trim(Dfao(self.q, self.transitions, self.outputs, state, self.msd, check=False))

    def __call__(self, n: int) -> UnitValue:
        return evaluate(self, n)

    def __eq__(self, other):
        if not isinstance(other, Dfao):
            return NotImplemented
        return (self.q, self.transitions, self.outputs, self.start, self.msd) == (
            other.q, other.transitions, other.outputs, other.start, other.msd)

    def __hash__(self):
        return hash((self.q, self.transitions, self.outputs, self.start, self.msd))


def reachable(a: Dfao, sources: Iterable[int] | None = None) -> list[int]:
    """States reachable from ``sources`` (default: the start), BFS order."""
    seen = {}
    queue = deque([a.start] if sources is None else sources)
    for s in queue:
        seen.setdefault(s, None)
    while queue:
        s = queue.popleft()
        for t in a.transitions[s]:
            if t not in seen:
                seen[t] = None
                queue.append(t)
    return list(seen)


def padding_violation(a: Dfao) -> int | None:
    """A reachable state witnessing padding dependence, or None."""
    if a.msd:
        zero_next = a.transitions[a.start][0]
        if zero_next == a.start:
            return None
        classes = _moore_classes(a)
        return None if classes[zero_next] == classes[a.start] else a.start
    for s in reachable(a):
        if a.outputs[a.transitions[s][0]] != a.outputs[s]:
            return s
    return None


def trim(a: Dfao) -> Dfao:
    """Drop unreachable states, renumbering in BFS order from the start."""
    order = reachable(a)
    index = {s: i for i, s in enumerate(order)}
    return Dfao(
        a.q,
        [[index[t] for t in a.transitions[s]] for s in order],
        [a.outputs[s] for s in order],
        0,
        a.msd,
    )


def evaluate(a: Dfao, n: int) -> UnitValue:
    ds = digits(n, a.q)
    if a.msd:
        ds.reverse()
    return a.outputs[a.step(a.start, ds)]


def evaluate_codes(a: Dfao, ns, start: int | None = None) -> np.ndarray:
    """Vectorised evaluation returning value codes for every n in ``ns``."""
    ns = np.asarray(ns, dtype=np.int64)
    state = np.full(ns.shape, a.start if start is None else start, dtype=np.int64)
    if ns.size == 0:
        return state
    if a.msd:
        width = 0
        top = int(ns.max())
        while top:
            top //= a.q
            width += 1
        for pos in range(width - 1, -1, -1):
            state = a.table[state, (ns // a.q**pos) % a.q]
    else:
        flat = a.table.ravel()
        rest, d = ns.copy(), np.empty_like(ns)
        while rest.any():
            np.divmod(rest, a.q, out=(rest, d))
            state *= a.q
            state += d
            state = flat[state]
    return a.output_codes[state]


def evaluate_range(a: Dfao, n: int) -> list[UnitValue]:
    return [from_code(c) for c in evaluate_codes(a, np.arange(n))]


def _moore_classes(a: Dfao) -> np.ndarray:
    """Coarsest output-respecting congruence, as a class id per state."""
    _, cls = np.unique(a.output_codes, return_inverse=True)
    cls = cls.reshape(-1)
    count = int(cls.max()) + 1
    while True:
        sig = np.column_stack([cls, cls[a.table]])
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.reshape(-1)
        new_count = int(new.max()) + 1
        if new_count == count:
            return new
        cls, count = new, new_count


def minimize(a: Dfao) -> Dfao:
    """Minimal sequence-equivalent automaton, states numbered by BFS from start."""
    a = trim(a)
    cls = _moore_classes(a)
    order: dict[int, int] = {}
    queue = deque([int(cls[a.start])])
    rep = {int(c): s for s, c in reversed(list(enumerate(cls)))}
    order[queue[0]] = 0
    while queue:
        c = queue.popleft()
        for t in a.transitions[rep[c]]:
            ct = int(cls[t])
            if ct not in order:
                order[ct] = len(order)
                queue.append(ct)
    trans = [None] * len(order)
    outs = [None] * len(order)
    for c, i in order.items():
        s = rep[c]
        trans[i] = [order[int(cls[t])] for t in a.transitions[s]]
        outs[i] = a.outputs[s]
    return Dfao(a.q, trans, outs, 0, a.msd)


def to_lsd(a: Dfao, state_limit: int = 10_000) -> Dfao:
    return reverse_reading(a, state_limit) if a.msd else a


def reverse_reading(a: Dfao, state_limit: int = 10_000) -> Dfao:
    """Same sequence, opposite reading order.

    A state of the result records, for every state s of ``a``, the output
    reached from s on the digits read so far; prepending a digit d maps that
    vector through the transitions on d.
    """
    a = trim(a)
    codes = a.output_codes
    first = tuple(int(c) for c in codes)
    index = {first: 0}
    vectors = [first]
    trans: list[list[int]] = []
    i = 0
    while i < len(vectors):
        vec = np.array(vectors[i])
        row = []
        for d in range(a.q):
            nxt = tuple(int(c) for c in vec[a.table[:, d]])
            if nxt not in index:
                if len(vectors) >= state_limit:
                    raise StateLimitExceeded(f"reversal needs more than {state_limit} states")
                index[nxt] = len(vectors)
                vectors.append(nxt)
            row.append(index[nxt])
        trans.append(row)
        i += 1
    outs = [from_code(v[a.start]) for v in vectors]
    return minimize(Dfao(a.q, trans, outs, 0, not a.msd))


def distinguishing_input(a: Dfao, b: Dfao) -> int | None:
    """Least-length n on which the sequences differ (product BFS), or None."""
    if a.q != b.q:
        raise ValueError("automata over different bases")
    a, b = to_lsd(a), to_lsd(b)
    return _product_witness(a, a.start, b, b.start)


def _product_witness(a: Dfao, sa: int, b: Dfao, sb: int) -> int | None:
    start = (sa, sb)
    parent: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {start: None}
    queue = deque([start])
    while queue:
        x, y = pair = queue.popleft()
        if a.outputs[x] != b.outputs[y]:
            ds = []
            while parent[pair] is not None:
                pair, d = parent[pair]
                ds.append(d)
            ds.reverse()
            return from_digits(ds, a.q)
        for d in range(a.q):
            nxt = (a.transitions[x][d], b.transitions[y][d])
            if nxt not in parent:
                parent[nxt] = (pair, d)
                queue.append(nxt)
    return None


def equivalent(a: Dfao, b: Dfao) -> bool:
    return distinguishing_input(a, b) is None


def states_witness(a: Dfao, s: int, t: int) -> int | None:
    """An n where the residual sequences from states s and t differ."""
    return _product_witness(a, s, a, t)


def zero_test(a: Dfao, state: int, from_one: bool = False) -> bool:
    """Is the residual sequence from ``state`` identically zero?

    With ``from_one`` only n >= 1 is considered, i.e. states reached after
    at least one nonzero digit.
    """
    sources = [state]
    if from_one:
        sources = sorted({a.transitions[s][d] for s in reachable(a, [state]) for d in range(1, a.q)})
        if not sources:
            return True
    return all(a.outputs[s] == ZERO for s in reachable(a, sources))


@dataclass(frozen=True)
class KernelReport:
    mode: str
    representatives: tuple[tuple[int, int], ...]
    size_lower_bound: int
    closed: bool
    depth: int
    level_counts: tuple[int, ...]
    positive_depth_size: int
    prefix_length: int | None = None
    candidate: Dfao | None = None
    class_states: tuple[int, ...] = ()

    @property
    def size(self) -> int | None:
        return self.size_lower_bound if self.mode == "exact" else None

    def lines(self) -> list[tuple[str, str]]:
        rows = [("mode", self.mode)]
        if self.mode == "exact":
            rows.append(("size", str(self.size)))
        else:
            rows += [("size_lower_bound", str(self.size_lower_bound)),
                     ("closed", "yes" if self.closed else "no"),
                     ("prefix_length", str(self.prefix_length))]
        rows += [("depth", str(self.depth)),
                 ("positive_depth_size", str(self.positive_depth_size)),
                 ("level_counts", " ".join(map(str, self.level_counts))),
                 ("representatives", " ".join(f"({i},{r})" for i, r in self.representatives))]
        return rows


def kernel_exact(a: Dfao) -> KernelReport:
    """Exact q-kernel via BFS over coordinates (i, r) merged by minimal state.

    The coordinate (0, 0) (the sequence itself) is included; classes met by
    some coordinate with i >= 1 are counted separately.
    """
    m = minimize(to_lsd(a))
    q = m.q
    reps = [(0, 0)]
    cls_of_state = {m.start: 0}
    class_states = [m.start]
    positive: set[int] = set()
    level_counts = [1]
    frontier = [(0, 0, m.start)]
    depth = 0
    while frontier:
        nxt = []
        for i, r, s in frontier:
            for d in range(q):
                t = m.transitions[s][d]
                positive.add(t)
                if t not in cls_of_state:
                    cls_of_state[t] = len(reps)
                    reps.append((i + 1, r + d * q**i))
                    class_states.append(t)
                    nxt.append((i + 1, r + d * q**i, t))
        frontier = nxt
        depth += 1
        level_counts.append(len(reps))
    return KernelReport(
        mode="exact",
        representatives=tuple(reps),
        size_lower_bound=len(reps),
        closed=True,
        depth=depth - 1,
        level_counts=tuple(level_counts[:-1]),
        positive_depth_size=len(positive),
        candidate=m,
        class_states=tuple(class_states),
    )


def least_nonzero(a: Dfao, state: int, bound: int | None = None) -> int | None:
    """Least n >= 1 where the residual from ``state`` is nonzero."""
    if bound is None:
        bound = a.q ** (a.state_count + 1)
    block = 4096
    for lo in range(1, bound + 1, block):
        ns = np.arange(lo, min(lo + block, bound + 1))
        hit = np.flatnonzero(evaluate_codes(a, ns, start=state) != ZERO.code)
        if hit.size:
            return int(ns[hit[0]])
    return None


def compute_k0(a: Dfao) -> int:
    """Least k such that every kernel residual vanishing on [1, k] vanishes for all n >= 1."""
    rep = kernel_exact(a)
    m = rep.candidate
    k0 = 1
    for s in rep.class_states:
        if zero_test(m, s, from_one=True):
            continue
        w = least_nonzero(m, s)
        assert w is not None, "zero_test and witness search disagree"
        k0 = max(k0, w)
    return k0


# -- text format -------------------------------------------------------------

def dumps(a: Dfao) -> str:
    lines = [f"q {a.q}", f"states {a.state_count}", f"start {a.start}", f"reading {a.reading}"]
    for s, row in enumerate(a.transitions):
        lines += [f"t {s} {d} {t}" for d, t in enumerate(row)]
    lines += [f"o {s} {v.token()}" for s, v in enumerate(a.outputs)]
    return "\n".join(lines) + "\n"


def loads(text: str, convert: bool = True) -> Dfao:
    """Parse the line-oriented format; msd input is converted to lsd by default."""
    header: dict[str, str] = {}
    trans: dict[tuple[int, int], int] = {}
    outs: dict[int, UnitValue] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key in ("q", "states", "start", "reading") and len(parts) == 2:
                if key in header:
                    raise DfaoFormatError(f"duplicate {key}")
                header[key] = parts[1]
            elif key == "t" and len(parts) == 4:
                s, d, t = map(int, parts[1:])
                if (s, d) in trans:
                    raise DfaoFormatError(f"duplicate transition {s} {d}")
                trans[s, d] = t
            elif key == "o" and len(parts) == 3:
                s = int(parts[1])
                if s in outs:
                    raise DfaoFormatError(f"duplicate output for {s}")
                outs[s] = parse_token(parts[2])
            else:
                raise DfaoFormatError("unrecognised line")
        except ValueError as e:
            raise DfaoFormatError(f"line {lineno}: {e}") from None
    try:
        q = int(header["q"])
        n = int(header["states"])
        start = int(header.get("start", "0"))
    except (KeyError, ValueError) as e:
        raise DfaoFormatError(f"bad or missing header field {e}") from None
    reading = header.get("reading", "lsd")
    if reading not in ("lsd", "msd"):
        raise DfaoFormatError(f"unknown reading order {reading!r}")
    if q < 2 or n < 1:
        raise DfaoFormatError("need q >= 2 and at least one state")
    for (s, d), t in trans.items():
        if not 0 <= s < n or not 0 <= t < n:
            raise DfaoFormatError(f"state out of range in transition {s} {d} {t}")
        if not 0 <= d < q:
            raise DfaoFormatError(f"digit {d} out of range for base {q}")
    missing = [(s, d) for s in range(n) for d in range(q) if (s, d) not in trans]
    if missing:
        raise DfaoFormatError(f"missing transition {missing[0][0]} {missing[0][1]}")
    if set(outs) != set(range(n)):
        raise DfaoFormatError("every state needs exactly one output")
    try:
        a = Dfao(q, [[trans[s, d] for d in range(q)] for s in range(n)],
                 [outs[s] for s in range(n)], start, reading == "msd")
    except ValueError as e:
        raise DfaoFormatError(str(e)) from None
    a = trim(a)
    return to_lsd(a) if convert else a


def load(path) -> Dfao:
    with open(path) as fh:
        return loads(fh.read())


def constant(value: UnitValue, q: int = 2) -> Dfao:
    return Dfao(q, [[0] * q], [value])


def residue_tracker(q: int, modulus: int, outputs: Sequence[UnitValue], msd: bool = False) -> Dfao:
    """Automaton whose output depends on n mod ``modulus`` through ``outputs``.

    The msd form has states ``n mod modulus``; the lsd form tracks the pair
    (partial value, q**j) modulo ``modulus``.
    """
    if msd:
        trans = [[(q * s + d) % modulus for d in range(q)] for s in range(modulus)]
        return Dfao(q, trans, list(outputs), 0, True)
    index: dict[tuple[int, int], int] = {}
    states: list[tuple[int, int]] = []
    trans: list[list[int]] = []

    def get(st):
        if st not in index:
            index[st] = len(states)
            states.append(st)
        return index[st]

    get((0, 1 % modulus))
    i = 0
    while i < len(states):
        acc, w = states[i]
        trans.append([get(((acc + d * w) % modulus, q * w % modulus)) for d in range(q)])
        i += 1
    return Dfao(q, trans, [outputs[acc] for acc, _ in states])
