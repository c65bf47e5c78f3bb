import os
import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from autoseq.dfao import Dfao
from autoseq.values import MINUS_ONE, ONE, ZERO, root

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PALETTE = (ZERO, ONE, MINUS_ONE, root(1, 4), root(1, 3))


def padded_outputs(q, trans, raw):
    """Make outputs constant along 0-edges so zero padding is harmless."""
    n = len(trans)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in range(n):
        parent[find(s)] = find(trans[s][0])
    return [raw[find(s)] for s in range(n)]


def make_dfao(q, trans, raw, start=0):
    return Dfao(q, trans, padded_outputs(q, trans, raw), start)


@st.composite
def dfaos(draw, q=st.integers(2, 3), max_states=5, palette=PALETTE):
    q = draw(q) if not isinstance(q, int) else q
    n = draw(st.integers(1, max_states))
    trans = [[draw(st.integers(0, n - 1)) for _ in range(q)] for _ in range(n)]
    raw = [draw(st.sampled_from(palette)) for _ in range(n)]
    return make_dfao(q, trans, raw)


def random_dfao(rng: random.Random, q=2, max_states=5, palette=PALETTE):
    n = rng.randint(1, max_states)
    trans = [[rng.randrange(n) for _ in range(q)] for _ in range(n)]
    raw = [rng.choice(palette) for _ in range(n)]
    return make_dfao(q, trans, raw)


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")
