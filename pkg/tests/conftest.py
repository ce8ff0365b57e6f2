import random

import pytest

from cofinitary.groups import get_group
from cofinitary.partial import PartialInjection
from cofinitary.poset import Condition, Context
from cofinitary.words import X, XINV, Word, parse_word

GROUPS = ("trivial", "swap", "swap-tail", "shift")


def W(text, group="trivial"):
    return parse_word(text, get_group(group))


def ctx(group="trivial", z="thue-morse"):
    return Context.from_names(group, z)


def cond(group="trivial", z="thue-morse", s=(), F=(), m=None):
    c = ctx(group, z)
    return Condition(c, PartialInjection(s), [c.word(t) for t in F],
                     {c.word(t): v for t, v in (m or {}).items()})


def random_word(rng: random.Random, group, max_len=4, min_len=1):
    """A random reduced word containing at least one X-letter."""
    letters = group.letters()
    gens = letters + [g.inverse() for g in letters]
    while True:
        n = rng.randint(min_len, max_len)
        out = []
        for _ in range(n):
            prev = out[-1] if out else None
            choices = [X, XINV] + (gens if not (prev is not None and not isinstance(prev, type(X))) else [])
            a = rng.choice(choices)
            if prev is not None and isinstance(a, type(X)) and isinstance(prev, type(X)) and a.exp == -prev.exp:
                continue
            out.append(a)
        w = Word(out)
        if w and not w.is_group_word():
            return w


def random_injection(rng: random.Random, size, span):
    dom = rng.sample(range(span), size)
    ran = rng.sample(range(span), size)
    return PartialInjection(zip(dom, ran))


@pytest.fixture
def rng():
    return random.Random(20240601)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
