"""Base groups: oracles for a countable cofinitary group acting on the naturals.

A base group hands out :class:`GroupElement` values in normal form.  The
built-in groups are all cyclic, so a normal form is a single exponent.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Iterable

__all__ = [
    "GroupElement",
    "BaseGroup",
    "CyclicGroup",
    "CofinitaryViolation",
    "TablePermutation",
    "BUILTIN_GROUPS",
    "get_group",
    "get_permutation",
    "load_table",
    "parse_pairs",
]

_NAME = re.compile(r"[a-z][a-z0-9_]*\Z")


class CofinitaryViolation(ValueError):
    """A group element was found to have infinitely many fixed points."""


class GroupElement:
    """An element of a :class:`BaseGroup`, compared by group name and normal form."""

    __slots__ = ("group", "nf", "_key")

    def __init__(self, group: "BaseGroup", nf):
        self.group = group
        self.nf = nf
        self._key = (group.name, nf)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"GroupElement({self.group.name}, {self})"

    def __str__(self):
        return self.group.format(self)

    def __call__(self, n: int) -> int:
        return self.group.eval(self, n)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.multiply(self, other)

    def inverse(self) -> "GroupElement":
        return self.group.invert(self)

    def is_identity(self) -> bool:
        return self.group.is_identity(self)

    def fix_set(self) -> frozenset:
        return self.group.fix_set(self)

    def tokens(self) -> list:
        return self.group.tokens(self)


class BaseGroup:
    """Interface every base group implements.

    Subclasses supply ``identity``, ``multiply``, ``invert``, ``eval``,
    ``fix_set`` and the token codec.  Normal forms must be hashable and
    equal exactly when the elements are equal.
    """

    name: str = "abstract"
    generators: tuple = ()

    def identity(self) -> GroupElement:
        raise NotImplementedError

    def is_identity(self, g: GroupElement) -> bool:
        return g == self.identity()

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        raise NotImplementedError

    def invert(self, g: GroupElement) -> GroupElement:
        raise NotImplementedError

    def eval(self, g: GroupElement, n: int) -> int:
        raise NotImplementedError

    def fix_set(self, g: GroupElement) -> frozenset:
        raise NotImplementedError

    def generator(self, name: str) -> GroupElement:
        raise KeyError(name)

    def tokens(self, g: GroupElement) -> list:
        """Generator tokens (``name`` or ``name^-1``) whose product is ``g``."""
        raise NotImplementedError

    def format(self, g: GroupElement) -> str:
        toks = self.tokens(g)
        return " ".join(toks) if toks else "1"

    def parse_element(self, text: str) -> GroupElement:
        g = self.identity()
        for tok in text.split():
            if tok == "1":
                continue
            g = self.multiply(g, self.token(tok))
        return g

    def token(self, tok: str) -> GroupElement:
        """The element named by a single token ``name`` or ``name^-1``."""
        inv = tok.endswith("^-1")
        base = tok[:-3] if inv else tok
        g = self.generator(base)
        return self.invert(g) if inv else g

    def letters(self) -> list:
        """Distinct non-identity elements of token length one, in declared order."""
        out = []
        for name in self.generators:
            g = self.generator(name)
            for h in (g, self.invert(g)):
                if not self.is_identity(h) and h not in out:
                    out.append(h)
        return out

    def elements(self, max_tokens: int) -> list:
        """Distinct elements expressible with at most ``max_tokens`` generator tokens."""
        seen = [self.identity()]
        frontier = [self.identity()]
        for _ in range(max_tokens):
            nxt = []
            for g in frontier:
                for a in self.letters():
                    h = self.multiply(g, a)
                    if h not in seen:
                        seen.append(h)
                        nxt.append(h)
            frontier = nxt
        return seen

    def check_cofinitary(self, elements: Iterable[GroupElement], window: int = 1000) -> list:
        """Window-check bijectivity and the declared fix sets; return violation strings."""
        problems = []
        for g in elements:
            gi = self.invert(g)
            for n in range(window):
                if gi(g(n)) != n or g(gi(n)) != n:
                    problems.append(f"{g}: not a bijection at {n}")
                    break
            if self.is_identity(g):
                continue
            try:
                declared = self.fix_set(g)
            except CofinitaryViolation as exc:
                problems.append(str(exc))
                continue
            seen = {n for n in range(window) if g(n) == n}
            if seen != {n for n in declared if n < window}:
                problems.append(f"{g}: fixed points {sorted(seen)} on window, declared {sorted(declared)}")
        return problems

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class CyclicGroup(BaseGroup):
    """A cyclic group generated by one permutation.

    ``power(k, n)`` evaluates the ``k``-th power at ``n`` for any integer
    ``k``; ``fixed(k)`` returns the fix set of a non-trivial power.  An
    ``order`` of ``None`` means infinite order.
    """

    def __init__(self, name: str, gen_name: str | None, order: int | None,
                 power: Callable[[int, int], int], fixed: Callable[[int], frozenset]):
        if gen_name is not None and not _NAME.match(gen_name):
            raise ValueError(f"invalid generator name {gen_name!r}")
        self.name = name
        self.gen_name = gen_name
        self.generators = (gen_name,) if gen_name else ()
        self.order = order
        self._power = power
        self._fixed = fixed
        self._id = GroupElement(self, 0)

    def _norm(self, k: int) -> int:
        if self.order is None:
            return k
        k %= self.order
        # symmetric representative keeps tokens short for Z/n
        return k - self.order if k > self.order // 2 else k

    def element(self, k: int) -> GroupElement:
        return GroupElement(self, self._norm(k))

    def identity(self):
        return self._id

    def is_identity(self, g):
        return g.nf == 0

    def _check(self, *gs):
        for g in gs:
            if g.group.name != self.name:
                raise ValueError(f"element {g!r} does not belong to group {self.name}")

    def multiply(self, g, h):
        self._check(g, h)
        return self.element(g.nf + h.nf)

    def invert(self, g):
        self._check(g)
        return self.element(-g.nf)

    def eval(self, g, n):
        return self._power(g.nf, n) if g.nf else n

    def fix_set(self, g):
        self._check(g)
        if g.nf == 0:
            raise ValueError("the identity fixes every natural")
        return self._fixed(g.nf)

    def generator(self, name):
        if name != self.gen_name or name is None:
            raise KeyError(f"group {self.name} has no generator {name!r}")
        return self.element(1)

    def tokens(self, g):
        k = g.nf
        if k == 0:
            return []
        tok = self.gen_name if k > 0 else f"{self.gen_name}^-1"
        return [tok] * abs(k)


# -- built-in permutations -------------------------------------------------

def _swap(n: int) -> int:
    return n + 1 if n % 2 == 0 else n - 1


def _swap_tail(n: int) -> int:
    return n if n < 2 else _swap(n)


def _fold(n: int) -> int:
    # bijection N -> Z: 2k -> k, 2k+1 -> -k-1
    return n // 2 if n % 2 == 0 else -(n // 2) - 1


def _unfold(k: int) -> int:
    return 2 * k if k >= 0 else -2 * k - 1


def _shift_power(k: int, n: int) -> int:
    return _unfold(_fold(n) + k)


def _involution(f: Callable[[int], int]) -> Callable[[int, int], int]:
    def power(k, n):
        return f(n) if k % 2 else n
    return power


def _trivial_fixed(k):
    raise ValueError("the trivial group has no non-identity elements")


BUILTIN_GROUPS = {
    "trivial": lambda: CyclicGroup("trivial", None, 1, lambda k, n: n, _trivial_fixed),
    "swap": lambda: CyclicGroup("swap", "tau", 2, _involution(_swap), lambda k: frozenset()),
    "swap-tail": lambda: CyclicGroup("swap-tail", "gamma", 2, _involution(_swap_tail),
                                     lambda k: frozenset({0, 1})),
    "shift": lambda: CyclicGroup("shift", "zeta", None, _shift_power, lambda k: frozenset()),
}

_GROUP_CACHE: dict = {}


def get_group(name: str) -> BaseGroup:
    """Resolve a built-in group name or ``table:<path>`` to a group."""
    if name in _GROUP_CACHE:
        return _GROUP_CACHE[name]
    if name in BUILTIN_GROUPS:
        group = BUILTIN_GROUPS[name]()
    elif name.startswith("table:"):
        group = table_group(load_table(name[len("table:"):]), name)
    else:
        raise KeyError(f"unknown group {name!r}; choose from {sorted(BUILTIN_GROUPS)} or table:<path>")
    _GROUP_CACHE[name] = group
    return group


# -- permutation tables ------------------------------------------------------

_TAILS = {"swap": _swap, "swap-tail": _swap_tail}


class TablePermutation:
    """A permutation given explicitly on ``[0, size)`` and by a built-in pattern above it."""

    def __init__(self, table: dict, tail: str, name: str = "table"):
        if tail == "identity-beyond":
            raise CofinitaryViolation("tail 'identity-beyond' has infinitely many fixed points")
        if tail not in _TAILS:
            raise ValueError(f"unknown tail pattern {tail!r}; choose from {sorted(_TAILS)}")
        size = len(table)
        if set(table) != set(range(size)) or set(table.values()) != set(range(size)):
            raise ValueError("table must be a permutation of [0, M) for M = number of lines")
        if size % 2:
            raise ValueError("tail patterns preserve [M, oo) only for even M")
        self.table = dict(table)
        self.inverse_table = {v: k for k, v in table.items()}
        self.size = size
        self.tail = tail
        self.name = name
        self._tail = _TAILS[tail]

    def __call__(self, n: int) -> int:
        return self.table[n] if n < self.size else self._tail(n)

    def inverse(self, n: int) -> int:
        return self.inverse_table[n] if n < self.size else self._tail(n)

    def order(self) -> int:
        seen: set = set()
        lengths = [2]
        for start in self.table:
            if start in seen:
                continue
            n, length = start, 0
            while n not in seen:
                seen.add(n)
                n = self.table[n]
                length += 1
            lengths.append(length)
        return math.lcm(*lengths)


def table_group(perm: TablePermutation, name: str) -> CyclicGroup:
    order = perm.order()

    def power(k, n):
        k %= order
        for _ in range(k):
            n = perm(n)
        return n

    def fixed(k):
        k %= order
        if k % 2 == 0:
            raise CofinitaryViolation(f"{name}: power {k} is the identity on the tail")
        head = {n for n in range(perm.size) if power(k, n) == n}
        tail = {0, 1} if perm.tail == "swap-tail" else set()
        return frozenset(head | {n for n in tail if n >= perm.size})

    return CyclicGroup(name, "t", order, power, fixed)


def parse_pairs(text: str) -> list:
    """Parse ``n n'`` lines; ``#`` starts a comment."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two naturals, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: expected two naturals, got {line!r}") from None
        if a < 0 or b < 0:
            raise ValueError(f"line {lineno}: negative value")
        pairs.append((a, b))
    return pairs


def load_table(path: str) -> TablePermutation:
    """Load a permutation table; a ``# tail: <pattern>`` line declares the tail."""
    with open(path) as fh:
        text = fh.read()
    m = re.search(r"^#\s*tail:\s*(\S+)", text, re.M)
    if not m:
        raise ValueError(f"{path}: missing '# tail: <pattern>' declaration")
    pairs = parse_pairs(text)
    table = dict(pairs)
    if len(table) != len(pairs):
        raise ValueError(f"{path}: duplicate domain value")
    return TablePermutation(table, m.group(1), name=path)


_BUILTIN_PERMS = {"tau": ("swap", "tau"), "gamma": ("swap-tail", "gamma"), "zeta": ("shift", "zeta")}


def get_permutation(name: str) -> Callable[[int], int]:
    """Resolve a target permutation: ``tau``/``gamma``/``zeta`` or a table file."""
    if name in _BUILTIN_PERMS:
        group, gen = _BUILTIN_PERMS[name]
        return get_group(group).generator(gen)
    path = name[len("table:"):] if name.startswith("table:") else name
    return load_table(path)
