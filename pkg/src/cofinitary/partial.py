"""Finite partial injections and the evaluation of words on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .words import Word

__all__ = [
    "PartialInjection",
    "Path",
    "apply_word",
    "mpath",
    "path_set",
    "fixed_points",
    "fixed_points_through",
]


class PartialInjection:
    """A finite injective partial map N -> N.  Immutable by convention."""

    __slots__ = ("fwd", "inv", "_low")

    def __init__(self, pairs: Iterable = ()):
        fwd: dict = {}
        inv: dict = {}
        for a, b in pairs:
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError(f"negative value in pair ({a}, {b})")
            if a in fwd:
                raise ValueError(f"not functional: {a} mapped twice")
            if b in inv:
                raise ValueError(f"not injective: {b} hit twice")
            fwd[a] = b
            inv[b] = a
        self.fwd = fwd
        self.inv = inv
        self._low = None

    @classmethod
    def _from_dicts(cls, fwd: dict, inv: dict, low=None) -> "PartialInjection":
        s = object.__new__(cls)
        s.fwd, s.inv, s._low = fwd, inv, low
        return s

    def __len__(self):
        return len(self.fwd)

    def __eq__(self, other):
        return isinstance(other, PartialInjection) and self.fwd == other.fwd

    def __hash__(self):
        return hash(frozenset(self.fwd.items()))

    def __repr__(self):
        return "PartialInjection({" + ", ".join(f"{a}: {b}" for a, b in self.pairs()) + "})"

    def __contains__(self, n):
        return n in self.fwd

    def get(self, n: int) -> Optional[int]:
        return self.fwd.get(n)

    def preimage(self, n: int) -> Optional[int]:
        return self.inv.get(n)

    def pairs(self) -> list:
        return sorted(self.fwd.items())

    def dom(self) -> set:
        return set(self.fwd)

    def ran(self) -> set:
        return set(self.inv)

    def issubset(self, other: "PartialInjection") -> bool:
        of = other.fwd
        return len(self.fwd) <= len(of) and all(of.get(a, -1) == b for a, b in self.fwd.items())

    def difference(self, other: "PartialInjection") -> list:
        """Pairs of self that are not pairs of other, sorted."""
        of = other.fwd
        return sorted((a, b) for a, b in self.fwd.items() if of.get(a, -1) != b)

    def extend(self, pairs: Iterable) -> "PartialInjection":
        fwd = dict(self.fwd)
        inv = dict(self.inv)
        for a, b in pairs:
            if a in fwd:
                raise ValueError(f"{a} already in the domain")
            if b in inv:
                raise ValueError(f"{b} already in the range")
            fwd[a] = b
            inv[b] = a
        return PartialInjection._from_dicts(fwd, inv, self._low)

    def inverse(self) -> "PartialInjection":
        return PartialInjection._from_dicts(dict(self.inv), dict(self.fwd))

    def low(self) -> int:
        """Least natural in neither the domain nor the range."""
        n = self._low or 0
        fwd, inv = self.fwd, self.inv
        while n in fwd or n in inv:
            n += 1
        self._low = n
        return n

    def window(self) -> int:
        """Largest B with [0, B) inside both the domain and the range."""
        b = 0
        while b in self.fwd and b in self.inv:
            b += 1
        return b


def _step(kind: int, payload, fwd: dict, inv: dict, v: int) -> Optional[int]:
    if kind == 1:
        return fwd.get(v)
    if kind == -1:
        return inv.get(v)
    return payload(v)


def apply_word(w: Word, s: PartialInjection, n: int) -> Optional[int]:
    """w[s](n), or None where undefined.  The empty word acts as the identity."""
    fwd, inv = s.fwd, s.inv
    v = n
    for kind, g in w.program():
        if kind == 1:
            v = fwd.get(v)
        elif kind == -1:
            v = inv.get(v)
        else:
            v = g(v)
        if v is None:
            return None
    return v


@dataclass(frozen=True)
class Path:
    """The (w, s)-path of ``start``.

    ``values`` is ``<m_0, m_1, ...>``.  A terminated path stopped before the
    letter at application index ``stop`` (0-based, so ``stop + 1`` is the
    1-based position ``j``).  A periodic path stops recording when the
    state returns to ``(0, start)``; since every step is injective on states
    the first repeated state is always the initial one, so the preperiod is 0.
    """

    word: Word
    start: int
    values: tuple
    periodic: bool
    x_applications: int
    xinv_applications: int

    @property
    def terminated(self) -> bool:
        return not self.periodic

    @property
    def steps(self) -> int:
        return len(self.values) - 1

    @property
    def stop(self) -> int:
        """Application index of the letter awaiting application."""
        return self.steps % len(self.word)

    @property
    def period(self) -> Optional[int]:
        return len(self.values) if self.periodic else None

    @property
    def preperiod(self) -> Optional[int]:
        return 0 if self.periodic else None

    @property
    def last(self) -> int:
        return self.values[-1]

    def stop_letter(self):
        """The pending letter of a terminated path (written-order object)."""
        return self.word.applied()[self.stop]

    def stop_kind(self) -> int:
        return self.word.program()[self.stop][0]

    def as_set(self) -> frozenset:
        return frozenset(self.values)

    def iterate(self, k: int) -> Optional[int]:
        """w[s]^k(start) read off the path, None if undefined."""
        n = len(self.word)
        if self.periodic:
            return self.values[(n * k) % len(self.values)]
        i = n * k
        return self.values[i] if i < len(self.values) else None

    def resume(self, s: PartialInjection, limit: Optional[int] = None) -> "Path":
        """The path under a larger map s, computed from where this one stopped."""
        if self.periodic:
            return self
        return _walk(self.word, s, self.start, list(self.values),
                     self.x_applications, self.xinv_applications, limit)


def _walk(w: Word, s: PartialInjection, start: int, values: list, nx: int, nxi: int,
          limit: Optional[int]) -> Path:
    prog = w.program()
    n = len(prog)
    fwd, inv = s.fwd, s.inv
    i = len(values) - 1
    v = values[-1]
    if limit is None:
        # the state space bound: every state (index, value) with value in dom/ran or a group image
        limit = n * (len(fwd) + len(inv) + 2) + n
    periodic = False
    while i < limit:
        kind, g = prog[i % n]
        if kind == 1:
            nv = fwd.get(v)
            if nv is None:
                break
            nx += 1
        elif kind == -1:
            nv = inv.get(v)
            if nv is None:
                break
            nxi += 1
        else:
            nv = g(v)
        i += 1
        if i % n == 0 and nv == start:
            periodic = True
            break
        values.append(nv)
        v = nv
    else:
        raise RuntimeError(f"path of {start} under {w} exceeded the state-space bound {limit}")
    return Path(w, start, tuple(values), periodic, nx, nxi)


def mpath(w: Word, s: PartialInjection, m: int) -> Path:
    if not w:
        raise ValueError("paths are defined for non-empty words only")
    return _walk(w, s, m, [m], 0, 0, None)


def path_set(w: Word, s: PartialInjection, m: int) -> frozenset:
    return mpath(w, s, m).as_set()


def _pullback(prog: tuple, upto: int, s: PartialInjection, v: int) -> Optional[int]:
    """Invert the first ``upto`` application steps at v."""
    fwd, inv = s.fwd, s.inv
    for kind, g in reversed(prog[:upto]):
        if kind == 1:
            v = inv.get(v)
        elif kind == -1:
            v = fwd.get(v)
        else:
            v = g.inverse()(v)
        if v is None:
            return None
    return v


def fixed_points(w: Word, s: PartialInjection) -> frozenset:
    """fix(w[s]).  Group words delegate to the base group's fix set."""
    if not w:
        raise ValueError("the empty word fixes every natural")
    if w.is_group_word():
        return w.letters[0].fix_set()
    prog = w.program()
    # a fixed point's path must survive the first X-letter application
    first = next(i for i, (kind, _) in enumerate(prog) if kind)
    pool = s.fwd if prog[first][0] == 1 else s.inv
    out = set()
    for v in pool:
        m = _pullback(prog, first, s, v)
        if m is not None and apply_word(w, s, m) == m:
            out.add(m)
    return frozenset(out)


def fixed_points_through(w: Word, s: PartialInjection, pairs: Iterable) -> frozenset:
    """Fixed points of w[s] whose cycle applies one of ``pairs`` (all pairs of s).

    Every element of fix(w[s]) \\ fix(w[t]) for t = s minus ``pairs`` is found here.
    """
    if w.is_group_word():
        return frozenset()
    prog = w.program()
    out = set()
    for j, (kind, _) in enumerate(prog):
        if not kind:
            continue
        for a, b in pairs:
            m = _pullback(prog, j, s, a if kind == 1 else b)
            if m is not None and apply_word(w, s, m) == m:
                out.add(m)
    return frozenset(out)
