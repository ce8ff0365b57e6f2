"""Constructive extension of conditions: every density argument as a procedure.

All choices of a new value scan upward and take the least admissible one,
so every operation here is deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count
from typing import Callable, Iterable, Optional

from .groups import GroupElement
from .partial import apply_word, fixed_points, fixed_points_through, mpath
from .poset import Condition, _witnessed, word_key
from .words import EMPTY, Word

__all__ = [
    "ExtensionError",
    "ExtensionConstraint",
    "closure_words",
    "forbidden_set",
    "domain_extend",
    "range_extend",
    "add_word",
    "start_coding",
    "extend_coding",
    "hit",
    "distinguish",
    "HIT_PROBE_BOUND",
]

log = logging.getLogger(__name__)

HIT_PROBE_BOUND = 10_000


class ExtensionError(ValueError):
    pass


@dataclass
class ExtensionConstraint:
    """Values excluded for a new image point, plus an optional parity demand.

    When ``parity`` is set, an admissible n' must also satisfy
    ``parity_element(n') % 2 == parity``.
    """

    forbidden: frozenset
    parity: Optional[int] = None
    parity_element: Optional[GroupElement] = None
    provenance: list = field(default_factory=list)

    def admits(self, v: int) -> bool:
        if v in self.forbidden:
            return False
        return self.parity is None or self.parity_element(v) % 2 == self.parity

    def describe(self) -> str:
        lines = [f"forbidden: {sorted(self.forbidden)}"]
        if self.parity is not None:
            lines.append(f"parity: {self.parity_element}(n') must be {'odd' if self.parity else 'even'}")
        for rule, why, v in self.provenance:
            lines.append(f"  {v}: {rule} ({why})")
        return "\n".join(lines)


@lru_cache(maxsize=256)
def closure_words(words: frozenset) -> tuple:
    """Subwords of cyclic permutations of the given words, in a fixed order.

    The empty word is always included, so E itself is excluded even when
    no words are tracked (a new value must keep s injective).
    """
    out = {EMPTY}
    for w in words:
        for c in w.cyclic_permutations():
            out |= c.subwords()
    return tuple(sorted(out, key=word_key))


class _Closure:
    """The forbidden set as a membership predicate, and its explicit form."""

    def __init__(self, p: Condition, n: Optional[int], extra: Iterable[Word], starts: Iterable[int]):
        self.p = p
        self.n = n
        words = p.words.union(extra)
        self.fstar = closure_words(words)
        group = p.context.group
        self.nonempty = [w for w in self.fstar if w]
        self.elements = [w.group_element(group) for w in self.fstar if w.is_group_word()]
        self.inv_elements = [g.inverse() for g in self.elements]
        # v is in g.w^i[s][E]  iff  w^(-i)[s](g^-1 v) is in E; list both orientations
        self.pullbacks = []
        for w in self.fstar:
            self.pullbacks.append(w.inverse())
            if w:
                self.pullbacks.append(w)
        self.extra_e = set(p.params.values()) | set(starts)
        if n is not None:
            self.extra_e.add(n)
        self._prepare()

    def scan_limit(self) -> int:
        """Candidates past s.low() after which the cofinite admissible set must have shown up."""
        s = self.p.s
        e = len(s.fwd) + len(s.inv) + len(self.extra_e)
        closure = e * len(self.pullbacks) * len(self.elements)
        fixed = sum(1 if w.is_group_word() else len(s.fwd) for w in self.nonempty) + 2
        # parity can reject every other candidate
        return 2 * (closure + fixed + e) + 4

    def in_e(self, v) -> bool:
        s = self.p.s
        return v in s.fwd or v in s.inv or v in self.extra_e

    def _prepare(self):
        group_fixed = set()
        x_programs = []
        for w in self.nonempty:
            if w.is_group_word():
                group_fixed |= w.letters[0].fix_set()
            else:
                x_programs.append(w.program())
        self._group_fixed = group_fixed
        self._x_programs = x_programs
        self._pull_programs = [w.program() for w in self.pullbacks if w]

    def forbidden(self, v: int) -> bool:
        s = self.p.s
        fwd, inv, extra = s.fwd, s.inv, self.extra_e
        if v in fwd or v in inv or v in extra or v in self._group_fixed:
            return True
        # the empty pullback first: it rejects most candidates cheaply
        pre = [gi(v) for gi in self.inv_elements]
        for u in pre:
            if u in fwd or u in inv or u in extra:
                return True
        for prog in self._x_programs:
            if _run(prog, fwd, inv, v) == v:
                return True
        for u in pre:
            for prog in self._pull_programs:
                e = _run(prog, fwd, inv, u)
                if e is not None and (e in fwd or e in inv or e in extra):
                    return True
        return False

    def explicit(self) -> tuple:
        s = self.p.s
        prov = []
        out = set()
        for w in self.nonempty:
            for v in sorted(fixed_points(w, s)):
                if v not in out:
                    out.add(v)
                    prov.append(("fixed point", str(w), v))
        e_set = sorted(set(s.fwd) | set(s.inv) | self.extra_e)
        words = [w for w in self.fstar] + [w.inverse() for w in self.fstar if w]
        for g in self.elements:
            for w in words:
                for e in e_set:
                    x = apply_word(w, s, e)
                    if x is None:
                        continue
                    v = g(x)
                    if v not in out:
                        out.add(v)
                        prov.append(("closure", f"{g} . ({w or '∅'})[s] at {e}", v))
        return frozenset(out), prov


def _run(prog, fwd, inv, v):
    for kind, g in prog:
        if kind == 1:
            v = fwd.get(v)
        elif kind == -1:
            v = inv.get(v)
        else:
            v = g(v)
        if v is None:
            return None
    return v


def _critical(w: Word, stop: int) -> tuple:
    """(is the X-letter at application index ``stop`` critical, group letter to its left)."""
    prog = w.program()
    after = prog[stop + 1:]
    if any(kind for kind, _ in after):
        return False, None
    return True, (after[0][1] if after else None)


def _parity(p: Condition, n: int, mode: str) -> tuple:
    """(parity, element, coded word) demanded when extending at n, or (None, None, None)."""
    if not p.context.coding or n is None:
        return None, None, None
    want = 1 if mode == "domain" else -1
    for w in sorted(p.params, key=word_key):
        path = p.coding_path(w)
        if path.periodic or path.last != n or path.stop_kind() != want:
            continue
        critical, g = _critical(w, path.stop)
        if not critical:
            continue
        l = p.code_length(w)
        if l is None:
            raise ExtensionError(f"coded word {w} does not code exactly; input is not a condition")
        g = g if g is not None else p.context.group.identity()
        return p.context.z.bit(l), g, w
    return None, None, None


def forbidden_set(p: Condition, n: Optional[int], extra: Iterable[Word] = (), mode: str = "domain",
                  starts: Iterable[int] = ()) -> ExtensionConstraint:
    """The exclusion constraint for a new pair at n (domain: (n, n'), range: (n', n))."""
    _check_mode(p, n, mode)
    c = _Closure(p, n, extra, starts)
    forbidden, prov = c.explicit()
    parity, g, w = _parity(p, n, mode)
    if parity is not None:
        prov.append(("parity", f"coding path of {w} ends at {n}", parity))
    return ExtensionConstraint(forbidden, parity, g, prov)


def _check_mode(p: Condition, n, mode):
    if mode == "domain":
        if n is not None and n in p.s.fwd:
            raise ExtensionError(f"{n} is already in the domain")
    elif mode == "range":
        if n is not None and n in p.s.inv:
            raise ExtensionError(f"{n} is already in the range")
    else:
        raise ValueError(f"mode must be 'domain' or 'range', not {mode!r}")


def _sound(p: Condition, q: Condition, pairs: list) -> bool:
    """q is a condition and q <= p, given that q adds ``pairs`` (and maybe coded words)."""
    for w in p.words:
        if w.is_group_word():
            continue
        for m in fixed_points_through(w, q.s, pairs):
            if apply_word(w, p.s, m) == m:
                continue
            if not _witnessed(w, mpath(w, q.s, m).values, p.s):
                return False
    if not q.params:
        return True
    owners = p.owners()
    added: dict = {}
    for w in sorted(q.params, key=word_key):
        new = q.coding_path(w)
        if w in p.params:
            old = p.coding_path(w)
            if len(new.values) == len(old.values) and new.periodic == old.periodic:
                continue
            fresh = new.values[len(old.values):]
        else:
            fresh = new.values
        if q.code_length(w) is None:
            return False
        for v in fresh:
            if owners.get(v, w) != w or added.get(v, w) != w:
                return False
            added[v] = w
    if added:
        merged = dict(owners)
        merged.update(added)
        q._owners = merged
    else:
        q._owners = owners
    return True


def _choose(p: Condition, n: int, mode: str, extra=(), starts=(),
            accept: Optional[Callable[[int], bool]] = None) -> tuple:
    _check_mode(p, n, mode)
    base = _Closure(p, None, (), ())
    c = _Closure(p, n, extra, starts)
    parity, g, _ = _parity(p, n, mode)
    lo = max(p.s.low(), p._floor)
    limit = c.scan_limit()
    floor = lo
    for v in count(lo):
        if v - lo > limit:
            raise ExtensionError(f"no admissible value for a new pair at {n}: "
                                 f"{limit} candidates rejected")
        if base.forbidden(v):
            if v == floor:
                floor += 1
            continue
        if c.forbidden(v):
            continue
        if parity is not None and g(v) % 2 != parity:
            continue
        if accept is not None and not accept(v):
            continue
        pair = (n, v) if mode == "domain" else (v, n)
        q = p.derive(pairs=[pair])
        if not _sound(p, q, [pair]):
            log.debug("candidate %d for %s at %d passes the forbidden set but breaks soundness", v, mode, n)
            continue
        p._floor = q._floor = floor
        return q, v


def _tracked(track) -> tuple:
    track = list(track)
    return [w for w, _ in track], [m for _, m in track]


def domain_extend(p: Condition, n: int, track: Iterable = ()) -> Condition:
    """Add (n, n') for the least admissible n'.

    ``track`` lists extra (word, start) paths whose growth should obey the
    one-more-application dichotomy as well.
    """
    words, starts = _tracked(track)
    return _choose(p, n, "domain", words, starts)[0]


def range_extend(p: Condition, n: int, track: Iterable = ()) -> Condition:
    """Add (n', n) for the least admissible n'."""
    words, starts = _tracked(track)
    return _choose(p, n, "range", words, starts)[0]


def add_word(p: Condition, w: Word) -> Condition:
    if w.is_group_word():
        raise ExtensionError(f"{str(w) or '∅'} is a group word")
    return p.derive(words=[w])


def start_coding(p: Condition, w: Word) -> Condition:
    """Add w to F and give it a fresh coding parameter of exact code length 1."""
    if not p.context.coding:
        raise ExtensionError("coding is disabled for this condition")
    if w.is_group_word():
        raise ExtensionError(f"{str(w) or '∅'} is a group word")
    if w in p.params:
        raise ExtensionError(f"{w} already has a coding parameter")
    if not w.is_codable():
        raise ExtensionError(f"{w} is conjugate to the shorter word {w.cyclic_reduction() or '∅'}; "
                             "its iterates revisit old values and cannot carry the code")
    c = _Closure(p, None, [w], ())
    z0 = p.context.z.bit(0)
    prog = w.program()
    first_x = next(i for i, (kind, _) in enumerate(prog) if kind)
    lo = p.s.low()
    limit = c.scan_limit()
    for v in count(lo):
        if v - lo > limit:
            raise ExtensionError(f"no admissible coding parameter for {w}: {limit} candidates rejected")
        if c.forbidden(v) or v % 2 != z0:
            continue
        path = mpath(w, p.s, v)
        if path.periodic or path.steps != first_x:
            continue
        q = p.derive(words=[w], params={w: v})
        if _sound(p, q, []):
            return q
        log.debug("parameter candidate %d for %s breaks soundness", v, w)


def extend_coding(p: Condition, w: Word, l: int) -> Condition:
    """Extend until w's coding path exactly codes at least the first l bits."""
    if w.is_group_word():
        raise ExtensionError(f"{str(w) or '∅'} is a group word")
    if w not in p.params:
        p = start_coding(p, w)
    while True:
        d = p.code_length(w)
        if d is None:
            raise ExtensionError(f"{w} does not code exactly; input is not a condition")
        if d >= l:
            return p
        path = p.coding_path(w)
        if path.stop_kind() == 1:
            p = domain_extend(p, path.last)
        else:
            p = range_extend(p, path.last)


def hit(p: Condition, tau: Callable[[int], int], k: int, probe: int = HIT_PROBE_BOUND) -> tuple:
    """Add (n, tau(n)) for the least admissible n >= k; returns (q, n)."""
    seen: dict = {}
    for n in range(k, k + probe):
        v = tau(n)
        if v in seen:
            raise ExtensionError(f"target is not injective: {seen[v]} and {n} both map to {v}")
        seen[v] = n
        if n in p.s.fwd:
            continue
        c = _Closure(p, n, (), ())
        if c.forbidden(v):
            continue
        parity, g, _ = _parity(p, n, "domain")
        if parity is not None and g(v) % 2 != parity:
            continue
        q = p.derive(pairs=[(n, v)])
        if _sound(p, q, [(n, v)]):
            return q, n
    raise ExtensionError(f"no admissible hitting point in [{k}, {k + probe}); "
                         "a target that agrees with a base-group element at almost every point can never be hit")


def distinguish(p: Condition, w: Word, g: GroupElement) -> tuple:
    """Extend so that w[s](n) is defined and differs from g(n); returns (q, n)."""
    if w.is_group_word():
        raise ExtensionError(f"{str(w) or '∅'} is a group word")
    prog = w.program()
    last_x = max(i for i, (kind, _) in enumerate(prog) if kind)
    tail = prog[last_x + 1:]
    h = tail[0][1] if tail else p.context.group.identity()
    n0 = _fresh_start(p, w, last_x)
    track = [(w, n0)]
    target = h.inverse()(g(n0))
    while True:
        path = mpath(w, p.s, n0)
        if path.periodic or path.steps > last_x:
            raise ExtensionError(f"path of {n0} under {w} overran the steering target")
        mode = "domain" if path.stop_kind() == 1 else "range"
        if path.steps < last_x:
            q = _choose(p, path.last, mode, *_tracked(track))[0]
            if mpath(w, q.s, n0).steps <= path.steps:
                raise ExtensionError(f"steering the path of {n0} under {w} made no progress")
            p = q
            continue
        q = _choose(p, path.last, mode, *_tracked(track), accept=lambda v: v != target)[0]
        value = apply_word(w, q.s, n0)
        if value is None or value == g(n0):
            raise ExtensionError(f"distinguishing {w} from {g} at {n0} failed")
        return q, n0


def _fresh_start(p: Condition, w: Word, last_x: int) -> int:
    for n in count(p.s.low()):
        if n in p.s.fwd or n in p.s.inv:
            continue
        path = mpath(w, p.s, n)
        if not path.periodic and path.steps <= last_x:
            return n
