"""Conditions (s, F, m) and the extension order.

With ``context.z`` set to ``None`` a condition is a plain (s, F) pair and the
coding requirements are inert.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .coding import BitStream, code_length_of_path, get_stream
from .groups import BaseGroup, get_group
from .partial import PartialInjection, Path, apply_word, fixed_points, fixed_points_through, mpath
from .words import Word, parse_word, reduce

__all__ = [
    "Context",
    "Condition",
    "Violation",
    "check_condition",
    "order_violations",
    "leq",
    "fixed_point_bound",
    "word_key",
]


def word_key(w: Word):
    return (len(w), str(w))


@dataclass(frozen=True)
class Context:
    group: BaseGroup
    z: Optional[BitStream] = None

    @property
    def coding(self) -> bool:
        return self.z is not None

    @property
    def key(self) -> tuple:
        return (self.group.name, self.z.name if self.z else None)

    @classmethod
    def from_names(cls, group: str, z: Optional[str], check: bool = True) -> "Context":
        return cls(get_group(group), get_stream(z, check=check) if z else None)

    def word(self, text: str) -> Word:
        return parse_word(text, self.group)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str = ""
    word: Optional[Word] = None
    point: Optional[int] = None

    def __str__(self):
        if self.kind == "NewFixedPointUnwitnessed":
            return f"NewFixedPointUnwitnessed({self.word}, {self.point})"
        return f"{self.kind}: {self.detail}" if self.detail else self.kind


class Condition:
    """A condition (s, F, m).  Treat instances as immutable values."""

    __slots__ = ("context", "s", "words", "params", "_paths", "_owners", "_floor")

    def __init__(self, context: Context, s: Optional[PartialInjection] = None,
                 words: Iterable[Word] = (), params: Optional[Mapping[Word, int]] = None):
        self.context = context
        self.s = s if s is not None else PartialInjection()
        self.words = frozenset(words)
        self.params = dict(params or {})
        self._paths: dict = {}
        self._owners: Optional[dict] = None
        # every value below _floor is excluded by the forbidden set of this
        # condition alone; stronger conditions inherit the bound
        self._floor = 0

    # -- value semantics -------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Condition) and self.context.key == other.context.key
                and self.s == other.s and self.words == other.words
                and self.params == other.params)

    def __hash__(self):
        return hash((self.context.key, self.s, self.words))

    def __repr__(self):
        return f"Condition({self.dumps()})"

    # -- cached coding paths ---------------------------------------------

    def coding_path(self, w: Word) -> Path:
        """The (w, s)-path of the coding parameter of w."""
        path = self._paths.get(w)
        if path is None:
            path = mpath(w, self.s, self.params[w])
            self._paths[w] = path
        return path

    def owners(self) -> dict:
        """Map each value on a coding path to the (first) coded word owning it."""
        if self._owners is None:
            owners: dict = {}
            for w in sorted(self.params, key=word_key):
                for v in self.coding_path(w).values:
                    owners.setdefault(v, w)
            self._owners = owners
        return self._owners

    def code_length(self, w: Word) -> Optional[int]:
        return code_length_of_path(self.coding_path(w), self.context.z)

    def derive(self, pairs: Iterable = (), words: Iterable[Word] = (),
               params: Optional[Mapping[Word, int]] = None) -> "Condition":
        """A condition with extra pairs, words and parameters; coding paths are resumed."""
        pairs = list(pairs)
        q = Condition.__new__(Condition)
        q.context = self.context
        q.s = self.s.extend(pairs) if pairs else self.s
        q.words = self.words.union(words)
        q.params = dict(self.params)
        if params:
            for w, m in params.items():
                if w in q.params and q.params[w] != m:
                    raise ValueError(f"parameter of {w} already set")
                q.params[w] = m
        if pairs:
            q._paths = {w: path.resume(q.s) for w, path in self._paths.items()}
        else:
            q._paths = dict(self._paths)
        q._owners = None
        q._floor = self._floor
        return q

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "group": self.context.group.name,
            "z": self.context.z.name if self.context.z else None,
            "s": [[a, b] for a, b in self.s.pairs()],
            "F": [str(w) for w in sorted(self.words, key=word_key)],
            "m": {str(w): self.params[w] for w in sorted(self.params, key=word_key)},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict, context: Optional[Context] = None) -> "Condition":
        if context is None:
            context = Context.from_names(data["group"], data.get("z"), check=False)
        elif (data["group"], data.get("z")) != context.key:
            raise ValueError(f"condition context {(data['group'], data.get('z'))} does not match {context.key}")
        s = PartialInjection(tuple(pair) for pair in data.get("s", []))
        words = [context.word(t) for t in data.get("F", [])]
        params = {context.word(t): int(m) for t, m in data.get("m", {}).items()}
        return cls(context, s, words, params)

    @classmethod
    def loads(cls, text: str, context: Optional[Context] = None) -> "Condition":
        return cls.from_dict(json.loads(text), context)


def check_condition(p: Condition) -> list:
    """All violated requirements of p; the empty list means p is a condition."""
    out = []
    for w in sorted(p.words, key=word_key):
        if w.is_group_word():
            out.append(Violation("A1", f"group word {str(w) or '∅'} in F", w))
        elif reduce(w.letters) != w:
            out.append(Violation("A1", f"word {w} is not reduced", w))
    coded = sorted(p.params, key=word_key)
    if coded and not p.context.coding:
        out.append(Violation("A2", "coding parameters in a plain condition"))
        return out
    for w in coded:
        if w not in p.words:
            out.append(Violation("A2", f"parameter for {w}, which is not in F", w))
    coded = [w for w in coded if not w.is_group_word()]
    for w in coded:
        m = p.params[w]
        try:
            ok = p.code_length(w) is not None
        except IndexError as exc:
            out.append(Violation("A3", f"{w}: {exc}", w, m))
            continue
        if not ok:
            out.append(Violation("A3", f"{w} with parameter {m} does not exactly code an initial segment of {p.context.z.name}", w, m))
    seen: dict = {}
    for w in coded:
        for v in set(p.coding_path(w).values):
            if v in seen:
                out.append(Violation("A4", f"paths of {seen[v]} and {w} share {v}", w, v))
            else:
                seen[v] = w
    return out


def _witnessed(w: Word, path_values, s: PartialInjection) -> bool:
    for u in w.subwords():
        if not u:
            continue
        if u.is_group_word():
            g = u.letters[0]
            if any(g(v) == v for v in path_values):
                return True
        elif any(apply_word(u, s, v) == v for v in path_values):
            return True
    return False


def order_violations(q: Condition, p: Condition) -> list:
    """Reasons why q <= p fails (empty when q extends p)."""
    if q.context.key != p.context.key:
        raise ValueError(f"conditions live in different contexts: {q.context.key} vs {p.context.key}")
    out = []
    superset = p.s.issubset(q.s)
    if not superset:
        missing = p.s.difference(q.s)
        out.append(Violation("NotSuperset-s", f"missing pairs {missing}"))
    if not p.words <= q.words:
        out.append(Violation("NotSuperset-F", "missing words " + ", ".join(
            str(w) for w in sorted(p.words - q.words, key=word_key))))
    for w, m in sorted(p.params.items(), key=lambda kv: word_key(kv[0])):
        if q.params.get(w) != m:
            out.append(Violation("NotSuperset-m", f"parameter of {w} is {q.params.get(w)}, expected {m}", w))
    new_pairs = q.s.difference(p.s) if superset else None
    for w in sorted(p.words, key=word_key):
        if w.is_group_word():
            continue
        if superset:
            cands = fixed_points_through(w, q.s, new_pairs)
        else:
            cands = fixed_points(w, q.s)
        for m in sorted(cands):
            if apply_word(w, p.s, m) == m:
                continue  # old fixed point: w itself witnesses it
            if not _witnessed(w, mpath(w, q.s, m).values, p.s):
                out.append(Violation("NewFixedPointUnwitnessed", word=w, point=m))
    return out


def leq(q: Condition, p: Condition) -> bool:
    """q <= p: q is stronger than (extends) p."""
    return not order_violations(q, p)


def fixed_point_bound(p: Condition, w: Word) -> int:
    """Number of triples (l, u, m): l < |w|, u a non-empty subword of w, m in fix(u[s])."""
    if w not in p.words:
        raise ValueError(f"{w} is not in F")
    total = 0
    for u in w.subwords():
        if u:
            total += len(fixed_points(u, p.s))
    return len(w) * total
