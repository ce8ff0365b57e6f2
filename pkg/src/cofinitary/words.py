"""Reduced words in the free product of a base group with the free group on X.

A word is stored in written order ``a_n ... a_1``; the rightmost letter is
applied first when a word acts on a natural number.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from .groups import BaseGroup, GroupElement

__all__ = ["XLetter", "X", "XINV", "Letter", "Word", "reduce", "EMPTY", "parse_word", "enumerate_words"]


class XLetter:
    __slots__ = ("exp",)

    def __init__(self, exp: int):
        if exp not in (1, -1):
            raise ValueError("X exponent must be +1 or -1")
        self.exp = exp

    def __eq__(self, other):
        return isinstance(other, XLetter) and other.exp == self.exp

    def __hash__(self):
        return hash(("X", self.exp))

    def __repr__(self):
        return "X" if self.exp == 1 else "X^-1"

    def inverse(self) -> "XLetter":
        return XINV if self.exp == 1 else X


X = XLetter(1)
XINV = XLetter(-1)

Letter = Union[XLetter, GroupElement]


def _is_x(a) -> bool:
    return isinstance(a, XLetter)


def reduce(letters: Iterable[Letter]) -> "Word":
    """Free-product normal form of a letter sequence (written order)."""
    stack: list = []
    for a in letters:
        if _is_x(a):
            if stack and _is_x(stack[-1]) and stack[-1].exp == -a.exp:
                stack.pop()
            else:
                stack.append(a)
            continue
        if a.is_identity():
            continue
        if stack and not _is_x(stack[-1]):
            g = stack.pop() * a
            if g.is_identity():
                continue
            a = g
        stack.append(a)
    return Word._raw(tuple(stack))


class Word:
    """An element of W_{G,X}: an immutable, hashable reduced word."""

    __slots__ = ("letters", "_hash", "_program")

    def __init__(self, letters: Sequence[Letter] = ()):
        w = reduce(letters)
        self.letters = w.letters
        self._hash = None
        self._program = None

    @classmethod
    def _raw(cls, letters: tuple) -> "Word":
        w = object.__new__(cls)
        w.letters = letters
        w._hash = None
        w._program = None
        return w

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.letters)
        return self._hash

    def __mul__(self, other: "Word") -> "Word":
        return reduce(self.letters + other.letters)

    def __str__(self):
        toks = []
        for a in self.letters:
            toks.extend([repr(a)] if _is_x(a) else a.tokens())
        return " ".join(toks)

    def __repr__(self):
        return f"Word({str(self) or '∅'})"

    def inverse(self) -> "Word":
        return Word._raw(tuple(a.inverse() for a in reversed(self.letters)))

    def is_group_word(self) -> bool:
        return not any(_is_x(a) for a in self.letters)

    def applied(self) -> tuple:
        """Letters in application order ``a_1, a_2, ...``."""
        return self.letters[::-1]

    def program(self) -> tuple:
        """Application-order steps ``(kind, payload)``: kind 1 = X, -1 = X^-1, 0 = group letter."""
        if self._program is None:
            self._program = tuple(
                (a.exp, None) if _is_x(a) else (0, a) for a in reversed(self.letters)
            )
        return self._program

    def cyclic_permutations(self) -> set:
        if not self.letters:
            return {self}
        n = len(self.letters)
        return {reduce(self.letters[i:] + self.letters[:i]) for i in range(n)}

    def subwords(self) -> set:
        n = len(self.letters)
        out = {EMPTY}
        for i in range(n):
            for j in range(i + 1, n + 1):
                out.add(Word._raw(self.letters[i:j]))
        return out

    def x_count(self) -> int:
        return sum(1 for a in self.letters if _is_x(a))

    def cyclic_reduction(self) -> "Word":
        """The cyclically reduced core: strip cancelling ends and merge end group letters."""
        letters = list(self.letters)
        while len(letters) >= 2:
            a, b = letters[0], letters[-1]
            if _is_x(a) and _is_x(b):
                if a.exp != -b.exp:
                    break
                letters = letters[1:-1]
            elif not _is_x(a) and not _is_x(b):
                g = b * a
                letters = letters[1:-1] + ([] if g.is_identity() else [g])
            else:
                break
        return Word._raw(tuple(letters))

    def is_codable(self) -> bool:
        """True when no X-letters cancel around the cycle.

        Only such words have iterates that run through fresh values; the
        others are conjugate to a shorter word by an X-containing word.
        """
        return not self.is_group_word() and self.cyclic_reduction().x_count() == self.x_count()

    def group_element(self, group: BaseGroup) -> GroupElement:
        """The base-group element a group word denotes."""
        if not self.is_group_word():
            raise ValueError(f"{self!r} contains X")
        return self.letters[0] if self.letters else group.identity()


EMPTY = Word._raw(())


def cyclic_permutations(w: Word) -> set:
    return w.cyclic_permutations()


def subwords(w: Word) -> set:
    return w.subwords()


def is_group_word(w: Word) -> bool:
    return w.is_group_word()


def invert(w: Word) -> Word:
    return w.inverse()


def parse_word(text: str, group: BaseGroup) -> Word:
    """Parse whitespace-separated tokens written ``a_n ... a_1``."""
    letters: list = []
    for tok in text.split():
        if tok == "X":
            letters.append(X)
        elif tok == "X^-1":
            letters.append(XINV)
        elif tok in ("∅", "1"):
            continue
        else:
            try:
                letters.append(group.token(tok))
            except KeyError:
                raise ValueError(f"unknown token {tok!r} for group {group.name}") from None
    return reduce(letters)


def enumerate_words(group: BaseGroup, depth: int) -> list:
    """Reduced non-group words of length <= depth over one-token group letters and X^{+-1}.

    Ordered by length, then lexicographically by letter, with group letters in
    declared generator order before X before X^-1.
    """
    alphabet = group.letters() + [X, XINV]
    out = []
    layer = [()]
    for _ in range(depth):
        nxt = []
        for prefix in layer:
            for a in alphabet:
                if prefix:
                    b = prefix[-1]
                    if _is_x(a) and _is_x(b) and a.exp == -b.exp:
                        continue
                    if not _is_x(a) and not _is_x(b):
                        continue
                nxt.append(prefix + (a,))
        out.extend(Word._raw(t) for t in nxt if any(_is_x(a) for a in t))
        layer = nxt
    return out
