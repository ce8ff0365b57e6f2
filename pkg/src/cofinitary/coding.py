"""Bit streams and orbit-parity coding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .partial import Path, PartialInjection, apply_word, mpath
from .words import Word

__all__ = [
    "BitStream",
    "PeriodicStreamError",
    "CodingCertificate",
    "get_stream",
    "thue_morse",
    "champernowne",
    "stream_from_text",
    "find_period",
    "exact_code_length",
    "code_length_of_path",
    "decode",
    "UndefinedIteration",
]

CHECK_LENGTH = 4096
MAX_PERIOD = 64
MAX_OFFSET = 256


class PeriodicStreamError(ValueError):
    pass


class UndefinedIteration(ValueError):
    def __init__(self, step: int):
        super().__init__(f"iteration undefined at step {step}")
        self.step = step


class BitStream:
    """A named bit sequence, total or backed by a finite prefix."""

    def __init__(self, name: str, fn: Optional[Callable[[int], int]] = None,
                 bits: Optional[bytes] = None):
        if (fn is None) == (bits is None):
            raise ValueError("give exactly one of fn, bits")
        self.name = name
        self._fn = fn
        self._bits = bits

    def __repr__(self):
        return f"BitStream({self.name!r})"

    @property
    def length(self) -> Optional[int]:
        return None if self._bits is None else len(self._bits)

    def bit(self, k: int) -> int:
        if k < 0:
            raise IndexError(k)
        if self._bits is not None:
            if k >= len(self._bits):
                raise IndexError(f"stream {self.name} has only {len(self._bits)} bits; bit {k} requested")
            return self._bits[k]
        return self._fn(k)

    __getitem__ = bit

    def prefix(self, n: int) -> str:
        return "".join(str(self.bit(k)) for k in range(n))

    def check_nonperiodic(self) -> None:
        """Raise if the checked prefix has a short period from a small offset."""
        n = CHECK_LENGTH if self.length is None else min(CHECK_LENGTH, self.length)
        found = find_period([self.bit(k) for k in range(n)])
        if found is not None:
            p, o = found
            raise PeriodicStreamError(
                f"stream {self.name} looks eventually periodic: period {p} from offset {o}")


def find_period(bits, max_period: int = MAX_PERIOD, max_offset: int = MAX_OFFSET):
    """(period, offset) of the first eventual period found in ``bits``, else None."""
    n = len(bits)
    for p in range(1, min(max_period, n) + 1):
        # least offset from which bits[i] == bits[i + p] holds all the way
        o = n - p
        while o > 0 and bits[o - 1] == bits[o - 1 + p]:
            o -= 1
        # demand two full periods of evidence so short prefixes are not flagged vacuously
        if o <= max_offset and n - p - o >= 2 * p:
            return p, o
    return None


def thue_morse(k: int) -> int:
    return bin(k).count("1") & 1


class _Champernowne:
    def __init__(self):
        self._buf = bytearray()
        self._next = 1

    def __call__(self, k: int) -> int:
        while len(self._buf) <= k:
            self._buf.extend(int(c) for c in bin(self._next)[2:])
            self._next += 1
        return self._buf[k]


champernowne = _Champernowne()


def stream_from_text(text: str, name: str) -> BitStream:
    bits = bytearray()
    for c in text:
        if c in "01":
            bits.append(int(c))
        elif not c.isspace():
            raise ValueError(f"{name}: unexpected character {c!r} in bit stream")
    if not bits:
        raise ValueError(f"{name}: empty bit stream")
    return BitStream(name, bits=bytes(bits))


def get_stream(name: str, check: bool = True) -> BitStream:
    """Resolve ``thue-morse``, ``champernowne`` or ``file:<path>``."""
    if name == "thue-morse":
        z = BitStream("thue-morse", fn=thue_morse)
    elif name == "champernowne":
        z = BitStream("champernowne", fn=champernowne)
    elif name.startswith("file:"):
        path = name[len("file:"):]
        with open(path) as fh:
            z = stream_from_text(fh.read(), name)
    else:
        raise KeyError(f"unknown stream {name!r}; choose thue-morse, champernowne or file:<path>")
    if check:
        z.check_nonperiodic()
    return z


@dataclass(frozen=True)
class CodingCertificate:
    word: Word
    parameter: int
    length: int
    exact: bool = True

    def check(self, s: PartialInjection, z: BitStream) -> bool:
        return exact_code_length(self.word, s, self.parameter, z) == self.length


def code_length_of_path(path: Path, z: BitStream) -> Optional[int]:
    """Exact code length read off an already computed path."""
    if path.periodic:
        return None
    n = len(path.word)
    d = path.steps // n + 1
    vals = path.values
    for k in range(d):
        if vals[n * k] % 2 != z.bit(k):
            return None
    return d


def exact_code_length(w: Word, s: PartialInjection, m: int, z: BitStream) -> Optional[int]:
    """Least d with w[s]^d(m) undefined, provided the parities below d spell z; else None."""
    if w.is_group_word():
        raise ValueError(f"{w!r} is a group word")
    return code_length_of_path(mpath(w, s, m), z)


def decode(w: Word, s: PartialInjection, m: int, count: int) -> str:
    """Parities of w[s]^k(m) for k < count."""
    out = []
    v = m
    for k in range(count):
        if k:
            v = apply_word(w, s, v)
            if v is None:
                raise UndefinedIteration(k)
        out.append("1" if v % 2 else "0")
    return "".join(out)
