import pytest

from cofinitary.coding import (
    BitStream,
    PeriodicStreamError,
    UndefinedIteration,
    decode,
    exact_code_length,
    find_period,
    get_stream,
    stream_from_text,
)
from cofinitary.partial import PartialInjection

from conftest import W

TM = get_stream("thue-morse")


def test_bits():
    assert [TM.bit(k) for k in range(8)] == [0, 1, 1, 0, 1, 0, 0, 1]
    assert TM.bit(5) == 0
    ch = get_stream("champernowne")
    assert [ch.bit(k) for k in range(6)] == [1, 1, 0, 1, 1, 1]


def test_file_stream(tmp_path):
    path = tmp_path / "bits.txt"
    path.write_text("0110 1001\n")
    z = get_stream(f"file:{path}", check=False)
    assert z.prefix(8) == "01101001"
    with pytest.raises(IndexError):
        z.bit(8)
    with pytest.raises(ValueError):
        stream_from_text("01x", "bad")


def test_periodicity_heuristic(tmp_path):
    TM.check_nonperiodic()
    get_stream("champernowne").check_nonperiodic()
    for text in ["0" * 200, "01" * 100, "1" + "011" * 100, "1101" * 30 + "10" * 500]:
        path = tmp_path / "p.txt"
        path.write_text(text)
        with pytest.raises(PeriodicStreamError):
            get_stream(f"file:{path}")


def test_find_period_needs_evidence():
    assert find_period([0, 1]) is None
    assert find_period([0] * 10) == (1, 0)
    assert find_period([1, 0, 0, 0, 0]) == (1, 1)


def test_exact_code_length_examples():
    X = W("X")
    assert exact_code_length(X, PartialInjection([(0, 3), (3, 5)]), 0, TM) == 3
    assert exact_code_length(X, PartialInjection([(0, 2)]), 0, TM) is None
    assert exact_code_length(X, PartialInjection([(0, 1), (1, 0)]), 0, TM) is None
    assert exact_code_length(X, PartialInjection(), 0, TM) == 1
    assert exact_code_length(X, PartialInjection(), 1, TM) is None
    with pytest.raises(ValueError):
        exact_code_length(W(""), PartialInjection(), 0, TM)


def test_decode_examples():
    X = W("X")
    assert decode(X, PartialInjection([(0, 3), (3, 5), (5, 8)]), 0, 4) == "0110"
    assert decode(X, PartialInjection(), 0, 0) == ""
    with pytest.raises(UndefinedIteration) as info:
        decode(X, PartialInjection([(0, 3)]), 0, 3)
    assert info.value.step == 2


def test_round_trip_on_longer_words():
    # tau X iterated from 0 under a hand-built map that follows TM
    w = W("tau X", "swap")
    s = PartialInjection([(0, 2), (3, 4), (5, 7), (6, 8)])
    # iterates 0, 3, 5, 6, 9 have parities 0 1 1 0 1, then 9 is not in the domain
    l = exact_code_length(w, s, 0, TM)
    assert l == 5
    assert decode(w, s, 0, l) == TM.prefix(l)


def test_bitstream_requires_one_source():
    with pytest.raises(ValueError):
        BitStream("x")
    with pytest.raises(KeyError):
        get_stream("nope")
