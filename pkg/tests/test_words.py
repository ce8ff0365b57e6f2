import pytest
from hypothesis import given, settings, strategies as st

from cofinitary.groups import get_group
from cofinitary.words import EMPTY, X, XINV, Word, enumerate_words, parse_word, reduce

from conftest import GROUPS, W

swap = get_group("swap")
tail = get_group("swap-tail")
shift = get_group("shift")
tau = swap.generator("tau")
gamma = tail.generator("gamma")
zeta = shift.generator("zeta")


def naive_reduce(letters):
    """Repeat local rewriting until nothing changes."""
    seq = [a for a in letters if isinstance(a, type(X)) or not a.is_identity()]
    changed = True
    while changed:
        changed = False
        for i in range(len(seq) - 1):
            a, b = seq[i], seq[i + 1]
            ax, bx = isinstance(a, type(X)), isinstance(b, type(X))
            if ax and bx and a.exp == -b.exp:
                seq = seq[:i] + seq[i + 2:]
                changed = True
                break
            if not ax and not bx:
                g = a * b
                seq = seq[:i] + ([] if g.is_identity() else [g]) + seq[i + 2:]
                changed = True
                break
    return tuple(seq)


def test_reduce_examples():
    assert reduce([X, XINV]) == EMPTY
    assert reduce([tau, X, XINV, tau]) == EMPTY
    w = reduce([X, tau, XINV])
    assert w.letters == (X, tau, XINV)


def test_invert_examples():
    assert Word([X]).inverse() == Word([XINV])
    w = Word([XINV, gamma, X])
    assert w.inverse() == w


def test_cyclic_permutations_examples():
    assert EMPTY.cyclic_permutations() == {EMPTY}
    assert Word([tau, X]).cyclic_permutations() == {Word([tau, X]), Word([X, tau])}
    assert Word([XINV, gamma, X]).cyclic_permutations() == {Word([XINV, gamma, X]), Word([gamma])}


def test_subwords_examples():
    assert EMPTY.subwords() == {EMPTY}
    assert Word([X]).subwords() == {EMPTY, Word([X])}
    got = {str(u) for u in Word([XINV, gamma, X]).subwords()}
    assert got == {"", "X^-1", "gamma", "X", "X^-1 gamma", "gamma X", "X^-1 gamma X"}


def test_is_group_word():
    assert Word([gamma]).is_group_word()
    assert EMPTY.is_group_word()
    assert not Word([XINV, gamma, X]).is_group_word()


def test_parse_print_round_trip():
    for text in ["X", "X^-1", "tau X", "X tau X^-1", "X X tau X^-1"]:
        assert str(parse_word(text, swap)) == text
    assert str(parse_word("zeta^-1 zeta^-1 X zeta", shift)) == "zeta^-1 zeta^-1 X zeta"
    assert parse_word("∅", swap) == EMPTY


def test_parse_rejects_unknown_token():
    with pytest.raises(ValueError):
        parse_word("X sigma", swap)


def test_enumeration_order_and_content():
    words = enumerate_words(swap, 2)
    assert [str(w) for w in words] == ["X", "X^-1", "tau X", "tau X^-1", "X tau", "X X", "X^-1 tau", "X^-1 X^-1"]
    assert all(not w.is_group_word() and reduce(w.letters) == w for w in enumerate_words(shift, 3))


def test_cyclic_reduction_and_codable():
    assert W("X tau X^-1", "swap").cyclic_reduction() == W("tau", "swap")
    assert not W("X tau X^-1", "swap").is_codable()
    assert not W("X X zeta X^-1", "shift").is_codable()
    assert W("tau X tau", "swap").cyclic_reduction() == W("X", "swap")
    assert W("tau X tau", "swap").is_codable()
    assert W("zeta X zeta^-1", "shift").is_codable()
    assert W("tau X", "swap").is_codable()
    assert not EMPTY.is_codable()


# -- property tests ----------------------------------------------------------

def _letter(group):
    gens = group.letters()
    pool = [X, XINV] + gens + [g.inverse() for g in gens] + [group.identity()]
    return st.sampled_from(pool)


def letters_of(group, max_size=7):
    return st.lists(_letter(group), max_size=max_size)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(lambda name: letters_of(get_group(name))))
def test_reduce_matches_rewriting_oracle(letters):
    assert reduce(letters).letters == naive_reduce(letters)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(
    lambda name: st.tuples(letters_of(get_group(name)), letters_of(get_group(name)), letters_of(get_group(name)))))
def test_product_is_associative(triple):
    u, v, w = (reduce(t) for t in triple)
    assert (u * v) * w == u * (v * w)
    assert reduce(u.letters) == u


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(lambda name: letters_of(get_group(name))))
def test_inverse_laws(letters):
    w = reduce(letters)
    assert w * w.inverse() == EMPTY
    assert w.inverse().inverse() == w


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(lambda name: letters_of(get_group(name))))
def test_rotations_and_slices_are_reduced(letters):
    w = reduce(letters)
    cps = w.cyclic_permutations()
    if w:
        assert len(cps) <= len(w)
    for u in cps | w.subwords():
        assert reduce(u.letters) == u


def test_cyclic_reduction_is_idempotent_and_keeps_length_parity():
    for name in GROUPS:
        for w in enumerate_words(get_group(name), 4):
            c = w.cyclic_reduction()
            assert c.cyclic_reduction() == c
            assert c.x_count() <= w.x_count()
            assert (w.x_count() - c.x_count()) % 2 == 0
