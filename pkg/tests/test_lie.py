"""Tests for the free Lie algebra / derivation oracle."""

import random

import pytest

from hlg.lie import (
    act_on_word,
    bracket_image,
    derivation_bracket,
    expand_to_tensor,
    h_space,
    h_space_elements,
    is_in_h,
    is_lyndon,
    lie_add,
    lie_bracket,
    lie_scale,
    lyndon_basis,
    standard_factorization,
    tensor_to_lie,
)
from hlg.linalg import QQ
from hlg.tensor import TensorVector, parse_word


def witt(n, s):
    """Necklace-count formula for dim L_n over an s-letter alphabet."""
    from sympy import divisors, mobius

    return sum(mobius(d) * s ** (n // d) for d in divisors(n)) // n


def test_lyndon_counts():
    assert len(lyndon_basis(1, 2)) == 4
    assert len(lyndon_basis(2, 2)) == 6
    assert len(lyndon_basis(7, 2)) == 2340
    for n in range(1, 7):
        for g in (1, 2, 3):
            assert len(lyndon_basis(n, g)) == witt(n, 2 * g)


def test_lyndon_words_are_lyndon_and_sorted():
    words = lyndon_basis(4, 2)
    assert all(is_lyndon(w) for w in words)
    assert list(words) == sorted(words)


def test_standard_factorization_parts_are_lyndon():
    for w in lyndon_basis(5, 2):
        u, v = standard_factorization(w)
        assert is_lyndon(u) and is_lyndon(v)
        assert u + v == w and u < v


def test_expand_examples():
    g = 2
    assert expand_to_tensor({parse_word("a1"): QQ(1)}, g) == TensorVector(
        {parse_word("a1"): 1}, g
    )
    br = lie_bracket({parse_word("a1"): QQ(1)}, {parse_word("b1"): QQ(1)}, g)
    assert expand_to_tensor(br, g) == TensorVector(
        {parse_word("a1.b1"): 1, parse_word("b1.a1"): -1}, g
    )


def test_expansion_leading_term():
    # The expansion of a Lyndon bracketing is the word itself plus
    # lexicographically larger words, with leading coefficient 1.
    for n in range(2, 6):
        for w in lyndon_basis(n, 2)[:20]:
            tv = expand_to_tensor({w: QQ(1)}, 2)
            lead = min(tv.terms)
            assert lead == w and tv.terms[lead] == 1


def test_round_trip_tensor_to_lie():
    rng = random.Random(2)
    for n in (2, 3, 4):
        basis = lyndon_basis(n, 2)
        x = {w: QQ(rng.randint(-3, 3)) for w in rng.sample(basis, min(4, len(basis)))}
        x = {w: c for w, c in x.items() if c}
        assert tensor_to_lie(expand_to_tensor(x, 2)) == x


def test_bracket_antisymmetry_and_jacobi():
    rng = random.Random(9)
    g = 2

    def rand_elem(n):
        basis = lyndon_basis(n, g)
        out = {w: QQ(rng.randint(-3, 3)) for w in rng.sample(basis, min(3, len(basis)))}
        return {w: c for w, c in out.items() if c}

    for _ in range(5):
        x, y, z = rand_elem(1), rand_elem(2), rand_elem(2)
        assert lie_bracket(x, x, g) == {}
        assert lie_bracket(x, y, g) == lie_scale(lie_bracket(y, x, g), QQ(-1))
        jac = lie_add(
            lie_add(
                lie_bracket(x, lie_bracket(y, z, g), g),
                lie_bracket(y, lie_bracket(z, x, g), g),
            ),
            lie_bracket(z, lie_bracket(x, y, g), g),
        )
        assert jac == {}


def test_tensor_to_lie_rejects_non_lie():
    with pytest.raises(ValueError):
        tensor_to_lie(TensorVector({parse_word("a1.b1"): 1}, 2))


def test_h_space_dims():
    assert h_space(1, 2).rank == 4
    assert h_space(1, 3).rank == 20


def test_h_space_kernel_certified():
    for n, g in [(1, 2), (2, 2)]:
        for d in h_space_elements(n, g):
            assert is_in_h(d, g)


def test_derivation_bracket_lands_in_h():
    g = 2
    ds1 = h_space_elements(1, g)
    ds2 = h_space_elements(2, g)
    rng = random.Random(4)
    for _ in range(5):
        d1 = rng.choice(ds1)
        d2 = rng.choice(ds2)
        br = derivation_bracket(d1, d2, g)
        assert is_in_h(br, g)


def test_derivation_bracket_antisymmetric():
    g = 2
    ds = h_space_elements(1, g)
    d1, d2 = ds[0], ds[1]
    b12 = derivation_bracket(d1, d2, g)
    b21 = derivation_bracket(d2, d1, g)
    assert b12 == {k: -c for k, c in b21.items()}


def test_act_on_word_is_derivation():
    # D([u,v]) = [Du, v] + [u, Dv] on a sample bracket
    g = 2
    d = h_space_elements(1, g)[0]
    u = parse_word("a1")
    v = parse_word("b2")
    uv = lie_bracket({u: QQ(1)}, {v: QQ(1)}, g)
    lhs = {}
    for w, c in uv.items():
        lhs = lie_add(lhs, lie_scale(act_on_word(d, w, g), c))
    rhs = lie_add(
        lie_bracket(act_on_word(d, u, g), {v: QQ(1)}, g),
        lie_bracket({u: QQ(1)}, act_on_word(d, v, g), g),
    )
    assert lhs == rhs


def test_bracket_image_degree():
    g = 2
    img = bracket_image(("a", 1), parse_word("a1.b1"), g)
    for w in img:
        assert len(w) == 3
