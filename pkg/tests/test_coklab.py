"""Tests for multiplicity bookkeeping, dashed templates, and reports."""

import pytest

from hlg.coklab import (
    ColoringSet,
    DashedTemplate,
    Partition,
    _hexagon_wheel,
    _load_template,
    dashed_element,
    gl_multiplicities,
    hyperbolic_pairs,
    kostka,
    loop_decomposition_check,
    partitions_of,
    weight_dims,
    ZERO_WHEEL_CHORDS,
    WHEEL_CHORDS,
)
from hlg.graphs import GraphVector, SpaceSpec, h_slot, space_dim
from hlg.linalg import QQ
from hlg.traces import one_loop_reduce


# ---------------------------------------------------------------------------
# Partitions and Kostka numbers


def test_partition_validation():
    assert tuple(Partition((3, 1, 1))) == (3, 1, 1)
    assert Partition(()).size == 0
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))


def test_partitions_of_order_and_count():
    parts = list(partitions_of(6))
    assert len(parts) == 11
    assert parts[0] == (6,)
    assert parts[-1] == (1,) * 6
    # strictly descending lexicographic order
    assert all(tuple(parts[i]) > tuple(parts[i + 1]) for i in range(len(parts) - 1))
    assert all(p.size == 6 for p in parts)


def test_kostka_unitriangular():
    for lam in partitions_of(5):
        assert kostka(lam, tuple(lam)) == 1
    # zero below dominance order
    assert kostka((1, 1), (2,)) == 0
    assert kostka((2, 2), (3, 1)) == 0


def test_kostka_content_permutation_invariance():
    assert kostka((2, 1), (1, 1, 1)) == 2
    assert kostka((2, 1), (1, 0, 1, 1)) == 2
    assert kostka((3, 2, 1), (2, 2, 2)) == kostka((3, 2, 1), (2, 2, 0, 2))


def _weyl_dim(lam, n):
    """Dimension of the GL(n) irreducible with highest weight lam."""
    lam = tuple(lam) + (0,) * (n - len(lam))
    num = den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    return num // den


def _compositions(total, length):
    if length == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, length - 1):
            yield (first,) + rest


@pytest.mark.parametrize("lam,n", [((2, 1), 3), ((2, 2), 4), ((3, 1), 3)])
def test_kostka_sums_to_irreducible_dimension(lam, n):
    total = sum(kostka(lam, mu) for mu in _compositions(sum(lam), n))
    assert total == _weyl_dim(lam, n)


# ---------------------------------------------------------------------------
# GL-multiplicities from weight dimensions


def test_gl_multiplicities_degree_four():
    mult = gl_multiplicities(SpaceSpec(1, 4, 2, 2), 2)
    assert mult == {(2,): 3, (1, 1): 0}


def test_gl_multiplicities_reconstruct_weight_dims():
    # a non-dominant weight block must decompose through the Kostka matrix
    spec = SpaceSpec(1, 4, 2, 2)
    mult = gl_multiplicities(spec, 2)
    dims = weight_dims(spec, [(1, 1, 0, 0)])
    expected = sum(kostka(lam, (1, 1)) * m for lam, m in mult.items())
    assert dims[(1, 1, 0, 0)] == expected == 3


def test_gl_multiplicities_two_loop_quotient():
    spec = SpaceSpec(1, 5, 2, 3)
    mult = gl_multiplicities(spec, 3, quotient="two-loop")
    assert mult == {(3,): 0, (2, 1): 2, (1, 1, 1): 2}


def test_gl_multiplicities_rejects_small_genus():
    with pytest.raises(ValueError):
        gl_multiplicities(SpaceSpec(1, 6, 2, 1), 4)


def test_space_dim_weight_blocks_agree():
    # the full space dimension is the sum over all weight blocks
    spec = SpaceSpec(1, 4, 2, 2)
    dims = weight_dims(spec)
    assert sum(dims.values()) == space_dim(spec) == 30


# ---------------------------------------------------------------------------
# Coloring sets and dashed templates


def test_coloring_set_validation():
    with pytest.raises(ValueError):
        ColoringSet([(("a", 1), ("b", 3))], 2)  # symbol outside genus
    with pytest.raises(ValueError):
        ColoringSet([(("a", 1), [])], 2)  # zero vector
    s = ColoringSet(hyperbolic_pairs(range(1, 3)), 2)
    assert len(s) == 4


def _tripod():
    return DashedTemplate(
        [(h_slot(("v", 1)), ("V", h_slot(("w", 1)), h_slot(("a", 1))))]
    )


def test_dashed_element_multilinear_expansion():
    g = 3
    s = ColoringSet(
        [(("a", 1), ("b", 1)), ([(-1, ("b", 1))], ("a", 1)), (("a", 2), ("a", 3))],
        g,
    )
    out = dashed_element(_tripod(), s)

    def tripod(x, y):
        return [(h_slot(x), ("V", h_slot(y), h_slot(("a", 1))))]

    manual = GraphVector.single(tripod(("a", 1), ("b", 1)), g)
    manual += GraphVector.single(tripod(("b", 1), ("a", 1)), g, coeff=QQ(-1))
    manual += GraphVector.single(tripod(("a", 2), ("a", 3)), g)
    assert out == manual


def test_dashed_element_drops_dependent_tuples():
    g = 2
    tpl = DashedTemplate(
        [
            (
                h_slot(("v", 1)),
                ("V", h_slot(("w", 1)), ("V", h_slot(("v", 2)), h_slot(("w", 2)))),
            )
        ]
    )
    # both pairs span the same two-dimensional subspace, so every ordered
    # tuple has dependent colors and the sum is empty
    s = ColoringSet([(("a", 1), ("b", 1)), ([(-1, ("b", 1))], ("a", 1))], g)
    assert dashed_element(tpl, s).is_zero()


def test_dashed_template_validation():
    with pytest.raises(ValueError):
        DashedTemplate(
            [(h_slot(("v", 1)), ("V", h_slot(("v", 1)), h_slot(("a", 1))))]
        )
    with pytest.raises(ValueError):
        DashedTemplate(
            [(h_slot(("v", 1)), ("V", h_slot(("v", 2)), h_slot(("w", 2))))]
        )


def test_shipped_templates_roundtrip():
    for name in ("dashed_tree_a", "dashed_tree_b"):
        tpl = _load_template(name)
        assert tpl.m == 4 and len(tpl.trees) == 1
        again = DashedTemplate.from_text(tpl.to_text())
        assert again.trees == tpl.trees


def test_reversed_line_negates_stationary_sum():
    g = 4
    s = ColoringSet(hyperbolic_pairs(range(1, 5)), g)
    tpl = _load_template("dashed_tree_a")
    x = dashed_element(tpl, s)
    assert not x.is_zero()
    assert dashed_element(tpl.reversed_line(2), s) == x.scale(QQ(-1))


def test_wheel_identities():
    g = 4
    s = ColoringSet(hyperbolic_pairs(range(1, 5)), g)
    wheel = one_loop_reduce(dashed_element(_hexagon_wheel(WHEEL_CHORDS), s))
    assert not wheel.is_zero()
    for chords in ZERO_WHEEL_CHORDS:
        assert one_loop_reduce(dashed_element(_hexagon_wheel(chords), s)).is_zero()


# ---------------------------------------------------------------------------
# Loop decomposition report


def test_loop_decomposition_check():
    report = loop_decomposition_check(2, 3)
    assert report["pass"]
    assert report["claim_id"] == "theorem2-1"
    assert set(report) == {
        "claim_id",
        "inputs",
        "computed",
        "expected",
        "pass",
        "wall_time_ms",
    }
