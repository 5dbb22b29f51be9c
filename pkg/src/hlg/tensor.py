"""The symplectic vector space H, its tensor algebra, and harmonic tensors.

H has the standard symplectic basis a_1..a_g, b_1..b_g with (a_i . b_j) =
delta_ij and (a_i . a_j) = (b_i . b_j) = 0.  Pure tensors ("words") are tuples
of basis symbols; linear combinations are TensorVector values carrying the
genus.  The text encoding of a word is dot-separated, e.g. ``a1.b2.a3``, and
the empty word (the unit) is ``1``.
"""

from __future__ import annotations

import re
from itertools import combinations, product
from typing import Iterable, Optional, Tuple

from .linalg import ONE, QQ, ZERO, SubspaceBasis, nullspace, solve

Symbol = Tuple[str, int]  # ('a', i) or ('b', i)
Word = Tuple[Symbol, ...]

UNIT: Word = ()

_SYM_RE = re.compile(r"([ab])([1-9][0-9]*)\Z")


def sym(kind: str, index: int) -> Symbol:
    if kind not in ("a", "b") or index < 1:
        raise ValueError(f"bad basis symbol {kind}{index}")
    return (kind, index)


def check_genus(w: Word, g: int) -> None:
    for kind, i in w:
        if i > g:
            raise ValueError(f"symbol {kind}{i} exceeds genus {g}")


def pairing(x: Symbol, y: Symbol, g: int):
    """The symplectic form (x . y)."""
    check_genus((x, y), g)
    if x[1] != y[1]:
        return ZERO
    if x[0] == "a" and y[0] == "b":
        return ONE
    if x[0] == "b" and y[0] == "a":
        return -ONE
    return ZERO


def parse_word(text: str) -> Word:
    text = text.strip()
    if text == "1":
        return UNIT
    out = []
    for part in text.split("."):
        m = _SYM_RE.match(part.strip())
        if not m:
            raise ValueError(f"bad symbol {part!r} in word {text!r}")
        out.append((m.group(1), int(m.group(2))))
    return tuple(out)


def word_str(w: Word) -> str:
    if not w:
        return "1"
    return ".".join(f"{k}{i}" for k, i in w)


class TensorVector:
    """A finite rational linear combination of pure tensors at a fixed genus."""

    __slots__ = ("terms", "genus")

    def __init__(self, terms=None, genus: int = 1):
        self.genus = genus
        self.terms: dict = {}
        if terms:
            for w, c in terms.items():
                if c:
                    check_genus(w, genus)
                    self.terms[w] = QQ(c)

    @classmethod
    def from_word(cls, w: Word, genus: int, coeff=ONE) -> "TensorVector":
        return cls({w: coeff}, genus)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        """Common degree of all terms, or raises if mixed; None when zero."""
        degs = {len(w) for w in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("non-homogeneous tensor vector")
        return degs.pop()

    def _require_same_genus(self, other: "TensorVector") -> None:
        if self.genus != other.genus:
            raise ValueError("genus mismatch")

    def __add__(self, other: "TensorVector") -> "TensorVector":
        self._require_same_genus(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, ZERO) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        r = TensorVector(genus=self.genus)
        r.terms = out
        return r

    def __sub__(self, other: "TensorVector") -> "TensorVector":
        return self + other.scale(-ONE)

    def scale(self, coeff) -> "TensorVector":
        r = TensorVector(genus=self.genus)
        if coeff:
            r.terms = {w: coeff * c for w, c in self.terms.items()}
        return r

    def stabilize(self, genus: int) -> "TensorVector":
        """Embed into the tensor algebra of a larger genus."""
        if genus < self.genus:
            raise ValueError("stabilization must not decrease genus")
        r = TensorVector(genus=genus)
        r.terms = dict(self.terms)
        return r

    def __eq__(self, other):
        return (
            isinstance(other, TensorVector)
            and self.genus == other.genus
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "TensorVector(0)"
        parts = [f"{c}*{word_str(w)}" for w, c in sorted(self.terms.items())]
        return "TensorVector(" + " + ".join(parts) + f"; g={self.genus})"


def coproduct(t: Word):
    """All 2^m ordered splittings (u_I, u_J) preserving internal letter order."""
    m = len(t)
    out = []
    for k in range(m, -1, -1):
        for picks in combinations(range(m), k):
            chosen = set(picks)
            left = tuple(t[i] for i in picks)
            right = tuple(t[i] for i in range(m) if i not in chosen)
            out.append((left, right))
    return out


def antipode(t: Word):
    """(sign, reversed word) with sign (-1)^m."""
    return (ONE if len(t) % 2 == 0 else -ONE, t[::-1])


def contract(t: Word, i: int, j: int, g: int):
    """Pair off letters i and j: ((letter_i . letter_j), remaining word)."""
    m = len(t)
    if i == j or not (0 <= i < m) or not (0 <= j < m):
        raise IndexError(f"bad contraction slots ({i},{j}) on degree {m}")
    coeff = pairing(t[i], t[j], g)
    rest = tuple(x for k, x in enumerate(t) if k not in (i, j))
    return coeff, rest


def omega_insert(t: Word, position: int, g: int) -> TensorVector:
    """Insert the symplectic 2-tensor sum_i (a_i b_i - b_i a_i) at position."""
    if not (0 <= position <= len(t)):
        raise IndexError(f"bad insertion position {position}")
    out = TensorVector(genus=g)
    head, tail = t[:position], t[position:]
    for i in range(1, g + 1):
        out += TensorVector.from_word(head + (("a", i), ("b", i)) + tail, g)
        out += TensorVector.from_word(head + (("b", i), ("a", i)) + tail, g, -ONE)
    return out


def omega_insert_slots(t: Word, i: int, j: int, g: int) -> TensorVector:
    """Insert the symplectic 2-tensor with its two letters landing at slots
    i < j of the resulting degree+2 word."""
    m = len(t) + 2
    if not (0 <= i < j < m):
        raise IndexError(f"bad insertion slots ({i},{j})")
    out = TensorVector(genus=g)
    for k in range(1, g + 1):
        for first, second, sign in ((("a", k), ("b", k), ONE), (("b", k), ("a", k), -ONE)):
            word = []
            it = iter(t)
            for pos in range(m):
                if pos == i:
                    word.append(first)
                elif pos == j:
                    word.append(second)
                else:
                    word.append(next(it))
            out += TensorVector.from_word(tuple(word), g, sign)
    return out


def symbols(g: int):
    """All 2g basis symbols in canonical order a_1..a_g, b_1..b_g."""
    return [("a", i) for i in range(1, g + 1)] + [("b", i) for i in range(1, g + 1)]


def all_words(m: int, g: int):
    """All (2g)^m pure tensors of degree m, lexicographic in canonical order."""
    return [tuple(w) for w in product(symbols(g), repeat=m)]


def weight_of(t: Word, g: int):
    """Occurrence-count vector (a_1..a_g, b_1..b_g)."""
    check_genus(t, g)
    counts = [0] * (2 * g)
    for kind, i in t:
        counts[(i - 1) if kind == "a" else (g + i - 1)] += 1
    return tuple(counts)


def sp_weight(t: Word, g: int):
    """Symplectic torus weight: (#a_k - #b_k) for k = 1..g.

    Both contraction and omega-insertion preserve this weight, so it is the
    right grading for blockwise projection.
    """
    check_genus(t, g)
    counts = [0] * g
    for kind, i in t:
        counts[i - 1] += 1 if kind == "a" else -1
    return tuple(counts)


def contraction_image(v: TensorVector) -> dict:
    """All pairwise contractions of v, as one sparse vector.

    Coordinates are ((i, j), remaining word) over slot pairs i < j.
    """
    out: dict = {}
    g = v.genus
    for w, c in v.terms.items():
        m = len(w)
        for i, j in combinations(range(m), 2):
            coeff, rest = contract(w, i, j, g)
            if not coeff:
                continue
            key = ((i, j), rest)
            s = out.get(key, ZERO) + c * coeff
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def harmonic_basis(m: int, g: int) -> SubspaceBasis:
    """Basis of H^<m>, the joint kernel of all pairwise contractions.

    Coordinates are indices into ``all_words(m, g)``.
    """
    words = all_words(m, g)
    cols = [contraction_image(TensorVector.from_word(w, g)) for w in words]
    return nullspace(cols)


def harmonic_vectors(m: int, g: int):
    """The harmonic basis as actual TensorVector values."""
    words = all_words(m, g)
    out = []
    for row in harmonic_basis(m, g).rows:
        out.append(TensorVector({words[i]: c for i, c in row.items()}, g))
    return out


def _omega_generators(m: int, g: int):
    """Spanning set of the complement of H^<m>, grouped by GL-weight."""
    gens: dict = {}
    for u in all_words(m - 2, g):
        for i, j in combinations(range(m), 2):
            gens.setdefault(sp_weight(u, g), []).append(
                omega_insert_slots(u, i, j, g)
            )
    return gens


def top_project(v: TensorVector, m: int) -> TensorVector:
    """Component of v in H^<m> along the span of all omega-insertions."""
    if v.is_zero():
        return v
    if v.degree() != m:
        raise ValueError("input is not homogeneous of the requested degree")
    if m < 2:
        return v
    g = v.genus
    gens = _omega_generators(m, g)
    blocks: dict = {}
    for w, c in v.terms.items():
        blocks.setdefault(sp_weight(w, g), {})[w] = c
    out = TensorVector(genus=g)
    for wt, terms in sorted(blocks.items()):
        block = TensorVector(genus=g)
        block.terms = dict(terms)
        bgens = gens.get(wt, [])
        cols = [contraction_image(gv) for gv in bgens]
        sol = solve(cols, contraction_image(block))
        if sol is None:
            raise ArithmeticError("projection system is inconsistent")
        for j, c in sol.items():
            block = block - bgens[j].scale(c)
        out += block
    return out
