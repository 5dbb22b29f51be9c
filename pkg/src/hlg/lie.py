"""Free Lie algebra on H via Lyndon words, and the derivation model of h(n).

Lie elements are sparse dicts {Lyndon word: rational} at a fixed genus.
Derivations (elements of H tensor L_{n+1}) are sparse dicts
{(basis symbol, Lyndon word): rational}.  The subspace h(n) is the kernel of
the bracket map a (x) u |-> [a, u] into L_{n+2}; membership there is always
certified, never assumed.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Tuple

from .linalg import ONE, QQ, ZERO, SubspaceBasis, nullspace, vec_add
from .tensor import Symbol, TensorVector, Word, pairing, sp_weight, symbols

LieElement = Dict[Word, object]  # Lyndon word -> rational
Derivation = Dict[Tuple[Symbol, Word], object]


def is_lyndon(w: Word) -> bool:
    if not w:
        return False
    return all(w < w[i:] + w[:i] for i in range(1, len(w)))


@lru_cache(maxsize=None)
def lyndon_basis(n: int, g: int) -> Tuple[Word, ...]:
    """All Lyndon words of length n over the 2g basis symbols, via Duval."""
    if n < 1:
        raise ValueError("degree must be positive")
    alpha = symbols(g)
    k = len(alpha)
    out: List[Word] = []
    w = [0]
    while True:
        if len(w) == n:
            out.append(tuple(alpha[i] for i in w))
        m = len(w)
        while len(w) < n:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
        if not w:
            break
        w[-1] += 1
    return tuple(out)


@lru_cache(maxsize=None)
def standard_factorization(w: Word) -> Tuple[Word, Word]:
    """Standard (right) factorization w = uv with v the longest proper Lyndon suffix."""
    if len(w) < 2:
        raise ValueError("cannot factor a letter")
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise AssertionError("not a Lyndon word")


@lru_cache(maxsize=None)
def _expand_word(w: Word, g: int) -> TensorVector:
    if len(w) == 1:
        return TensorVector.from_word(w, g)
    u, v = standard_factorization(w)
    return _tensor_commutator(_expand_word(u, g), _expand_word(v, g))


def _tensor_commutator(x: TensorVector, y: TensorVector) -> TensorVector:
    out = TensorVector(genus=x.genus)
    for wx, cx in x.terms.items():
        for wy, cy in y.terms.items():
            c = cx * cy
            out += TensorVector({wx + wy: c}, x.genus)
            out += TensorVector({wy + wx: -c}, x.genus)
    return out


def expand_to_tensor(x: LieElement, g: int) -> TensorVector:
    """Image under the standard embedding of the free Lie algebra in tensors."""
    out = TensorVector(genus=g)
    for w, c in x.items():
        out += _expand_word(w, g).scale(c)
    return out


def tensor_to_lie(v: TensorVector) -> LieElement:
    """Rewrite a tensor lying in the Lie part into Lyndon coordinates.

    Uses the triangularity of Lyndon expansions: the bracketing of a Lyndon
    word equals the word plus lexicographically larger words.
    """
    g = v.genus
    rem = dict(v.terms)
    out: LieElement = {}
    while rem:
        w = min(rem)
        if not is_lyndon(w):
            raise ValueError(f"tensor is not a Lie element (leading word {w})")
        c = rem[w]
        out[w] = out.get(w, ZERO) + c
        for ww, cc in _expand_word(w, g).terms.items():
            s = rem.get(ww, ZERO) - c * cc
            if s:
                rem[ww] = s
            else:
                rem.pop(ww, None)
    return {w: c for w, c in out.items() if c}


def lie_bracket(x: LieElement, y: LieElement, g: int) -> LieElement:
    tx = expand_to_tensor(x, g)
    ty = expand_to_tensor(y, g)
    return tensor_to_lie(_tensor_commutator(tx, ty))


def lie_scale(x: LieElement, c) -> LieElement:
    return {w: c * v for w, v in x.items()} if c else {}


def lie_add(x: LieElement, y: LieElement) -> LieElement:
    return vec_add(x, y)


def act_on_word(d: Derivation, w: Word, g: int) -> LieElement:
    """Apply the derivation d to the Lyndon word w (Leibniz over its bracketing)."""
    if len(w) == 1:
        out: LieElement = {}
        for (a, u), c in d.items():
            coeff = c * pairing(a, w[0], g)
            if coeff:
                out = vec_add(out, {u: coeff})
        return out
    u, v = standard_factorization(w)
    du = act_on_word(d, u, g)
    dv = act_on_word(d, v, g)
    out = lie_bracket(du, {v: ONE}, g)
    return lie_add(out, lie_bracket({u: ONE}, dv, g))


def act_on_lie(d: Derivation, x: LieElement, g: int) -> LieElement:
    out: LieElement = {}
    for w, c in x.items():
        out = vec_add(out, act_on_word(d, w, g), c)
    return out


def derivation_bracket(d1: Derivation, d2: Derivation, g: int) -> Derivation:
    """Commutator of two symplectic derivations, back in H tensor L form.

    A derivation is recovered from its generator images by
    sum_k a_k (x) D(b_k) - b_k (x) D(a_k).
    """
    out: Derivation = {}
    for k in range(1, g + 1):
        for carrier, gen, sign in (
            (("a", k), ("b", k), ONE),
            (("b", k), ("a", k), -ONE),
        ):
            img1 = act_on_lie(d1, act_on_word(d2, (gen,), g), g)
            img2 = act_on_lie(d2, act_on_word(d1, (gen,), g), g)
            for w, c in vec_add(img1, img2, -ONE).items():
                key = (carrier, w)
                s = out.get(key, ZERO) + sign * c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return out


def bracket_image(a: Symbol, u: Word, g: int) -> LieElement:
    """The element [a, u] of L_{n+2}, for a basis symbol a and Lyndon word u."""
    return lie_bracket({(a,): ONE}, {u: ONE}, g)


def derivation_sp_weight(key: Tuple[Symbol, Word], g: int):
    a, u = key
    return sp_weight((a,) + u, g)


@lru_cache(maxsize=None)
def h_space(n: int, g: int) -> SubspaceBasis:
    """Basis of h(n) inside H tensor L_{n+1}: kernel of a (x) u |-> [a, u].

    Coordinates index the list of (symbol, Lyndon word) pairs in canonical
    order (symbols a_1..a_g, b_1..b_g; Lyndon words sorted).  The kernel is
    computed blockwise over the symplectic torus weight.
    """
    if n < 1:
        raise ValueError("degree must be positive")
    words = lyndon_basis(n + 1, g)
    domain = [(a, u) for a in symbols(g) for u in words]
    blocks: Dict[tuple, List[int]] = {}
    for idx, key in enumerate(domain):
        blocks.setdefault(derivation_sp_weight(key, g), []).append(idx)
    rows = []
    for wt in sorted(blocks):
        idxs = blocks[wt]
        cols = []
        for idx in idxs:
            a, u = domain[idx]
            cols.append(dict(bracket_image(a, u, g)))
        for row in nullspace(cols).rows:
            rows.append({idxs[j]: c for j, c in row.items()})
    basis = SubspaceBasis(sorted(rows, key=min), len(domain))
    return basis


def h_space_elements(n: int, g: int) -> List[Derivation]:
    """h_space rows as actual derivations."""
    words = lyndon_basis(n + 1, g)
    domain = [(a, u) for a in symbols(g) for u in words]
    return [
        {domain[i]: c for i, c in row.items()} for row in h_space(n, g).rows
    ]


def is_in_h(d: Derivation, g: int) -> bool:
    """Certify the kernel condition sum [a, u] = 0 defining h(n)."""
    total: LieElement = {}
    for (a, u), c in d.items():
        total = vec_add(total, bracket_image(a, u, g), c)
    return not total
