"""Two-loop quotient presented by theta-shaped generators.

A two-dotted-edge one-tree graph of homological degree zero has a theta or a
dumbbell core.  The quotient of that space by the solidification images of
ordered tuples is presented here combinatorially: generators ``Theta(t;u;v;w)``
indexed by four pure tensors hanging off the four arcs of a theta core, with
three relation families (core symmetries with antipode signs, handle balance,
and the generalized third relation).  The module also provides the graph-side
span of the relation images, reduction of arbitrary two-loop graphs to theta
generators, and the seven-parameter evaluation of the degree-6 block used for
the alternating-functional computations.
"""

from __future__ import annotations

from itertools import permutations
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .graphs import (
    GraphVector,
    HairyGraph,
    SpaceSpec,
    _perm_sign,
    e_slot,
    enumerate_basis,
    h_slot,
    ihx_terms,
    is_slot,
)
from .linalg import (
    ONE,
    QQ,
    ZERO,
    Echelon,
    SubspaceBasis,
    echelonize,
    member,
    nullspace,
    solve,
)
from .tensor import (
    TensorVector,
    all_words,
    check_genus,
    harmonic_vectors,
    parse_word,
    symbols,
    weight_of,
    word_str,
)
from .traces import beta_power

Word = Tuple[tuple, ...]


# ---------------------------------------------------------------------------
# Canonical theta terms


class ThetaTerm(NamedTuple):
    """Four pure-tensor slots: t, u below the core; v, w above."""

    t: Word
    u: Word
    v: Word
    w: Word

    @property
    def degree(self) -> int:
        return len(self.t) + len(self.u) + len(self.v) + len(self.w)

    def __str__(self) -> str:
        return theta_str(self)


class DumbbellTerm(NamedTuple):
    """Slots of a dumbbell-core generator: t, v on the left cycle, u, w right."""

    t: Word
    u: Word
    v: Word
    w: Word


def _rev(word: Word) -> Word:
    return tuple(reversed(word))


def _orbit(t: Word, u: Word, v: Word, w: Word):
    """The four symmetric images with their antipode signs.

    Rotating the core half a turn reverses all four slots; reflecting swaps
    top and bottom.  Each word reversal costs the antipode sign, so the two
    reversing symmetries carry (-1)**degree.
    """
    m = len(t) + len(u) + len(v) + len(w)
    s = ONE if m % 2 == 0 else -ONE
    yield (t, u, v, w), ONE
    yield (_rev(v), _rev(w), _rev(t), _rev(u)), s
    yield (_rev(u), _rev(t), _rev(w), _rev(v)), s
    yield (w, v, u, t), ONE


def canonical_theta(t: Word, u: Word, v: Word, w: Word):
    """Return (sign, ThetaTerm) with Theta(input) = sign * Theta(term).

    Returns (1, None) when the symmetry group forces the generator to vanish
    (the minimal representative occurs with both signs).
    """
    reps: Dict[tuple, set] = {}
    for tup, sgn in _orbit(t, u, v, w):
        reps.setdefault(tup, set()).add(sgn)
    rep = min(reps)
    signs = reps[rep]
    if len(signs) > 1:
        return ONE, None
    return next(iter(signs)), ThetaTerm(*rep)


def theta_str(term: ThetaTerm) -> str:
    return "Theta(%s;%s;%s;%s)" % tuple(word_str(x) for x in term)


def parse_theta(text: str) -> ThetaTerm:
    body = text.strip()
    if not body.startswith("Theta(") or not body.endswith(")"):
        raise ValueError("malformed theta term: %r" % text)
    parts = body[len("Theta(") : -1].split(";")
    if len(parts) != 4:
        raise ValueError("theta term needs four slots: %r" % text)
    return ThetaTerm(*(parse_word(p.strip()) for p in parts))


class ThetaVector:
    """Rational combination of canonical theta terms."""

    __slots__ = ("genus", "terms")

    def __init__(self, genus: Optional[int] = None, terms=None):
        self.genus = genus
        self.terms: Dict[ThetaTerm, object] = {}
        if terms:
            for term, c in terms.items():
                if c:
                    self.add(*term, coeff=c)

    def add(self, t: Word, u: Word, v: Word, w: Word, coeff=ONE) -> None:
        if self.genus is not None:
            for word in (t, u, v, w):
                check_genus(word, self.genus)
        sgn, rep = canonical_theta(t, u, v, w)
        if rep is None or not coeff:
            return
        s = self.terms.get(rep, ZERO) + sgn * QQ(coeff)
        if s:
            self.terms[rep] = s
        else:
            self.terms.pop(rep, None)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        degs = {term.degree for term in self.terms}
        if len(degs) > 1:
            raise ValueError("inhomogeneous theta vector")
        return degs.pop() if degs else None

    def scale(self, coeff) -> "ThetaVector":
        out = ThetaVector(self.genus)
        if coeff:
            out.terms = {t: coeff * c for t, c in self.terms.items()}
        return out

    def __add__(self, other: "ThetaVector") -> "ThetaVector":
        out = ThetaVector(self.genus if self.genus is not None else other.genus)
        out.terms = dict(self.terms)
        for t, c in other.terms.items():
            s = out.terms.get(t, ZERO) + c
            if s:
                out.terms[t] = s
            else:
                out.terms.pop(t, None)
        return out

    def __sub__(self, other: "ThetaVector") -> "ThetaVector":
        return self + other.scale(-ONE)

    def __eq__(self, other):
        return isinstance(other, ThetaVector) and self.terms == other.terms

    def __repr__(self):
        return "ThetaVector(%d terms)" % len(self.terms)


def dumbbell_to_theta(d: DumbbellTerm) -> ThetaVector:
    """Core-change identity: a dumbbell equals a sum of two theta generators.

    Opening the handle of the dumbbell by the tree relation at its bar gives
    Theta(t,u,v,w) plus Theta(vbar,u,tbar,w), antipode signs included.
    """
    out = ThetaVector()
    out.add(d.t, d.u, d.v, d.w)
    s = ONE if (len(d.t) + len(d.v)) % 2 == 0 else -ONE
    out.add(_rev(d.v), d.u, _rev(d.t), d.w, s)
    return out


# ---------------------------------------------------------------------------
# Relation families and the presented quotient


def _split4(word: Word):
    m = len(word)
    for i in range(m + 1):
        for j in range(i, m + 1):
            for k in range(j, m + 1):
                yield word[:i], word[i:j], word[j:k], word[k:]


def _weight_letters(weight: tuple, g: int) -> List[tuple]:
    syms = symbols(g)
    if len(weight) != 2 * g:
        raise ValueError("weight length must be 2*genus")
    out: List[tuple] = []
    for s, c in zip(syms, weight):
        out.extend([s] * c)
    return out


def _slot_tuples(m: int, g: int, weight: Optional[tuple] = None):
    if weight is not None:
        letters = _weight_letters(weight, g)
        if len(letters) != m:
            raise ValueError("weight size does not match hair degree")
        for perm in sorted(set(permutations(letters))):
            yield from _split4(perm)
    else:
        for word in all_words(m, g):
            yield from _split4(word)


def hb_element(t: Word, u: Word, v: Word, w: Word, a: tuple) -> ThetaVector:
    """Handle balance: moving one hair around the four arc ends sums to zero."""
    out = ThetaVector()
    out.add(t, u, v, w + (a,))
    out.add(t, u, (a,) + v, w, -ONE)
    out.add(t, (a,) + u, v, w, -ONE)
    out.add(t + (a,), u, v, w)
    return out


def _coproduct_splits(word: Word):
    m = len(word)
    for mask in range(1 << m):
        left = tuple(word[i] for i in range(m) if mask >> i & 1)
        right = tuple(word[i] for i in range(m) if not mask >> i & 1)
        yield left, right


def gc3_element(t: Word, u: Word, v: Word, w: Word) -> ThetaVector:
    """The generalized third relation attached to one slot tuple.

    The three solidifications of the three-path preimage expand, in theta
    coordinates, to the generator itself plus two deconcatenation sums with
    antipode signs; the total is a relation in the two-loop quotient.
    """
    out = ThetaVector()
    out.add(t, u, v, w)
    for a_part, b_part in _coproduct_splits(t):
        for c_part, d_part in _coproduct_splits(v):
            s = ONE if (len(a_part) + len(c_part)) % 2 == 0 else -ONE
            out.add(_rev(a_part), b_part + u, _rev(c_part), w + d_part, s)
    for a_part, b_part in _coproduct_splits(u):
        for c_part, d_part in _coproduct_splits(w):
            s = ONE if (len(a_part) + len(c_part)) % 2 == 0 else -ONE
            out.add(t + b_part, _rev(a_part), d_part + v, _rev(c_part), s)
    return out


_INDEX_CACHE: Dict[tuple, List[ThetaTerm]] = {}
_REL_CACHE: Dict[tuple, SubspaceBasis] = {}


def theta_index(m: int, g: int, weight: Optional[tuple] = None) -> List[ThetaTerm]:
    """Sorted canonical theta terms of the given hair degree (or weight block)."""
    key = (m, g, weight)
    if key not in _INDEX_CACHE:
        out = set()
        for t, u, v, w in _slot_tuples(m, g, weight):
            _, rep = canonical_theta(t, u, v, w)
            if rep is not None:
                out.add(rep)
        _INDEX_CACHE[key] = sorted(out)
    return _INDEX_CACHE[key]


def _theta_coords(vec: ThetaVector, pos: Dict[ThetaTerm, int]) -> dict:
    return {pos[term]: c for term, c in vec.terms.items()}


def theta_relations(m: int, g: int, weight: Optional[tuple] = None) -> SubspaceBasis:
    """Echelon span of the handle-balance and third-relation vectors.

    Coordinates refer to ``theta_index(m, g, weight)``; the core symmetries
    are structural (terms are canonical) and need no rows.
    """
    key = (m, g, weight)
    if key in _REL_CACHE:
        return _REL_CACHE[key]
    index = theta_index(m, g, weight)
    pos = {term: i for i, term in enumerate(index)}
    rows = []
    if m >= 1:
        if weight is not None:
            sub_items = []
            for i, c in enumerate(weight):
                if c:
                    sub = list(weight)
                    sub[i] -= 1
                    sub_items.append((symbols(g)[i], tuple(sub)))
            for a, sub in sub_items:
                for tup in _slot_tuples(m - 1, g, sub):
                    rows.append(_theta_coords(hb_element(*tup, a), pos))
        else:
            for a in symbols(g):
                for tup in _slot_tuples(m - 1, g):
                    rows.append(_theta_coords(hb_element(*tup, a), pos))
    for tup in _slot_tuples(m, g, weight):
        rows.append(_theta_coords(gc3_element(*tup), pos))
    result = echelonize((r for r in rows if r), len(index))
    _REL_CACHE[key] = result
    return result


def two_loop_dim(m: int, g: int, weight: Optional[tuple] = None) -> int:
    """Dimension of the presented two-loop quotient in one hair degree."""
    return len(theta_index(m, g, weight)) - theta_relations(m, g, weight).rank


def top_restrict_two_loop(m: int, g: int) -> int:
    """Harmonic-part dimension of the two-loop quotient at hair degree m."""
    index = theta_index(m, g)
    rels = theta_relations(m, g)
    if m == 0:
        return len(index) - rels.rank
    pos = {term: i for i, term in enumerate(index)}
    ech = Echelon()
    for row in rels.rows:
        ech.add(row)
    count = 0
    for hv in harmonic_vectors(m, g):
        for i in range(m + 1):
            for j in range(i, m + 1):
                for k in range(j, m + 1):
                    vec = ThetaVector(g)
                    for word, c in hv.terms.items():
                        vec.add(word[:i], word[i:j], word[j:k], word[k:], c)
                    row = _theta_coords(vec, pos)
                    if row and ech.add(row):
                        count += 1
    return count


# ---------------------------------------------------------------------------
# Graph-side generators


def theta_tree(t: Word, u: Word, v: Word, w: Word):
    """The one-tree encoding of a theta-core generator.

    Dotted edge 1 is the left vertical, edge 2 the right; t hangs below the
    left arc (first letter outermost), u below the right (first letter
    innermost), v above the left (first letter innermost), w above the right
    (first letter innermost).
    """
    lb = e_slot(1, 0)
    for x in t:
        lb = ("V", lb, h_slot(x))
    rb = e_slot(2, 0)
    for x in reversed(u):
        rb = ("V", h_slot(x), rb)
    rt = e_slot(2, 1)
    for x in w:
        rt = ("V", rt, h_slot(x))
    body = ("V", ("V", lb, rb), rt)
    for x in v:
        body = ("V", body, h_slot(x))
    return (e_slot(1, 1), body)


def theta_graph(term, g: int, coeff=ONE) -> GraphVector:
    """Graph vector of one theta generator."""
    t, u, v, w = term
    return GraphVector.single([theta_tree(t, u, v, w)], g, coeff=coeff)


def theta_vector_graph(vec: ThetaVector, g: int) -> GraphVector:
    out = GraphVector(g)
    for term, c in vec.terms.items():
        out.add_graph([theta_tree(*term)], c)
    return out


def dumbbell_tree(t: Word, u: Word, v: Word, w: Word):
    """One-tree encoding of a dumbbell-core generator.

    Two cycles (dotted edges 1 and 2) joined by a solid bar; t, v decorate
    the left cycle below/above, u, w the right.
    """
    lb = e_slot(1, 0)
    for x in t:
        lb = ("V", lb, h_slot(x))
    rb = e_slot(2, 0)
    for x in reversed(u):
        rb = ("V", h_slot(x), rb)
    rt = e_slot(2, 1)
    for x in w:
        rt = ("V", rt, h_slot(x))
    core = ("V", lb, ("V", rb, rt))
    for x in v:
        core = ("V", core, h_slot(x))
    return (e_slot(1, 1), core)


def dumbbell_graph(term, g: int, coeff=ONE) -> GraphVector:
    t, u, v, w = term
    return GraphVector.single([dumbbell_tree(t, u, v, w)], g, coeff=coeff)


def _theta_R_trees(t: Word, u: Word, v: Word, w: Word):
    """Two-tree preimage whose three solidifications give the relation image.

    The trees share three dotted edges (left, right, middle); summing the
    solidification of each connecting edge realizes the three-picture sum.
    """
    rb = e_slot(2, 0)
    for x in reversed(u):
        rb = ("V", h_slot(x), rb)
    x1 = ("V", rb, e_slot(3, 0))
    for x in reversed(t):
        x1 = ("V", h_slot(x), x1)
    t1 = (e_slot(1, 0), x1)
    rt = e_slot(2, 1)
    for x in w:
        rt = ("V", rt, h_slot(x))
    x2 = ("V", e_slot(3, 1), rt)
    for x in v:
        x2 = ("V", x2, h_slot(x))
    t2 = (e_slot(1, 1), x2)
    return [t1, t2]


def theta_R_graph(t: Word, u: Word, v: Word, w: Word, g: int) -> GraphVector:
    """Graph-level relation generator: sum of the three solidifications."""
    pair = GraphVector.single(_theta_R_trees(t, u, v, w), g, ordered=True)
    return beta_power(pair)


# ---------------------------------------------------------------------------
# Explicit tripod-chain preimages of the relation generators


def _ladder_trees(t: Word, u: Word):
    """Tripod chain whose iterated solidification hits the (t,u,1,1) generator.

    One bottom-center tripod, a chain of hair-carrying tripods to each side,
    and a top tripod collecting the three vertical dotted edges.
    """
    nt, nu = len(t), len(u)
    E_L, E_R, E_C = 1, 2, 3

    def re(i):
        return 10 + i

    def le(j):
        return 20 + j

    west = e_slot(le(1), 0) if nt else e_slot(E_L, 0)
    east = e_slot(re(1), 0) if nu else e_slot(E_R, 0)
    trees = [(e_slot(E_C, 0), ("V", west, east))]
    for i in range(1, nu + 1):
        out = e_slot(re(i + 1), 0) if i < nu else e_slot(E_R, 0)
        trees.append((e_slot(re(i), 1), ("V", h_slot(u[i - 1]), out)))
    for j in range(1, nt + 1):
        out = e_slot(le(j + 1), 0) if j < nt else e_slot(E_L, 0)
        trees.append((e_slot(le(j), 1), ("V", out, h_slot(t[nt - j]))))
    trees.append((e_slot(E_C, 1), ("V", e_slot(E_R, 1), e_slot(E_L, 1))))
    return trees


def _ladder_correction_trees(t: Word, u: Word, a: tuple):
    """Chain with one extra far-left tripod carrying the hair a.

    Its solidification image is the correction term relating a top-left hair
    to an outermost bottom-left hair.
    """
    nt, nu = len(t), len(u)
    E_L, E_R, E_C = 1, 2, 3

    def re(i):
        return 10 + i

    def le(j):
        return 20 + j

    east = e_slot(re(1), 0) if nu else e_slot(E_R, 0)
    trees = [(e_slot(E_C, 0), ("V", e_slot(le(1), 0), east))]
    for i in range(1, nu + 1):
        out = e_slot(re(i + 1), 0) if i < nu else e_slot(E_R, 0)
        trees.append((e_slot(re(i), 1), ("V", h_slot(u[i - 1]), out)))
    for j in range(1, nt + 1):
        trees.append(
            (e_slot(le(j), 1), ("V", e_slot(le(j + 1), 0), h_slot(t[nt - j])))
        )
    trees.append((e_slot(E_C, 1), ("V", e_slot(E_R, 1), e_slot(E_L, 1))))
    trees.append((e_slot(le(nt + 1), 1), ("V", e_slot(E_L, 0), h_slot(a))))
    return trees


def theta_R_preimage(t: Word, u: Word, v: Word, w: Word, g: int) -> GraphVector:
    """An ordered tuple vector whose full solidification equals the generator.

    Supported when at most one hair sits above the core (the chain
    construction handles a top hair through the correction identity); other
    shapes raise.
    """
    if not v and not w:
        return GraphVector.single(_ladder_trees(t, u), g, ordered=True)
    if len(v) == 1 and not w:
        a = v[0]
        base = GraphVector.single(_ladder_trees((a,) + t, u), g, ordered=True)
        corr = GraphVector.single(
            _ladder_correction_trees(t, u, a), g, ordered=True
        )
        return base - corr
    if len(w) == 1 and not v:
        m1 = len(t) + len(u) + 1
        s = ONE if m1 % 2 == 0 else -ONE
        return theta_R_preimage(_rev(u), _rev(t), w, (), g).scale(s)
    raise ValueError("chain preimages support at most one top hair")


# ---------------------------------------------------------------------------
# Graph-side relation span and membership


_R_CACHE: Dict[tuple, tuple] = {}


def _color_multiset_tuples(letters: Sequence[tuple]):
    for perm in sorted(set(permutations(letters))):
        yield from _split4(perm)


def _r_echelon(g: int, weight: tuple):
    """Basis, index and relation echelon (tree relations + generator images)
    for one weight block of the two-dotted-edge space."""
    key = (g, weight)
    if key in _R_CACHE:
        return _R_CACHE[key]
    m = sum(weight)
    n = m + 2
    basis = enumerate_basis(SpaceSpec(1, n, 2, g, weight=weight))
    index = {gph: i for i, gph in enumerate(basis)}
    ech = Echelon()
    for gph in basis:
        for rel in ihx_terms(gph):
            row = {index[h]: c for h, c in rel.terms.items()}
            if row:
                ech.add(row)
    letters = _weight_letters(weight, g)
    for tup in _color_multiset_tuples(letters):
        img = theta_R_graph(*tup, g)
        row = {index[h]: c for h, c in img.terms.items()}
        if row:
            ech.add(row)
    _R_CACHE[key] = (basis, index, ech)
    return _R_CACHE[key]


def R_membership(x: GraphVector) -> bool:
    """Whether x lies in the span of relation-generator images and tree
    relations (blockwise by hair coloring)."""
    if x.is_zero():
        return True
    blocks: Dict[tuple, Dict[HairyGraph, object]] = {}
    for gph, c in x.terms.items():
        if gph.k != 1 or gph.r != 2:
            raise ValueError("membership test needs one tree and two dotted edges")
        blocks.setdefault(gph.weight(), {})[gph] = c
    for wt, terms in blocks.items():
        _, index, ech = _r_echelon(x.genus, wt)
        coords = {index[gph]: c for gph, c in terms.items()}
        if not ech.contains(coords):
            return False
    return True


def two_loop_dim_direct(m: int, g: int) -> int:
    """Dimension of the two-loop quotient computed on graphs.

    Counts, blockwise over hair colorings, the basis of two-dotted-edge
    one-tree graphs modulo tree relations and relation-generator images.
    Dual route to ``two_loop_dim``.
    """
    total = 0
    seen = set()
    for word in all_words(m, g):
        wt = weight_of(word, g)
        if wt in seen:
            continue
        seen.add(wt)
        basis, _, ech = _r_echelon(g, wt)
        total += len(basis) - ech.rank
    return total


# ---------------------------------------------------------------------------
# Reduction of arbitrary two-loop graphs to theta generators


def _theta_candidates(letters: Sequence[tuple]) -> List[ThetaTerm]:
    out = set()
    for tup in _color_multiset_tuples(letters):
        _, rep = canonical_theta(*tup)
        if rep is not None:
            out.add(rep)
    return sorted(out)


def reduce_to_theta(x: GraphVector) -> ThetaVector:
    """Express a two-dotted-edge one-tree vector through theta generators.

    The result is exact modulo tree relations: the difference between the
    input and the image of the output lies in the tree-relation span.
    """
    for gph in x.terms:
        if gph.k != 1 or gph.r != 2:
            raise ValueError("reduction needs one tree and two dotted edges")
    out = ThetaVector(x.genus)
    blocks: Dict[tuple, Dict[HairyGraph, object]] = {}
    for gph, c in x.terms.items():
        blocks.setdefault(gph.weight(), {})[gph] = c
    for wt, terms in blocks.items():
        letters = _weight_letters(wt, x.genus)
        candidates = _theta_candidates(letters)
        images = [theta_graph(term, x.genus) for term in candidates]
        # quick path: the block is a scalar multiple of a single generator
        matched = False
        block_vec = GraphVector(x.genus, terms=dict(terms))
        for term, img in zip(candidates, images):
            if set(img.terms) == set(block_vec.terms) and img.terms:
                ref = next(iter(img.terms))
                ratio = block_vec.terms[ref] / img.terms[ref]
                if all(
                    block_vec.terms[k] == ratio * v for k, v in img.terms.items()
                ):
                    out.add(*term, coeff=ratio)
                    matched = True
                    break
        if matched:
            continue
        n = sum(wt) + 2
        basis = enumerate_basis(SpaceSpec(1, n, 2, x.genus, weight=wt))
        index = {gph: i for i, gph in enumerate(basis)}
        matrix = [{index[h]: c for h, c in img.terms.items()} for img in images]
        for gph in basis:
            for rel in ihx_terms(gph):
                row = {index[h]: c for h, c in rel.terms.items()}
                if row:
                    matrix.append(row)
        rhs = {index[gph]: c for gph, c in terms.items()}
        sol = solve(matrix, rhs)
        if sol is None:
            raise ValueError("vector is not reducible to theta generators")
        for j, c in sol.items():
            if j < len(candidates):
                out.add(*candidates[j], coeff=c)
    return out


# ---------------------------------------------------------------------------
# Degree-6 parameter evaluation


PARAMS = ("p", "q", "r", "s", "t", "u", "v")

# zone codes of the seven basic diagrams whose values name the parameters
J_CODES = ("40000", "20200", "10210", "30100", "20110", "02020", "03010")

# the linear condition every consistent evaluation satisfies: q+r+s+t+2v = 0
CONSTRAINT = {1: ONE, 2: ONE, 3: ONE, 4: ONE, 6: QQ(2)}


def thetacode_tree(code: str, colors: Sequence[tuple]):
    """Theta-core tree from a five-digit hair-zone code.

    The digits count hairs in the five zones read left to right along the
    flattened core: before the left junction, on the inner-left branch, on
    the middle backbone, on the inner-right branch, and after the right
    junction.  Colors are consumed in that reading order.
    """
    counts = [int(c) for c in code]
    if sum(counts) != len(colors):
        raise ValueError("zone code does not match color count")
    it = iter(colors)
    z1, z2, z3, z4, z5 = [[next(it) for _ in range(k)] for k in counts]
    branch = e_slot(2, 0)
    for c in z4:
        branch = ("V", branch, h_slot(c))
    cur = e_slot(1, 0)
    for c in reversed(z5):
        cur = ("V", h_slot(c), cur)
    cur = ("V", cur, branch)
    for c in reversed(z3):
        cur = ("V", h_slot(c), cur)
    left = e_slot(2, 1)
    for c in reversed(z2):
        left = ("V", h_slot(c), left)
    cur = ("V", cur, left)
    for c in reversed(z1):
        cur = ("V", h_slot(c), cur)
    return (e_slot(1, 1), cur)


def thetacode_graph(code: str, colors: Sequence[tuple], g: int) -> GraphVector:
    return GraphVector.single([thetacode_tree(code, colors)], g)


class _ReferenceBlock:
    """The distinct-four-color weight block of the degree-6 two-loop space,
    with an augmented echelon tagging each graph by its parameter form."""

    def __init__(self, g: int):
        if g < 2:
            raise ValueError("needs genus at least 2")
        self.g = g
        self.colors = tuple(sorted(symbols(g))[:4])
        self.weight = weight_of(self.colors, g)
        self.basis = enumerate_basis(SpaceSpec(1, 6, 2, g, weight=self.weight))
        self.index = {gph: i for i, gph in enumerate(self.basis)}
        self._rows: Dict[int, tuple] = {}  # pivot -> (row, tag)
        self.gauge = Echelon()  # forms of dependencies among tagged rows
        # insertion order fixes the one free gauge choice left by the tagged
        # diagrams' overdetermination; this order maximizes agreement with
        # the reviewed value table (tree relations first, then tagged rows
        # with the color permutations enumerated in descending order)
        for gph in self.basis:
            for rel in ihx_terms(gph):
                self._insert(self._coords(rel), {})
        for i, code in enumerate(J_CODES):
            for perm in sorted(permutations(range(4)), reverse=True):
                sgn = _perm_sign(perm)
                cols = [self.colors[p] for p in perm]
                gv = GraphVector.single([thetacode_tree(code, cols)], g)
                self._insert(self._coords(gv), {i: QQ(sgn)})

    def _coords(self, gv: GraphVector) -> dict:
        return {self.index[h]: c for h, c in gv.terms.items()}

    def _reduce(self, row: dict, tag: dict):
        row = dict(row)
        tag = dict(tag)
        while True:
            hit = sorted(c for c in row if c in self._rows)
            if not hit:
                return row, tag
            for c in hit:
                x = row.get(c)
                if not x:
                    continue
                prow, ptag = self._rows[c]
                for cc, y in prow.items():
                    s = row.get(cc, ZERO) - x * y
                    if s:
                        row[cc] = s
                    else:
                        row.pop(cc, None)
                for cc, y in ptag.items():
                    s = tag.get(cc, ZERO) - x * y
                    if s:
                        tag[cc] = s
                    else:
                        tag.pop(cc, None)

    def _insert(self, row: dict, tag: dict) -> None:
        row, tag = self._reduce(row, tag)
        if not row:
            if tag:
                self.gauge.add(tag)
            return
        p = min(row)
        inv = ONE / row[p]
        self._rows[p] = (
            {c: inv * x for c, x in row.items()},
            {c: inv * x for c, x in tag.items()},
        )

    def form_of(self, gv: GraphVector):
        """Parameter form of a block vector (tuple over the seven parameters)."""
        row, tag = self._reduce(self._coords(gv), {})
        if row:
            raise ValueError("vector is outside the tagged span")
        # the accumulated tag carries the sign of the reduction: form = -tag
        return tuple(-tag.get(i, ZERO) for i in range(7))


_BLOCK_CACHE: Dict[int, _ReferenceBlock] = {}


def reference_block(g: int = 2) -> _ReferenceBlock:
    if g not in _BLOCK_CACHE:
        _BLOCK_CACHE[g] = _ReferenceBlock(g)
    return _BLOCK_CACHE[g]


def _substitute_colors(tree, mapping: Dict[tuple, tuple]):
    if is_slot(tree[0]):

        def walk(node):
            if is_slot(node):
                if node[0] == "h":
                    return h_slot(mapping[node[1]])
                return node
            return ("V", walk(node[1]), walk(node[2]))

        return (walk(tree[0]), walk(tree[1]))
    raise ValueError("expected a rooted tree")


def recolor_graph(x: GraphVector, mapping: Dict[tuple, tuple], g: int) -> GraphVector:
    """Apply an injective color substitution, re-canonicalizing at genus g."""
    out = GraphVector(g, x.ordered)
    for gph, c in x.terms.items():
        out.add_graph([_substitute_colors(t, mapping) for t in gph.trees], c)
    return out


def _block_form(x_terms: Dict[HairyGraph, object], genus: int):
    """Parameter form of one distinct-four-color block, via substitution into
    the reference block at genus 2."""
    block = reference_block(2)
    sample = next(iter(x_terms))
    colors = sorted(sample.colors())
    if len(set(colors)) != 4:
        raise ValueError("block must carry four distinct hair colors")
    mapping = dict(zip(colors, block.colors))
    sub = GraphVector(genus, terms=dict(x_terms))
    moved = recolor_graph(sub, mapping, 2)
    return block.form_of(moved)


def k_eval(x: GraphVector):
    """Coefficient form of a four-distinct-hair degree-6 vector over
    (p, q, r, s, t, u, v)."""
    form = [ZERO] * 7
    if x.is_zero():
        return tuple(form)
    blocks: Dict[tuple, Dict[HairyGraph, object]] = {}
    for gph, c in x.terms.items():
        if gph.k != 1 or gph.r != 2 or gph.n != 6:
            raise ValueError("evaluation needs degree-6 two-loop graphs")
        blocks.setdefault(gph.weight(), {})[gph] = c
    for terms in blocks.values():
        f = _block_form(terms, x.genus)
        for i in range(7):
            form[i] += f[i]
    return tuple(form)


def pi_eval(params, x: GraphVector) -> TensorVector:
    """Alternating evaluation of a degree-6 two-loop vector.

    ``params`` is a seven-tuple over (p,q,r,s,t,u,v) satisfying the
    consistency condition q+r+s+t+2v=0; the output is supported on sorted
    four-letter wedge words.
    """
    params = tuple(QQ(p) for p in params)
    if len(params) != 7:
        raise ValueError("seven parameters required")
    if sum(params[i] * c for i, c in CONSTRAINT.items()) != 0:
        raise ValueError("parameters violate the consistency condition")
    out = TensorVector()
    if x.is_zero():
        return out
    blocks: Dict[tuple, Dict[HairyGraph, object]] = {}
    for gph, c in x.terms.items():
        if gph.k != 1 or gph.r != 2 or gph.n != 6:
            raise ValueError("evaluation needs degree-6 two-loop graphs")
        blocks.setdefault(gph.weight(), {})[gph] = c
    for terms in blocks.values():
        sample = next(iter(terms))
        colors = sorted(sample.colors())
        if len(set(colors)) != 4:
            continue  # repeated colors wedge to zero
        f = _block_form(terms, x.genus)
        val = sum((f[i] * params[i] for i in range(7)), ZERO)
        if val:
            key = tuple(colors)
            s = out.terms.get(key, ZERO) + val
            if s:
                out.terms[key] = s
            else:
                out.terms.pop(key, None)
    return out


def k_table() -> Dict[str, Dict[str, int]]:
    """Reviewed golden table: zone codes mapped to parameter forms."""
    import json
    from importlib import resources

    data = json.loads(
        resources.files("hlg").joinpath("templates/theta_values.json").read_text()
    )
    return data["values"]


def factorization_conditions(g: int = 2) -> SubspaceBasis:
    """Parameter tuples whose evaluation kills every relation-generator image.

    Rows are the consistency condition plus the forms of all relation
    generators on four distinct colors; the result is the nullspace in the
    seven-dimensional parameter space.
    """
    block = reference_block(g)
    rows = [dict(CONSTRAINT)]
    seen = set()
    for tup in _color_multiset_tuples(block.colors):
        img = theta_R_graph(*tup, g)
        if img.is_zero():
            continue
        form = block.form_of(img)
        if not any(form):
            continue
        if form in seen:
            continue
        seen.add(form)
        rows.append({i: c for i, c in enumerate(form) if c})
    columns = [
        {ri: row[j] for ri, row in enumerate(rows) if row.get(j)}
        for j in range(7)
    ]
    return nullspace(columns)
