"""Trace maps on hairy Lie graphs, and the one-loop normal form.

Implements the dotted-edge traces on tree graphs, the solidification map
``beta`` on ordered tuples and its iterate, the left-nested bracket, the
subalgebra generated by degree one, and the reduction of one-loop graphs to
wheel words modulo the dihedral identifications.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Tuple

from .graphs import (
    GraphVector,
    HairyGraph,
    SpaceSpec,
    bracket_h,
    canonicalize,
    e_slot,
    enumerate_basis,
    h_slot,
    ihx_terms,
    is_slot,
    leaf_paths,
    reroot,
    replace_leaf,
    tree_slots,
)
from .linalg import Echelon, ONE, SubspaceBasis, ZERO, echelonize
from .tensor import (
    TensorVector,
    Word,
    harmonic_vectors,
    pairing,
    sp_weight,
)

MAX_BRACKET_IMAGES = 2_000_000


# ---------------------------------------------------------------------------
# Leaf bookkeeping


def _replace_slots(tree, mapping: Dict[tuple, tuple]):
    """Replace the leaf slots at the given paths (as from leaf_paths)."""
    root, body = tree
    if () in mapping:
        root = mapping[()]

    def walk(b, path):
        if is_slot(b):
            return mapping.get(path, b)
        return ("V", walk(b[1], path + (1,)), walk(b[2], path + (2,)))

    return (root, walk(body, (0,)))


def _matchings(indices: List[int], size: int):
    """All unordered sets of ``size`` disjoint (low, high) pairs."""
    if size == 0:
        yield ()
        return
    if len(indices) < 2 * size:
        return
    first = indices[0]
    rest = indices[1:]
    for pos, partner in enumerate(rest):
        remaining = rest[:pos] + rest[pos + 1 :]
        for tail in _matchings(remaining, size - 1):
            yield ((first, partner),) + tail
    # matchings that skip `first` entirely are not allowed at full size but
    # are allowed when there are spare leaves
    if len(indices) - 1 >= 2 * size:
        for tail in _matchings(rest, size):
            yield tail


def graph_sp_weight(gph: HairyGraph) -> tuple:
    return sp_weight(tuple(gph.colors()), gph.genus)


# ---------------------------------------------------------------------------
# Traces


def trace_r(x: GraphVector, r: int) -> GraphVector:
    """Add ``r`` directed dotted edges in all unordered ways.

    Each term of ``x`` must be a single dotless tree.  For every unordered
    set of ``r`` disjoint leaf pairs, the pair colorings are removed, the
    product of their pairings becomes a coefficient, and a dotted edge is
    directed from the lower-indexed leaf of each pair.
    """
    if r < 0:
        raise ValueError("negative number of dotted edges")
    if r == 0:
        return x
    out = GraphVector(x.genus, x.ordered)
    for gph, c in x.terms.items():
        if gph.k != 1 or gph.r != 0:
            raise ValueError("trace_r needs one-tree dotless inputs")
        if r > gph.n // 2 + 1:
            raise ValueError(
                f"cannot add {r} dotted edges to a degree {gph.n} tree"
            )
        tree = gph.trees[0]
        leaves = leaf_paths(tree)
        for matching in _matchings(list(range(len(leaves))), r):
            coeff = c
            mapping: Dict[tuple, tuple] = {}
            for eid, (i, j) in enumerate(sorted(matching), start=1):
                coeff *= pairing(leaves[i][1][1], leaves[j][1][1], x.genus)
                if not coeff:
                    break
                mapping[leaves[i][0]] = e_slot(eid, 0)
                mapping[leaves[j][0]] = e_slot(eid, 1)
            if not coeff:
                continue
            out.add_graph([_replace_slots(tree, mapping)], coeff)
    return out


def trace_ord(xs: List[GraphVector]) -> GraphVector:
    """Add dotted edges of every size to an ordered tuple of tripods."""
    if not xs:
        raise ValueError("empty tripod tuple")
    g = xs[0].genus
    out = GraphVector(g, ordered=True)
    for gphs_coeffs in product(*(x.terms.items() for x in xs)):
        coeff = ONE
        trees = []
        for gph, c in gphs_coeffs:
            if gph.k != 1 or gph.r != 0 or gph.n != 1:
                raise ValueError("trace_ord needs tripod inputs")
            coeff *= c
            trees.append(gph.trees[0])
        leaves = [
            (ti, path, slot)
            for ti, tree in enumerate(trees)
            for path, slot in leaf_paths(tree)
        ]
        for size in range(len(leaves) // 2 + 1):
            for matching in _matchings(list(range(len(leaves))), size):
                cc = coeff
                mappings: List[Dict[tuple, tuple]] = [{} for _ in trees]
                for eid, (i, j) in enumerate(sorted(matching), start=1):
                    ti, pi, si = leaves[i]
                    tj, pj, sj = leaves[j]
                    cc *= pairing(si[1], sj[1], g)
                    if not cc:
                        break
                    mappings[ti][pi] = e_slot(eid, 0)
                    mappings[tj][pj] = e_slot(eid, 1)
                if not cc:
                    continue
                new_trees = [
                    _replace_slots(t, m) for t, m in zip(trees, mappings)
                ]
                out.add_graph(new_trees, cc)
    return out


def _tree_edge_slots(tree) -> Dict[int, Tuple[tuple, int]]:
    """Map edge id -> (leaf path, role) for the dotted ends in one tree."""
    out: Dict[int, Tuple[tuple, int]] = {}
    for path, slot in leaf_paths(tree):
        if slot[0] == "e":
            out[slot[1]] = (path, slot[2])
    return out


def _glue(t_first, path_first, t_second, path_second):
    """Replace the leaf of ``t_first`` at ``path_first`` by ``t_second``
    re-rooted at ``path_second``."""
    if path_first == ():
        alt = next(p for p, _ in leaf_paths(t_first) if p != ())
        target = tree_slots(t_first)[0]
        t_first = reroot(t_first, alt)
        path_first = next(
            p for p, s in leaf_paths(t_first) if p != () and s == target
        )
    return replace_leaf(t_first, path_first, reroot(t_second, path_second)[1])


def beta(x: GraphVector) -> GraphVector:
    """Solidify, in all ways, a dotted edge joining the first two trees.

    Edges are first oriented away from the first tree (a reversal costs a
    sign); the merged tree takes the first position and the others keep
    their order.  Terms with no such edge contribute zero.
    """
    out = GraphVector(x.genus, ordered=True)
    for gph, c in x.terms.items():
        if gph.k < 2:
            raise ValueError("beta needs at least two trees")
        t0, t1 = gph.trees[0], gph.trees[1]
        ends0 = _tree_edge_slots(t0)
        ends1 = _tree_edge_slots(t1)
        for eid in sorted(set(ends0) & set(ends1)):
            path0, role0 = ends0[eid]
            path1, _role1 = ends1[eid]
            sign = ONE if role0 == 0 else -ONE
            merged = _glue(t0, path0, t1, path1)
            out.add_graph([merged] + list(gph.trees[2:]), c * sign)
    return out


def beta_power(x: GraphVector) -> GraphVector:
    """Apply ``beta`` until one tree remains; returns an unordered vector."""
    cur = x
    while cur.terms and next(iter(cur.terms)).k > 1:
        cur = beta(cur)
    out = GraphVector(x.genus, ordered=False)
    for gph, c in cur.terms.items():
        out.add_graph(list(gph.trees), c)
    return out


def br(xs: List[GraphVector]) -> GraphVector:
    """Left-nested bracket of an ordered list of tree vectors."""
    if not xs:
        raise ValueError("empty bracket")
    acc = xs[0]
    for x in xs[1:]:
        acc = bracket_h(acc, x)
    return acc


# ---------------------------------------------------------------------------
# The subalgebra generated by degree one


def _sp_blocks(basis: List[HairyGraph]):
    blocks: Dict[tuple, List[int]] = {}
    for i, gph in enumerate(basis):
        blocks.setdefault(graph_sp_weight(gph), []).append(i)
    return blocks


def _block_echelons(spec: SpaceSpec, basis: List[HairyGraph]):
    """Per-sp-weight echelons seeded with the IHX relation rows."""
    index = {gph: i for i, gph in enumerate(basis)}
    echelons: Dict[tuple, Echelon] = {}
    for gph in basis:
        wt = graph_sp_weight(gph)
        ech = echelons.setdefault(wt, Echelon())
        for rel in ihx_terms(gph):
            row = {index[h]: c for h, c in rel.terms.items()}
            if row:
                ech.add(row)
    return index, echelons


def m_space(n: int, g: int, basis: Optional[List[HairyGraph]] = None) -> SubspaceBasis:
    """Span of the degree-one-generated part joined with the IHX relations.

    Returned in coordinates of ``enumerate_basis(SpaceSpec(1, n, 0, g))``, so
    ``len(basis) - rank`` is the dimension of the quotient of the degree-``n``
    kernel part by its degree-one-generated subalgebra.
    """
    if n < 1:
        raise ValueError("degree must be positive")
    tripods = [
        GraphVector(g, terms={gph: ONE})
        for gph in enumerate_basis(SpaceSpec(1, 1, 0, g))
    ]
    reps = tripods
    work = 0
    for level in range(2, n + 1):
        lvl_spec = SpaceSpec(1, level, 0, g)
        lvl_basis = (
            basis if (level == n and basis is not None) else enumerate_basis(lvl_spec)
        )
        index, echelons = _block_echelons(lvl_spec, lvl_basis)
        new_reps: List[GraphVector] = []
        for v in reps:
            for t in tripods:
                work += 1
                if work > MAX_BRACKET_IMAGES:
                    raise RuntimeError("bracket image budget exceeded")
                w = bracket_h(v, t)
                if w.is_zero():
                    continue
                row = {index[h]: c for h, c in w.terms.items()}
                wt = graph_sp_weight(next(iter(w.terms)))
                if echelons.setdefault(wt, Echelon()).add(row):
                    new_reps.append(w)
        reps = new_reps
        if level == n:
            rows = [row for ech in echelons.values() for row in ech.reduced_rows()]
            return echelonize(rows, len(lvl_basis))
    # n == 1: the whole degree-one part is generated; no IHX in degree one
    lvl_basis = basis if basis is not None else enumerate_basis(SpaceSpec(1, 1, 0, g))
    index = {gph: i for i, gph in enumerate(lvl_basis)}
    rows = []
    for v in reps:
        rows.append({index[h]: c for h, c in v.terms.items()})
    return echelonize(rows, len(lvl_basis))


# ---------------------------------------------------------------------------
# One-loop graphs: wheel words modulo dihedral identifications


def wheel_tree(word: Word):
    """The one-loop graph of a wheel word: a cycle carrying the hairs in
    reading order, closed by dotted edge 1 directed into the first hair."""
    if not word:
        raise ValueError("empty wheel word")
    body = e_slot(1, 0)
    for x in reversed(word):
        body = ("V", body, h_slot(x))
    return (e_slot(1, 1), body)


def cycle_tree(slots: List[tuple]):
    """Like :func:`wheel_tree` but with arbitrary leaf slots on the cycle."""
    if not slots:
        raise ValueError("empty cycle")
    body = e_slot(1, 0)
    for s in reversed(slots):
        body = ("V", body, s)
    return (e_slot(1, 1), body)


def _concat(x: TensorVector, y: TensorVector) -> TensorVector:
    out = TensorVector(genus=x.genus)
    for wx, cx in x.terms.items():
        for wy, cy in y.terms.items():
            out += TensorVector({wx + wy: cx * cy}, x.genus)
    return out


def _branch_tensor(body, g: int) -> TensorVector:
    """Expansion of a hanging branch into hair words (nested commutators)."""
    if is_slot(body):
        if body[0] != "h":
            raise ValueError("dotted end inside a one-loop branch")
        return TensorVector.from_word((body[1],), g)
    left = _branch_tensor(body[1], g)
    right = _branch_tensor(body[2], g)
    return _concat(left, right) - _concat(right, left)


def _contains_slot(body, slot) -> bool:
    if is_slot(body):
        return body == slot
    return _contains_slot(body[1], slot) or _contains_slot(body[2], slot)


def _loop_word_vector(tree, g: int) -> TensorVector:
    """Read a one-dotted-edge tree as a combination of wheel words.

    Starting at the head of the dotted edge, walk the unique path to its
    tail; each branch hanging off the path contributes its expansion, with a
    sign when the branch sits on the continuation's left.
    """
    slots = [s for s in tree_slots(tree) if s[0] == "e"]
    if len(slots) != 2:
        raise ValueError("one-loop reduction needs exactly one dotted edge")
    eid = slots[0][1]
    head, tail = e_slot(eid, 1), e_slot(eid, 0)
    path = next(p for p, s in leaf_paths(tree) if s == head)
    root, body = reroot(tree, path)
    vec = TensorVector({(): ONE}, g)
    cur = body
    while not is_slot(cur):
        if _contains_slot(cur[1], tail):
            cont, branch, sign = cur[1], cur[2], ONE
        else:
            cont, branch, sign = cur[2], cur[1], -ONE
        vec = _concat(vec, _branch_tensor(branch, g)).scale(sign)
        cur = cont
    if cur != tail:
        raise ValueError("dotted edge ends lie in different trees")
    return vec


def _normalize_word(w: Word, g: int):
    """Dihedral normal form of a wheel word: (representative, sign) or None.

    Hair rotation is the sign-free slide of a hair across the dotted edge;
    reflections are graph isomorphisms, with signs supplied by
    canonicalization.  Length-one wheels vanish (adjacent dotted ends).
    """
    m = len(w)
    if m == 0:
        raise ValueError("empty wheel word")
    if m == 1:
        return None
    best: Optional[Tuple[object, HairyGraph]] = None
    conflict = False
    for rot in range(m):
        rw = w[rot:] + w[:rot]
        s, canon = canonicalize([wheel_tree(rw)], g)
        if canon is None:
            return None
        if best is None or canon.trees < best[1].trees:
            best = (s, canon)
            conflict = False
        elif canon == best[1] and s != best[0]:
            conflict = True
    if conflict:
        return None
    s, canon = best
    rep_vec = _loop_word_vector(canon.trees[0], g)
    (rep_word, rep_sign), = rep_vec.terms.items()
    return rep_word, s * rep_sign


@dataclass
class OneLoopClass:
    """An element of the one-loop quotient in wheel-word coordinates."""

    genus: int
    terms: Dict[Word, object]

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "OneLoopClass") -> "OneLoopClass":
        if self.genus != other.genus:
            raise ValueError("genus mismatch")
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, ZERO) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return OneLoopClass(self.genus, out)

    def scale(self, coeff) -> "OneLoopClass":
        if not coeff:
            return OneLoopClass(self.genus, {})
        return OneLoopClass(self.genus, {w: coeff * c for w, c in self.terms.items()})

    def __eq__(self, other):
        return (
            isinstance(other, OneLoopClass)
            and self.genus == other.genus
            and self.terms == other.terms
        )


def reduce_words(vec: TensorVector) -> OneLoopClass:
    """Dihedral reduction of a combination of wheel words."""
    out: Dict[Word, object] = {}
    for w, c in vec.terms.items():
        norm = _normalize_word(w, vec.genus)
        if norm is None:
            continue
        rep, sign = norm
        s = out.get(rep, ZERO) + sign * c
        if s:
            out[rep] = s
        else:
            out.pop(rep, None)
    return OneLoopClass(vec.genus, out)


def one_loop_reduce(x: GraphVector) -> OneLoopClass:
    """Normal form of a one-tree, one-dotted-edge vector as wheel words."""
    vec = TensorVector(genus=x.genus)
    for gph, c in x.terms.items():
        if gph.k != 1 or gph.r != 1:
            raise ValueError("one_loop_reduce needs one tree and one dotted edge")
        vec += _loop_word_vector(gph.trees[0], x.genus).scale(c)
    return reduce_words(vec)


# ---------------------------------------------------------------------------
# Top-level (harmonic) restriction


def _top_restrict_one_loop(m: int, g: int) -> int:
    if m == 0:
        return 0
    ech = Echelon()
    for hv in harmonic_vectors(m, g):
        cls = reduce_words(hv)
        if cls.terms:
            ech.add(dict(cls.terms))
    return ech.rank


def _all_tripod_tuples(k: int, r_y: int, m: int, g: int):
    """Ordered ``k``-tuples of tripods with ``r_y`` dotted edges and ``m``
    hairs, one representative per leaf pairing and coloring."""
    from .tensor import symbols

    positions = [(ti, li) for ti in range(k) for li in range(3)]
    if len(positions) != m + 2 * r_y:
        raise ValueError("inconsistent tripod tuple parameters")

    def pairings(avail, count):
        if count == 0:
            yield (), tuple(avail)
            return
        first = avail[0]
        rest = avail[1:]
        for pos, partner in enumerate(rest):
            remaining = rest[:pos] + rest[pos + 1 :]
            for pairs, free in pairings(remaining, count - 1):
                yield ((first, partner),) + pairs, free

    syms = sorted(symbols(g))
    for pairs, free in pairings(positions, r_y):
        for colors in product(syms, repeat=len(free)):
            slots: Dict[tuple, tuple] = {}
            for eid, (p, q) in enumerate(pairs, start=1):
                slots[p] = e_slot(eid, 0)
                slots[q] = e_slot(eid, 1)
            for p, c in zip(free, colors):
                slots[p] = h_slot(c)
            trees = [
                (slots[(ti, 0)], ("V", slots[(ti, 1)], slots[(ti, 2)]))
                for ti in range(k)
            ]
            yield trees


def _top_restrict_general(spec: SpaceSpec) -> int:
    """Harmonic-restricted top dimension via the solidification quotient."""
    g, r, m = spec.g, spec.r, spec.m
    n = spec.n
    basis = enumerate_basis(SpaceSpec(1, n, r, g))
    index = {gph: i for i, gph in enumerate(basis)}
    ech = Echelon()
    for gph in basis:
        for rel in ihx_terms(gph):
            row = {index[h]: c for h, c in rel.terms.items()}
            if row:
                ech.add(row)
    k = n
    r_y = m + 3 * r - 3
    for trees in _all_tripod_tuples(k, r_y, m, g):
        sign, canon = canonicalize(trees, g, ordered=True)
        if canon is None:
            continue
        img = beta_power(GraphVector(g, ordered=True, terms={canon: sign}))
        row = {index[h]: c for h, c in img.terms.items()}
        if row:
            ech.add(row)
    if m == 0:
        return len(basis) - ech.rank
    # harmonic-colored rows on top of the relation span
    image_rank = 0
    for row in _harmonic_generator_rows(spec, basis, index):
        if ech.add(row):
            image_rank += 1
    return image_rank


def _harmonic_generator_rows(spec: SpaceSpec, basis, index):
    """Rows spanning the harmonic-colored part of the one-tree space."""
    from .graphs import _labeled_trees, _substitute

    g, r, m = spec.g, spec.r, spec.m
    nleaves = m + 2 * r
    harmonics = harmonic_vectors(m, g)
    for tree in _labeled_trees(nleaves):
        for hv in harmonics:
            vec = GraphVector(g)
            for word, coeff in hv.terms.items():
                slots = [h_slot(s) for s in word] + [
                    e_slot(i // 2 + 1, i % 2) for i in range(2 * r)
                ]
                slot_map = {i: slots[i] for i in range(nleaves)}
                vec.add_graph(
                    [(slot_map[tree[0]], _substitute(tree[1], slot_map))],
                    coeff,
                )
            row = {index[h]: c for h, c in vec.terms.items()}
            if row:
                yield row


def top_restrict(spec: SpaceSpec) -> int:
    """Dimension of the top-level part of the quotient at the given shape.

    For one dotted edge this uses the wheel-word model; for two it defers to
    the theta-generator presentation; otherwise the solidification image is
    enumerated directly.
    """
    if spec.k != 1:
        raise ValueError("top_restrict needs one-tree spaces")
    if spec.r == 1:
        return _top_restrict_one_loop(spec.m, spec.g)
    if spec.r == 2:
        from .theta import top_restrict_two_loop

        return top_restrict_two_loop(spec.m, spec.g)
    return _top_restrict_general(spec)
