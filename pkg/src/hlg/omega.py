"""The loop-relation quotient of one-tree graphs, and the chord map.

The quotient imposes, on top of the tree relations, three families: a graph
vanishes when both ends of a dotted edge meet at one vertex (C1); a hair
slides across a dotted edge without sign (C2); and the three ways of
solidifying one of three dotted edges meeting at a tripod vertex sum to zero
(C3).  The chord map ``phi`` sends one-loop wheel classes to two-loop graphs.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .graphs import (
    GraphVector,
    HairyGraph,
    SpaceSpec,
    e_slot,
    enumerate_basis,
    h_slot,
    ihx_terms,
    is_slot,
    leaf_paths,
    reroot,
)
from .linalg import ONE, SubspaceBasis, echelonize, member
from .tensor import pairing
from .traces import (
    OneLoopClass,
    beta,
    beta_power,
    cycle_tree,
    one_loop_reduce,
    trace_r,
)


def _vertex_leg_sets(tree):
    """Slot legs per trivalent vertex (only leaf legs are listed)."""
    root, body = tree
    out = []

    def walk(node, legs_extra):
        legs = list(legs_extra)
        for child in (node[1], node[2]):
            if is_slot(child):
                legs.append(child)
        out.append(legs)
        for child in (node[1], node[2]):
            if not is_slot(child):
                walk(child, [])

    if is_slot(body):
        return []
    walk(body, [root])
    return out


def _has_c1_pair(gph: HairyGraph) -> bool:
    for tree in gph.trees:
        for legs in _vertex_leg_sets(tree):
            eids = [s[1] for s in legs if s[0] == "e"]
            if len(eids) != len(set(eids)):
                return True
    return False


def _c2_rows(gph: HairyGraph) -> List[GraphVector]:
    """Hair slides across each dotted edge, generated from the tail side."""
    out = []
    tree = gph.trees[0]
    ends: Dict[Tuple[int, int], tuple] = {}
    for path, slot in leaf_paths(tree):
        if slot[0] == "e":
            ends[(slot[1], slot[2])] = path
    for eid in sorted({e for e, _ in ends}):
        tail_path = ends[(eid, 0)]
        rt = reroot(tree, tail_path)
        tail, body = rt
        if is_slot(body):
            continue
        for hair_left in (True, False):
            vslot = body[1] if hair_left else body[2]
            rest = body[2] if hair_left else body[1]
            if not (is_slot(vslot) and vslot[0] == "h"):
                continue
            head = e_slot(eid, 1)
            if is_slot(rest) and rest == head:
                slid_body = ("V", vslot, head)
            else:
                slid_body = _replace_head(rest, head, vslot)
                if slid_body is None:
                    continue
            # always phrase the instance in the hair-after-tail form; the
            # mirrored configuration differs by the antisymmetry sign, which
            # canonicalization supplies
            rel = GraphVector(gph.genus, gph.ordered)
            rel.add_graph([(tail, ("V", vslot, rest))])
            rel.add_graph([(tail, slid_body)], -ONE)
            if not rel.is_zero():
                out.append(rel)
    return out


def _replace_head(body, head, vslot):
    """Replace the head leaf by a vertex carrying the hair then the head."""
    if is_slot(body):
        if body == head:
            return ("V", vslot, head)
        return None
    left = _replace_head(body[1], head, vslot)
    if left is not None:
        return ("V", left, body[2])
    right = _replace_head(body[2], head, vslot)
    if right is not None:
        return ("V", body[1], right)
    return None


def _flip_edge(body, eid):
    """Swap the roles of both ends of a dotted edge inside a body."""
    if is_slot(body):
        if body[0] == "e" and body[1] == eid:
            return e_slot(eid, 1 - body[2])
        return body
    return ("V", _flip_edge(body[1], eid), _flip_edge(body[2], eid))


def _c3_rows(gph: HairyGraph) -> List[GraphVector]:
    """Tripod-vertex relations: re-dot each of three meeting edges in turn.

    A vertex carrying the ends of two distinct dotted edges is split off as a
    tripod whose third leg becomes a fresh dotted edge; summing over all ways
    of solidifying one connecting edge gives a relation containing the
    original graph.
    """
    out = []
    tree = gph.trees[0]
    ends: Dict[tuple, tuple] = {slot: path for path, slot in leaf_paths(tree) if slot[0] == "e"}
    fresh = max((s[1] for s in ends), default=0) + 1
    seen_pairs = set()
    for s1 in sorted(ends):
        rt = reroot(tree, ends[s1])
        _, body = rt
        if is_slot(body):
            continue
        for s2_left in (True, False):
            s2 = body[1] if s2_left else body[2]
            rest = body[2] if s2_left else body[1]
            if not (is_slot(s2) and s2[0] == "e") or s2[1] == s1[1]:
                continue
            key = frozenset((s1, s2))
            if key in seen_pairs:
                continue
            seen_pairs.add(key)
            if is_slot(rest):
                continue  # no interior to carry the far ends
            # normalize: both meeting edges head-side at the tripod
            sign = ONE
            amb = rest
            t1, t2 = s1, s2
            if t1[2] == 0:
                amb = _flip_edge(amb, t1[1])
                t1 = e_slot(t1[1], 1)
                sign = -sign
            if t2[2] == 0:
                amb = _flip_edge(amb, t2[1])
                t2 = e_slot(t2[1], 1)
                sign = -sign
            # ambient tree rooted at the fresh tail; tripod keeps cyclic order
            ambient = (e_slot(fresh, 0), amb)
            if s2_left:
                tripod = (t1, ("V", t2, e_slot(fresh, 1)))
            else:
                tripod = (t1, ("V", e_slot(fresh, 1), t2))
            pair = GraphVector(
                gph.genus,
                ordered=True,
            )
            pair.add_graph([ambient, tripod], sign)
            if pair.is_zero():
                continue
            summed = beta(pair)
            rel = GraphVector(gph.genus, gph.ordered)
            for h, c in summed.terms.items():
                rel.add_graph(list(h.trees), c)
            if not rel.is_zero():
                out.append(rel)
    return out


_RELATION_CACHE: Dict[tuple, Tuple[List[HairyGraph], SubspaceBasis]] = {}


def omega_relations(
    spec: SpaceSpec, basis: Optional[List[HairyGraph]] = None
) -> SubspaceBasis:
    """Echelon span of the loop relations joined with the tree relations."""
    if spec.k != 1:
        raise ValueError("loop relations live in one-tree spaces")
    key = (spec.k, spec.n, spec.r, spec.g, spec.ordered, spec.weight)
    if basis is None and key in _RELATION_CACHE:
        return _RELATION_CACHE[key][1]
    if basis is None:
        basis = enumerate_basis(spec)
    index = {gph: i for i, gph in enumerate(basis)}
    rows = []
    for gph in basis:
        for rel in ihx_terms(gph):
            row = {index[h]: c for h, c in rel.terms.items()}
            if row:
                rows.append(row)
        if _has_c1_pair(gph):
            rows.append({index[gph]: ONE})
        if gph.r >= 1:
            for rel in _c2_rows(gph):
                rows.append({index[h]: c for h, c in rel.terms.items()})
        if gph.r >= 2:
            for rel in _c3_rows(gph):
                rows.append({index[h]: c for h, c in rel.terms.items()})
    result = echelonize(rows, len(basis))
    _RELATION_CACHE[key] = (basis, result)
    return result


def omega_is_zero(x: GraphVector) -> bool:
    """Whether a one-tree vector lies in the loop-relation span."""
    if x.is_zero():
        return True
    blocks: Dict[tuple, GraphVector] = {}
    for gph, c in x.terms.items():
        if gph.k != 1:
            raise ValueError("loop relations live in one-tree spaces")
        wt = gph.weight()
        blocks.setdefault(wt, GraphVector(x.genus, x.ordered))
        blocks[wt].terms[gph] = c
    for wt, vec in blocks.items():
        sample = next(iter(vec.terms))
        spec = SpaceSpec(1, sample.n, sample.r, x.genus, x.ordered, wt)
        key = (spec.k, spec.n, spec.r, spec.g, spec.ordered, spec.weight)
        rels = omega_relations(spec)
        basis = _RELATION_CACHE[key][0]
        index = {gph: i for i, gph in enumerate(basis)}
        coords = {index[gph]: c for gph, c in vec.terms.items()}
        if not member(rels, coords):
            return False
    return True


def tr_c(x: GraphVector, r: int) -> GraphVector:
    """Trace representative of the loop-quotient class (see trace_r).

    Unlike ``trace_r``, a tree too small to host ``r`` dotted edges
    contributes zero instead of raising.
    """
    kept = GraphVector(x.genus, x.ordered)
    for gph, c in x.terms.items():
        if r <= gph.n // 2 + 1:
            kept.terms[gph] = c
    return trace_r(kept, r)


def phi(cls: OneLoopClass) -> GraphVector:
    """Chord map on wheel words: close each pairing into a second loop.

    Each pair of positions contributes two graphs: the chord alone, and the
    chord with the cycle's dotted edge slid next to the first chosen hair.
    """
    g = cls.genus
    out = GraphVector(g)
    for word, c in cls.terms.items():
        n = len(word)
        for i in range(n):
            for j in range(i + 1, n):
                p = pairing(word[i], word[j], g)
                if not p:
                    continue
                slots = [h_slot(x) for x in word]
                slots[i] = e_slot(2, 0)
                slots[j] = e_slot(2, 1)
                out.add_graph([cycle_tree(slots)], c * p)
                rotated = slots[i + 1 :] + slots[: i + 1]
                out.add_graph([cycle_tree(rotated)], c * p)
    return out


def check_factorization(x: GraphVector) -> bool:
    """Whether the chord map carries the 1-loop trace to thrice the 2-loop one."""
    if x.is_zero():
        return True
    lhs = phi(one_loop_reduce(tr_c(x, 1)))
    rhs = tr_c(x, 2)
    return omega_is_zero(lhs - rhs.scale(3))


def refinement_check(x: GraphVector) -> bool:
    """Solidification images of ordered tuples die in the loop quotient."""
    return omega_is_zero(beta_power(x))
