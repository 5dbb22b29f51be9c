"""Hairy Lie graphs: canonical forms with signs, enumeration, relations.

A graph is a disjoint union of unitrivalent trees whose leaves either carry a
basis color of H ("hairs") or are endpoints of directed dotted edges.  Each
trivalent vertex carries a cyclic orientation; flipping it negates the graph,
as does reversing a dotted edge, and (in the unordered case) renumbering the
trees by a transposition.

Internal tree representation (leaf-rooted form):

    tree ::= (root_slot, body)
    body ::= slot | ('V', body, body)
    slot ::= ('h', symbol) | ('e', edge_id, role)     role: 0 = tail, 1 = head

The cyclic order at a vertex is (toward-root, left child, right child);
re-rooting only rotates these orders, so it is sign-free, while swapping the
two children of a vertex costs a sign.

The text template format writes a tree as ``T(x, y, z)`` for the three
subtrees at a chosen vertex in cyclic order, with nested vertices as
``T(x, y)``, hair slots as ``h:a1`` and dotted ends as ``d:3H`` / ``d:3T``
(head/tail of dotted edge 3).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Dict, List, Optional, Tuple

from .linalg import ONE, QQ, ZERO, SubspaceBasis, echelonize
from .lie import LieElement, lie_bracket
from .tensor import Symbol, pairing

HSlot = Tuple[str, Symbol]  # ('h', symbol)
ESlot = Tuple[str, int, int]  # ('e', edge_id, role)

MAX_CANON_BRANCHES = 40000


class CanonicalizationError(Exception):
    pass


def h_slot(symbol: Symbol) -> HSlot:
    return ("h", symbol)


def e_slot(edge_id: int, role: int) -> ESlot:
    return ("e", edge_id, role)


def is_slot(x) -> bool:
    return isinstance(x, tuple) and x and x[0] in ("h", "e")


# ---------------------------------------------------------------------------
# Basic tree surgery (leaf-rooted form)


def tree_slots(tree) -> list:
    """All leaf slots of a tree, root first then body DFS order."""
    root, body = tree
    out = [root]

    def walk(b):
        if is_slot(b):
            out.append(b)
        else:
            walk(b[1])
            walk(b[2])

    walk(body)
    return out


def tree_vertex_count(body) -> int:
    if is_slot(body):
        return 0
    return 1 + tree_vertex_count(body[1]) + tree_vertex_count(body[2])


def leaf_paths(tree) -> list:
    """(path, slot) pairs; path () is the root slot, else a tuple of 1/2 steps
    descending the body (1 = left child, 2 = right child)."""
    root, body = tree
    out = [((), root)]

    def walk(b, path):
        if is_slot(b):
            out.append((path, b))
        else:
            walk(b[1], path + (1,))
            walk(b[2], path + (2,))

    walk(body, ((0,)))
    # paths into the body start with a marker 0 to distinguish from the root
    return out


def _get(body, path):
    for step in path:
        body = body[step]
    return body


def _replace(body, path, new):
    if not path:
        return new
    step = path[0]
    if step == 1:
        return ("V", _replace(body[1], path[1:], new), body[2])
    return ("V", body[1], _replace(body[2], path[1:], new))


def reroot(tree, path):
    """Re-root the tree at the leaf addressed by path (from leaf_paths).

    Pure rotation of cyclic orders: no sign.
    """
    root, body = tree
    if path == ():
        return tree
    assert path[0] == 0
    steps = path[1:]
    above = root  # what the tree looks like from above the current vertex
    cur = body
    for step in steps:
        if is_slot(cur):
            raise ValueError("path walks through a leaf")
        if step == 1:
            above = ("V", cur[2], above)
            cur = cur[1]
        else:
            above = ("V", above, cur[1])
            cur = cur[2]
    if not is_slot(cur):
        raise ValueError("path does not end at a leaf")
    return (cur, above)


def replace_leaf(tree, path, new_body):
    """Replace the leaf at path by a body (used for gluing trees)."""
    root, body = tree
    if path == ():
        # new root side: re-root at some other leaf first
        raise ValueError("cannot replace the root slot directly; re-root first")
    return (root, _replace(body, path[1:], new_body))


def root_into(body, below):
    """Leaf-rooted tree whose root is the DFS-first leaf of ``body``, with
    ``below`` the subtree hanging from body's attachment vertex."""
    if is_slot(body):
        return (body, below)
    return root_into(body[1], ("V", body[2], below))


# ---------------------------------------------------------------------------
# Canonicalization


def _slot_token(slot):
    if slot[0] == "h":
        return ("h", slot[1])
    return ("E",)


def _body_candidates(body):
    """All minimal encodings of a body: list of (enc, sign, slots).

    Dotted ends encode as the placeholder ('E',); ``slots`` lists the actual
    slots in encoding DFS order.  Returns every candidate achieving the
    minimal encoding; an empty list means the body is zero by antisymmetry.
    """
    if is_slot(body):
        return [(_slot_token(body), 1, (body,))]
    lc = _body_candidates(body[1])
    rc = _body_candidates(body[2])
    if not lc or not rc:
        return []
    options: Dict[tuple, Dict[tuple, int]] = {}
    for eL, sL, qL in lc:
        for eR, sR, qR in rc:
            for enc, sign, slots in (
                (("V", eL, eR), sL * sR, qL + qR),
                (("V", eR, eL), -sL * sR, qR + qL),
            ):
                options.setdefault(enc, {})
                prev = options[enc].get(slots)
                if prev is None:
                    options[enc][slots] = sign
                elif prev != sign:
                    options[enc][slots] = 0
    best = min(options)
    out = [
        (best, sign, slots)
        for slots, sign in options[best].items()
        if sign != 0
    ]
    if any(sign == 0 for sign in options[best].values()):
        return []
    return out


def _tree_candidates(tree):
    """Minimal encodings over all leaf-rootings: (enc, [(sign, slots), ...]).

    Returns (None, []) when the tree is zero by antisymmetry.
    """
    options: Dict[tuple, Dict[tuple, int]] = {}
    for path, _slot in leaf_paths(tree):
        rt = reroot(tree, path)
        root, body = rt
        for enc, sign, slots in _body_candidates(body):
            full = (_slot_token(root), enc)
            full_slots = (root,) + slots
            options.setdefault(full, {})
            prev = options[full].get(full_slots)
            if prev is None:
                options[full][full_slots] = sign
            elif prev != sign:
                options[full][full_slots] = 0
    if not options:
        return None, []
    best = min(options)
    if any(sign == 0 for sign in options[best].values()):
        return None, []
    return best, [(sign, slots) for slots, sign in options[best].items()]


def _refine(enc, slot_iter):
    """Replace ('E',) placeholders by concrete renumbered edge slots."""
    if enc == ("E",):
        return next(slot_iter)
    if enc[0] == "h":
        return enc
    return ("V", _refine(enc[1], slot_iter), _refine(enc[2], slot_iter))


@dataclass(frozen=True)
class HairyGraph:
    """A canonical hairy Lie graph.  Build through :func:`canonicalize`."""

    trees: tuple
    genus: int
    ordered: bool = False

    @property
    def k(self) -> int:
        return len(self.trees)

    @property
    def n(self) -> int:
        return sum(tree_vertex_count(t[1]) for t in self.trees)

    @property
    def r(self) -> int:
        return sum(
            1 for t in self.trees for s in tree_slots(t) if s[0] == "e"
        ) // 2

    @property
    def m(self) -> int:
        return sum(1 for t in self.trees for s in tree_slots(t) if s[0] == "h")

    def colors(self) -> list:
        return [s[1] for t in self.trees for s in tree_slots(t) if s[0] == "h"]

    def weight(self) -> tuple:
        from .tensor import weight_of

        return weight_of(tuple(sorted(self.colors())), self.genus)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def canonicalize(trees, genus: int, ordered: bool = False):
    """Canonical form with sign: returns (sign, HairyGraph) or (0, None).

    ``trees`` is a sequence of leaf-rooted trees.  The result is the unique
    representative of the equivalence class under vertex flips (sign -1),
    dotted-edge reversal (sign -1), edge renumbering, tree renumbering
    (permutation parity when unordered) and isomorphism.
    """
    _validate_edges(trees)
    per_tree = []
    for t in trees:
        enc, cands = _tree_candidates(t)
        if enc is None:
            return ZERO, None
        per_tree.append((enc, cands))

    ntrees = len(trees)
    if ordered:
        orderings = [(tuple(range(ntrees)), 1)]
    else:
        order = sorted(range(ntrees), key=lambda i: per_tree[i][0])
        # permute only within groups of equal encodings
        groups: List[List[int]] = []
        for i in order:
            if groups and per_tree[groups[-1][0]][0] == per_tree[i][0]:
                groups[-1].append(i)
            else:
                groups.append([i])
        orderings = []
        for perm_parts in product(*(permutations(grp) for grp in groups)):
            perm = tuple(i for part in perm_parts for i in part)
            orderings.append((perm, _perm_sign(perm)))

    results: Dict[tuple, int] = {}
    branches = 0
    for perm, psign in orderings:
        cand_lists = [per_tree[i][1] for i in perm]
        encs = [per_tree[i][0] for i in perm]
        for choice in product(*cand_lists):
            branches += 1
            if branches > MAX_CANON_BRANCHES:
                raise CanonicalizationError("canonicalization branch limit hit")
            sign = psign
            slots_by_tree = []
            for s, slots in choice:
                sign *= s
                slots_by_tree.append(slots)
            # renumber dotted edges by first appearance; normalize direction
            newid: Dict[int, int] = {}
            flip: Dict[int, int] = {}
            for slots in slots_by_tree:
                for slot in slots:
                    if slot[0] != "e":
                        continue
                    _, eid, role = slot
                    if eid not in newid:
                        newid[eid] = len(newid) + 1
                        flip[eid] = role  # first end becomes the tail
            for f in flip.values():
                if f == 1:
                    sign = -sign
            refined_trees = []
            for enc, slots in zip(encs, slots_by_tree):
                refined = [
                    ("e", newid[s[1]], s[2] ^ flip[s[1]]) if s[0] == "e" else s
                    for s in slots
                ]
                dotted = iter(s for s in refined[1:] if s[0] == "e")
                refined_trees.append((refined[0], _refine(enc[1], dotted)))
            key = tuple(refined_trees)
            prev = results.get(key)
            if prev is None:
                results[key] = sign
            elif prev != sign:
                results[key] = 0
    best = min(results)
    if results[best] == 0:
        return ZERO, None
    return (
        ONE if results[best] == 1 else -ONE,
        HairyGraph(best, genus, ordered),
    )


def _validate_edges(trees) -> None:
    seen = set()
    ids: Dict[int, set] = {}
    for t in trees:
        for s in tree_slots(t):
            if s[0] == "e":
                if s in seen:
                    raise ValueError(f"duplicate dotted end {s}")
                seen.add(s)
                ids.setdefault(s[1], set()).add(s[2])
    for eid, roles in ids.items():
        if roles != {0, 1}:
            raise ValueError(f"dotted edge {eid} lacks a head or tail")


# ---------------------------------------------------------------------------
# Graph vectors


@dataclass
class SpaceSpec:
    k: int
    n: int
    r: int
    g: int
    ordered: bool = False
    weight: Optional[tuple] = None

    @property
    def m(self) -> int:
        m = self.n + 2 * self.k - 2 * self.r
        if m < 0:
            raise ValueError("inconsistent space parameters")
        return m


class GraphVector:
    """Rational combination of canonical hairy graphs of one shape class."""

    __slots__ = ("terms", "genus", "ordered")

    def __init__(self, genus: int, ordered: bool = False, terms=None):
        self.genus = genus
        self.ordered = ordered
        self.terms: Dict[HairyGraph, object] = {}
        if terms:
            for gph, c in terms.items():
                if c:
                    self.terms[gph] = QQ(c)

    @classmethod
    def single(cls, trees, genus, ordered=False, coeff=ONE) -> "GraphVector":
        sign, canon = canonicalize(trees, genus, ordered)
        v = cls(genus, ordered)
        if canon is not None and coeff:
            v.terms[canon] = sign * QQ(coeff)
        return v

    def add_graph(self, trees, coeff=ONE) -> None:
        sign, canon = canonicalize(trees, self.genus, self.ordered)
        if canon is None or not coeff:
            return
        s = self.terms.get(canon, ZERO) + sign * coeff
        if s:
            self.terms[canon] = s
        else:
            self.terms.pop(canon, None)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GraphVector") -> "GraphVector":
        if self.genus != other.genus or self.ordered != other.ordered:
            raise ValueError("mismatched graph vector spaces")
        v = GraphVector(self.genus, self.ordered)
        v.terms = dict(self.terms)
        for gph, c in other.terms.items():
            s = v.terms.get(gph, ZERO) + c
            if s:
                v.terms[gph] = s
            else:
                v.terms.pop(gph, None)
        return v

    def __sub__(self, other: "GraphVector") -> "GraphVector":
        return self + other.scale(-ONE)

    def scale(self, coeff) -> "GraphVector":
        v = GraphVector(self.genus, self.ordered)
        if coeff:
            v.terms = {gph: coeff * c for gph, c in self.terms.items()}
        return v

    def __eq__(self, other):
        return (
            isinstance(other, GraphVector)
            and self.genus == other.genus
            and self.ordered == other.ordered
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"GraphVector({len(self.terms)} terms, g={self.genus})"


# ---------------------------------------------------------------------------
# Enumeration


def _labeled_bodies(nleaves: int):
    """All unitrivalent tree bodies on leaf positions 1..nleaves (as ints)."""
    if nleaves < 2:
        raise ValueError("need at least two body leaves")
    bodies = [("V", 1, 2)] if nleaves >= 2 else []
    if nleaves == 2:
        return bodies
    for j in range(3, nleaves + 1):
        nxt = []
        for b in bodies:
            nxt.extend(_insertions(b, j))
        bodies = nxt
    return bodies


def _insertions(body, j):
    out = [("V", body, j)]
    if not isinstance(body, int):
        for left in _insertions(body[1], j):
            out.append(("V", left, body[2]))
        for right in _insertions(body[2], j):
            out.append(("V", body[1], right))
    return out


def _substitute(body, slots):
    if isinstance(body, int):
        return slots[body]
    return ("V", _substitute(body[1], slots), _substitute(body[2], slots))


def _labeled_trees(nleaves: int):
    """All unitrivalent trees on leaf positions 0..nleaves-1, rooted at 0."""
    if nleaves < 3:
        return []
    out = []
    for body in _labeled_bodies(nleaves - 1):
        out.append((0, body))
    return out


def _contents_for(spec: SpaceSpec):
    """All color multisets (sorted tuples of symbols) compatible with spec."""
    from .tensor import symbols

    m = spec.m
    if spec.weight is not None:
        syms = symbols(spec.g)
        if len(spec.weight) != 2 * spec.g or sum(spec.weight) != m:
            raise ValueError("weight inconsistent with space parameters")
        content = []
        for s, count in zip(syms, spec.weight):
            content.extend([s] * count)
        return [tuple(content)]
    from itertools import combinations_with_replacement

    return [
        tuple(ms)
        for ms in combinations_with_replacement(
            sorted(symbols(spec.g)), m
        )
    ]


def enumerate_basis(spec: SpaceSpec) -> List[HairyGraph]:
    """All canonical graphs with the given parameters, deterministic order."""
    if spec.n + 2 * spec.k - 2 * spec.r < 0:
        return []
    if spec.k != 1:
        return _enumerate_multi(spec)
    nleaves = spec.m + 2 * spec.r
    if nleaves != spec.n + 2:
        raise ValueError("inconsistent space parameters")
    if nleaves < 3:
        return []
    found: Dict[HairyGraph, None] = {}
    for content in _contents_for(spec):
        slots = [h_slot(s) for s in content] + [
            e_slot(i // 2 + 1, i % 2) for i in range(2 * spec.r)
        ]
        slot_map = {i: slots[i] for i in range(nleaves)}
        for tree in _labeled_trees(nleaves):
            root = slot_map[tree[0]]
            body = _substitute(tree[1], slot_map)
            sign, canon = canonicalize([(root, body)], spec.g, spec.ordered)
            if canon is not None:
                found[canon] = None
    return sorted(found, key=lambda h: h.trees)


def _enumerate_multi(spec: SpaceSpec) -> List[HairyGraph]:
    """Enumeration for k > 1 trees (small cases only): distribute the global
    leaf positions over trees of every vertex-count composition."""
    from itertools import combinations as comb

    nleaves = spec.m + 2 * spec.r
    if nleaves != spec.n + 2 * spec.k:
        raise ValueError("inconsistent space parameters")
    found: Dict[HairyGraph, None] = {}

    def compositions(total, parts, minimum):
        if parts == 1:
            if total >= minimum:
                yield (total,)
            return
        for first in range(minimum, total - minimum * (parts - 1) + 1):
            for rest in compositions(total - first, parts - 1, minimum):
                yield (first,) + rest

    for content in _contents_for(spec):
        slots = [h_slot(s) for s in content] + [
            e_slot(i // 2 + 1, i % 2) for i in range(2 * spec.r)
        ]
        positions = list(range(nleaves))
        for sizes in compositions(nleaves, spec.k, 3):

            def assign(remaining, sizes_left, acc):
                if not sizes_left:
                    yield acc
                    return
                size = sizes_left[0]
                for chosen in comb(remaining, size):
                    rest = [p for p in remaining if p not in chosen]
                    yield from assign(rest, sizes_left[1:], acc + [chosen])

            for assignment in assign(positions, sizes, []):
                tree_lists = []
                for chosen in assignment:
                    local = {i: slots[p] for i, p in enumerate(chosen)}
                    tree_lists.append(
                        [
                            (local[t[0]], _substitute(t[1], local))
                            for t in _labeled_trees(len(chosen))
                        ]
                    )
                for combo in product(*tree_lists):
                    sign, canon = canonicalize(
                        list(combo), spec.g, spec.ordered
                    )
                    if canon is not None:
                        found[canon] = None
    return sorted(found, key=lambda h: h.trees)


# ---------------------------------------------------------------------------
# IHX relations and dimensions


def ihx_terms(graph: HairyGraph):
    """IHX relation vectors of one canonical graph, one per internal edge.

    Each relation is returned as a GraphVector equal to G - G1 - G2, which is
    zero in the quotient.
    """
    out = []
    for ti, tree in enumerate(graph.trees):
        root, body = tree

        def walk(path):
            node = _get(body, path)
            if is_slot(node):
                return
            for side in (1, 2):
                child = node[side]
                if is_slot(child):
                    continue
                rel = GraphVector(graph.genus, graph.ordered)
                rel.add_graph(list(graph.trees))
                if side == 1:
                    # node = (V, (V, C, D), B): [[C,D],B] = [[C,B],D] + [C,[D,B]]
                    C, D = child[1], child[2]
                    B = node[2]
                    g1 = ("V", ("V", C, B), D)
                    g2 = ("V", C, ("V", D, B))
                else:
                    # node = (V, A, (V, E, F)): [A,[E,F]] = [[A,E],F] + [E,[A,F]]
                    A = node[1]
                    E, F = child[1], child[2]
                    g1 = ("V", ("V", A, E), F)
                    g2 = ("V", E, ("V", A, F))
                for repl in (g1, g2):
                    trees2 = list(graph.trees)
                    trees2[ti] = (root, _replace(body, path, repl))
                    gv = GraphVector(graph.genus, graph.ordered)
                    gv.add_graph(trees2)
                    rel = rel - gv
                out.append(rel)
            walk(path + (1,))
            walk(path + (2,))

        walk(())
    return out


def _coordinates(v: GraphVector, index: Dict[HairyGraph, int]) -> dict:
    out = {}
    for gph, c in v.terms.items():
        if gph not in index:
            raise KeyError(f"graph outside the enumerated basis: {gph}")
        out[index[gph]] = c
    return out


def ihx_relations(spec: SpaceSpec, basis=None) -> SubspaceBasis:
    """Echelon basis of the IHX relation span in enumerate_basis coordinates."""
    if basis is None:
        basis = enumerate_basis(spec)
    index = {gph: i for i, gph in enumerate(basis)}
    rows = []
    for gph in basis:
        for rel in ihx_terms(gph):
            row = _coordinates(rel, index)
            if row:
                rows.append(row)
    return echelonize(rows, len(basis))


def space_dim(spec: SpaceSpec, allow_unblocked: bool = False) -> int:
    """Dimension of the quotient space, per GL-weight block."""
    if spec.weight is None:
        if spec.n >= 5 and not allow_unblocked and spec.m > 0:
            total = 0
            from .tensor import symbols, weight_of

            seen = set()
            for content in _contents_for(spec):
                wt = weight_of(content, spec.g)
                if wt in seen:
                    continue
                seen.add(wt)
                sub = SpaceSpec(
                    spec.k, spec.n, spec.r, spec.g, spec.ordered, wt
                )
                total += space_dim(sub)
            return total
    basis = enumerate_basis(spec)
    rels = ihx_relations(spec, basis)
    return len(basis) - rels.rank


# ---------------------------------------------------------------------------
# Dictionary with the derivation model


def _body_to_lie(body, g) -> LieElement:
    if is_slot(body):
        if body[0] != "h":
            raise ValueError("dotted end inside a tree-to-derivation input")
        return {(body[1],): ONE}
    return lie_bracket(_body_to_lie(body[1], g), _body_to_lie(body[2], g), g)


def tree_to_derivation(v: GraphVector):
    """Standard identification of one-tree dotless graphs with derivations."""
    out: dict = {}
    for gph, c in v.terms.items():
        if gph.k != 1 or gph.r != 0:
            raise ValueError("tree_to_derivation needs one tree, no dotted edges")
        tree = gph.trees[0]
        for path, slot in leaf_paths(tree):
            rt = reroot(tree, path)
            word = _body_to_lie(rt[1], gph.genus)
            for w, cc in word.items():
                key = (slot[1], w)
                s = out.get(key, ZERO) + c * cc
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return out


def bracket_h(x: GraphVector, y: GraphVector) -> GraphVector:
    """Diagrammatic Lie bracket: glue over all leaf pairs weighted by pairing."""
    g = x.genus
    out = GraphVector(g, x.ordered)
    for gx, cx in x.terms.items():
        if gx.k != 1 or gx.r != 0:
            raise ValueError("bracket_h needs one-tree dotless inputs")
        tx = gx.trees[0]
        for gy, cy in y.terms.items():
            if gy.k != 1 or gy.r != 0:
                raise ValueError("bracket_h needs one-tree dotless inputs")
            ty = gy.trees[0]
            for px, sx in leaf_paths(tx):
                for py, sy in leaf_paths(ty):
                    coeff = cx * cy * pairing(sx[1], sy[1], g)
                    if not coeff:
                        continue
                    # re-root tx away from the glued leaf if needed
                    t1 = tx
                    p1 = px
                    if p1 == ():
                        alt = next(p for p, _ in leaf_paths(tx) if p != ())
                        t1 = reroot(tx, alt)
                        p1 = next(
                            p
                            for p, s in leaf_paths(t1)
                            if p != () and s == sx
                        )
                    glued = replace_leaf(t1, p1, reroot(ty, py)[1])
                    out.add_graph([glued], coeff)
    return out


# ---------------------------------------------------------------------------
# Template text format


def tree_to_template(tree) -> str:
    root, body = tree
    if is_slot(body):
        raise ValueError("tree with no trivalent vertex has no template form")

    def slot_str(s):
        if s[0] == "h":
            return f"h:{s[1][0]}{s[1][1]}"
        return f"d:{s[1]}{'H' if s[2] == 1 else 'T'}"

    def body_str(b):
        if is_slot(b):
            return slot_str(b)
        return f"T({body_str(b[1])}, {body_str(b[2])})"

    return f"T({slot_str(root)}, {body_str(body[1])}, {body_str(body[2])})"


def template_to_tree(text: str):
    """Parse the template format back into a leaf-rooted tree."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos] in " \t\n":
            pos += 1

    def parse_node(top: bool):
        nonlocal pos
        skip_ws()
        if text.startswith("T(", pos):
            pos += 2
            args = [parse_node(False)]
            skip_ws()
            while text[pos] == ",":
                pos += 1
                args.append(parse_node(False))
                skip_ws()
            if text[pos] != ")":
                raise ValueError(f"expected ')' at {pos} in {text!r}")
            pos += 1
            want = 3 if top else 2
            if len(args) != want:
                raise ValueError(
                    f"vertex with {len(args)} subtrees, expected {want}"
                )
            if top:
                return ("T",) + tuple(args)
            return ("V", args[0], args[1])
        if text.startswith("h:", pos):
            pos += 2
            kind = text[pos]
            pos += 1
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            return h_slot((kind, int(text[start:pos])))
        if text.startswith("d:", pos):
            pos += 2
            start = pos
            while text[pos].isdigit():
                pos += 1
            eid = int(text[start:pos])
            role = text[pos]
            pos += 1
            if role not in "HT":
                raise ValueError(f"bad dotted-end role {role!r}")
            return e_slot(eid, 1 if role == "H" else 0)
        raise ValueError(f"cannot parse template at position {pos}: {text!r}")

    node = parse_node(True)
    skip_ws()
    if pos != len(text):
        raise ValueError(f"trailing input in template: {text[pos:]!r}")
    # vertex-rooted ('T', x, y, z): re-root at the DFS-first leaf inside x;
    # seen from the x side, the top vertex carries children (y, z)
    x, y, z = node[1], node[2], node[3]
    return root_into(x, ("V", y, z))
