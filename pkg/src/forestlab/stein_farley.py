"""Vertices, order relations, cubes and vertex links of the Stein-Farley
cube complex of V_{d,r} (every piece is a single caret).

A vertex is a class [M, f] of a forest M and a group element f, where
(M1, f1) ~ (M2, f2) iff f2^-1 f1 is represented by a diagram (M1, s, M2).
Here f acts on the right of M: in forests.py notation f2^-1 f1 is
``multiply(f1, invert(f2))``.

The invariant used for equality is the set of cone maps of [M, f]: for each
leaf l of M, the restriction of f to the subtree below l, pulled back to the
standard d-ary tree. A cone map is stored reduced, as a sorted tuple of
pairs (relative word u, target caret address a) meaning "the subtree at u is
carried rigidly onto the subtree at a". Two pairs give the same vertex iff
their cone sets agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .complexes import SimplicialComplex, flag_violation, maximalize
from .families import hypergraph_complex
from .forests import (
    DAryForest,
    PairedForestDiagram,
    VElement,
    all_forests,
    common_expansion,
    expand_domain_to,
    expand_range_to,
    format_address,
    invert,
    multiply,
    standard_forest,
)
from .maps import SimplicialMap, is_complete_join


class SteinFarleyError(ValueError):
    pass


# -- cone maps -----------------------------------------------------------------


def reduce_cone(entries, d: int) -> tuple:
    """Collapse sibling groups u.0..u.(d-1) -> a.0..a.(d-1) into u -> a."""
    table = dict(entries)
    if not table:
        raise SteinFarleyError("empty cone map")
    changed = True
    while changed:
        changed = False
        for u in list(table):
            if not u or u not in table:
                continue
            p = u[:-1]
            kids = [p + (j,) for j in range(d)]
            if not all(k in table for k in kids):
                continue
            root, word = table[kids[0]]
            if not word or word[-1] != 0:
                continue
            base = word[:-1]
            if all(table[k] == (root, base + (j,)) for j, k in enumerate(kids)):
                for k in kids:
                    del table[k]
                table[p] = (root, base)
                changed = True
    return tuple(sorted(table.items()))


def subdivide_cone(cone: tuple, j: int, d: int) -> tuple:
    if len(cone) == 1 and cone[0][0] == ():
        (root, word) = cone[0][1]
        return (((), (root, word + (j,))),)
    out = [(u[1:], a) for u, a in cone if u[0] == j]
    return reduce_cone(out, d)


def merge_cones(cones, d: int) -> tuple:
    entries = [((i,) + u, a) for i, c in enumerate(cones) for u, a in c]
    return reduce_cone(entries, d)


def format_cone(cone: tuple) -> str:
    return ";".join(
        ("." + "".join(map(str, u)) if u else ".") + "->" + format_address(a) for u, a in cone
    )


def cones_of(support: DAryForest, f: VElement) -> list:
    """Cone map at each leaf of the support, in leaf order."""
    if (support.d, support.r) != (f.d, f.r):
        raise SteinFarleyError(
            f"support is a ({support.d},{support.r})-forest but f lies in V_{{{f.d},{f.r}}}"
        )
    diag = f.canonical
    big = common_expansion(diag.domain, support)
    diag = expand_domain_to(diag, big)
    rng = diag.range.leaves
    groups: list = [[] for _ in support.leaves]
    pos = support.leaf_index
    for i, (root, word) in enumerate(diag.domain.leaves):
        for cut in range(len(word), -1, -1):
            k = pos.get((root, word[:cut]))
            if k is not None:
                groups[k].append((word[cut:], rng[diag.perm[i]]))
                break
    return [reduce_cone(g, support.d) for g in groups]


# -- vertices ------------------------------------------------------------------


class SFVertex:
    """The class [support, witness]; equality and hashing use the cone set."""

    def __init__(self, support: DAryForest, witness: VElement):
        self.support = support
        self.witness = witness
        self.cones = tuple(cones_of(support, witness))
        self.key = (support.d, support.r, frozenset(self.cones))

    @property
    def d(self) -> int:
        return self.support.d

    @property
    def r(self) -> int:
        return self.support.r

    @property
    def leaf_count(self) -> int:
        return len(self.cones)

    @property
    def height(self) -> int:
        return (len(self.cones) - self.r) // (self.d - 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, SFVertex) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"SFVertex(height={self.height}, cones={{{', '.join(sorted(map(format_cone, self.cones)))}}})"

    @cached_property
    def canonical_support(self) -> DAryForest:
        return standard_forest(self.d, self.r, self.height)

    def translated(self) -> VElement:
        """A representative g with [canonical_support, g] equal to self."""
        std = self.canonical_support
        move = VElement(PairedForestDiagram(self.support, tuple(range(self.leaf_count)), std))
        return multiply(invert(move), self.witness)

    @cached_property
    def canonical_rep(self) -> VElement:
        """Least element, by serialized reduced diagram, of the coset of
        representatives over the canonical support."""
        base = self.translated()
        best = None
        best_key = None
        for s in stabilizer(self.canonical_support):
            cand = multiply(s, base)
            key = cand.canonical.dumps()
            if best_key is None or key < best_key:
                best, best_key = cand, key
        return best

    def to_json(self) -> dict:
        return {
            "support": self.canonical_support.addresses(),
            "rep": self.canonical_rep.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "SFVertex":
        try:
            rep = VElement.from_json(data["rep"])
            support = DAryForest.from_addresses(rep.d, rep.r, data["support"])
        except (KeyError, TypeError) as exc:
            raise SteinFarleyError(f"malformed vertex JSON: {exc}") from exc
        return make_vertex(support, rep)


def stabilizer(support: DAryForest) -> list:
    """All elements represented by (support, s, support)."""
    n = support.leaf_count
    return [VElement(PairedForestDiagram(support, p, support)) for p in itertools.permutations(range(n))]


def make_vertex(support: DAryForest, f: VElement) -> SFVertex:
    return SFVertex(support, f)


def base_vertex(d: int, r: int) -> SFVertex:
    return make_vertex(DAryForest(d, r), VElement.identity(d, r))


def vertices_equal(a: SFVertex, b: SFVertex) -> bool:
    _same_group(a, b)
    return a == b


def _same_group(a, b):
    if (a.d, a.r) != (b.d, b.r):
        raise SteinFarleyError("vertices come from different (d, r)")


def _decomposes(cone, targets, d, depth):
    if cone in targets:
        return True
    if depth == 0:
        return False
    return all(_decomposes(subdivide_cone(cone, j, d), targets, d, depth - 1) for j in range(d))


def leq(a: SFVertex, b: SFVertex) -> bool:
    """a <= b: b = [N', f] for some expansion N' of a support N of a = [N, f]."""
    _same_group(a, b)
    gap = b.height - a.height
    if gap < 0:
        return False
    targets = set(b.cones)
    return all(_decomposes(c, targets, a.d, gap) for c in a.cones)


def prec(a: SFVertex, b: SFVertex) -> bool:
    """a strictly below b with every added caret hanging directly at a leaf."""
    _same_group(a, b)
    if a == b:
        return False
    targets = set(b.cones)
    for c in a.cones:
        if c in targets:
            continue
        if not all(subdivide_cone(c, j, a.d) in targets for j in range(a.d)):
            return False
    return True


def preceq(a: SFVertex, b: SFVertex) -> bool:
    return a == b or prec(a, b)


def height(x: SFVertex) -> int:
    return x.height


def upper_bound(a: SFVertex, b: SFVertex) -> SFVertex:
    """A vertex above both: expand f_b^-1 f_a until it carries a support of
    a onto a forest containing a support of b."""
    _same_group(a, b)
    g = multiply(a.witness, invert(b.witness)).canonical
    g = expand_domain_to(g, common_expansion(g.domain, a.support))
    g = expand_range_to(g, common_expansion(g.range, b.support))
    return make_vertex(g.domain, a.witness)


# -- cubes -----------------------------------------------------------------------


@dataclass
class CubeInterval:
    bottom: SFVertex
    leaves: tuple
    vertices: dict = field(default_factory=dict)  # frozenset of leaf indices -> vertex

    @property
    def top(self) -> SFVertex:
        return self.vertices[frozenset(self.leaves)]

    @property
    def dim(self) -> int:
        return len(self.leaves)

    def distinct(self) -> bool:
        return len(set(self.vertices.values())) == 2 ** len(self.leaves)

    def is_boolean_lattice(self) -> bool:
        """prec holds exactly along proper inclusions, leq exactly along inclusions."""
        items = list(self.vertices.items())
        for s, x in items:
            for t, y in items:
                if prec(x, y) != (s < t) or leq(x, y) != (s <= t):
                    return False
        return True

    def hasse_edges(self) -> list:
        out = []
        for s, x in self.vertices.items():
            for t, y in self.vertices.items():
                if s < t and len(t) == len(s) + 1:
                    out.append((tuple(sorted(s)), tuple(sorted(t))))
        return out

    def to_json(self) -> dict:
        return {
            "bottom": self.bottom.to_json(),
            "leaves": [i + 1 for i in self.leaves],
            "vertex_count": len(self.vertices),
            "distinct": self.distinct(),
            "top_height": self.top.height,
        }


def cube_interval(bottom: SFVertex, leaves) -> CubeInterval:
    """The cube spanned by hanging one caret at each of the given leaves
    (0-based indices into ``bottom.support.leaves``)."""
    leaves = tuple(sorted(set(leaves)))
    n = bottom.leaf_count
    bad = [i for i in leaves if not 0 <= i < n]
    if bad:
        raise SteinFarleyError(f"leaf indices {bad} outside 0..{n - 1}")
    addrs = bottom.support.leaves
    cube = CubeInterval(bottom, leaves)
    for k in range(len(leaves) + 1):
        for sub in itertools.combinations(leaves, k):
            forest = DAryForest(bottom.d, bottom.r, bottom.support.carets | {addrs[i] for i in sub})
            cube.vertices[frozenset(sub)] = make_vertex(forest, bottom.witness)
    return cube


# -- descending link ---------------------------------------------------------


def _lower_vertex(x: SFVertex, tuples) -> tuple:
    """Vertex y with x obtained from y by splitting one cone into each of the
    given ordered leaf tuples; returns (y, leaves of y's support to split)."""
    d = x.d
    q = len(tuples)
    lower = standard_forest(d, x.r, x.height - q)
    wleaves = lower.leaves
    if q > len(wleaves):
        raise SteinFarleyError("too many disjoint tuples for this vertex")
    upper = DAryForest(d, x.r, lower.carets | set(wleaves[:q]))
    up_index = upper.leaf_index
    used = {i for t in tuples for i in t}
    rest = iter(i for i in range(x.leaf_count) if i not in used)
    perm = [None] * upper.leaf_count
    for i, t in enumerate(tuples):
        root, word = wleaves[i]
        for j, leaf in enumerate(t):
            perm[up_index[(root, word + (j,))]] = leaf
    for pos in range(upper.leaf_count):
        if perm[pos] is None:
            perm[pos] = next(rest)
    move = VElement(PairedForestDiagram(upper, tuple(perm), x.support))
    y = make_vertex(lower, multiply(move, x.witness))
    return y, tuple(range(q))


@dataclass
class DescendingLink:
    vertex: SFVertex
    tuples: list                      # vertex i <-> ordered leaf tuple
    lower: list                       # vertex i <-> SFVertex below x
    complex: SimplicialComplex
    projection: SimplicialMap
    verified_cubes: int = 0

    def report(self) -> dict:
        cj = is_complete_join(self.projection)
        flag = flag_violation(self.complex)
        return {
            "height": self.vertex.height,
            "leaf_count": self.vertex.leaf_count,
            "vertices": len(self.tuples),
            "facets": len(self.complex.facets),
            "complete_join": cj.ok,
            "complete_join_report": cj.to_json(),
            "fiber_sizes": {str(k): v for k, v in sorted(cj.fiber_sizes.items())},
            "flag": flag is None,
            "target": {"n": self.vertex.leaf_count, "d": self.vertex.d},
            "verified_cubes": self.verified_cubes,
        }


def descending_link(x: SFVertex, verify: bool = True) -> DescendingLink:
    """Descending link of x in the cube complex with the height function.

    Its vertices are the y directly below x: merging an ordered d-tuple of
    distinct leaves of x into one leaf. A set of them spans a simplex iff the
    tuples are pairwise disjoint (the vertices are then the coatoms of one
    cube below x). With ``verify`` each facet is checked by building that
    cube and comparing its top with x and its coatoms with the vertices.
    The projection sends a vertex to its d-set of leaves in M_L(d).
    """
    if x.height < 1:
        raise SteinFarleyError("the descending link of a height-0 vertex is empty")
    d, L = x.d, x.leaf_count
    tuples = list(itertools.permutations(range(L), d))
    index = {t: i for i, t in enumerate(tuples)}
    lower = [_lower_vertex(x, [t])[0] for t in tuples]
    if len(set(lower)) != len(lower):
        raise SteinFarleyError("two leaf tuples gave the same lower vertex")
    facets = []
    q = L // d
    checked = 0
    for blocks in _disjoint_blocks(L, d, q):
        for orders in itertools.product(*(itertools.permutations(b) for b in blocks)):
            fam = [index[t] for t in orders]
            facets.append(tuple(sorted(fam)))
            if verify:
                y, split = _lower_vertex(x, list(orders))
                cube = cube_interval(y, split)
                coatoms = {cube.vertices[frozenset(set(split) - {i})] for i in split}
                if cube.top != x or coatoms != {lower[i] for i in fam} or not cube.distinct():
                    raise SteinFarleyError(f"cube check failed for tuples {orders}")
                checked += 1
    labels = ["(" + ",".join(str(i + 1) for i in t) + ")" for t in tuples]
    cx = SimplicialComplex(maximalize(facets), labels, _maximal=True)
    target = hypergraph_complex(L, d)
    block_id = {b: i for i, b in enumerate(itertools.combinations(range(1, L + 1), d))}
    vm = {i: block_id[tuple(sorted(j + 1 for j in t))] for i, t in enumerate(tuples)}
    proj = SimplicialMap(cx, target, vm)
    return DescendingLink(x, tuples, lower, cx, proj, checked)


def _disjoint_blocks(L, d, q):
    """Unordered families of q pairwise disjoint d-subsets of range(L)."""
    def rec(start, avail, acc):
        if len(acc) == q:
            yield list(acc)
            return
        for b in itertools.combinations(sorted(avail), d):
            if acc and b <= acc[-1]:
                continue
            yield from rec(start, avail - set(b), acc + [b])

    yield from rec(0, set(range(L)), [])


def descending_link_by_cosets(x: SFVertex) -> tuple:
    """Independent enumeration of the descending link of x.

    Runs over every forest M' with height(x) carets, every representative
    (M', f') of x (one per permutation of leaves) and every set E of
    elementary carets of M'; each E gives the cube [M' - E, f'] <= x whose
    coatoms form one simplex. Returns (vertex set, simplex set).
    """
    d, r, k = x.d, x.r, x.height
    verts = set()
    simplices = set()
    for forest in all_forests(d, r, k):
        n = forest.leaf_count
        elem = [c for c, _ in forest.elementary]
        for p in itertools.permutations(range(n)):
            move = VElement(PairedForestDiagram(forest, p, x.support))
            f = multiply(move, x.witness)
            if make_vertex(forest, f) != x:
                raise SteinFarleyError("representative enumeration left the class")
            for size in range(1, len(elem) + 1):
                for E in itertools.combinations(elem, size):
                    coatoms = frozenset(
                        make_vertex(DAryForest(d, r, forest.carets - {e}), f) for e in E
                    )
                    simplices.add(coatoms)
                    verts.update(coatoms)
    return verts, simplices


# -- full vertex link ----------------------------------------------------------


@dataclass
class LinkReport:
    height: int
    descending_vertices: int
    ascending_vertices: int
    descending_flag: bool
    ascending_flag: bool
    combined_flag: bool
    predicted_combined_flag: bool
    violations: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.descending_flag and self.combined_flag and self.predicted_combined_flag == self.combined_flag

    def to_json(self) -> dict:
        return {
            "height": self.height,
            "descending_vertices": self.descending_vertices,
            "ascending_vertices": self.ascending_vertices,
            "descending_flag": self.descending_flag,
            "ascending_flag": self.ascending_flag,
            "combined_flag": self.combined_flag,
            "predicted_combined_flag": self.predicted_combined_flag,
            "ok": self.ok,
            "violations": self.violations,
        }


def combined_link(x: SFVertex, desc: DescendingLink | None = None) -> SimplicialComplex:
    """Link of x in the cube complex.

    A cube [y, z] contains x when y <= x <= z in its lattice; its down part
    merges disjoint tuples D of leaves of x and its up part splits a set S of
    leaves of x that no tuple in D absorbs. Vertex ids: descending vertices
    first, then one ascending vertex per leaf.
    """
    L = x.leaf_count
    if x.height >= 1:
        desc = desc or descending_link(x, verify=False)
        tuples, down = desc.tuples, desc.complex
    else:
        tuples, down = [], SimplicialComplex()
    n_down = len(tuples)
    labels = [f"down{t}" for t in tuples] + [f"up{i + 1}" for i in range(L)]
    facets = [tuple(n_down + i for i in range(L))]
    for f in down.simplices():
        used = {i for v in f for i in tuples[v]}
        facets.append(tuple(f) + tuple(n_down + i for i in range(L) if i not in used))
    return SimplicialComplex(maximalize(facets), labels, _maximal=True)


def ascending_link(x: SFVertex) -> SimplicialComplex:
    """Every set of leaves spans an ascending cube, so this is one simplex;
    the cube on all leaves is built and checked as a witness."""
    L = x.leaf_count
    cube = cube_interval(x, range(L))
    if not cube.distinct() or cube.bottom != x:
        raise SteinFarleyError("ascending cube degenerate")
    return SimplicialComplex([tuple(range(L))], [f"up{i + 1}" for i in range(L)], _maximal=True)


def local_link_flag_check(x: SFVertex) -> LinkReport:
    asc = ascending_link(x)
    desc = descending_link(x) if x.height >= 1 else None
    down_cx = desc.complex if desc else SimplicialComplex()
    comb = combined_link(x, desc)
    dv, cv, av = flag_violation(down_cx), flag_violation(comb), flag_violation(asc)
    rep = LinkReport(
        height=x.height,
        descending_vertices=len(down_cx.vertices),
        ascending_vertices=len(asc.vertices),
        descending_flag=dv is None,
        ascending_flag=av is None,
        combined_flag=cv is None,
        predicted_combined_flag=dv is None and av is None,
    )
    for name, v in (("descending", dv), ("ascending", av), ("combined", cv)):
        if v is not None:
            rep.violations[name] = list(v)
    return rep


def vertex_from_args(d: int, r: int, support: str | list, rep=None) -> SFVertex:
    if isinstance(support, str):
        support = [s for s in support.split(",") if s.strip()]
    forest = DAryForest.from_addresses(d, r, [s.strip() for s in support])
    if rep is None:
        f = VElement.identity(d, r)
    else:
        f = VElement.from_json(rep) if isinstance(rep, dict) else rep
    return make_vertex(forest, f)
