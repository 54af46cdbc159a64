"""Complex families: d-hypergraph complexes, pair complexes and nerves."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .complexes import (
    SimplicialComplex,
    is_flag,
    is_wcm,
    homological_connectivity,
    maximalize,
)


def hypergraph_complex(n: int, d: int) -> SimplicialComplex:
    """Vertices are the d-subsets of {1..n}; simplices are disjoint families.

    Vertex ids follow the lexicographic order of the subsets and each label
    is the subset written 1-based, e.g. "{1,2}".
    """
    if d < 1 or n < d:
        raise ValueError(f"need n >= d >= 1, got n={n}, d={d}")
    blocks = list(itertools.combinations(range(1, n + 1), d))
    index = {b: i for i, b in enumerate(blocks)}
    labels = ["{" + ",".join(map(str, b)) + "}" for b in blocks]
    facets = []

    # maximal disjoint families: extend greedily in lexicographic order,
    # branching on the smallest uncovered element that can still be used
    def grow(chosen, free, start_elem):
        extended = False
        usable = sorted(free)
        for b in itertools.combinations(usable, d):
            if b[0] < start_elem:
                continue
            extended = True
            grow(chosen + [index[b]], free - set(b), b[0] + 1)
        if not extended:
            facets.append(tuple(sorted(chosen)))

    grow([], set(range(1, n + 1)), 1)
    return SimplicialComplex(maximalize(facets), labels, _maximal=True)


def hypergraph_blocks(n: int, d: int) -> list[tuple]:
    return list(itertools.combinations(range(1, n + 1), d))


def claimed_wcm_dimension(n: int, d: int) -> int:
    return (n - d) // (d + 1)


@dataclass
class PairComplexSpec:
    handle_part: SimplicialComplex
    ball_part: SimplicialComplex
    mode: str = "injective"

    def __post_init__(self):
        if self.mode not in ("injective", "extended"):
            raise ValueError(f"mode must be 'injective' or 'extended', got {self.mode!r}")


def pair_vertices(spec: PairComplexSpec) -> list[tuple]:
    return [(h, b) for h in spec.handle_part.vertices for b in spec.ball_part.vertices]


def pair_complex(spec: PairComplexSpec) -> SimplicialComplex:
    """Complex on pairs (h, b).

    A set of pairs is a simplex iff its h's are pairwise distinct and span a
    simplex of the handle part, and its b's span a simplex of the ball part.
    Injective mode additionally asks the b's to be pairwise distinct.
    Vertex ids enumerate ``pair_vertices(spec)``; labels read "h|b".
    """
    H, B = spec.handle_part, spec.ball_part
    verts = pair_vertices(spec)
    index = {v: i for i, v in enumerate(verts)}
    labels = [f"{H.labels[h]}|{B.labels[b]}" for h, b in verts]
    facets = []
    for fh in H.facets:
        for fb in B.facets:
            if spec.mode == "extended":
                for image in itertools.product(fb, repeat=len(fh)):
                    facets.append(tuple(sorted(index[(h, b)] for h, b in zip(fh, image))))
            else:
                k = min(len(fh), len(fb))
                for hs in itertools.combinations(fh, k):
                    for bs in itertools.permutations(fb, k):
                        facets.append(tuple(sorted(index[p] for p in zip(hs, bs))))
    return SimplicialComplex(maximalize(facets), labels, _maximal=True)


def is_pair_simplex(spec: PairComplexSpec, pairs) -> bool:
    """Direct test of the pair-complex simplex condition (used as an oracle)."""
    hs = [h for h, _ in pairs]
    bs = [b for _, b in pairs]
    if len(set(hs)) != len(hs):
        return False
    if spec.mode == "injective" and len(set(bs)) != len(bs):
        return False
    return spec.handle_part.contains(hs) and spec.ball_part.contains(bs)


def ball_projection(spec: PairComplexSpec) -> list:
    """Colour of each pair-complex vertex: its ball-part coordinate."""
    return [b for _, b in pair_vertices(spec)]


def nerve(members: list[SimplicialComplex]) -> SimplicialComplex:
    """Nerve of a family of subcomplexes of one ambient complex.

    A set J of members spans a simplex iff the members in J share a vertex
    (simplices of subcomplexes intersect in a common face, so a common
    vertex is the same as a nonempty intersection).
    """
    facets = []
    all_vertices = set()
    for m in members:
        all_vertices.update(m.vertices)
    for v in all_vertices:
        facets.append(tuple(i for i, m in enumerate(members) if v in set(m.vertices)))
    labels = [f"K{i}" for i in range(len(members))]
    return SimplicialComplex(maximalize(facets), labels, _maximal=True)


def intersection(members: list[SimplicialComplex]) -> SimplicialComplex:
    """Intersection of subcomplexes sharing vertex ids."""
    if not members:
        raise ValueError("empty intersection family")
    current = set(members[0].simplices())
    for m in members[1:]:
        current &= set(m.simplices())
    return members[0].with_facets(current)


def union(members: list[SimplicialComplex]) -> SimplicialComplex:
    labels = max((m.labels for m in members), key=len)
    return SimplicialComplex([f for m in members for f in m.facets], labels)


@dataclass
class HypergraphRow:
    n: int
    d: int
    vertex_count: int
    facet_count: int
    flag: bool
    wcm_dim_claimed: int
    wcm_verified: bool
    connectivity: object

    COLUMNS = (
        "n", "d", "vertex_count", "facet_count", "flag",
        "wcm_dim_claimed", "wcm_verified", "connectivity",
    )

    def as_dict(self) -> dict:
        conn = self.connectivity
        return {
            "n": self.n,
            "d": self.d,
            "vertex_count": self.vertex_count,
            "facet_count": self.facet_count,
            "flag": self.flag,
            "wcm_dim_claimed": self.wcm_dim_claimed,
            "wcm_verified": self.wcm_verified,
            "connectivity": "inf" if conn == math.inf else conn,
        }


def hypergraph_row(n: int, d: int) -> HypergraphRow:
    cx = hypergraph_complex(n, d)
    claimed = claimed_wcm_dimension(n, d)
    return HypergraphRow(
        n=n,
        d=d,
        vertex_count=len(cx.vertices),
        facet_count=len(cx.facets),
        flag=is_flag(cx),
        wcm_dim_claimed=claimed,
        wcm_verified=is_wcm(cx, claimed).ok,
        connectivity=homological_connectivity(cx),
    )


def _row_task(args):
    return hypergraph_row(*args)


def hypergraph_table(nmax: int, dmax: int, dmin: int = 2, jobs: int = 1) -> list[HypergraphRow]:
    cells = [(n, d) for d in range(dmin, dmax + 1) for n in range(d, nmax + 1)]
    if jobs <= 1 or len(cells) < 2:
        return [hypergraph_row(n, d) for n, d in cells]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_row_task, cells))
