"""Finite abstract simplicial complexes and exact reduced homology.

A complex is stored by its facets over integer vertex ids. The ids index an
ambient label list, so subcomplexes, links and full subcomplexes keep the ids
of the complex they came from and can be compared or included directly.

The empty simplex is always present: the empty complex is {()} and has
reduced homology Z in degree -1. Connectivity verdicts in this module are
homological (vanishing of integral reduced homology); fundamental groups
are never computed.
"""

from __future__ import annotations

import itertools
import json
import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .linalg import rational_nullspace, rational_rank, smith_invariants

Simplex = tuple

_tracker_lock = threading.Lock()
_trackers: list = []


def track_complexes():
    """Return a list that receives every complex constructed from now on."""
    sink: list = []
    with _tracker_lock:
        _trackers.append(sink)
    return sink


def stop_tracking(sink):
    with _tracker_lock:
        if sink in _trackers:
            _trackers.remove(sink)


def maximalize(simplices: Iterable[Iterable[int]]) -> list[tuple]:
    """Deduplicate and drop every simplex contained in another one."""
    cands = sorted({tuple(sorted(set(s))) for s in simplices}, key=lambda s: (-len(s), s))
    kept: list[tuple] = []
    by_vertex: dict = {}
    for s in cands:
        if not s:
            continue
        sset = set(s)
        pool = by_vertex.get(s[0], ())
        if any(len(f) > len(s) and sset <= f for f in pool):
            continue
        fs = frozenset(s)
        kept.append(s)
        for v in s:
            by_vertex.setdefault(v, []).append(fs)
    return sorted(kept)


class SimplicialComplex:
    """Immutable complex given by facets; faces are enumerated on demand."""

    def __init__(self, facets: Iterable[Iterable[int]] = (), labels: Sequence[str] | None = None,
                 _maximal: bool = False):
        facets = [tuple(f) for f in facets]
        self.facets: tuple = tuple(sorted(facets)) if _maximal else tuple(maximalize(facets))
        top = max((v for f in self.facets for v in f), default=-1)
        if labels is None:
            labels = [str(i) for i in range(top + 1)]
        labels = tuple(str(x) for x in labels)
        if top >= len(labels):
            raise ValueError(f"vertex id {top} has no label")
        if any(v < 0 for f in self.facets for v in f):
            raise ValueError("vertex ids must be non-negative")
        self.labels = labels
        self._faces: dict = {}
        self._index: dict = {}
        self._profile = None
        self._lock = threading.Lock()
        if _trackers:
            with _tracker_lock:
                for sink in _trackers:
                    sink.append(self)

    # -- basic structure ---------------------------------------------------

    @property
    def vertices(self) -> tuple:
        return tuple(sorted({v for f in self.facets for v in f}))

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def is_empty(self) -> bool:
        return not self.facets

    def faces(self, k: int) -> tuple:
        """All k-simplices, sorted lexicographically. faces(-1) == ((),)."""
        if k < -1:
            return ()
        cached = self._faces.get(k)
        if cached is not None:
            return cached
        if k == -1:
            out = ((),)
        else:
            acc = set()
            for f in self.facets:
                if len(f) > k:
                    acc.update(itertools.combinations(f, k + 1))
            out = tuple(sorted(acc))
        with self._lock:
            self._faces[k] = out
        return out

    def face_index(self, k: int) -> dict:
        idx = self._index.get(k)
        if idx is None:
            idx = {s: i for i, s in enumerate(self.faces(k))}
            with self._lock:
                self._index[k] = idx
        return idx

    def f_vector(self) -> list[int]:
        return [len(self.faces(k)) for k in range(self.dim + 1)]

    def simplices(self) -> list:
        out = []
        for k in range(self.dim + 1):
            out.extend(self.faces(k))
        return out

    def _star_index(self) -> dict:
        idx = self._index.get("star")
        if idx is None:
            idx = {}
            for f in self.facets:
                fs = frozenset(f)
                for v in f:
                    idx.setdefault(v, []).append(fs)
            with self._lock:
                self._index["star"] = idx
        return idx

    def contains(self, s: Iterable[int]) -> bool:
        s = set(s)
        if not s:
            return True
        idx = self._star_index()
        pools = [idx.get(v) for v in s]
        if any(p is None for p in pools):
            return False
        return any(s <= f for f in min(pools, key=len))

    def edges(self) -> tuple:
        return self.faces(1)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.faces(1))
        return g

    def label(self, v: int) -> str:
        return self.labels[v]

    def with_facets(self, facets, maximal=False) -> "SimplicialComplex":
        return SimplicialComplex(facets, self.labels, _maximal=maximal)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self.facets == other.facets

    def __hash__(self) -> int:
        return hash(self.facets)

    def __repr__(self) -> str:
        return f"SimplicialComplex(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.facets)})"

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"vertices": list(self.labels), "facets": [list(f) for f in self.facets]}

    @classmethod
    def from_json(cls, data) -> "SimplicialComplex":
        if isinstance(data, list):
            return from_facets(data)
        if not isinstance(data, dict) or "facets" not in data:
            raise ValueError("complex JSON needs a 'facets' list")
        facets = data["facets"]
        for f in facets:
            if len(set(f)) != len(f):
                raise ValueError(f"facet {f} repeats a vertex")
            if any(not isinstance(v, int) or v < 0 for v in f):
                raise ValueError(f"facet {f} has a non-integer or negative vertex")
        return cls(facets, data.get("vertices"))


def from_facets(facets: Iterable[Iterable[int]], labels=None) -> SimplicialComplex:
    facets = [list(f) for f in facets]
    for f in facets:
        if len(set(f)) != len(f):
            raise ValueError(f"facet {f} repeats a vertex")
    return SimplicialComplex(facets, labels)


def simplex(n_vertices: int) -> SimplicialComplex:
    return SimplicialComplex([tuple(range(n_vertices))] if n_vertices else [])


def boundary_of_simplex(n_vertices: int) -> SimplicialComplex:
    return SimplicialComplex(itertools.combinations(range(n_vertices), n_vertices - 1))


def _require_simplex(cx: SimplicialComplex, s) -> tuple:
    s = tuple(sorted(set(s)))
    if not cx.contains(s):
        raise ValueError(f"{list(s)} is not a simplex of the complex")
    return s


def link(cx: SimplicialComplex, s) -> SimplicialComplex:
    s = _require_simplex(cx, s)
    ss = set(s)
    return cx.with_facets(
        tuple(v for v in f if v not in ss) for f in cx.facets if ss <= set(f)
    )


def star(cx: SimplicialComplex, s) -> SimplicialComplex:
    s = _require_simplex(cx, s)
    ss = set(s)
    return cx.with_facets((f for f in cx.facets if ss <= set(f)), maximal=True)


def full_subcomplex(cx: SimplicialComplex, vertices: Iterable[int]) -> SimplicialComplex:
    keep = set(vertices)
    return cx.with_facets(tuple(v for v in f if v in keep) for f in cx.facets)


def subcomplex(cx: SimplicialComplex, simplices: Iterable) -> SimplicialComplex:
    """Subcomplex generated by the given simplices (ids of cx kept)."""
    return cx.with_facets(simplices)


def is_subcomplex(a: SimplicialComplex, b: SimplicialComplex) -> bool:
    return all(b.contains(f) for f in a.facets)


def join(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    """Join, with the vertices of b shifted past the label range of a."""
    off = len(a.labels)
    labels = [f"a{x}" for x in a.labels] + [f"b{x}" for x in b.labels]
    fa = a.facets or ((),)
    fb = b.facets or ((),)
    facets = [fx + tuple(v + off for v in fy) for fx in fa for fy in fb]
    return SimplicialComplex([f for f in facets if f], labels, _maximal=True)


def cone(cx: SimplicialComplex) -> SimplicialComplex:
    return join(SimplicialComplex([(0,)], ["apex"]), cx)


def barycentric_subdivision(cx: SimplicialComplex) -> SimplicialComplex:
    """Vertices are the nonempty simplices of cx, facets the maximal flags."""
    simplices = cx.simplices()
    index = {s: i for i, s in enumerate(simplices)}
    labels = ["{" + ",".join(cx.labels[v] for v in s) + "}" for s in simplices]
    facets = []
    for f in cx.facets:
        for order in itertools.permutations(f):
            facets.append(tuple(sorted(index[tuple(sorted(order[:i]))] for i in range(1, len(f) + 1))))
    return SimplicialComplex(facets, labels, _maximal=True)


def subdivision_size(cx: SimplicialComplex) -> int:
    """Number of facets the barycentric subdivision would have."""
    return sum(math.factorial(len(f)) for f in cx.facets)


def clique_complex(vertices: Iterable[int], edges: Iterable, labels=None) -> SimplicialComplex:
    g = nx.Graph()
    g.add_nodes_from(vertices)
    g.add_edges_from(edges)
    return SimplicialComplex((tuple(c) for c in nx.find_cliques(g)), labels)


def is_flag(cx: SimplicialComplex) -> bool:
    return flag_violation(cx) is None


def flag_violation(cx: SimplicialComplex):
    """A clique of the 1-skeleton that does not span a simplex, or None."""
    for clique in nx.find_cliques(cx.graph()):
        if not cx.contains(clique):
            return tuple(sorted(clique))
    return None


def euler_characteristic(cx: SimplicialComplex, reduced: bool = True) -> int:
    chi = sum((-1) ** k * len(cx.faces(k)) for k in range(cx.dim + 1))
    return chi - 1 if reduced else chi


# -- homology -------------------------------------------------------------


def boundary_matrix(cx: SimplicialComplex, k: int) -> list[dict]:
    """Columns of the augmented boundary map C_k -> C_{k-1} (k >= 0)."""
    rows = cx.face_index(k - 1)
    cols = []
    for s in cx.faces(k):
        col = {}
        for i in range(len(s)):
            col[rows[s[:i] + s[i + 1:]]] = -1 if i % 2 else 1
        cols.append(col)
    return cols


@dataclass
class HomologyProfile:
    """Reduced integral homology, degrees -1..max_dim."""

    ranks: list = field(default_factory=list)
    torsion: list = field(default_factory=list)

    @property
    def max_dim(self) -> int:
        return len(self.ranks) - 2

    def rank(self, i: int) -> int:
        j = i + 1
        return self.ranks[j] if 0 <= j < len(self.ranks) else 0

    def torsion_at(self, i: int) -> list:
        j = i + 1
        return self.torsion[j] if 0 <= j < len(self.torsion) else []

    def vanishes(self, i: int) -> bool:
        return self.rank(i) == 0 and not self.torsion_at(i)

    def to_json(self) -> list:
        return [
            {"dim": i - 1, "rank": r, "torsion": list(t)}
            for i, (r, t) in enumerate(zip(self.ranks, self.torsion))
        ]

    @classmethod
    def from_json(cls, data) -> "HomologyProfile":
        data = sorted(data, key=lambda e: e["dim"])
        return cls([e["rank"] for e in data], [list(e["torsion"]) for e in data])

    def trimmed(self, max_dim: int) -> "HomologyProfile":
        return HomologyProfile(self.ranks[: max_dim + 2], self.torsion[: max_dim + 2])

    def __str__(self) -> str:
        parts = []
        for i, (r, t) in enumerate(zip(self.ranks, self.torsion)):
            if r or t:
                group = " + ".join(([f"Z^{r}" if r > 1 else "Z"] if r else []) + [f"Z/{x}" for x in t])
                parts.append(f"H{i - 1}={group}")
        return ", ".join(parts) or "acyclic"


def _boundary_invariants(cx, k, cache):
    if k not in cache:
        if k > cx.dim or k < 0:
            cache[k] = []
        else:
            cache[k] = smith_invariants(boundary_matrix(cx, k))
    return cache[k]


def reduced_homology(cx: SimplicialComplex, max_dim: int | None = None) -> HomologyProfile:
    """Integral reduced homology in degrees -1..max_dim (default: dim of cx)."""
    top = cx.dim if max_dim is None else max_dim
    cached = cx._profile
    if cached is not None and cached.max_dim >= top:
        return cached.trimmed(top)
    inv: dict = {}
    ranks, torsion = [], []
    for i in range(-1, top + 1):
        n = len(cx.faces(i)) if i <= cx.dim else 0
        out_rank = len(_boundary_invariants(cx, i, inv)) if i >= 0 else 0
        into = _boundary_invariants(cx, i + 1, inv)
        ranks.append(n - out_rank - len(into))
        torsion.append(sorted(x for x in into if x > 1))
    profile = HomologyProfile(ranks, torsion)
    if cached is None or cached.max_dim < top:
        cx._profile = profile
    return profile


def rational_betti(cx: SimplicialComplex, max_dim: int | None = None) -> list[int]:
    """Reduced Betti numbers over Q, degrees -1..max_dim."""
    top = cx.dim if max_dim is None else max_dim
    rk = {}

    def r(k):
        if k not in rk:
            rk[k] = 0 if k < 0 or k > cx.dim else rational_rank(boundary_matrix(cx, k))
        return rk[k]

    return [
        (len(cx.faces(i)) if i <= cx.dim else 0) - r(i) - r(i + 1)
        for i in range(-1, top + 1)
    ]


def is_homologically_connected(cx: SimplicialComplex, m) -> bool:
    """True iff H~_i(cx; Z) = 0 for all i <= m (so m >= -1 needs nonempty)."""
    if m == math.inf:
        return homological_connectivity(cx) == math.inf
    if m < -1:
        return True
    if cx.is_empty():
        return False
    if m >= cx.dim:
        return homological_connectivity(cx) >= m
    if cx._profile is not None and cx._profile.max_dim >= m:
        return all(cx._profile.vanishes(i) for i in range(-1, m + 1))
    # cheap test first: rational Betti numbers, then torsion only if needed
    rb = rational_betti(cx, m)
    if any(rb):
        return False
    prof = reduced_homology(cx, m)
    return all(prof.vanishes(i) for i in range(-1, m + 1))


def homological_connectivity(cx: SimplicialComplex):
    """Largest m with H~_i = 0 for i <= m; -2 if empty, math.inf if acyclic."""
    if cx.is_empty():
        return -2
    prof = reduced_homology(cx)
    for i in range(-1, cx.dim + 1):
        if not prof.vanishes(i):
            return i - 1
    return math.inf


# -- weakly Cohen-Macaulay -----------------------------------------------


@dataclass
class WcmReport:
    n: int
    connectivity_required: int
    globally_ok: bool
    violations: list = field(default_factory=list)
    checked_links: int = 0
    method: str = "homological"

    @property
    def ok(self) -> bool:
        return self.globally_ok and not self.violations

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ok": self.ok,
            "globally_connected": self.globally_ok,
            "required_connectivity": self.connectivity_required,
            "checked_links": self.checked_links,
            "violations": [
                {"simplex": list(s), "required": req} for s, req in self.violations
            ],
            "method": self.method,
        }


def is_wcm(cx: SimplicialComplex, n: int, stop_early: bool = False) -> WcmReport:
    """(n-1)-connected, and the link of every p-simplex (n-p-2)-connected.

    Only simplices with p <= n-1 carry a nonvacuous condition.
    """
    if n < 0:
        raise ValueError("wCM dimension must be >= 0")
    rep = WcmReport(n, n - 1, is_homologically_connected(cx, n - 1))
    if stop_early and not rep.globally_ok:
        return rep
    for p in range(0, n):
        need = n - p - 2
        for s in cx.faces(p):
            rep.checked_links += 1
            if not is_homologically_connected(link(cx, s), need):
                rep.violations.append((s, need))
                if stop_early:
                    return rep
    return rep


# -- induced maps on homology ----------------------------------------------


@dataclass
class InducedMapRanks:
    """Ranks over Q of H~_d(A) -> H~_d(X) for an inclusion A into X."""

    dims: list = field(default_factory=list)  # (d, source, target, image)

    def iso(self, d: int) -> bool:
        for dd, s, t, im in self.dims:
            if dd == d:
                return s == t == im
        return True

    def epi(self, d: int) -> bool:
        for dd, s, t, im in self.dims:
            if dd == d:
                return im == t
        return True

    def to_json(self) -> list:
        return [
            {"dim": d, "source_rank": s, "target_rank": t, "image_rank": im}
            for d, s, t, im in self.dims
        ]


def _cycle_basis(cx: SimplicialComplex, d: int):
    if d == -1:
        return [{0: 1}]  # the empty simplex spans C_{-1} and every chain is a cycle
    cols = boundary_matrix(cx, d)
    nrows = len(cx.faces(d - 1))
    return rational_nullspace(cols, nrows)


def inclusion_ranks(sub: SimplicialComplex, cx: SimplicialComplex, max_dim: int) -> InducedMapRanks:
    """Induced map of the inclusion sub -> cx on rational reduced homology."""
    out = InducedMapRanks()
    for d in range(-1, max_dim + 1):
        bx = boundary_matrix(cx, d + 1) if 0 <= d + 1 <= cx.dim else []
        rank_bx = rational_rank(bx)
        nx_d = len(cx.faces(d)) if d <= cx.dim else 0
        rank_dx = rational_rank(boundary_matrix(cx, d)) if 0 <= d <= cx.dim else 0
        target = nx_d - rank_dx - rank_bx
        if d > sub.dim:
            out.dims.append((d, 0, target, 0))
            continue
        z = _cycle_basis(sub, d)
        ba = boundary_matrix(sub, d + 1) if d + 1 <= sub.dim else []
        source = len(z) - rational_rank(ba)
        if not z:
            out.dims.append((d, source, target, 0))
            continue
        sub_faces = sub.faces(d)
        xi = cx.face_index(d)
        embedded = []
        for vec in z:
            col = {}
            den = 1
            for v in vec.values():
                den = math.lcm(den, getattr(v, "denominator", 1))
            for j, v in vec.items():
                col[xi[sub_faces[j]]] = int(v * den)
            embedded.append(col)
        image = rational_rank(bx + embedded) - rank_bx
        out.dims.append((d, source, target, image))
    return out


def inclusion_verdict(sub: SimplicialComplex, cx: SimplicialComplex, m) -> dict:
    """Iso on H~_d for d <= m and epi at m + 1 (rational, homological)."""
    limit = max(cx.dim, sub.dim) if m == math.inf else m
    top = min(limit + 1, max(cx.dim, sub.dim) + 1)
    ranks = inclusion_ranks(sub, cx, top)
    per_dim = []
    ok = True
    for d, s, t, im in ranks.dims:
        want = "iso" if d <= limit else "epi"
        good = (s == t == im) if want == "iso" else (im == t)
        ok &= good
        per_dim.append({"dim": d, "expected": want, "holds": good,
                        "source_rank": s, "target_rank": t, "image_rank": im})
    return {"holds": ok, "per_dim": per_dim}


def profile_dump(p: HomologyProfile) -> str:
    return json.dumps(p.to_json(), separators=(",", ":"))
