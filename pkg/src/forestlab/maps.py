"""Simplicial maps and fiber/join verifiers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .complexes import (
    SimplicialComplex,
    full_subcomplex,
    homological_connectivity,
    is_homologically_connected,
    is_wcm,
    link,
    maximalize,
)

METHOD = "homological"


class MapError(ValueError):
    pass


@dataclass
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: dict

    def __post_init__(self):
        vm = dict(self.vertex_map) if not isinstance(self.vertex_map, (list, tuple)) \
            else dict(enumerate(self.vertex_map))
        self.vertex_map = {int(k): int(v) for k, v in vm.items()}
        missing = [v for v in self.source.vertices if v not in self.vertex_map]
        if missing:
            raise MapError(f"vertex map undefined on {missing}")
        tv = set(self.target.vertices)
        outside = sorted({self.vertex_map[v] for v in self.source.vertices} - tv)
        if outside:
            raise MapError(f"images {outside} are not target vertices")

    def __call__(self, v: int) -> int:
        return self.vertex_map[v]

    def image(self, s) -> tuple:
        return tuple(sorted({self.vertex_map[v] for v in s}))

    def fiber(self, x: int) -> list:
        return [v for v in self.source.vertices if self.vertex_map[v] == x]

    def preimage(self, s) -> SimplicialComplex:
        """Preimage of the closed simplex s: full subcomplex on vertices over s."""
        s = set(s)
        return full_subcomplex(self.source, [v for v in self.source.vertices if self.vertex_map[v] in s])

    def image_complex(self, cx: SimplicialComplex | None = None) -> SimplicialComplex:
        cx = self.source if cx is None else cx
        return self.target.with_facets(self.image(f) for f in cx.facets)

    def to_json(self) -> dict:
        n = len(self.source.labels)
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "vertex_map": [self.vertex_map.get(i) for i in range(n)],
        }

    @classmethod
    def from_json(cls, data) -> "SimplicialMap":
        try:
            src = SimplicialComplex.from_json(data["source"])
            tgt = SimplicialComplex.from_json(data["target"])
            vm = data["vertex_map"]
        except (KeyError, TypeError) as exc:
            raise MapError(f"malformed map JSON: {exc}") from exc
        if isinstance(vm, list):
            vm = {i: v for i, v in enumerate(vm) if v is not None}
        return cls(src, tgt, vm)


def compose(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    """g after f."""
    return SimplicialMap(f.source, g.target, {v: g(f(v)) for v in f.source.vertices})


@dataclass
class MapReport:
    valid: bool
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"valid": self.valid, "violating_simplices": [list(s) for s in self.violations]}


def validate_map(m: SimplicialMap) -> MapReport:
    bad = [f for f in m.source.facets if not m.target.contains(m.image(f))]
    return MapReport(not bad, bad)


# -- join complexes ---------------------------------------------------------


@dataclass
class JoinReport:
    kind: str
    surjective: bool
    simplex_injective: bool
    fiber_condition: bool
    witnesses: dict = field(default_factory=dict)
    partial_fibers: list = field(default_factory=list)
    fiber_sizes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.surjective and self.simplex_injective and self.fiber_condition

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "ok": self.ok,
            "surjective": self.surjective,
            "simplex_injective": self.simplex_injective,
            "fiber_condition": self.fiber_condition,
            "witnesses": {k: _jsonable(v) for k, v in self.witnesses.items()},
            "partial_fibers": [
                {"simplex": list(s), "vertex": x, "in_K_sigma": a, "full_fiber": b}
                for s, x, a, b in self.partial_fibers
            ],
            "fiber_sizes": {str(k): v for k, v in sorted(self.fiber_sizes.items())},
        }


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def _simplices_by_image(m: SimplicialMap):
    by_image: dict = {}
    for s in m.source.simplices():
        img = m.image(s)
        if len(img) == len(s):
            by_image.setdefault(img, []).append(s)
    return by_image


def _conditions_12(m: SimplicialMap, rep: JoinReport):
    images = {m.image(f) for f in m.source.facets}
    missing = [f for f in m.target.facets if not any(set(f) <= set(i) for i in images)]
    rep.surjective = not missing
    if missing:
        rep.witnesses["surjective"] = missing[0]
    noninj = [f for f in m.source.facets if len(m.image(f)) != len(f)]
    rep.simplex_injective = not noninj
    if noninj:
        rep.witnesses["simplex_injective"] = noninj[0]


def _sizes(m):
    sizes: dict = {}
    for x in m.target.vertices:
        n = len(m.fiber(x))
        sizes[n] = sizes.get(n, 0) + 1
    return sizes


def is_join_complex(m: SimplicialMap) -> JoinReport:
    """Conditions (1) surjective, (2) injective on simplices and (3): for
    every target simplex sigma, the simplices projecting onto sigma form the
    join of their vertex sets over each vertex of sigma.
    """
    rep = JoinReport("join", False, False, False)
    _conditions_12(m, rep)
    by_image = _simplices_by_image(m)
    ok = True
    for sigma in m.target.simplices():
        lifts = by_image.get(sigma, [])
        parts = [sorted({y for s in lifts for y in s if m(y) == x}) for x in sigma]
        if lifts and math.prod(len(p) for p in parts) != len(set(lifts)):
            if ok:
                have = set(lifts)
                for t in itertools.product(*parts):
                    if tuple(sorted(t)) not in have:
                        rep.witnesses["fiber_condition"] = {
                            "simplex": list(sigma), "missing_transversal": sorted(t)}
                        break
            ok = False
        for x, part in zip(sigma, parts):
            full = m.fiber(x)
            if len(part) != len(full):
                rep.partial_fibers.append((sigma, x, part, full))
    rep.fiber_condition = ok
    rep.fiber_sizes = _sizes(m)
    return rep


def is_complete_join(m: SimplicialMap) -> JoinReport:
    """(1), (2) and completeness: over every target simplex, every transversal
    of the full vertex fibers spans a simplex. Checking target facets suffices
    once the fibers are nonempty.
    """
    rep = JoinReport("complete_join", False, False, False)
    _conditions_12(m, rep)
    fibers = {x: m.fiber(x) for x in m.target.vertices}
    empty = [x for x in m.target.vertices if not fibers[x]]
    ok = not empty
    if empty:
        rep.witnesses["fiber_condition"] = {"empty_fiber_over": empty[0]}
    else:
        for sigma in m.target.facets:
            for t in itertools.product(*(fibers[x] for x in sigma)):
                if not m.source.contains(t):
                    rep.witnesses["fiber_condition"] = {
                        "simplex": list(sigma), "missing_transversal": sorted(t)}
                    ok = False
                    break
            if not ok:
                break
    rep.fiber_condition = ok
    rep.fiber_sizes = _sizes(m)
    return rep


def section_of_complete_join(m: SimplicialMap) -> SimplicialMap:
    """A simplicial s with m o s = id, choosing the least fiber element."""
    rep = is_complete_join(m)
    if not rep.ok:
        raise MapError("not a complete join: " + str(rep.to_json()["witnesses"]))
    s = SimplicialMap(m.target, m.source, {x: min(m.fiber(x)) for x in m.target.vertices})
    if not validate_map(s).valid:
        raise MapError("chosen section is not simplicial")
    return s


def is_identity_on(m: SimplicialMap, cx: SimplicialComplex) -> bool:
    return all(m(v) == v for v in cx.vertices)


# -- fiber theorems ------------------------------------------------------------


@dataclass
class FiberReport:
    n: int
    hypothesis: bool
    violations: list = field(default_factory=list)
    source_connected: bool | None = None
    target_connected: bool | None = None
    conclusion: bool | None = None
    method: str = METHOD

    @property
    def counterexample(self) -> bool:
        return self.hypothesis and self.conclusion is False

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "hypothesis": self.hypothesis,
            "violations": [{"simplex": list(s), "required": req} for s, req in self.violations],
            "source_connected": self.source_connected,
            "target_connected": self.target_connected,
            "conclusion": self.conclusion,
            "method": self.method,
        }


def quillen_fiber_check(m: SimplicialMap, n: int) -> FiberReport:
    """Preimages of closed simplices n-connected => (source n-conn <=> target n-conn)."""
    bad = [s for s in m.target.simplices() if not is_homologically_connected(m.preimage(s), n)]
    rep = FiberReport(n, not bad, [(s, n) for s in bad])
    rep.source_connected = is_homologically_connected(m.source, n)
    rep.target_connected = is_homologically_connected(m.target, n)
    if rep.hypothesis:
        rep.conclusion = rep.source_connected == rep.target_connected
    return rep


def order_complex(elements: list) -> SimplicialComplex:
    """Chains of a family of finite sets ordered by inclusion."""
    elements = [frozenset(e) for e in elements]
    index = {e: i for i, e in enumerate(elements)}
    up = {e: [f for f in elements if e < f] for e in elements}
    chains = []

    def extend(chain):
        last = chain[-1]
        nxt = [f for f in up[last] if not any(last < g < f for g in up[last])]
        if not nxt:
            chains.append(tuple(index[c] for c in chain))
            return
        for f in nxt:
            extend(chain + [f])

    minimal = [e for e in elements if not any(f < e for f in elements)]
    for e in minimal:
        extend([e])
    labels = ["{" + ",".join(map(str, sorted(e))) + "}" for e in elements]
    return SimplicialComplex(maximalize(chains), labels)


def barycentric_fiber(m: SimplicialMap, sigma) -> SimplicialComplex:
    """Fiber over the barycenter of sigma.

    The preimage of an interior point of sigma meets each source simplex tau
    with image exactly sigma in a product of simplices, and these cells are
    glued along the faces of tau that still map onto sigma. The fiber is
    therefore homotopy equivalent to the order complex of
    {tau : m(tau) = sigma}, which is what is returned.
    """
    sigma = tuple(sorted(sigma))
    over = [s for s in m.source.simplices() if m.image(s) == sigma]
    return order_complex(over)


def barycentric_fiber_check(m: SimplicialMap, n: int) -> FiberReport:
    """Target n-connected and fibers over k-simplex barycenters (n-k)-connected
    => source n-connected.
    """
    bad = []
    for s in m.target.simplices():
        need = n - (len(s) - 1)
        if not is_homologically_connected(barycentric_fiber(m, s), need):
            bad.append((s, need))
    rep = FiberReport(n, False, bad)
    rep.target_connected = is_homologically_connected(m.target, n)
    rep.hypothesis = rep.target_connected and not bad
    rep.source_connected = is_homologically_connected(m.source, n)
    if rep.hypothesis:
        rep.conclusion = rep.source_connected
    return rep


@dataclass
class JoinConnectivityReport:
    n: int
    join_ok: bool
    base_wcm: bool
    link_violations: list = field(default_factory=list)
    expected_connectivity: int = -2
    observed_connectivity: object = None
    conclusion: bool | None = None
    method: str = METHOD

    @property
    def hypothesis(self) -> bool:
        return self.join_ok and self.base_wcm and not self.link_violations

    def to_json(self) -> dict:
        obs = self.observed_connectivity
        return {
            "n": self.n,
            "hypothesis": self.hypothesis,
            "join_complex": self.join_ok,
            "base_wcm": self.base_wcm,
            "link_violations": [{"simplex": list(s), "required_wcm_dim": k} for s, k in self.link_violations],
            "expected_connectivity": self.expected_connectivity,
            "observed_connectivity": "inf" if obs == math.inf else obs,
            "conclusion": self.conclusion,
            "method": self.method,
        }


def _wcm_or_vacuous(cx, k):
    return True if k < 0 else is_wcm(cx, k, stop_early=True).ok


def join_connectivity_check(m: SimplicialMap, n: int) -> JoinConnectivityReport:
    """Checker for: join complex over a wCM(n) base whose projected links
    pi(lk sigma) are wCM(n - p - 2) is (n/2 - 1)-connected.
    The statement is verified on the instance, never assumed.
    """
    rep = JoinConnectivityReport(n, is_join_complex(m).ok, _wcm_or_vacuous(m.target, n))
    for s in m.source.simplices():
        p = len(s) - 1
        k = n - p - 2
        if k < 0:
            continue
        if not _wcm_or_vacuous(m.image_complex(link(m.source, s)), k):
            rep.link_violations.append((s, k))
    rep.expected_connectivity = n // 2 - 1
    rep.observed_connectivity = homological_connectivity(m.source)
    if rep.hypothesis:
        rep.conclusion = rep.observed_connectivity >= rep.expected_connectivity
    return rep
