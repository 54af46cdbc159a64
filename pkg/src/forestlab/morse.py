"""Combinatorial Morse theory: height functions, descending links, the
Morse lemma on sublevel complexes, and the bad simplex argument.

All connectivity statements are checked on integral reduced homology and
induced maps on rational homology; reports say so in their ``method``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .complexes import (
    SimplicialComplex,
    barycentric_subdivision,
    full_subcomplex,
    inclusion_verdict,
    is_homologically_connected,
    link,
)

METHOD = "homological"


class HeightError(ValueError):
    pass


@dataclass(frozen=True)
class HeightFunction:
    """Vertex id -> integer tuple, compared lexicographically."""

    values: dict

    def __post_init__(self):
        vals = {int(k): tuple(v) if isinstance(v, (tuple, list)) else (v,)
                for k, v in dict(self.values).items()}
        arities = {len(v) for v in vals.values()}
        if len(arities) > 1:
            raise HeightError(f"height tuples have mixed arity {sorted(arities)}")
        object.__setattr__(self, "values", vals)

    def __call__(self, v: int) -> tuple:
        return self.values[v]

    @classmethod
    def from_list(cls, heights) -> "HeightFunction":
        return cls({i: h for i, h in enumerate(heights)})

    def to_json(self) -> dict:
        return {str(k): list(v) for k, v in sorted(self.values.items())}


@dataclass
class HeightReport:
    valid: bool
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"valid": self.valid, "violating_edges": [list(e) for e in self.violations]}


def _require_total(cx: SimplicialComplex, h: HeightFunction):
    missing = [v for v in cx.vertices if v not in h.values]
    if missing:
        raise HeightError(f"no height for vertices {missing}")


def check_height(cx: SimplicialComplex, h: HeightFunction) -> HeightReport:
    _require_total(cx, h)
    bad = [e for e in cx.faces(1) if h(e[0]) == h(e[1])]
    return HeightReport(not bad, bad)


def _validated(cx, h):
    rep = check_height(cx, h)
    if not rep.valid:
        raise HeightError(f"height is constant on edges {rep.violations[:5]}")


def sublevel(cx: SimplicialComplex, h: HeightFunction, t, strict: bool = False) -> SimplicialComplex:
    """Full subcomplex on the vertices of height <= t (or < t)."""
    _require_total(cx, h)
    t = tuple(t) if isinstance(t, (tuple, list)) else (t,)
    keep = [v for v in cx.vertices if (h(v) < t if strict else h(v) <= t)]
    return full_subcomplex(cx, keep)


def descending_link(cx: SimplicialComplex, h: HeightFunction, v: int) -> SimplicialComplex:
    if v not in cx.vertices:
        raise ValueError(f"{v} is not a vertex")
    _require_total(cx, h)
    lk = link(cx, (v,))
    return full_subcomplex(lk, [w for w in lk.vertices if h(w) < h(v)])


@dataclass
class MorseReport:
    level: tuple
    m: object
    hypothesis: bool
    violating_vertices: list = field(default_factory=list)
    conclusion: dict | None = None
    method: str = METHOD

    @property
    def conclusion_holds(self):
        return None if self.conclusion is None else self.conclusion["holds"]

    @property
    def counterexample(self) -> bool:
        return self.hypothesis and not self.conclusion_holds

    def to_json(self) -> dict:
        return {
            "level": list(self.level),
            "m": "inf" if self.m == math.inf else self.m,
            "hypothesis": self.hypothesis,
            "violating_vertices": self.violating_vertices,
            "conclusion": self.conclusion,
            "method": self.method,
        }


def morse_lemma_verify(cx: SimplicialComplex, h: HeightFunction, s, m,
                       always_check_conclusion: bool = False) -> MorseReport:
    """Hypothesis: every descending link above level s is m-connected.
    Conclusion: X^{<=s} -> X is iso on H~_d for d <= m and epi at m + 1.
    """
    _validated(cx, h)
    s = tuple(s) if isinstance(s, (tuple, list)) else (s,)
    bad = [v for v in cx.vertices
           if h(v) > s and not is_homologically_connected(descending_link(cx, h, v), m)]
    rep = MorseReport(s, m, not bad, bad)
    if rep.hypothesis or always_check_conclusion:
        rep.conclusion = inclusion_verdict(sublevel(cx, h, s), cx, m)
    return rep


# -- bad simplex argument ------------------------------------------------


class BarError(ValueError):
    pass


@dataclass
class BarOperator:
    """sigma -> sub-face sigma-bar, given as a function on sorted tuples."""

    func: Callable
    name: str = "custom"

    def __call__(self, s) -> frozenset:
        return frozenset(self.func(tuple(sorted(s))))

    def validate(self, cx: SimplicialComplex) -> list:
        """Return the list of violations (empty when the operator is valid)."""
        problems = []
        if self(()):
            problems.append(("nonempty on the empty simplex", ()))
        for s in cx.simplices():
            b = self(s)
            if not b <= set(s):
                problems.append(("not a subset", s))
                continue
            if self(tuple(sorted(b))) != b:
                problems.append(("not idempotent", s))
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                if not self(face) <= b:
                    problems.append(("not monotone", s))
                    break
        return problems


def coloring_to_bar(cx: SimplicialComplex, color) -> BarOperator:
    """sigma-bar = vertices whose colour occurs at least twice in sigma."""
    missing = [v for v in cx.vertices if _lookup(color, v) is None]
    if missing:
        raise BarError(f"no colour for vertices {missing}")

    def bar(s):
        counts: dict = {}
        for v in s:
            c = _lookup(color, v)
            counts[c] = counts.get(c, 0) + 1
        return [v for v in s if counts[_lookup(color, v)] > 1]

    return BarOperator(bar, "coloring")


def partition_to_bar(cx: SimplicialComplex, good: Iterable[int], bad: Iterable[int] | None = None) -> BarOperator:
    """sigma-bar = bad vertices of sigma."""
    good = set(good)
    if bad is not None:
        bad = set(bad)
        missing = [v for v in cx.vertices if v not in good and v not in bad]
        if missing:
            raise BarError(f"vertices {missing} are neither good nor bad")
        if good & bad:
            raise BarError(f"vertices {sorted(good & bad)} are both good and bad")
    return BarOperator(lambda s: [v for v in s if v not in good], "partition")


def _lookup(table, v):
    try:
        return table[v]
    except (KeyError, IndexError):
        return None


def good_subcomplex(cx: SimplicialComplex, bar: BarOperator) -> SimplicialComplex:
    return cx.with_facets(s for s in cx.simplices() if not bar(s))


def bad_simplices(cx: SimplicialComplex, bar: BarOperator) -> list:
    return [s for s in cx.simplices() if bar(s) == frozenset(s)]


def good_link(cx: SimplicialComplex, bar: BarOperator, s) -> SimplicialComplex:
    """Simplices rho of lk(s) with bar(s u rho) = bar(s)."""
    s = tuple(sorted(s))
    ss = set(s)
    target = bar(s)
    lk = link(cx, s)
    keep = [rho for rho in lk.simplices() if bar(tuple(sorted(ss | set(rho)))) == target]
    return lk.with_facets(keep)


@dataclass
class BadSimplexReport:
    m: object
    hypothesis: bool
    bad_count: int
    violations: list = field(default_factory=list)
    good: SimplicialComplex | None = None
    conclusion: dict | None = None
    method: str = METHOD

    @property
    def conclusion_holds(self):
        return None if self.conclusion is None else self.conclusion["holds"]

    @property
    def counterexample(self) -> bool:
        return self.hypothesis and not self.conclusion_holds

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "hypothesis": self.hypothesis,
            "bad_simplices": self.bad_count,
            "violations": [{"simplex": list(s), "required": req} for s, req in self.violations],
            "good_subcomplex": self.good.to_json() if self.good is not None else None,
            "conclusion": self.conclusion,
            "method": self.method,
        }


def bad_simplex_analyze(cx: SimplicialComplex, bar: BarOperator, m,
                        always_check_conclusion: bool = False) -> BadSimplexReport:
    problems = bar.validate(cx)
    if problems:
        raise BarError(f"invalid bar operator: {problems[:3]}")
    good = good_subcomplex(cx, bar)
    bads = bad_simplices(cx, bar)
    violations = []
    for s in bads:
        need = m - (len(s) - 1)
        if not is_homologically_connected(good_link(cx, bar, s), need):
            violations.append((s, need))
    rep = BadSimplexReport(m, not violations, len(bads), violations, good)
    if rep.hypothesis or always_check_conclusion:
        rep.conclusion = inclusion_verdict(good, cx, m)
    return rep


def defect_height(cx: SimplicialComplex, bar: BarOperator):
    """Barycentric subdivision with the height <#bar(sigma), -dim sigma>.

    Vertex i of the subdivision is the i-th simplex of ``cx.simplices()``.
    """
    sd = barycentric_subdivision(cx)
    simplices = cx.simplices()
    h = HeightFunction({i: (len(bar(s)), -(len(s) - 1)) for i, s in enumerate(simplices)})
    return sd, h
