"""Higman-Thompson groups V_{d,r} as paired (d,r)-forest diagrams.

A caret is addressed by ``(root, word)`` where ``word`` is a tuple over
``range(d)`` giving the path from the root to the caret's top vertex. Leaves
are ordered depth-first, roots in index order, children in slot order.

Permutations are stored 0-based in one-line notation: ``perm[i]`` is the
position in the range forest of the image of domain leaf ``i``. Text and
JSON output use 1-based entries.

``multiply(a, b)`` is ``a * b``: first ``a``, then ``b``. As maps on the
boundary Cantor set this is the composite ``b o a``.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

Address = tuple[int, tuple[int, ...]]

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


class DiagramError(ValueError):
    """Raised for structurally invalid forests or diagrams."""


def format_address(addr: Address) -> str:
    root, word = addr
    return f"{root}:" + "".join(_DIGITS[c] for c in word)


def parse_address(text: str) -> Address:
    try:
        root, word = text.split(":")
        return int(root), tuple(_DIGITS.index(c) for c in word)
    except ValueError as exc:
        raise DiagramError(f"bad caret address {text!r}") from exc


@dataclass(frozen=True)
class DAryForest:
    d: int
    r: int
    carets: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.d < 2 or self.r < 1:
            raise DiagramError(f"need d >= 2 and r >= 1, got d={self.d}, r={self.r}")
        object.__setattr__(self, "carets", frozenset(self.carets))
        for root, word in self.carets:
            if not 0 <= root < self.r:
                raise DiagramError(f"root {root} out of range for r={self.r}")
            if any(not 0 <= c < self.d for c in word):
                raise DiagramError(f"bad slot in {format_address((root, word))}")
            if word and (root, word[:-1]) not in self.carets:
                raise DiagramError(
                    f"caret {format_address((root, word))} hangs below a leaf"
                )

    @classmethod
    def from_addresses(cls, d: int, r: int, addresses: Iterable[str]) -> "DAryForest":
        return cls(d, r, frozenset(parse_address(a) for a in addresses))

    @cached_property
    def leaves(self) -> tuple[Address, ...]:
        out = []

        def walk(root, word):
            if (root, word) in self.carets:
                for c in range(self.d):
                    walk(root, word + (c,))
            else:
                out.append((root, word))

        for root in range(self.r):
            walk(root, ())
        return tuple(out)

    @cached_property
    def leaf_index(self) -> dict:
        return {addr: i for i, addr in enumerate(self.leaves)}

    @property
    def leaf_count(self) -> int:
        return self.r + len(self.carets) * (self.d - 1)

    @cached_property
    def elementary(self) -> tuple[tuple[Address, int], ...]:
        """Elementary carets with the position of their first child leaf."""
        out = []
        for root, word in self.carets:
            if all((root, word + (c,)) not in self.carets for c in range(self.d)):
                out.append(((root, word), self.leaf_index[(root, word + (0,))]))
        return tuple(sorted(out, key=lambda t: t[1]))

    def add_caret(self, addr: Address) -> "DAryForest":
        if addr not in self.leaf_index:
            raise DiagramError(f"{format_address(addr)} is not a leaf")
        return DAryForest(self.d, self.r, self.carets | {addr})

    def contains(self, other: "DAryForest") -> bool:
        return self.carets >= other.carets

    def addresses(self) -> list[str]:
        return [format_address(a) for a in sorted(self.carets)]

    def __len__(self) -> int:
        return len(self.carets)


def empty_forest(d: int, r: int) -> DAryForest:
    return DAryForest(d, r, frozenset())


def common_expansion(f1: DAryForest, f2: DAryForest) -> DAryForest:
    """Smallest forest containing both (the union of caret sets)."""
    if (f1.d, f1.r) != (f2.d, f2.r):
        raise DiagramError("forests have different (d, r)")
    return DAryForest(f1.d, f1.r, f1.carets | f2.carets)


def standard_forest(d: int, r: int, k: int) -> DAryForest:
    """The forest whose k carets fill the infinite forest breadth-first."""
    carets = []
    frontier = [(root, ()) for root in range(r)]
    while len(carets) < k:
        nxt = []
        for addr in frontier:
            if len(carets) == k:
                break
            carets.append(addr)
            nxt.extend((addr[0], addr[1] + (c,)) for c in range(d))
        frontier = nxt
    return DAryForest(d, r, frozenset(carets))


def all_forests(d: int, r: int, k: int) -> list[DAryForest]:
    """Every (d, r)-forest with exactly k carets, in a deterministic order."""
    layer = {empty_forest(d, r)}
    for _ in range(k):
        layer = {f.add_caret(leaf) for f in layer for leaf in f.leaves}
    return sorted(layer, key=lambda f: sorted(f.carets))


@dataclass(frozen=True)
class PairedForestDiagram:
    domain: DAryForest
    perm: tuple
    range: DAryForest

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))
        if (self.domain.d, self.domain.r) != (self.range.d, self.range.r):
            raise DiagramError("domain and range forests have different (d, r)")
        n = self.domain.leaf_count
        if self.range.leaf_count != n:
            raise DiagramError(
                f"leaf count mismatch: {n} vs {self.range.leaf_count}"
            )
        if sorted(self.perm) != list(range(n)):
            raise DiagramError(f"perm is not a bijection on {n} leaves")

    @property
    def d(self) -> int:
        return self.domain.d

    @property
    def r(self) -> int:
        return self.domain.r

    @property
    def leaf_count(self) -> int:
        return len(self.perm)

    def reductions(self) -> list[tuple[Address, Address]]:
        """All available elementary caret pairs ``(domain caret, range caret)``."""
        d = self.d
        range_elem = {pos: addr for addr, pos in self.range.elementary}
        out = []
        for caret, i in self.domain.elementary:
            j = self.perm[i]
            if j in range_elem and all(self.perm[i + t] == j + t for t in range(1, d)):
                out.append((caret, range_elem[j]))
        return out

    @property
    def reduced(self) -> bool:
        return not self.reductions()

    def apply_reduction(self, pair: tuple[Address, Address]) -> "PairedForestDiagram":
        lo, hi = pair
        d = self.d
        i = self.domain.leaf_index[(lo[0], lo[1] + (0,))]
        j = self.range.leaf_index[(hi[0], hi[1] + (0,))]
        if not all(self.perm[i + t] == j + t for t in range(d)):
            raise DiagramError("caret pair is not a reduction of this diagram")

        def squash(pos, start):
            if pos <= start:
                return pos
            if pos < start + d:
                return start
            return pos - (d - 1)

        perm = [0] * (self.leaf_count - d + 1)
        for k, image in enumerate(self.perm):
            if i < k < i + d:
                continue
            perm[squash(k, i)] = squash(image, j)
        return PairedForestDiagram(
            DAryForest(d, self.r, self.domain.carets - {lo}),
            tuple(perm),
            DAryForest(d, self.r, self.range.carets - {hi}),
        )

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "r": self.r,
            "domain": self.domain.addresses(),
            "perm": [p + 1 for p in self.perm],
            "range": self.range.addresses(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PairedForestDiagram":
        try:
            d, r = int(data["d"]), int(data["r"])
            return cls(
                DAryForest.from_addresses(d, r, data["domain"]),
                tuple(int(p) - 1 for p in data["perm"]),
                DAryForest.from_addresses(d, r, data["range"]),
            )
        except (KeyError, TypeError) as exc:
            raise DiagramError(f"malformed diagram JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __str__(self) -> str:
        return self.dumps()


def trivial_diagram(d: int, r: int) -> PairedForestDiagram:
    f = empty_forest(d, r)
    return PairedForestDiagram(f, tuple(range(r)), f)


def reduce(diag: PairedForestDiagram) -> PairedForestDiagram:
    """Apply reductions until none is available.

    Reduced representatives are unique, so the order does not matter; see
    ``check_confluence`` for the exhaustive small-case verification.
    """
    while True:
        moves = diag.reductions()
        if not moves:
            return diag
        diag = diag.apply_reduction(moves[0])


def expand(diag: PairedForestDiagram, leaf_index: int) -> PairedForestDiagram:
    """Hang a caret below domain leaf ``leaf_index`` (0-based) and its image."""
    n = diag.leaf_count
    if not 0 <= leaf_index < n:
        raise DiagramError(f"leaf index {leaf_index} out of range 0..{n - 1}")
    d = diag.d
    i, j = leaf_index, diag.perm[leaf_index]

    def grow(pos, start):
        return pos if pos <= start else pos + d - 1

    perm = [0] * (n + d - 1)
    for k, image in enumerate(diag.perm):
        if k == i:
            for t in range(d):
                perm[i + t] = j + t
        else:
            perm[grow(k, i)] = grow(image, j)
    return PairedForestDiagram(
        diag.domain.add_caret(diag.domain.leaves[i]),
        tuple(perm),
        diag.range.add_caret(diag.range.leaves[j]),
    )


def _missing_leaf_caret(current: DAryForest, target: DAryForest):
    for addr in sorted(target.carets - current.carets, key=lambda a: len(a[1])):
        if addr in current.leaf_index:
            return addr
    raise DiagramError("target forest does not contain the current forest")


def expand_domain_to(diag: PairedForestDiagram, target: DAryForest) -> PairedForestDiagram:
    if not target.contains(diag.domain):
        raise DiagramError("target forest does not contain the domain forest")
    while diag.domain.carets != target.carets:
        addr = _missing_leaf_caret(diag.domain, target)
        diag = expand(diag, diag.domain.leaf_index[addr])
    return diag


def expand_range_to(diag: PairedForestDiagram, target: DAryForest) -> PairedForestDiagram:
    if not target.contains(diag.range):
        raise DiagramError("target forest does not contain the range forest")
    while diag.range.carets != target.carets:
        addr = _missing_leaf_caret(diag.range, target)
        diag = expand(diag, diag.perm.index(diag.range.leaf_index[addr]))
    return diag


@dataclass(frozen=True)
class VElement:
    """An element of V_{d,r}; always holds its reduced diagram."""

    canonical: PairedForestDiagram

    def __post_init__(self):
        object.__setattr__(self, "canonical", reduce(self.canonical))

    @classmethod
    def identity(cls, d: int, r: int) -> "VElement":
        return cls(trivial_diagram(d, r))

    @classmethod
    def from_forests(cls, domain: DAryForest, perm: Sequence[int], range_: DAryForest):
        return cls(PairedForestDiagram(domain, tuple(perm), range_))

    @property
    def d(self) -> int:
        return self.canonical.d

    @property
    def r(self) -> int:
        return self.canonical.r

    def __mul__(self, other: "VElement") -> "VElement":
        return multiply(self, other)

    def __invert__(self) -> "VElement":
        return invert(self)

    def is_identity(self) -> bool:
        return is_identity(self)

    def to_json(self) -> dict:
        return self.canonical.to_json()

    @classmethod
    def from_json(cls, data: dict) -> "VElement":
        return cls(PairedForestDiagram.from_json(data))

    def __str__(self) -> str:
        return self.canonical.dumps()


def _check_same_group(a: VElement, b: VElement):
    if (a.d, a.r) != (b.d, b.r):
        raise DiagramError(f"V_{{{a.d},{a.r}}} and V_{{{b.d},{b.r}}} do not match")


def compose_diagrams(a: PairedForestDiagram, b: PairedForestDiagram) -> PairedForestDiagram:
    """Unreduced product over the common expansion of a.range and b.domain."""
    middle = common_expansion(a.range, b.domain)
    a2 = expand_range_to(a, middle)
    b2 = expand_domain_to(b, middle)
    return PairedForestDiagram(
        a2.domain, tuple(b2.perm[p] for p in a2.perm), b2.range
    )


def multiply(a: VElement, b: VElement) -> VElement:
    _check_same_group(a, b)
    return VElement(compose_diagrams(a.canonical, b.canonical))


def invert(a: VElement) -> VElement:
    diag = a.canonical
    inv = [0] * diag.leaf_count
    for i, p in enumerate(diag.perm):
        inv[p] = i
    return VElement(PairedForestDiagram(diag.range, tuple(inv), diag.domain))


def equals(a: VElement, b: VElement) -> bool:
    return a.canonical == b.canonical


def is_identity(a: VElement) -> bool:
    diag = a.canonical
    return (
        not diag.domain.carets
        and not diag.range.carets
        and diag.perm == tuple(range(diag.leaf_count))
    )


# -- random sampling ---------------------------------------------------------


def random_forest(d: int, r: int, k: int, rng: random.Random) -> DAryForest:
    forest = empty_forest(d, r)
    for _ in range(k):
        forest = forest.add_caret(rng.choice(forest.leaves))
    return forest


def random_diagram(d: int, r: int, max_carets: int, rng: random.Random) -> PairedForestDiagram:
    """Uniform caret count in [0, max_carets], uniform placement, uniform perm."""
    k = rng.randint(0, max_carets)
    domain = random_forest(d, r, k, rng)
    range_ = random_forest(d, r, k, rng)
    n = domain.leaf_count
    return PairedForestDiagram(domain, tuple(rng.sample(range(n), n)), range_)


def random_element(d: int, r: int, max_carets: int, rng: random.Random) -> VElement:
    return VElement(random_diagram(d, r, max_carets, rng))


# -- confluence --------------------------------------------------------------


def reduction_outcomes(diag: PairedForestDiagram, _memo=None) -> frozenset:
    """Results of every maximal reduction sequence starting at ``diag``."""
    memo = {} if _memo is None else _memo
    if diag in memo:
        return memo[diag]
    moves = diag.reductions()
    if not moves:
        out = frozenset([diag])
    else:
        out = frozenset().union(
            *(reduction_outcomes(diag.apply_reduction(m), memo) for m in moves)
        )
    memo[diag] = out
    return out


def enumerate_diagrams(d: int, r: int, k: int) -> Iterator[PairedForestDiagram]:
    forests = all_forests(d, r, k)
    n = r + k * (d - 1)
    for lo in forests:
        for hi in forests:
            for perm in itertools.permutations(range(n)):
                yield PairedForestDiagram(lo, perm, hi)


@dataclass
class ConfluenceReport:
    d: int
    r: int
    max_carets: int
    layers: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def total(self) -> int:
        return sum(layer["diagrams"] for layer in self.layers)


def check_confluence(d: int, r: int, max_carets: int) -> ConfluenceReport:
    """Exhaustive confluence check over all diagrams with <= max_carets carets.

    Diagrams are processed layer by layer in caret count. A diagram with no
    available reduction has one maximal sequence (the empty one). A diagram
    with exactly one available reduction inherits the outcome set of its
    reduct, which lies in an already fully checked lower layer. Every diagram
    with two or more available reductions has all its maximal sequences
    enumerated explicitly. Availability is computed for all permutations of
    a forest pair at once with numpy.
    """
    import numpy as np

    report = ConfluenceReport(d, r, max_carets)
    memo: dict = {}
    for k in range(max_carets + 1):
        n = r + k * (d - 1)
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int16)
        forests = all_forests(d, r, k)
        counts = {"k": k, "diagrams": 0, "none": 0, "single": 0, "multiple": 0}
        for lo in forests:
            lo_blocks = [pos for _, pos in lo.elementary]
            for hi in forests:
                hi_blocks = [pos for _, pos in hi.elementary]
                available = np.zeros(len(perms), dtype=np.int16)
                for i in lo_blocks:
                    for j in hi_blocks:
                        mask = np.ones(len(perms), dtype=bool)
                        for t in range(d):
                            mask &= perms[:, i + t] == j + t
                        available += mask
                counts["diagrams"] += len(perms)
                counts["none"] += int(np.count_nonzero(available == 0))
                counts["single"] += int(np.count_nonzero(available == 1))
                for idx in np.nonzero(available >= 2)[0]:
                    counts["multiple"] += 1
                    diag = PairedForestDiagram(lo, tuple(int(p) for p in perms[idx]), hi)
                    outcomes = reduction_outcomes(diag, memo)
                    if len(outcomes) != 1:
                        report.failures.append((diag, outcomes))
        report.layers.append(counts)
    return report
