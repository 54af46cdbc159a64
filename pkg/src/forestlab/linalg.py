"""Exact integer and rational linear algebra for boundary matrices.

Matrices are sparse: a list of columns, each column a dict ``row -> int``.
Boundary matrices of simplicial complexes have entries in {-1, 0, 1} and are
very sparse, so most of the work is unit-pivot elimination; whatever is left
goes through a dense Smith normal form on Python ints.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

SparseCols = list  # list[dict[int, int]]


def _unit_pivot_eliminate(cols: SparseCols):
    """Eliminate unit pivots; return (number of unit pivots, remaining columns).

    Every unit pivot contributes an invariant factor 1. The remaining columns
    are restricted to the rows that were never pivot rows and are returned as
    dicts keyed by the original row ids.
    """
    cols = [dict(c) for c in cols if c]
    row_index: dict = {}
    for ci, col in enumerate(cols):
        for r in col:
            row_index.setdefault(r, set()).add(ci)
    alive = set(range(len(cols)))
    units = 0
    progress = True
    while progress:
        progress = False
        for ci in sorted(alive, key=lambda c: len(cols[c])):
            if ci not in alive:
                continue
            col = cols[ci]
            if not col:
                alive.discard(ci)
                continue
            pivot_row = None
            best = None
            for r, v in col.items():
                if v in (1, -1):
                    n = len(row_index[r])
                    if best is None or n < best:
                        pivot_row, best = r, n
            if pivot_row is None:
                continue
            pv = col[pivot_row]
            # clear pivot_row from every other column using column ops
            for cj in list(row_index[pivot_row]):
                if cj == ci:
                    continue
                other = cols[cj]
                factor = other[pivot_row] * pv  # pv is its own inverse
                for r, v in col.items():
                    nv = other.get(r, 0) - factor * v
                    if nv:
                        if r not in other:
                            row_index[r].add(cj)
                        other[r] = nv
                    elif r in other:
                        del other[r]
                        row_index[r].discard(cj)
                if not other:
                    alive.discard(cj)
            # row ops make the pivot column a pure unit vector; drop both
            for r in col:
                row_index[r].discard(ci)
            del row_index[pivot_row]
            alive.discard(ci)
            cols[ci] = {}
            units += 1
            progress = True
    rest = [cols[ci] for ci in sorted(alive) if cols[ci]]
    return units, rest


def _dense_smith(mat: list[list[int]]) -> list[int]:
    """Nonzero invariant factors of a dense integer matrix."""
    a = [row[:] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # pick the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ri, rt = a[i], a[t]
                        for j in range(t, n):
                            ri[j] -= q * rt[j]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for i in range(t, m):
                            a[i][j] -= q * a[i][t]
                    if a[t][j]:
                        done = False
            if done:
                # divisibility: p must divide the whole remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                for j in range(t, n):
                    a[t][j] += a[bad][j]
                continue
            # move the smallest remaining entry of row/col t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def smith_invariants(cols: SparseCols) -> list[int]:
    """Nonzero invariant factors (with multiplicity, ascending) of a sparse matrix."""
    units, rest = _unit_pivot_eliminate(cols)
    if not rest:
        return [1] * units
    rows = sorted({r for c in rest for r in c})
    rpos = {r: i for i, r in enumerate(rows)}
    dense = [[0] * len(rest) for _ in rows]
    for j, c in enumerate(rest):
        for r, v in c.items():
            dense[rpos[r]][j] = v
    factors = _dense_smith(dense)
    # enforce the divisibility chain (a diagonal form is equivalent to its
    # Smith form after gcd/lcm normalisation)
    factors = sorted(factors)
    changed = True
    while changed:
        changed = False
        for i in range(len(factors) - 1):
            a, b = factors[i], factors[i + 1]
            if b % a:
                g = gcd(a, b)
                factors[i], factors[i + 1] = g, a * b // g
                changed = True
        factors.sort()
    return [1] * units + factors


def rational_rank(cols: SparseCols) -> int:
    """Rank over Q by fraction-free sparse elimination."""
    pivots: dict = {}  # pivot row -> reduced column
    rank = 0
    for col in cols:
        c = {r: v for r, v in col.items() if v}
        while c:
            r = max(c)
            if r not in pivots:
                g = 0
                for v in c.values():
                    g = gcd(g, v)
                pivots[r] = {k: v // g for k, v in c.items()}
                rank += 1
                break
            p = pivots[r]
            a, b = p[r], c[r]
            new = {}
            for k in set(c) | set(p):
                v = a * c.get(k, 0) - b * p.get(k, 0)
                if v:
                    new[k] = v
            g = 0
            for v in new.values():
                g = gcd(g, v)
            c = {k: v // g for k, v in new.items()} if g > 1 else new
    return rank


def rational_nullspace(cols: SparseCols, nrows: int) -> list[dict]:
    """Basis of the kernel of the matrix (as sparse column-index -> Fraction)."""
    ncols = len(cols)
    # reduced row echelon form of the transpose view: work on rows
    rows = [dict() for _ in range(nrows)]
    for j, col in enumerate(cols):
        for r, v in col.items():
            if v:
                rows[r][j] = Fraction(v)
    pivot_of_col: dict = {}
    reduced_rows = []
    for row in rows:
        row = dict(row)
        for pc, prow in pivot_of_col.items():
            if pc in row:
                f = row[pc]
                for k, v in prow.items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        if not row:
            continue
        pc = min(row)
        pv = row[pc]
        row = {k: v / pv for k, v in row.items()}
        for opc, prow in pivot_of_col.items():
            if pc in prow:
                f = prow[pc]
                for k, v in row.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivot_of_col[pc] = row
        reduced_rows.append(row)
    free = [j for j in range(ncols) if j not in pivot_of_col]
    basis = []
    for fj in free:
        vec = {fj: Fraction(1)}
        for pc, prow in pivot_of_col.items():
            if fj in prow:
                vec[pc] = -prow[fj]
        basis.append(vec)
    return basis


def integerize(vec: dict) -> dict:
    """Scale a rational sparse vector to a primitive integer vector."""
    from math import lcm

    den = 1
    for v in vec.values():
        den = lcm(den, v.denominator)
    out = {k: int(v * den) for k, v in vec.items()}
    g = 0
    for v in out.values():
        g = gcd(g, v)
    return {k: v // g for k, v in out.items()} if g > 1 else out


def dense_to_cols(mat: Sequence[Sequence[int]]) -> SparseCols:
    if not mat:
        return []
    return [
        {i: row[j] for i, row in enumerate(mat) if row[j]} for j in range(len(mat[0]))
    ]
