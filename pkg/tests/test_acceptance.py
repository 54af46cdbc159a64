"""The eight acceptance criteria. Each prints one PASS/FAIL line in the
terminal summary (see conftest.py)."""

import itertools
import math
import random
import time
from math import comb

import numpy as np

from forestlab import complexes as C
from forestlab import families as F
from forestlab import maps as MP
from forestlab import morse as MO
from forestlab import stein_farley as SF
from forestlab.forests import (
    VElement,
    all_forests,
    check_confluence,
    equals,
    invert,
    is_identity,
    multiply,
    random_element,
)

import builders
import conftest


def fuss_catalan(d, r, k):
    # number of (d, r)-forests with k carets
    return r * comb(d * k + r, k) // (d * k + r)


def test_criterion_1_confluence(acceptance):
    with acceptance(1) as info:
        t0 = time.perf_counter()
        total = 0
        for d in (2, 3):
            for r in (1, 2):
                rep = check_confluence(d, r, 3)
                assert rep.ok, rep.failures[:1]
                for layer in rep.layers:
                    k = layer["k"]
                    assert len(all_forests(d, r, k)) == fuss_catalan(d, r, k)
                    expected = fuss_catalan(d, r, k) ** 2 * math.factorial(r + k * (d - 1))
                    assert layer["diagrams"] == expected
                    assert layer["none"] + layer["single"] + layer["multiple"] == expected
                total += rep.total
        elapsed = time.perf_counter() - t0
        info["detail"] = f"{total} diagrams"
        assert elapsed < 60


def test_criterion_2_group_laws(acceptance):
    with acceptance(2) as info:
        t0 = time.perf_counter()
        rng = random.Random(20240601)
        e = VElement.identity(2, 1)
        xs = [random_element(2, 1, 4, rng) for _ in range(1000)]
        failures = 0
        for x in xs:
            failures += not is_identity(multiply(x, invert(x)))
            failures += not equals(multiply(e, x), x)
            failures += not equals(multiply(x, e), x)
        for _ in range(1000):
            a, b, c = (random_element(2, 1, 4, rng) for _ in range(3))
            failures += not equals(multiply(multiply(a, b), c), multiply(a, multiply(b, c)))
        info["detail"] = f"{failures} failures"
        assert failures == 0
        assert time.perf_counter() - t0 < 60


def test_criterion_3_hypergraph_table(acceptance):
    with acceptance(3) as info:
        t0 = time.perf_counter()
        rows = F.hypergraph_table(10, 2, dmin=2) + [
            r for r in F.hypergraph_table(9, 3, dmin=3)
        ]
        cells = {(r.n, r.d) for r in rows}
        assert cells == {(n, 2) for n in range(2, 11)} | {(n, 3) for n in range(3, 10)}
        for r in rows:
            assert r.flag, (r.n, r.d)
            assert r.wcm_dim_claimed == (r.n - r.d) // (r.d + 1)
            assert r.wcm_verified, (r.n, r.d)
        prof = C.reduced_homology(F.hypergraph_complex(5, 2))
        assert prof.rank(1) == 6 and prof.torsion_at(1) == []
        assert all(prof.vanishes(i) for i in range(-1, prof.max_dim + 1) if i != 1)
        info["detail"] = f"{len(rows)} cells"
        assert time.perf_counter() - t0 < 300


def _random_instances(seed, count):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(3, 12)
        if i % 2:
            cx = builders.random_flag_complex(rng, n, rng.uniform(0.3, 0.8))
        else:
            cx = builders.random_complex(rng, n, rng.randint(2, 10), 4)
        out.append(cx)
    return rng, out


def test_criterion_4_morse_lemma(acceptance):
    with acceptance(4) as info:
        t0 = time.perf_counter()
        rng, instances = _random_instances(4242, 120)
        checked = held = nontrivial = 0
        for cx in instances:
            verts = cx.vertices
            heights = rng.sample(range(100), len(verts))
            h = MO.HeightFunction({v: (hv,) for v, hv in zip(verts, heights)})
            levels = sorted({(x,) for x in heights})
            for s in levels:
                for m in (-1, 0, 1, 2):
                    rep = MO.morse_lemma_verify(cx, h, s, m)
                    checked += 1
                    if rep.hypothesis:
                        held += 1
                        nontrivial += any(h(v) > s for v in verts)
                        assert rep.conclusion_holds, (cx.facets, h.values, s, m)
        info["detail"] = (f"{len(instances)} complexes, {held}/{checked} cases with hypothesis, "
                          f"{nontrivial} with vertices above the level")
        assert nontrivial > 0
        assert time.perf_counter() - t0 < 300


def test_criterion_5_bad_simplex(acceptance):
    with acceptance(5) as info:
        t0 = time.perf_counter()
        rng = random.Random(555)
        held = checked = nontrivial = 0
        n_complexes = 0
        while n_complexes < 60:
            ext = builders.random_pair_spec(rng, "extended")
            ext_cx = F.pair_complex(ext)
            if ext_cx.is_empty() or len(ext_cx.vertices) > 16:
                continue
            n_complexes += 1
            inj = F.pair_complex(F.PairComplexSpec(ext.handle_part, ext.ball_part, "injective"))
            bar = MO.coloring_to_bar(ext_cx, F.ball_projection(ext))
            assert not bar.validate(ext_cx)
            good = MO.good_subcomplex(ext_cx, bar)
            assert good.facets == inj.facets
            for m in (-1, 0, 1, 2):
                rep = MO.bad_simplex_analyze(ext_cx, bar, m)
                checked += 1
                if rep.hypothesis:
                    held += 1
                    nontrivial += rep.bad_count > 0
                    assert rep.conclusion_holds, (ext, m)
        info["detail"] = (f"{n_complexes} complexes, {held}/{checked} cases with hypothesis, "
                          f"{nontrivial} of them with bad simplices")
        assert nontrivial > 0
        assert time.perf_counter() - t0 < 300


def _wcm_bases():
    return [
        (F.hypergraph_complex(5, 2), 1),
        (F.hypergraph_complex(7, 2), 1),
        (F.hypergraph_complex(8, 2), 2),
        (F.hypergraph_complex(6, 3), 0),
        (C.boundary_of_simplex(4), 2),
        (C.simplex(4), 3),
    ]


def test_criterion_6_complete_join(acceptance):
    with acceptance(6) as info:
        t0 = time.perf_counter()
        rng = random.Random(66)
        built = 0
        for base, n in _wcm_bases():
            assert C.is_wcm(base, n).ok
            for i in range(10):
                if i == 0:
                    sizes = {x: 1 for x in base.vertices}
                elif i == 1:
                    sizes = {x: 3 for x in base.vertices}
                else:
                    sizes = {x: rng.randint(1, 3) for x in base.vertices}
                m = builders.complete_join_over(base, sizes)
                assert MP.is_complete_join(m).ok
                assert C.is_wcm(m.source, n).ok
                s = MP.section_of_complete_join(m)
                assert MP.validate_map(s).valid
                assert MP.is_identity_on(MP.compose(m, s), base)
                assert C.homological_connectivity(base) >= C.homological_connectivity(m.source)
                built += 1
        info["detail"] = f"{built} complete joins"
        assert built >= 50
        assert time.perf_counter() - t0 < 300


def test_criterion_7_stein_farley(acceptance):
    with acceptance(7) as info:
        t0 = time.perf_counter()
        d, r = 2, 1
        pool = set()
        tops = []
        for k in range(4):
            for forest in all_forests(d, r, k):
                x = SF.make_vertex(forest, VElement.identity(d, r))
                tops.append(x)
                pool.add(x)
                if k >= 1:
                    dl = SF.descending_link(x)
                    assert MP.is_complete_join(dl.projection).ok
                    assert MP.validate_map(dl.projection).valid
                    assert dl.projection.target.facets == F.hypergraph_complex(x.leaf_count, d).facets
                    verts, simplices = SF.descending_link_by_cosets(x)
                    assert verts == set(dl.lower)
                    assert simplices == {frozenset(dl.lower[i] for i in s) for s in dl.complex.simplices()}
                    pool.update(dl.lower)
                rep = SF.local_link_flag_check(x)
                assert rep.descending_flag and rep.combined_flag, rep.to_json()
                for size in range(x.leaf_count + 1):
                    for leaves in itertools.combinations(range(x.leaf_count), size):
                        cube = SF.cube_interval(x, leaves)
                        assert cube.distinct() and len(cube.vertices) == 2 ** size
                        assert cube.top.height == x.height + size
                        assert cube.is_boolean_lattice()
                        pool.update(cube.vertices.values())
        pool = list(pool)
        n = len(pool)
        R = np.zeros((n, n), dtype=bool)
        P = np.zeros((n, n), dtype=bool)
        for i, a in enumerate(pool):
            for j, b in enumerate(pool):
                R[i, j] = SF.leq(a, b)
                P[i, j] = SF.prec(a, b)
        eye = np.eye(n, dtype=bool)
        assert R[eye].all()
        assert not (R & R.T & ~eye).any()
        assert not ((R.astype(int) @ R.astype(int) > 0) & ~R).any()
        H = np.array([x.height for x in pool])
        lt = R & ~eye
        assert (H[:, None] < H[None, :])[lt].all()
        assert not (P & ~lt).any()
        Q = P | eye
        for i, k in zip(*np.nonzero(P)):
            mids = np.nonzero(R[i] & R[:, k])[0]
            assert Q[i, mids].all() and Q[mids, k].all()
        info["detail"] = f"{len(tops)} supports, {n} vertices in pool"
        assert time.perf_counter() - t0 < 300


def test_criterion_8_consistency(acceptance):
    with acceptance(8) as info:
        t0 = time.perf_counter()
        tracked = conftest.suite_complexes()
        C.stop_tracking(tracked)
        # add the main families explicitly so the audit is never empty
        extra = [F.hypergraph_complex(n, 2) for n in range(2, 9)]
        seen = {}
        for cx in list(tracked) + extra:
            # keep the copy that carries a computed profile
            old = seen.get(cx.facets)
            if old is None or (old._profile is None and cx._profile is not None):
                seen[cx.facets] = cx
        euler_checked = sd_checked = sd_skipped = 0
        for cx in seen.values():
            prof = cx._profile
            if prof is not None and prof.max_dim >= cx.dim:
                ranks = [prof.rank(i) for i in range(-1, cx.dim + 1)]
            else:
                ranks = C.rational_betti(cx)
            alt = sum((-1) ** (i - 1) * rk for i, rk in enumerate(ranks))
            assert C.euler_characteristic(cx) == alt, cx
            euler_checked += 1
            if prof is None:
                continue
            if C.subdivision_size(cx) > 50000:
                sd_skipped += 1
                continue
            sd = C.barycentric_subdivision(cx)
            assert C.reduced_homology(sd, prof.max_dim).to_json() == prof.to_json(), cx
            sd_checked += 1
        info["detail"] = (f"euler on {euler_checked} complexes, subdivision on {sd_checked} profiles, "
                          f"{sd_skipped} skipped as too large")
        assert euler_checked > 100 and sd_checked > 50
        assert time.perf_counter() - t0 < 120
