import csv
import io
import json
import random
import subprocess
import sys


from forestlab import cli
from forestlab import complexes as C
from forestlab import families as F
from forestlab.forests import VElement, random_element

import builders


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_mul_by_identity(capsys, tmp_path):
    b = random_element(2, 1, 4, random.Random(1))
    a_path = write(tmp_path, "a.json", VElement.identity(2, 1).to_json())
    b_path = write(tmp_path, "b.json", b.to_json())
    code, out, _ = run(capsys, "v", "mul", a_path, b_path)
    assert code == 0
    assert json.loads(out) == b.canonical.to_json()


def test_reduce_inline(capsys):
    diag = {"d": 3, "r": 2, "domain": ["0:", "0:2", "1:"], "range": ["0:", "1:", "1:0"],
            "perm": [7, 1, 4, 5, 6, 8, 3, 2]}
    code, out, _ = run(capsys, "v", "reduce", json.dumps(diag))
    assert code == 0
    red = json.loads(out)
    assert red["perm"] == [5, 1, 4, 6, 3, 2] and red["domain"] == ["0:", "1:"]


def test_inv_and_eq(capsys):
    rng = random.Random(2)
    x = random_element(3, 2, 3, rng)
    while x == ~x:
        x = random_element(3, 2, 3, rng)
    code, out, _ = run(capsys, "v", "inv", json.dumps(x.to_json()))
    assert code == 0
    inv = json.loads(out)
    code, out, _ = run(capsys, "v", "mul", json.dumps(x.to_json()), json.dumps(inv))
    assert code == 0 and VElement.from_json(json.loads(out)).is_identity()
    code, out, _ = run(capsys, "v", "eq", json.dumps(x.to_json()), json.dumps(inv))
    assert code == 1 and json.loads(out)["equal"] is False
    code, out, _ = run(capsys, "v", "eq", json.dumps(x.to_json()), json.dumps(x.to_json()))
    assert code == 0


def test_random_requires_seed(capsys):
    code, _, err = run(capsys, "v", "random")
    assert code == 2 and "--seed" in err
    code, out, _ = run(capsys, "v", "random", "--seed", "7", "--count", "3")
    assert code == 0
    data = json.loads(out)
    assert data["seed"] == 7 and len(data["elements"]) == 3
    code, out2, _ = run(capsys, "v", "random", "--seed", "7", "--count", "3")
    assert out2 == out


def test_bad_input(capsys, tmp_path):
    code, _, err = run(capsys, "v", "reduce", "{not json")
    assert code == 2 and "error" in err
    bad = {"d": 2, "r": 1, "domain": ["0:"], "range": [], "perm": [1, 2]}
    code, _, _ = run(capsys, "v", "reduce", json.dumps(bad))
    assert code == 2
    code, _, _ = run(capsys, "cx", "homology", json.dumps({"facets": [[0, 0]]}))
    assert code == 2
    code, _, _ = run(capsys, "nonsense")
    assert code == 2
    code, _, _ = run(capsys, "cx", "wcm", json.dumps({"facets": [[0, 1]]}))
    assert code == 2


def test_cx_commands(capsys):
    tri = json.dumps({"vertices": ["a", "b", "c"], "facets": [[0, 1], [1, 2], [0, 2]]})
    code, out, _ = run(capsys, "cx", "homology", tri)
    data = json.loads(out)
    assert code == 0 and data["homology"][2] == {"dim": 1, "rank": 1, "torsion": []}
    assert data["method"] == "homological" and data["connectivity"] == 0
    code, out, _ = run(capsys, "cx", "flag", tri)
    assert code == 1 and json.loads(out)["violating_clique"] == [0, 1, 2]
    code, _, _ = run(capsys, "cx", "wcm", tri, "--n", "1")
    assert code == 0
    code, _, _ = run(capsys, "cx", "wcm", tri, "--n", "2")
    assert code == 1
    code, out, _ = run(capsys, "cx", "link", tri, "--simplex", "0")
    assert code == 0 and json.loads(out)["link"]["facets"] == [[1], [2]]
    code, _, _ = run(capsys, "cx", "link", tri, "--simplex", "0,1,2")
    assert code == 2


def test_family_commands(capsys):
    code, out, _ = run(capsys, "family", "hypergraph", "--n", "5", "--d", "2")
    data = json.loads(out)
    assert code == 0 and data["vertex_count"] == 10 and data["facet_count"] == 15
    edge = json.dumps({"facets": [[0, 1]]})
    pt = json.dumps({"facets": [[0]]})
    code, out, _ = run(capsys, "family", "pair", "--handle", edge, "--ball", pt, "--mode", "extended")
    assert code == 0 and json.loads(out)["complex"]["facets"] == [[0, 1]]
    arcs = [{"facets": [[0, 1], [1, 2]]}, {"facets": [[2, 3], [3, 4]]}, {"facets": [[4, 5], [0, 5]]}]
    code, out, _ = run(capsys, "family", "nerve", json.dumps(arcs))
    data = json.loads(out)
    assert code == 0 and data["nerve"]["facets"] == [[0, 1], [0, 2], [1, 2]]
    code, _, _ = run(capsys, "family", "hypergraph", "--n", "1", "--d", "2")
    assert code == 2


def test_morse_commands(capsys):
    octa = C.from_facets([(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])
    cx = json.dumps(octa.to_json())
    heights = json.dumps([[0, 0], [0, 1], [1, 0], [1, 1], [2, 0], [2, 1]])
    code, out, _ = run(capsys, "morse", "verify", cx, "--heights", heights, "--level", "1,1", "--m", "0")
    assert code == 0 and json.loads(out)["hypothesis"] is True
    code, out, _ = run(capsys, "morse", "verify", cx, "--heights", heights, "--level", "1,1", "--m", "1")
    assert code == 1
    ties = json.dumps([0, 1, 0, 2, 3, 4])  # 0 and 2 span an edge
    code, _, _ = run(capsys, "morse", "verify", cx, "--heights", ties, "--level", "0", "--m", "0")
    assert code == 2
    code, out, _ = run(capsys, "morse", "badsimplex", cx, "--good", "[0,1,2,3]", "--m", "0")
    assert code in (0, 1)
    assert json.loads(out)["method"] == "homological"
    ext = F.PairComplexSpec(C.simplex(2), C.simplex(1), "extended")
    ext_cx = F.pair_complex(ext)
    code, out, _ = run(capsys, "morse", "badsimplex", json.dumps(ext_cx.to_json()),
                       "--colors", json.dumps(F.ball_projection(ext)), "--m", "-1")
    data = json.loads(out)
    assert data["bad_simplices"] == 1 and data["good_subcomplex"]["facets"] == [[0], [1]]


def test_maps_commands(capsys, tmp_path):
    m = builders.doubled(F.hypergraph_complex(5, 2))
    path = write(tmp_path, "m.json", m.to_json())
    code, out, _ = run(capsys, "maps", "completejoin", path)
    data = json.loads(out)
    assert code == 0 and data["ok"] and len(data["section"]) == 10
    code, _, _ = run(capsys, "maps", "joincx", path)
    assert code == 0
    # vertex preimages in the doubled complex are two points
    code, out, _ = run(capsys, "maps", "quillen", path, "--n", "0")
    assert code == 1 and json.loads(out)["hypothesis"] is False
    cyl = write(tmp_path, "cyl.json", builders.cylinder(F.hypergraph_complex(5, 2)).to_json())
    code, out, _ = run(capsys, "maps", "quillen", cyl, "--n", "0")
    assert code == 0 and json.loads(out)["conclusion"] is True
    code, _, _ = run(capsys, "maps", "quillen", path)
    assert code == 2
    split = {"source": {"facets": [[0, 1], [2, 3]]}, "target": {"facets": [[0, 1]]}, "vertex_map": [0, 1, 0, 1]}
    code, out, _ = run(capsys, "maps", "completejoin", json.dumps(split))
    assert code == 1 and json.loads(out)["fiber_condition"] is False
    code, out, _ = run(capsys, "maps", "fiber", json.dumps(split), "--n", "1")
    assert code == 1 and json.loads(out)["hypothesis"] is False


def test_sf_commands(capsys):
    code, out, _ = run(capsys, "sf", "desclink", "--d", "2", "--r", "1", "--support", "0:,0:0")
    data = json.loads(out)
    assert code == 0 and data["complete_join"] is True
    code, out, _ = run(capsys, "sf", "vertex", "--support", "0:")
    assert code == 0 and json.loads(out)["height"] == 1
    code, out, _ = run(capsys, "sf", "link", "--d", "3", "--support", "0:,0:0")
    assert code == 0 and json.loads(out)["combined_flag"] is True
    code, out, _ = run(capsys, "sf", "cube", "--support", "0:", "--leaves", "1,2")
    data = json.loads(out)
    assert code == 0 and data["vertex_count"] == 4 and data["boolean_lattice"]
    code, _, _ = run(capsys, "sf", "desclink", "--support", "")
    assert code == 2
    code, _, _ = run(capsys, "sf", "cube", "--support", "0:", "--leaves", "3")
    assert code == 2


def test_table_csv(capsys, tmp_path):
    out_path = tmp_path / "table.csv"
    code, out, _ = run(capsys, "table", "hypergraph", "--nmax", "9", "--dmax", "3",
                       "--format", "csv", "--output", str(out_path), "--jobs", "2")
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert list(rows[0]) == list(F.HypergraphRow.COLUMNS)
    assert {(int(r["n"]), int(r["d"])) for r in rows} == \
        {(n, d) for d in (2, 3) for n in range(d, 10)}
    for r in rows:
        assert r["wcm_verified"] == "true" and r["flag"] == "true"
        n, d = int(r["n"]), int(r["d"])
        assert int(r["wcm_dim_claimed"]) == (n - d) // (d + 1)


def test_json_round_trip_of_outputs(capsys):
    code, out, _ = run(capsys, "family", "hypergraph", "--n", "6", "--d", "2")
    data = json.loads(out)
    assert json.loads(json.dumps(data)) == data
    cx = C.SimplicialComplex.from_json(data["complex"])
    assert cx == F.hypergraph_complex(6, 2)


def test_jobs_env_override(monkeypatch):
    monkeypatch.setenv("FORESTLAB_JOBS", "3")
    assert cli.default_jobs() == 3
    monkeypatch.setenv("FORESTLAB_JOBS", "junk")
    assert cli.default_jobs() >= 1
    monkeypatch.delenv("FORESTLAB_JOBS")
    assert cli.default_jobs() >= 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "forestlab", "family", "hypergraph", "--n", "4", "--d", "2"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["facet_count"] == 3
