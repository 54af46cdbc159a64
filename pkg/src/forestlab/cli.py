"""Command-line interface.

Exit status: 0 when the command succeeds and its verdict (if any) is true,
1 when the verdict is false (the report is still written), 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys

from . import complexes as C
from . import families as F
from . import forests as V
from . import maps as MP
from . import morse as MO
from . import stein_farley as SF


class InputError(Exception):
    pass


def load_json(arg: str):
    """Read a JSON document from a path, or parse the argument itself."""
    if os.path.exists(arg):
        with open(arg) as fh:
            text = fh.read()
    else:
        text = arg
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg!r} is neither a readable file nor valid JSON: {exc}") from exc


def load_element(arg: str) -> V.VElement:
    return V.VElement.from_json(load_json(arg))


def load_complex(arg: str) -> C.SimplicialComplex:
    return C.SimplicialComplex.from_json(load_json(arg))


def load_map(arg: str) -> MP.SimplicialMap:
    return MP.SimplicialMap.from_json(load_json(arg))


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _conn(v):
    return "inf" if v == math.inf else v


# -- group arithmetic ---------------------------------------------------------


def cmd_v(args):
    op = args.op
    if op == "reduce":
        diag = V.PairedForestDiagram.from_json(load_json(args.inputs[0]))
        return V.reduce(diag).to_json(), True
    if op == "mul":
        if len(args.inputs) < 2:
            raise InputError("mul needs two elements")
        out = load_element(args.inputs[0])
        for extra in args.inputs[1:]:
            out = V.multiply(out, load_element(extra))
        return out.to_json(), True
    if op == "inv":
        return V.invert(load_element(args.inputs[0])).to_json(), True
    if op == "eq":
        if len(args.inputs) != 2:
            raise InputError("eq needs two elements")
        a, b = (load_element(x) for x in args.inputs)
        same = V.equals(a, b)
        return {"equal": same, "a": a.to_json(), "b": b.to_json()}, same
    if op == "random":
        if args.seed is None:
            raise InputError("random needs --seed")
        rng = random.Random(args.seed)
        elts = [V.random_element(args.d, args.r, args.max_carets, rng).to_json()
                for _ in range(args.count)]
        return {"seed": args.seed, "d": args.d, "r": args.r,
                "max_carets": args.max_carets, "elements": elts}, True
    raise InputError(f"unknown v command {op}")


# -- complexes ------------------------------------------------------------------


def cmd_cx(args):
    cx = load_complex(args.input)
    op = args.op
    if op == "homology":
        prof = C.reduced_homology(cx, args.max_dim)
        return {"homology": prof.to_json(), "connectivity": _conn(C.homological_connectivity(cx)),
                "euler_reduced": C.euler_characteristic(cx), "method": "homological"}, True
    if op == "flag":
        bad = C.flag_violation(cx)
        return {"flag": bad is None, "violating_clique": list(bad) if bad else None}, bad is None
    if op == "wcm":
        if args.n is None:
            raise InputError("wcm needs --n")
        rep = C.is_wcm(cx, args.n)
        return rep.to_json(), rep.ok
    if op == "link":
        if args.simplex is None:
            raise InputError("link needs --simplex")
        lk = C.link(cx, _ints(args.simplex))
        return {"link": lk.to_json(), "homology": C.reduced_homology(lk).to_json()}, True
    raise InputError(f"unknown cx command {op}")


# -- families -------------------------------------------------------------------


def cmd_family(args):
    op = args.op
    if op == "hypergraph":
        cx = F.hypergraph_complex(args.n, args.d)
        return {"n": args.n, "d": args.d, "complex": cx.to_json(),
                "vertex_count": len(cx.vertices), "facet_count": len(cx.facets)}, True
    if op == "pair":
        if not args.handle or not args.ball:
            raise InputError("pair needs --handle and --ball")
        spec = F.PairComplexSpec(load_complex(args.handle), load_complex(args.ball), args.mode)
        cx = F.pair_complex(spec)
        return {"mode": args.mode, "complex": cx.to_json(), "dim": cx.dim}, True
    if op == "nerve":
        members = []
        for item in args.members:
            data = load_json(item)
            if isinstance(data, list) and data and isinstance(data[0], dict):
                members.extend(C.SimplicialComplex.from_json(m) for m in data)
            else:
                members.append(C.SimplicialComplex.from_json(data))
        if not members:
            raise InputError("nerve needs at least one member")
        nv = F.nerve(members)
        return {"nerve": nv.to_json(), "homology": C.reduced_homology(nv).to_json()}, True
    raise InputError(f"unknown family command {op}")


# -- morse ------------------------------------------------------------------------


def cmd_morse(args):
    cx = load_complex(args.input)
    if args.op == "verify":
        if args.heights is None or args.level is None or args.m is None:
            raise InputError("verify needs --heights, --level and --m")
        raw = load_json(args.heights)
        h = MO.HeightFunction.from_list(raw) if isinstance(raw, list) else MO.HeightFunction(raw)
        level = _ints(args.level)
        rep = MO.morse_lemma_verify(cx, h, tuple(level), args.m)
        return rep.to_json(), bool(rep.hypothesis and rep.conclusion_holds)
    if args.op == "badsimplex":
        if args.m is None:
            raise InputError("badsimplex needs --m")
        if args.colors is not None:
            colors = load_json(args.colors)
            if isinstance(colors, dict):
                colors = {int(k): v for k, v in colors.items()}
            bar = MO.coloring_to_bar(cx, colors)
        elif args.good is not None:
            bar = MO.partition_to_bar(cx, load_json(args.good))
        else:
            raise InputError("badsimplex needs --colors or --good")
        rep = MO.bad_simplex_analyze(cx, bar, args.m)
        return rep.to_json(), bool(rep.hypothesis and rep.conclusion_holds)
    raise InputError(f"unknown morse command {args.op}")


# -- maps ----------------------------------------------------------------------------


def cmd_maps(args):
    m = load_map(args.input)
    valid = MP.validate_map(m)
    if not valid.valid:
        return {"valid": False, "report": valid.to_json()}, False
    op = args.op
    if op == "completejoin":
        rep = MP.is_complete_join(m)
        out = rep.to_json()
        if rep.ok:
            s = MP.section_of_complete_join(m)
            out["section"] = [s(x) for x in m.target.vertices]
        return out, rep.ok
    if op == "joincx":
        rep = MP.is_join_complex(m)
        return rep.to_json(), rep.ok
    if args.n is None:
        raise InputError(f"{op} needs --n")
    if op == "quillen":
        rep = MP.quillen_fiber_check(m, args.n)
        return rep.to_json(), bool(rep.hypothesis and rep.conclusion)
    if op == "fiber":
        rep = MP.barycentric_fiber_check(m, args.n)
        return rep.to_json(), bool(rep.hypothesis and rep.conclusion)
    raise InputError(f"unknown maps command {op}")


# -- stein-farley ----------------------------------------------------------------


def cmd_sf(args):
    rep = load_json(args.rep) if args.rep else None
    x = SF.vertex_from_args(args.d, args.r, args.support or "", rep)
    op = args.op
    if op == "vertex":
        return {"vertex": x.to_json(), "height": x.height}, True
    if op == "link":
        r = SF.local_link_flag_check(x)
        return r.to_json(), r.ok
    if op == "desclink":
        dl = SF.descending_link(x)
        out = dl.report()
        out["vertex"] = x.to_json()
        out["complex"] = dl.complex.to_json()
        return out, out["complete_join"]
    if op == "cube":
        leaves = [i - 1 for i in _ints(args.leaves or "")]
        cube = SF.cube_interval(x, leaves)
        out = cube.to_json()
        out["boolean_lattice"] = cube.is_boolean_lattice()
        return out, out["distinct"] and out["boolean_lattice"]
    raise InputError(f"unknown sf command {op}")


# -- tables -------------------------------------------------------------------------


def cmd_table(args):
    if args.kind != "hypergraph":
        raise InputError(f"unknown table {args.kind}")
    rows = F.hypergraph_table(args.nmax, args.dmax, args.dmin, jobs=args.jobs)
    data = [r.as_dict() for r in rows]
    return data, all(r.flag and r.wcm_verified for r in rows)


# -- plumbing ------------------------------------------------------------------------


def default_jobs() -> int:
    env = os.environ.get("FORESTLAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--jobs", type=int, default=None,
                        help="worker processes for table cells (FORESTLAB_JOBS overrides)")

    p = argparse.ArgumentParser(prog="forestlab", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="group", required=True)

    v = sub.add_parser("v", parents=[common], help="Higman-Thompson group arithmetic")
    v.add_argument("op", choices=("reduce", "mul", "inv", "eq", "random"))
    v.add_argument("inputs", nargs="*", help="diagram JSON files or inline JSON")
    v.add_argument("--d", type=int, default=2)
    v.add_argument("--r", type=int, default=1)
    v.add_argument("--max-carets", type=int, default=4)
    v.add_argument("--count", type=int, default=1)
    v.add_argument("--seed", type=int)
    v.set_defaults(func=cmd_v)

    cx = sub.add_parser("cx", parents=[common], help="simplicial complex analysis")
    cx.add_argument("op", choices=("homology", "flag", "wcm", "link"))
    cx.add_argument("input")
    cx.add_argument("--n", type=int)
    cx.add_argument("--max-dim", type=int)
    cx.add_argument("--simplex", help="comma-separated vertex ids")
    cx.set_defaults(func=cmd_cx)

    fam = sub.add_parser("family", parents=[common], help="complex families")
    fam.add_argument("op", choices=("hypergraph", "pair", "nerve"))
    fam.add_argument("members", nargs="*", help="member complexes for nerve")
    fam.add_argument("--n", type=int)
    fam.add_argument("--d", type=int)
    fam.add_argument("--handle")
    fam.add_argument("--ball")
    fam.add_argument("--mode", choices=("injective", "extended"), default="injective")
    fam.set_defaults(func=cmd_family)

    mo = sub.add_parser("morse", parents=[common], help="Morse lemma and bad simplex checks")
    mo.add_argument("op", choices=("verify", "badsimplex"))
    mo.add_argument("input")
    mo.add_argument("--heights", help="JSON list or object of height tuples")
    mo.add_argument("--level", help="comma-separated level tuple")
    mo.add_argument("--m", type=int)
    mo.add_argument("--colors")
    mo.add_argument("--good")
    mo.set_defaults(func=cmd_morse)

    mp = sub.add_parser("maps", parents=[common], help="join and fiber verifiers")
    mp.add_argument("op", choices=("completejoin", "joincx", "quillen", "fiber"))
    mp.add_argument("input")
    mp.add_argument("--n", type=int)
    mp.set_defaults(func=cmd_maps)

    sf = sub.add_parser("sf", parents=[common], help="Stein-Farley vertex reports")
    sf.add_argument("op", choices=("vertex", "link", "desclink", "cube"))
    sf.add_argument("--d", type=int, default=2)
    sf.add_argument("--r", type=int, default=1)
    sf.add_argument("--support", default="", help='caret addresses, e.g. "0:,0:0"')
    sf.add_argument("--rep", help="group element JSON (default: identity)")
    sf.add_argument("--leaves", help="1-based comma-separated leaf positions for cube")
    sf.set_defaults(func=cmd_sf)

    tb = sub.add_parser("table", parents=[common], help="tables over parameter grids")
    tb.add_argument("kind", choices=("hypergraph",))
    tb.add_argument("--nmax", type=int, required=True)
    tb.add_argument("--dmax", type=int, required=True)
    tb.add_argument("--dmin", type=int, default=2)
    tb.set_defaults(func=cmd_table)
    return p


def render(result, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    if isinstance(result, list) and result and isinstance(result[0], dict):
        cols = list(result[0].keys())
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in result:
            w.writerow({k: _cell(v) for k, v in row.items()})
    else:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        items = result.items() if isinstance(result, dict) else enumerate(result)
        for k, v in items:
            w.writerow([k, _cell(v)])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    env = os.environ.get("FORESTLAB_JOBS")
    if env or args.jobs is None:
        args.jobs = default_jobs()
    try:
        result, verdict = args.func(args)
    except (InputError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"forestlab: error: {exc}", file=sys.stderr)
        return 2
    text = render(result, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if verdict else 1


if __name__ == "__main__":
    sys.exit(main())
