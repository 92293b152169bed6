"""Command-line front end with deterministic JSON reports.

Compact grammar (JSON always accepted as the canonical alternative):
  partition   blocks separated by "|"; elements single characters or
              comma-separated, e.g. "12|3" or "x0,x1|x2"
  map         clauses "a,b->t" separated by ";"; "+w" appends an unhit
              target element; "[n]->pt" collapses n points to one
  tower       JSON {"inj": <map>, "surjs": [<map>, ...]}
  square      JSON {"i": <map>, "p": <map>, "j": <map>, "q": <map>}

Exit status: 0 all requested checks pass, 1 verification failure,
2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .finsets import FinSet, Partition, SetMap, enumerate_partitions
from .flagcomplex import (
    build_m_complex, is_chain_map, shuffle_factorization,
)
from . import zebra as zb
from .words import build_R_complex, all_layer_values
from .towers import (
    MorphismElement, Tower, compose_hom, differential_hom,
    factor_suitable_supersur, hom_basis_presymm,
)
from . import symmetrize as sym
from . import mellin as ml
from . import acceptance

SCHEMA = 1


class SpecError(ValueError):
    """Malformed compact or JSON input."""


# ---------------------------------------------------------------------------
# parsers
# ---------------------------------------------------------------------------

def _split_elements(block: str) -> list[str]:
    block = block.strip()
    if "," in block:
        return [x.strip() for x in block.split(",") if x.strip()]
    return list(block)


def parse_partition(spec: str) -> Partition:
    spec = spec.strip()
    if spec.startswith("{") or spec.startswith("["):
        data = json.loads(spec)
        blocks = [[str(x) for x in b] for b in
                  (data["blocks"] if isinstance(data, dict) else data)]
    else:
        blocks = [_split_elements(b) for b in spec.split("|")]
    labels = sorted({x for b in blocks for x in b})
    if sum(len(b) for b in blocks) != len(labels):
        raise SpecError(f"blocks are not disjoint in {spec!r}")
    if not labels:
        raise SpecError("empty partition spec")
    carrier = FinSet(tuple(labels))
    return Partition.from_blocks(
        carrier, [tuple(carrier.index(x) for x in b) for b in blocks])


def parse_map(spec: str) -> SetMap:
    spec = spec.strip()
    if spec.startswith("{"):
        data = json.loads(spec)
        src = FinSet(tuple(str(x) for x in data["source"]))
        tgt = FinSet(tuple(str(x) for x in data["target"]))
        if "images" in data:
            images = tuple(int(v) for v in data["images"])
        else:
            images = tuple(tgt.index(str(data["map"][lab]))
                           for lab in src.labels)
        return SetMap(src, tgt, images)
    if spec.startswith("[") and spec.endswith("]->pt"):
        n = int(spec[1:spec.index("]")])
        if n < 1:
            raise SpecError("need at least one source element")
        return SetMap(FinSet(tuple(str(k + 1) for k in range(n))),
                      FinSet(("pt",)), (0,) * n)
    src_labels: list[str] = []
    tgt_labels: list[str] = []
    assign: dict[str, str] = {}
    for clause in spec.split(";"):
        clause = clause.strip()
        if not clause:
            continue
        if clause.startswith("+"):
            for t in _split_elements(clause[1:]):
                if t not in tgt_labels:
                    tgt_labels.append(t)
            continue
        if "->" not in clause:
            raise SpecError(f"clause {clause!r} lacks '->'")
        lhs, rhs = clause.split("->", 1)
        tgt = rhs.strip()
        if not tgt or "," in tgt:
            raise SpecError(f"clause {clause!r} needs a single target")
        if tgt not in tgt_labels:
            tgt_labels.append(tgt)
        for s in _split_elements(lhs):
            if s in assign:
                raise SpecError(f"element {s!r} mapped twice")
            assign[s] = tgt
            src_labels.append(s)
    if not src_labels:
        raise SpecError(f"no source elements in {spec!r}")
    src = FinSet(tuple(src_labels))
    tgt_set = FinSet(tuple(tgt_labels))
    return SetMap(src, tgt_set,
                  tuple(tgt_set.index(assign[s]) for s in src.labels))


def parse_tower(spec: str) -> Tower:
    data = json.loads(spec)
    if not isinstance(data, dict) or "inj" not in data:
        raise SpecError("tower spec needs an object with an 'inj' key")
    inj = parse_map(data["inj"] if isinstance(data["inj"], str)
                    else json.dumps(data["inj"]))
    surjs = tuple(parse_map(m if isinstance(m, str) else json.dumps(m))
                  for m in data.get("surjs", []))
    return Tower(inj, surjs)


def _partition_str(e: Partition) -> str:
    return "|".join(",".join(e.carrier.labels[x] for x in b)
                    for b in e.blocks)


def _emit(report: dict, code: int) -> int:
    report = dict(report)
    report["schema"] = SCHEMA
    print(json.dumps(report, sort_keys=True, default=str))
    return code


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_partitions(args) -> int:
    n = args.n
    if n < 1:
        raise SpecError("n must be positive")
    s = FinSet(tuple(str(k + 1) for k in range(n)))
    parts = [_partition_str(e) for e in enumerate_partitions(s)]
    return _emit({"n": n, "count": len(parts), "partitions": sorted(parts)}, 0)


def cmd_m_complex(args) -> int:
    p = parse_map(args.p)
    cx = build_m_complex(p)
    report = {"dims": {str(d): v for d, v in cx.dims().items()}}
    ok = True
    if args.betti:
        d2_ok, witness = cx.check_d_squared()
        ok = d2_ok
        report["d2"] = d2_ok
        if d2_ok:
            report["betti"] = {str(d): v for d, v in cx.betti_nonzero().items()}
    return _emit(report, 0 if ok else 1)


def cmd_shuffle_check(args) -> int:
    sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    if not sizes or any(k < 1 for k in sizes):
        raise SpecError("sizes must be positive integers")
    factors = [SetMap(FinSet(tuple(f"f{a}_{k}" for k in range(n))),
                      FinSet((f"t{a}",)), (0,) * n)
               for a, n in enumerate(sizes)]
    tensor, target, mapping = shuffle_factorization(factors)
    ok = is_chain_map(tensor, target, mapping)
    return _emit({"sizes": sizes, "chain_map": ok,
                  "tensor_dims": {str(d): v for d, v in tensor.dims().items()},
                  "target_dims": {str(d): v for d, v in target.dims().items()}},
                 0 if ok else 1)


def cmd_zebra(args) -> int:
    f = parse_partition(args.f)
    e = parse_partition(args.e)
    if f.carrier != e.carrier:
        raise SpecError("partitions live on different carriers")
    elems = zb.enumerate_zebra(f, e)
    segs = zb.enumerate_segments(f, e)
    report = {"zebra_count": len(elems), "segments_count": len(segs)}
    ok = True
    if args.verify_poset:
        leq = [[zb.zebra_leq(a, b) for b in elems] for a in elems]
        m = len(elems)
        refl = all(leq[a][a] for a in range(m))
        anti = all(not (leq[a][b] and leq[b][a])
                   for a in range(m) for b in range(m) if a != b)
        trans = all((not (leq[a][b] and leq[b][c])) or leq[a][c]
                    for a in range(m) for b in range(m) for c in range(m))
        mono = all((not leq[a][b]) or zb.segments_leq(zb.nu(elems[a]),
                                                     zb.nu(elems[b]))
                   for a in range(m) for b in range(m))
        ok = refl and anti and trans and mono
        report["poset"] = {"reflexive": refl, "antisymmetric": anti,
                           "transitive": trans, "nu_monotone": mono}
    return _emit(report, 0 if ok else 1)


def cmd_resolution(args) -> int:
    f = parse_partition(args.f)
    e = parse_partition(args.e)
    if f.carrier != e.carrier:
        raise SpecError("partitions live on different carriers")
    cx = build_R_complex(f, e)
    report = {"dims": {str(d): v for d, v in cx.dims().items()}}
    ok = True
    if args.betti:
        d2_ok, _ = cx.check_d_squared()
        report["d2"] = d2_ok
        ok = d2_ok
        if d2_ok:
            report["betti"] = {str(d): v
                               for d, v in cx.betti_nonzero().items()}
    if args.gr:
        report["layers"] = [
            [[_partition_str(a), _partition_str(b)] for a, b in t.segments]
            for t in all_layer_values(f, e)]
    return _emit(report, 0 if ok else 1)


def cmd_bodies_hom(args) -> int:
    x = parse_tower(args.X)
    y = parse_tower(args.Y)
    basis = hom_basis_presymm(x, y)
    dims: dict[int, int] = {}
    for lad in basis:
        dims[lad.degree] = dims.get(lad.degree, 0) + 1
    report = {"dims": {str(d): v for d, v in sorted(dims.items())}}
    ok = True
    if args.d2:
        bad = 0
        for lad in basis:
            m = MorphismElement.from_ladder(lad)
            if not differential_hom(differential_hom(m)).is_zero():
                bad += 1
        report["d2_failures"] = bad
        ok = ok and bad == 0
    if args.assoc:
        z = parse_tower(args.Z) if args.Z else y
        b2 = hom_basis_presymm(y, z)
        b3 = hom_basis_presymm(z, z)
        bad = 0
        for l1 in basis:
            for l2 in b2:
                for l3 in b3:
                    m1 = MorphismElement.from_ladder(l1)
                    m2 = MorphismElement.from_ladder(l2)
                    m3 = MorphismElement.from_ladder(l3)
                    lhs = compose_hom(m3, compose_hom(m2, m1))
                    rhs = compose_hom(compose_hom(m3, m2), m1)
                    if not (lhs + rhs.scale(-1)).is_zero():
                        bad += 1
        report["assoc_failures"] = bad
        ok = ok and bad == 0
    return _emit(report, 0 if ok else 1)


def cmd_bodies_factor(args) -> int:
    data = json.loads(args.square)
    maps = {k: parse_map(data[k] if isinstance(data[k], str)
                         else json.dumps(data[k]))
            for k in ("i", "p", "j", "q")}
    rep = factor_suitable_supersur(maps["i"], maps["p"], maps["j"], maps["q"])
    ok = rep["decomposition"] is not None and rep["unique"]
    report = {
        "exists": rep["decomposition"] is not None,
        "unique": rep["unique"],
        "middle": (list(rep["decomposition"]["U"].labels)
                   if rep["decomposition"] else None),
        "valid_subset_count": len(rep["valid_subsets"]),
    }
    return _emit(report, 0 if ok else 1)


def cmd_symm_verify(args) -> int:
    f = parse_map(args.f)
    if not f.is_surjective:
        raise SpecError("f must be surjective")
    rep = sym.verify_total_differential(f, args.max_u)
    report = {
        "objects": rep["objects"],
        "residues": [
            {"source_interior": r["source"].u.size,
             "target_interior": r["target"].u.size,
             "terms": r["terms"]}
            for r in rep["residues"]],
        "ok": rep["ok"],
    }
    return _emit(report, 0 if rep["ok"] else 1)


def _complex_arg(s: str) -> complex:
    try:
        return complex(s)
    except ValueError as ex:
        raise SpecError(str(ex))


def cmd_mellin(args) -> int:
    h = ml.profile_by_name(args.profile)
    if args.mode == "value":
        v = ml.mellin_Z(h, _complex_arg(args.s), args.N)
        return _emit({"value": [v.value.real, v.value.imag],
                      "error": v.error, "method": v.method}, 0)
    if args.mode == "finite-part":
        fp = ml.finite_part(h, args.M, args.N)
        return _emit({"M": fp.m, "N": fp.n,
                      "value": [fp.value.real, fp.value.imag],
                      "pole_coefficient": [fp.pole_coefficient.real,
                                           fp.pole_coefficient.imag],
                      "fit_residual": fp.fit_residual}, 0)
    if args.mode == "verify":
        r = ml.verify_qM_identity(h, args.M, args.N)
        ok = r < args.tolerance
        return _emit({"M": args.M, "N": args.N, "residual": float(r),
                      "tolerance": args.tolerance, "ok": ok}, 0 if ok else 1)
    if args.mode == "poles":
        lo, hi = (float(x) for x in args.window.split(","))
        poles = ml.pole_scan(h, args.N, (lo, hi))
        lattice_ok = all(order <= 1 for _, order in poles)
        return _emit({"window": [lo, hi],
                      "poles": [[loc, order] for loc, order in poles],
                      "all_simple": lattice_ok}, 0 if lattice_ok else 1)
    raise SpecError(f"unknown mellin mode {args.mode!r}")


def cmd_suite(args) -> int:
    results = acceptance.run_all()
    ok = all(r["ok"] for r in results)
    return _emit({"criteria": [{"name": r["name"], "ok": r["ok"]}
                               for r in results],
                  "ok": ok}, 0 if ok else 1)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="opecalc")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partitions", help="enumerate partitions of {1..n}")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("m-complex", help="flag complex of a surjection")
    p.add_argument("--p", required=True)
    p.add_argument("--betti", action="store_true")
    p.set_defaults(func=cmd_m_complex)

    p = sub.add_parser("shuffle-check", help="shuffle factorization check")
    p.add_argument("--sizes", required=True)
    p.set_defaults(func=cmd_shuffle_check)

    p = sub.add_parser("zebra", help="colored flag poset between partitions")
    p.add_argument("--f", required=True)
    p.add_argument("--e", required=True)
    p.add_argument("--verify-poset", action="store_true")
    p.set_defaults(func=cmd_zebra)

    p = sub.add_parser("resolution", help="decorated word complex")
    p.add_argument("--f", required=True)
    p.add_argument("--e", required=True)
    p.add_argument("--betti", action="store_true")
    p.add_argument("--gr", action="store_true")
    p.set_defaults(func=cmd_resolution)

    p = sub.add_parser("bodies", help="tower hom complexes")
    bsub = p.add_subparsers(dest="bodies_command", required=True)
    ph = bsub.add_parser("hom")
    ph.add_argument("--X", required=True)
    ph.add_argument("--Y", required=True)
    ph.add_argument("--Z")
    ph.add_argument("--d2", action="store_true")
    ph.add_argument("--assoc", action="store_true")
    ph.set_defaults(func=cmd_bodies_hom)
    pf = bsub.add_parser("factor")
    pf.add_argument("--square", required=True)
    pf.set_defaults(func=cmd_bodies_factor)

    p = sub.add_parser("symm", help="symmetrized system checks")
    ssub = p.add_subparsers(dest="symm_command", required=True)
    pv = ssub.add_parser("verify")
    pv.add_argument("--f", required=True)
    pv.add_argument("--max-u", type=int, required=True)
    pv.set_defaults(func=cmd_symm_verify)

    p = sub.add_parser("mellin", help="radial Mellin transforms")
    p.add_argument("mode", choices=["value", "finite-part", "verify", "poles"])
    p.add_argument("--profile", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, default=0)
    p.add_argument("--s", default="0")
    p.add_argument("--window", default="-4,0")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=cmd_mellin)

    p = sub.add_parser("suite", help="run the acceptance battery")
    p.set_defaults(func=cmd_suite)
    return top


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, json.JSONDecodeError, KeyError) as ex:
        print(json.dumps({"schema": SCHEMA, "error": str(ex)},
                         sort_keys=True))
        return 2
    except ValueError as ex:
        print(json.dumps({"schema": SCHEMA, "error": str(ex)},
                         sort_keys=True))
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
