"""Command line interface: ``kleinfoam <group> <verb> ...``.

Exit codes: 0 success, 1 semantic negative (invalid foam, no coloring,
mismatch), 2 unparsable input, 3 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import islice

from . import perm as P
from .branched_cover import (DiskCoverData, construct_disk_morphism, function_data_from_doc,
                             function_data_to_doc, rh_invariants, validate_function_data)
from .errors import BOUND_CODES, PARSE_CODES, FoamError
from .foam_model import (check_normality, double_report, euler_characteristic, fingerprint,
                         foam_from_doc, isomorphic, validate_foam)
from .foam_systems import (FoamSystem, build_foam_from_system, enumerate_foam_systems,
                           roundtrip_check)
from .group_presentations import (DiskAutomorphism, TopType, check_admissible_types,
                                  classify_automorphism, euler_char_of_type, presentation_of_type,
                                  teich_dimension)
from .orientation import SpecialColoring, certify_klein, find_special_coloring, is_strongly_oriented
from .quotient_surface import (QuotientResult, build_quotient, check_factorization,
                               compose_through_quotient)
from .subgroup_enum import (CosetTable, coset_enumeration, cover_topological_type,
                            low_index_subgroups, oval_structure)


class Outcome:
    def __init__(self, doc, text: str, code: int = 0):
        self.doc, self.text, self.code = doc, text, code


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        if path.lstrip().startswith(("{", "[")):
            return json.loads(path)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FoamError("E_PARSE", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FoamError("E_PARSE", f"{path}: {exc}") from None


def _foam(path):
    return foam_from_doc(_read_json(path))


# ---------------------------------------------------------------- foam

def foam_validate(a):
    rep = validate_foam(_foam(a.foam))
    lines = ["valid"] if rep.ok else [f"({v.condition}) {v.message}" for v in rep.violations]
    return Outcome(rep.to_doc(), "\n".join(lines), 0 if rep.ok else 1)


def foam_normality(a):
    foam = _foam(a.foam)
    rep = check_normality(foam)
    bad = [l.vertex for l in rep.links if not l.connected]
    text = "normal" if rep.normal else "not normal at " + ", ".join(bad)
    return Outcome(rep.to_doc(), text, 0 if rep.normal else 1)


def foam_invariants(a):
    foam = _foam(a.foam)
    per = {p.id: euler_characteristic(p) for p in foam.patches}
    doc = {"euler": euler_characteristic(foam), "patches": per,
           "vertices": len(foam.graph.vertices), "edges": len(foam.graph.edges),
           "components": len(foam.graph.components())}
    text = f"euler characteristic {doc['euler']}; " + ", ".join(f"{k}: {v}" for k, v in per.items())
    return Outcome(doc, text)


def foam_double(a):
    rows = double_report(_foam(a.foam))
    doc = [{"patch": r.patch, "genus": r.genus, "euler": r.euler, "fixed_circles": r.fixed_circles} for r in rows]
    text = "\n".join(f"{r.patch}: double genus {r.genus}, euler {r.euler}, {r.fixed_circles} fixed circles"
                     for r in rows)
    return Outcome(doc, text)


def foam_color(a):
    foam = _foam(a.foam)
    col, reason = find_special_coloring(foam)
    if col is None:
        return Outcome({"found": False, "reason": reason}, f"no special coloring ({reason})", 1)
    return Outcome(col.to_doc(foam), json.dumps(col.to_doc(foam), indent=2))


def foam_check_coloring(a):
    foam = _foam(a.foam)
    col = SpecialColoring.from_doc(_read_json(a.coloring))
    ok, reason = is_strongly_oriented(foam, col)
    return Outcome({"ok": ok, "reason": reason}, "strongly oriented" if ok else f"no: {reason}", 0 if ok else 1)


def foam_certify(a):
    foam = _foam(a.foam)
    cert = certify_klein(foam)
    if cert is None:
        doc = {"certified": False, "note": "no special coloring; inconclusive"}
        return Outcome(doc, "no certificate (no special coloring; the foam may still be Klein)", 1)
    doc = {"certified": True, "coloring": cert.coloring.to_doc(foam),
           "function_data": function_data_to_doc(cert.function_data)}
    return Outcome(doc, json.dumps(doc, indent=2))


def foam_fingerprint(a):
    fp = fingerprint(_foam(a.foam))
    return Outcome({"fingerprint": fp}, fp)


def foam_iso(a):
    w = isomorphic(_foam(a.a), _foam(a.b))
    if w is None:
        return Outcome({"isomorphic": False}, "not isomorphic", 1)
    return Outcome({"isomorphic": True, "witness": w.to_doc()}, "isomorphic")


# ---------------------------------------------------------------- cover

def cover_rh(a):
    cov = DiskCoverData.from_cycles(a.degree, a.perms)
    chi, k, g = rh_invariants(cov)
    doc = {"euler": chi, "circles": k, "genus": g, "boundary_perm": P.format_cycles(cov.boundary_perm)}
    return Outcome(doc, f"euler {chi}, {k} boundary circles, genus {g}")


def cover_construct(a):
    cov = construct_disk_morphism(a.genus, a.circles)
    doc = {"degree": cov.degree, "perms": cov.cycle_strings()}
    return Outcome(doc, f"degree {cov.degree}: " + " ".join(doc["perms"]))


def cover_validate(a):
    foam = _foam(a.foam)
    rep = validate_function_data(foam, function_data_from_doc(_read_json(a.fn)))
    lines = ["ok"] if rep.ok else [f"({v.condition}) {v.message}" for v in rep.violations]
    return Outcome(rep.to_doc(), "\n".join(lines), 0 if rep.ok else 1)


# ---------------------------------------------------------------- quotient

def quotient_build(a):
    foam = _foam(a.foam)
    res = build_quotient(foam, function_data_from_doc(_read_json(a.fn)))
    text = f"{res.degree} classes; " + "; ".join(t.name for t in res.components)
    return Outcome(res.to_doc(), text)


def quotient_check_factor(a):
    res = QuotientResult.from_doc(_read_json(a.quotient))
    ok, ce = check_factorization(res, function_data_from_doc(_read_json(a.fn)))
    return Outcome({"ok": ok, "counterexample": ce}, "factors" if ok else f"counterexample: {ce}", 0 if ok else 1)


def quotient_compose(a):
    foam = _foam(a.foam)
    fn = function_data_from_doc(_read_json(a.fn))
    res = build_quotient(foam, fn)
    post = DiskCoverData.from_cycles(a.degree, a.perms)
    out = compose_through_quotient(res, post, fn=fn)
    rep = validate_function_data(foam, out)
    doc = function_data_to_doc(out)
    return Outcome(doc, json.dumps(doc, indent=2), 0 if rep.ok else 1)


# ---------------------------------------------------------------- group

def group_presentation(a):
    p = presentation_of_type(TopType.parse(a.type))
    doc = p.to_doc()
    text = "< " + ", ".join(p.names) + " | " + ", ".join(r + " = 1" for r in doc["relators"]) + " >"
    return Outcome(doc, text)


def group_euler(a):
    chi = euler_char_of_type(TopType.parse(a.type))
    return Outcome({"euler": str(chi)}, str(chi))


def group_dim(a):
    n = teich_dimension(TopType.parse(a.type))
    return Outcome({"dimension": n}, str(n))


def group_classify(a):
    A = DiskAutomorphism.from_doc(_read_json(a.matrix))
    kind = classify_automorphism(A)
    return Outcome({"class": kind}, kind)


def group_admissible(a):
    doc = _read_json(a.assignment)
    if not isinstance(doc, dict):
        raise FoamError("E_PARSE", "assignment must map generator names to matrices")
    assignment = {k: DiskAutomorphism.from_doc(v) for k, v in doc.items()}
    rep = check_admissible_types(TopType.parse(a.type), assignment)
    text = "ok" if rep.ok else "\n".join(rep.violations)
    text += "\nunchecked: " + ", ".join(rep.unchecked)
    return Outcome(rep.to_doc(), text, 0 if rep.ok else 1)


# ---------------------------------------------------------------- subgroups

def subgroups_enum(a):
    pres = presentation_of_type(TopType.parse(a.type))
    tables = low_index_subgroups(pres, a.max_index)
    doc = [t.to_doc() for t in tables]
    text = "\n".join(f"index {t.index}: " + " ".join(f"{n}={P.format_cycles(p)}" for n, p in zip(pres.names, t.perms))
                     for t in tables)
    return Outcome(doc, text)


def subgroups_coset(a):
    pres = presentation_of_type(TopType.parse(a.type))
    t = coset_enumeration(pres, a.words, bound=a.bound)
    return Outcome(t.to_doc(), f"index {t.index}")


def subgroups_type(a):
    ct = cover_topological_type(CosetTable.from_doc(_read_json(a.table)))
    return Outcome(ct.to_doc(), f"cover type {ct.type} ({'orientable' if ct.orientable else 'non-orientable'})")


def subgroups_ovals(a):
    circles = oval_structure(CosetTable.from_doc(_read_json(a.table)), a.oval)
    doc = [[[x.j, x.coset + 1, "fwd" if x.forward else "bwd"] for x in c] for c in circles]
    text = "\n".join(" ".join(f"({x.j},{x.coset + 1}{'' if x.forward else '-'})" for x in c) for c in circles)
    return Outcome(doc, text or "no boundary circles")


# ---------------------------------------------------------------- foam systems

def foamsys_enum(a):
    systems = enumerate_foam_systems(TopType.parse(a.type), a.max_index, a.max_patches, a.max_partitions)
    if a.limit is not None:
        systems = islice(systems, a.limit)
    docs = [s.to_doc() for s in systems]
    return Outcome(docs, f"{len(docs)} foam systems")


def foamsys_build(a):
    built = build_foam_from_system(FoamSystem.from_doc(_read_json(a.system)))
    from .foam_model import foam_to_doc
    doc = {"foam": foam_to_doc(built.foam), "provenance": built.provenance_doc()}
    return Outcome(doc, json.dumps(doc, indent=2))


def foamsys_roundtrip(a):
    rt = roundtrip_check(FoamSystem.from_doc(_read_json(a.system)))
    text = f"ok {rt.fingerprint}" if rt.ok else "mismatch: " + "; ".join(rt.messages)
    return Outcome(rt.to_doc(), text, 0 if rt.ok else 1)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; work runs sequentially")
    ap = argparse.ArgumentParser(prog="kleinfoam", parents=[common], description=__doc__.splitlines()[0])
    groups = ap.add_subparsers(dest="group", required=True)

    def verb(group_parser, name, func, *args):
        p = group_parser.add_parser(name, parents=[common])
        for spec in args:
            flags, kw = spec
            p.add_argument(*flags, **kw)
        p.set_defaults(func=func)
        return p

    F = {"help": "foam document (path, '-' or inline JSON)"}
    g = groups.add_parser("foam").add_subparsers(dest="verb", required=True)
    for name, func in [("validate", foam_validate), ("normality", foam_normality), ("invariants", foam_invariants),
                       ("double", foam_double), ("color", foam_color), ("certify", foam_certify),
                       ("fingerprint", foam_fingerprint)]:
        verb(g, name, func, (("foam",), F))
    verb(g, "check-coloring", foam_check_coloring, (("foam",), F), (("coloring",), {}))
    verb(g, "iso", foam_iso, (("a",), F), (("b",), F))

    perms = (("--perms",), {"nargs": "*", "default": [], "help": "branch permutations in cycle notation"})
    g = groups.add_parser("cover").add_subparsers(dest="verb", required=True)
    verb(g, "rh", cover_rh, (("--degree",), {"type": int, "required": True}), perms)
    verb(g, "construct", cover_construct, (("--genus",), {"type": int, "required": True}),
         (("--circles",), {"type": int, "required": True}))
    verb(g, "validate", cover_validate, (("foam",), F), (("fn",), {}))

    g = groups.add_parser("quotient").add_subparsers(dest="verb", required=True)
    verb(g, "build", quotient_build, (("foam",), F), (("fn",), {}))
    verb(g, "check-factor", quotient_check_factor, (("quotient",), {}), (("fn",), {}))
    verb(g, "compose", quotient_compose, (("foam",), F), (("fn",), {}),
         (("--degree",), {"type": int, "required": True}), perms)

    T = (("--type",), {"required": True, "help": 'topological type, e.g. "+,2,0,0,0"'})
    g = groups.add_parser("group").add_subparsers(dest="verb", required=True)
    verb(g, "presentation", group_presentation, T)
    verb(g, "euler", group_euler, T)
    verb(g, "dim", group_dim, T)
    verb(g, "classify", group_classify, (("matrix",), {"help": '{"a":[re,im],"b":[re,im],"anti":false}'}))
    verb(g, "admissible", group_admissible, T, (("assignment",), {}))

    g = groups.add_parser("subgroups").add_subparsers(dest="verb", required=True)
    verb(g, "enum", subgroups_enum, T, (("--max-index",), {"type": int, "required": True}))
    verb(g, "coset", subgroups_coset, T, (("--words",), {"nargs": "*", "default": []}),
         (("--bound",), {"type": int, "default": 10_000}))
    verb(g, "type", subgroups_type, (("table",), {}))
    verb(g, "ovals", subgroups_ovals, (("table",), {}), (("--oval",), {"type": int, "default": 1}))

    g = groups.add_parser("foamsys").add_subparsers(dest="verb", required=True)
    verb(g, "enum", foamsys_enum, T, (("--max-index",), {"type": int, "default": 2}),
         (("--max-patches",), {"type": int, "default": 2}),
         (("--max-partitions",), {"type": int, "default": 200}),
         (("--limit",), {"type": int, "default": None}))
    verb(g, "build", foamsys_build, (("system",), {}))
    verb(g, "roundtrip", foamsys_roundtrip, (("system",), {}))
    return ap


def _default(x):
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        res = args.func(args)
    except FoamError as exc:
        code = 2 if exc.code in PARSE_CODES else 3 if exc.code in BOUND_CODES else 1
        if args.json:
            out.write(json.dumps({"error": exc.code, "message": exc.message}, sort_keys=True) + "\n")
        else:
            err.write(f"error: {exc}\n")
        return code
    if args.json:
        out.write(json.dumps(res.doc, sort_keys=True, default=_default) + "\n")
    else:
        out.write(res.text + "\n")
    return res.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
