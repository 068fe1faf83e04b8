"""Command-line front end.

    pgcm classify   -p 3 -m 3,2,1 "0,0,0;0,0,1;0,2,0"
    pgcm enumerate  -p 2 -m 2,1,1 --format csv
    pgcm verify     -p 3 -m 1,1,1 --level orbits
    pgcm invariants -p 3 -m 1,1,1 "1,0,0;0,1,0;0,0,1" --method orbit
    pgcm oracle     -p 2 -m 1,1,1 "0,0,0;0,0,0;0,0,1"
    pgcm export     -p 3 -m 2,1,1 --format latex

Exit codes: 0 success, 1 a verification found a violation, 2 unparsable
input, 3 invalid (p, m), 4 the request exceeds a feasibility cap.  Data goes
to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import classifier as C
from . import invariants as I
from .finite_field import PrimeContext
from .group_model import GroupError, GroupSpec, MetaMode, metahamiltonian_oracle
from .iso_action import MATRIX_SPACE_CAP, TRANSFORM_CAP, ActionError, CapError, CaseTag, ExponentType
from .matrices import MatrixParseError, format_matrix, parse_matrix

SCHEMA = "pgcm/1"

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _parse_m(text: str):
    try:
        m = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CliError(EXIT_PARSE, f"cannot parse exponent type {text!r}")
    if len(m) != 3:
        raise CliError(EXIT_PARSE, f"exponent type needs three entries, got {text!r}")
    return m


def _etype(args) -> ExponentType:
    m = _parse_m(args.m)
    try:
        return ExponentType(args.p, m)
    except ActionError as exc:
        raise CliError(EXIT_INVALID, str(exc))


def _matrix(args, etype):
    try:
        return parse_matrix(args.matrix, etype.p)
    except MatrixParseError as exc:
        raise CliError(EXIT_PARSE, str(exc))


def _eta(p: int):
    return PrimeContext.get(p).eta if p > 2 else None


def _label_text(label, p: int) -> str:
    s = str(label)
    if label.mentions_eta():
        s += f" (eta={_eta(p)})"
    return s


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps({"schema": SCHEMA, **obj}, indent=2) + "\n")


def _witness_json(witness):
    if hasattr(witness, "X"):
        return {"X": format_matrix(witness.X), "X2": format_matrix(witness.X2)}
    return [",".join(str(x) for x in g) for g in witness]


# -- commands -----------------------------------------------------------------

def cmd_classify(args) -> int:
    etype = _etype(args)
    w = _matrix(args, etype)
    res = C.classify_any(etype, w)
    if not args.json:
        print(_label_text(res.label, etype.p))
        return EXIT_OK
    rep = I.invariants(etype, w, I.Method.TABLE)
    _emit_json({
        "p": etype.p,
        "m": list(etype.m),
        "eta": _eta(etype.p),
        "input": format_matrix(w),
        "label": str(res.label),
        "representative": format_matrix(res.representative),
        "method": res.method,
        "witness": _witness_json(res.witness),
        "invariants": {"i_min": rep.i_min, "i_max": rep.i_max,
                       "metahamiltonian": rep.metahamiltonian, "method": rep.method.value},
    })
    return EXIT_OK


_COLUMNS = ["family", "params", "m1", "m2", "m3", "i_min", "i_max", "metahamiltonian", "method"]


def _rows(etype):
    out = []
    for row in I.property_table(etype):
        out.append({
            "family": row.label.family,
            "params": row.params,
            "m1": etype.m[0], "m2": etype.m[1], "m3": etype.m[2],
            "i_min": row.i_min,
            "i_max": row.i_max,
            "metahamiltonian": row.metahamiltonian,
            "method": row.method,
            "_label": row.label,
        })
    return out


def _latex_matrix(w) -> str:
    body = r" \\ ".join(" & ".join(str(x) for x in row) for row in w)
    return r"$\left(\begin{smallmatrix} " + body + r" \end{smallmatrix}\right)$"


def _write_table(etype, rows, fmt: str, with_matrix: bool) -> None:
    p = etype.p
    for r in rows:
        r["representative"] = format_matrix(C.representative(etype, r["_label"]))
    if fmt == "json":
        clean = [{k: v for k, v in r.items() if not k.startswith("_")} for r in rows]
        _emit_json({"p": p, "m": list(etype.m), "eta": _eta(p), "rows": clean, "count": len(rows)})
        return
    if fmt == "csv":
        buf = io.StringIO()
        cols = _COLUMNS + (["representative"] if with_matrix else [])
        writer = csv.DictWriter(buf, cols, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({**r, "metahamiltonian": str(r["metahamiltonian"]).lower()})
        sys.stdout.write(buf.getvalue())
        print(f"# {len(rows)} rows")
        return
    if fmt == "latex":
        print(r"\begin{tabular}{llll}")
        print(r"family & matrix & $I_{\min}$ & $I_{\max}$ \\ \hline")
        for r in rows:
            name = str(r["_label"]).replace("eta", r"\eta")
            w = C.representative(etype, r["_label"])
            print(f"({name}) & {_latex_matrix(w)} & {r['i_min']} & {r['i_max']} \\\\")
        print(r"\end{tabular}")
        print(f"% {len(rows)} rows")
        return
    if p > 2:
        print(f"# p={p} eta={_eta(p)} m={etype.m}")
    for r in rows:
        extra = f"  {r['representative']}" if with_matrix else ""
        meta = "  metahamiltonian" if r["metahamiltonian"] else ""
        print(f"{str(r['_label']):<22} i_min={r['i_min']} i_max={r['i_max']}{meta}{extra}")
    print(len(rows))


def cmd_enumerate(args) -> int:
    etype = _etype(args)
    _write_table(etype, _rows(etype), args.format, with_matrix=False)
    return EXIT_OK


def cmd_export(args) -> int:
    etype = _etype(args)
    _write_table(etype, _rows(etype), args.format, with_matrix=True)
    return EXIT_OK


def _oracle_checks(etype, seed: int, pairs: int):
    checks = []
    if etype.tag is CaseTag.P2_TINY:
        rep = C.verify_tiny()
        checks.append({"check": "isomorphism-classes", "ok": rep.ok, "classes": rep.orbit_count,
                       "expected": rep.family_count, "violations": rep.violations})
        return checks
    I.oracle_check_feasible(etype)
    bad = []
    for label in C.enumerate_families(etype):
        w = C.representative(etype, label)
        table = I.table_invariants(etype, label) + (I.metahamiltonian(label, etype),)
        i_min, i_max, wit = I.oracle_invariants_for(etype, w)
        oracle = (i_min, i_max, wit["all_contain_derived"])
        if table != oracle:
            bad.append(f"{label}: table {table}, oracle {oracle}")
    checks.append({"check": "invariants-table-vs-oracle", "ok": not bad, "violations": bad})
    cross = C.crosscheck_isomorphism(etype, pairs, seed)
    checks.append({
        "check": "orbit-vs-isomorphism",
        "ok": cross.ok,
        "pairs": cross.pairs,
        "same_orbit": cross.same,
        "violations": [f"{format_matrix(a)} vs {format_matrix(b)}: orbit {o}, iso {i}"
                       for a, b, o, i in cross.mismatches],
    })
    return checks


def cmd_verify(args) -> int:
    etype = _etype(args)
    checks = []
    if args.level in ("orbits", "all"):
        rep = C.verify_transversal(etype, workers=args.threads)
        print(rep.summary(), file=sys.stderr)
        checks.append({"check": "transversal", "ok": rep.ok, "orbits": rep.orbit_count,
                       "families": rep.family_count, "violations": rep.violations})
    if args.level in ("oracle", "all"):
        checks.extend(_oracle_checks(etype, args.seed, args.pairs))
    ok = all(c["ok"] for c in checks)
    if args.json:
        _emit_json({"p": etype.p, "m": list(etype.m), "level": args.level, "seed": args.seed,
                    "ok": ok, "checks": checks})
    else:
        for c in checks:
            extra = ""
            if "orbits" in c:
                extra = f" {c['orbits']} orbits / {c['families']} families"
            elif "classes" in c:
                extra = f" {c['classes']} classes confirmed"
            print(f"{'pass' if c['ok'] else 'FAIL'} {c['check']}{extra}")
            for v in c["violations"]:
                print(f"  {v}")
    return EXIT_OK if ok else EXIT_VIOLATION


_METHODS = {"table": I.Method.TABLE, "orbit": I.Method.ORBIT_SEARCH, "oracle": I.Method.ORACLE}


def cmd_invariants(args) -> int:
    etype = _etype(args)
    w = _matrix(args, etype)
    rep = I.invariants(etype, w, _METHODS[args.method])
    label = C.classify_any(etype, w).label
    if args.json:
        _emit_json({"p": etype.p, "m": list(etype.m), "eta": _eta(etype.p), "label": str(label),
                    "i_min": rep.i_min, "i_max": rep.i_max,
                    "metahamiltonian": rep.metahamiltonian, "method": rep.method.value})
    else:
        print(f"{_label_text(label, etype.p)} i_min={rep.i_min} i_max={rep.i_max} "
              f"metahamiltonian={str(rep.metahamiltonian).lower()} method={rep.method.value}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    etype = _etype(args)
    w = _matrix(args, etype)
    i_min, i_max, _ = I.oracle_invariants_for(etype, w)
    spec = GroupSpec(etype, w)
    mode = MetaMode.FULL if spec.order <= 2**6 else MetaMode.NECESSARY
    meta = metahamiltonian_oracle(spec, mode)
    label = C.classify_any(etype, w).label
    if args.json:
        _emit_json({"p": etype.p, "m": list(etype.m), "label": str(label), "order": spec.order,
                    "i_min": i_min, "i_max": i_max,
                    "metahamiltonian": meta.value, "metahamiltonian_mode": mode.value})
    else:
        print(f"{_label_text(label, etype.p)} order={spec.order} i_min={i_min} i_max={i_max} "
              f"metahamiltonian={str(meta.value).lower()} ({mode.value})")
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pgcm", description="Characteristic matrices of p-groups with G' = C_p^3.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, matrix=False):
        sp.add_argument("-p", type=int, required=True, help="prime")
        sp.add_argument("-m", required=True, help="exponent type, e.g. 3,2,1")
        if matrix:
            sp.add_argument("matrix", help='row-major matrix, e.g. "0,0,0;0,0,1;0,2,0"')
        sp.add_argument("--json", action="store_true", help="JSON output")

    sp = sub.add_parser("classify", help="family label of a matrix")
    common(sp, matrix=True)
    sp.set_defaults(func=cmd_classify)

    for name, func, help_ in (("enumerate", cmd_enumerate, "families with their invariants"),
                              ("export", cmd_export, "families with representative matrices")):
        sp = sub.add_parser(name, help=help_)
        common(sp)
        sp.add_argument("--format", choices=["json", "csv", "latex", "plain"], default="plain")
        sp.set_defaults(func=func)

    sp = sub.add_parser("verify", help="exhaustive and oracle checks")
    common(sp)
    sp.add_argument("--level", choices=["orbits", "oracle", "all"], default="orbits")
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--pairs", type=int, default=100, help="random pairs for the isomorphism check")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("invariants", help="I_min, I_max and metahamiltonicity")
    common(sp, matrix=True)
    sp.add_argument("--method", choices=sorted(_METHODS), default="table")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("oracle", help="brute-force invariants of the concrete group")
    common(sp, matrix=True)
    sp.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CapError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except GroupError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
