"""Command line front end: ``revdiff <subcommand> ...``.

Exit status is 0 on success, 1 when a verification fails (or a reverser
does not exist) and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import series as ser
from .constructions import (
    ConstructionError,
    WitnessedMap,
    build_example_iv,
    build_reversible,
    build_signature_map,
    build_strongly_reversible,
)
from .decompose import METHODS
from .series import Series
from .signature import classify
from .smoothmap import BumpSeed, Identity, MapExpr, Translate, from_json, to_json
from .verify import (
    check_commutation,
    check_conjugation,
    check_involution,
    check_reverses,
    check_wave,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _series(tokens, order: int) -> Series:
    if len(tokens) != order:
        raise UsageError(f"expected {order} coefficients, got {len(tokens)}")
    vals = [ser._parse(t) for t in tokens]
    return Series(vals)


def _coeff_text(s: Series) -> str:
    return s.to_text().split(" ", 1)[1]


def _load_map(path) -> MapExpr:
    try:
        return from_json(Path(path).read_text())
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read map from {path}: {exc}") from None


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------

def cmd_series(ns) -> int:
    s = _series(ns.coeffs, ns.order)
    if ns.op == "compose":
        if ns.other is None:
            raise UsageError("compose needs --other")
        print(_coeff_text(ser.compose(s, _series(ns.other, ns.order))))
    elif ns.op == "invert":
        try:
            print(_coeff_text(ser.invert(s)))
        except ZeroDivisionError as exc:
            raise UsageError(str(exc)) from None
    else:
        lead = ser._parse(ns.lead)
        res = ser.solve_reverser(s, lead, ns.order)
        if isinstance(res, ser.Obstruction):
            print(str(res))
            return EXIT_FAIL
        print(_coeff_text(res))
        if ns.check_involution:
            print("involution" if ser.is_involution(res) else "not an involution")
    return EXIT_OK


def _save_witnessed(wm: WitnessedMap, out: Path) -> dict:
    _write(out / "map.json", to_json(wm.map))
    entries = []
    for i, w in enumerate(wm.witnesses):
        name = f"witness_{i}.json"
        _write(out / name, to_json(w.witness))
        entry = {"relation": w.relation, "witness": name, "target": "map.json"}
        if w.target is not None:
            entry["target"] = f"target_{i}.json"
            _write(out / entry["target"], to_json(w.target))
        if w.param is not None:
            entry["param"] = w.param if isinstance(w.param, (int, float)) else w.param.to_dict()
        entries.append(entry)
    manifest = {"map": "map.json", "witnesses": entries, "reports": [r.to_dict() for r in wm.reports]}
    _write(out / "manifest.json", json.dumps(manifest, indent=2))
    return manifest


def _seed(ns) -> MapExpr:
    if ns.seed:
        return _load_map(ns.seed)
    return Identity() if ns.amplitude == 0 else BumpSeed(ns.amplitude)


def cmd_build(ns) -> int:
    if ns.kind == "reversible":
        wm = build_reversible(_seed(ns))
    elif ns.kind == "example-iv":
        wm = build_example_iv(_seed(ns))
    elif ns.kind == "strongly-reversible":
        coeffs = ns.coeffs or ["1"]
        wm = build_strongly_reversible(_series(coeffs, len(coeffs)).truncate(ns.order), ns.offset, ns.order)
    else:
        if not ns.word:
            raise UsageError("signature build needs --word")
        wm = build_signature_map(ns.word, ns.amplitude or 0.3, ns.shift)
    manifest = _save_witnessed(wm, Path(ns.out))
    print(json.dumps(manifest["reports"]))
    return EXIT_OK


def cmd_verify(ns) -> int:
    grid = (ns.grid[0], ns.grid[1], int(ns.grid[2]))
    if grid[2] < 2 or not grid[0] < grid[1]:
        raise UsageError("grid needs a < b and at least 2 points")
    f = _load_map(ns.map)
    need = lambda opt: _load_map(getattr(ns, opt)) if getattr(ns, opt) else _missing(opt)
    if ns.check == "wave":
        rep = check_wave(f, grid, ns.tol)
    elif ns.check == "involution":
        rep = check_involution(f, grid, ns.tol)
    elif ns.check == "reverses":
        rep = check_reverses(need("witness"), f, grid, ns.tol)
    elif ns.check == "commutation":
        rep = check_commutation(f, ns.period, grid, ns.tol)
    else:
        target = _load_map(ns.target) if ns.target else Translate(1.0)
        rep = check_conjugation(need("witness"), f, target, grid, ns.tol)
    print(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAIL


def _missing(opt):
    raise UsageError(f"this check needs --{opt}")


def cmd_signature(ns) -> int:
    print(json.dumps(classify(ns.word)))
    return EXIT_OK


def cmd_decompose(ns) -> int:
    f = _load_map(ns.map)
    d = METHODS[ns.method](f)
    out = Path(ns.out)
    factors = []
    for i, (fac, role, w) in enumerate(zip(d.factors, d.roles, d.witnesses)):
        entry = {"factor": f"factor_{i}.json", "role": role, "witness": None}
        _write(out / entry["factor"], to_json(fac))
        if w is not None:
            entry["witness"] = f"witness_{i}.json"
            _write(out / entry["witness"], to_json(w))
        factors.append(entry)
    reports = d.verify()
    ok = all(r.passed for r in reports)
    manifest = {"method": ns.method, "target": str(ns.map), "factors": factors,
                "reports": [r.to_dict() for r in reports], "passed": ok}
    _write(out / "manifest.json", json.dumps(manifest, indent=2))
    print(json.dumps({"passed": ok, "factors": len(factors)}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sample(ns) -> int:
    if ns.points < 2 or not ns.range[0] < ns.range[1]:
        raise UsageError("sample needs a < b and at least 2 points")
    f = _load_map(ns.map)
    x = np.linspace(ns.range[0], ns.range[1], ns.points)
    y = f(x)
    lines = ["x,fx"] + [f"{a:.17g},{b:.17g}" for a, b in zip(x, y)]
    text = "\n".join(lines) + "\n"
    if ns.out:
        _write(Path(ns.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="revdiff", description="Reversible diffeomorphisms of the real line.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("series", help="truncated power series algebra")
    s.add_argument("op", choices=["compose", "invert", "solve-reverser"])
    s.add_argument("--order", type=_positive_int, required=True)
    s.add_argument("--coeffs", nargs="+", required=True, help="a_1 .. a_N (integers, p/q or decimals)")
    s.add_argument("--other", nargs="+", help="second series for compose")
    s.add_argument("--lead", default="-1", help="leading coefficient of the reverser")
    s.add_argument("--check-involution", action="store_true")
    s.set_defaults(func=cmd_series)

    b = sub.add_parser("build", help="construct a witnessed map")
    b.add_argument("kind", choices=["reversible", "strongly-reversible", "signature", "example-iv"])
    b.add_argument("--amplitude", type=float, default=0.3)
    b.add_argument("--seed", help="seed map JSON (default: bump with --amplitude)")
    b.add_argument("--coeffs", nargs="+", help="jet coefficients for strongly-reversible")
    b.add_argument("--order", type=_positive_int, default=8)
    b.add_argument("--offset", type=float, default=1.0)
    b.add_argument("--word")
    b.add_argument("--shift", type=_positive_int)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="grid check of a functional equation")
    v.add_argument("check", choices=["wave", "reverses", "involution", "conjugation", "commutation"])
    v.add_argument("--map", required=True)
    v.add_argument("--witness")
    v.add_argument("--target", help="conjugation target (default x + 1)")
    v.add_argument("--period", type=float, default=2.0)
    v.add_argument("--grid", nargs=3, type=float, default=[-5.0, 5.0, 2001], metavar=("A", "B", "N"))
    v.add_argument("--tol", type=_positive_float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("signature", help="signature word analysis")
    g.add_argument("op", choices=["classify"])
    g.add_argument("--word", required=True)
    g.set_defaults(func=cmd_signature)

    d = sub.add_parser("decompose", help="factor a map")
    d.add_argument("method", choices=sorted(METHODS))
    d.add_argument("--map", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decompose)

    m = sub.add_parser("sample", help="tabulate x, f(x) as CSV")
    m.add_argument("--map", required=True)
    m.add_argument("--range", nargs=2, type=float, required=True, metavar=("A", "B"))
    m.add_argument("--points", type=int, default=1001)
    m.add_argument("--out")
    m.set_defaults(func=cmd_sample)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return ns.func(ns)
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
