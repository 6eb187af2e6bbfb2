"""Command-line front end.

Exit status: 0 when something was found or certified, 1 for an honest
"none up to the bound" or a failed check, 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Iterable, Sequence

from .interp import (
    Interpretation,
    NotOriented,
    Witness,
    extract_witness,
    is_monotone,
    minimal_h,
    orients,
)
from .poly import Polynomial, PolynomialSyntaxError, parse, var_key
from .search import SearchConfig, hilbert_pipeline, linear_interp_search, witness_search
from .trs import (
    TermError,
    build_qr_trs,
    build_single_rule_trs,
    encode_poly,
    iter_serialize,
    iter_term_json,
    iter_term_text,
    parse_json,
)

EXIT_OK, EXIT_NONE, EXIT_INPUT = 0, 1, 2

DEFAULTS = {
    "bound": 10,
    "coeff_bound": 2,
    "hmax": 64,
    "delta": "1",
    "format": "json",
    "threads": 1,
}


class InputError(Exception):
    pass


def _poly(text: str | None, flag: str) -> Polynomial:
    if text is None:
        raise InputError(f"missing {flag}")
    try:
        return parse(text)
    except PolynomialSyntaxError as e:
        raise InputError(f"{flag}: {e}") from None


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(out, chunks: Iterable[str]) -> None:
    for chunk in chunks:
        out.write(chunk)


def _emit(out, args, payload: dict, text: str) -> None:
    if args.json:
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _names(*polys: Polynomial) -> list[str]:
    return sorted(set().union(*(p.variables for p in polys)), key=var_key)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=None, help="worker processes for searches")

    parser = argparse.ArgumentParser(
        prog="polyterm",
        description="Polynomial termination gadgets for Diophantine problems.",
    )
    parser.add_argument("--config", help="JSON file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="integer roots of R via positive splits")
    p.add_argument("-R", required=True, help="integer polynomial")
    p.add_argument("--bound", type=int)

    p = sub.add_parser("encode", parents=[common], help="print the term encoding of P")
    p.add_argument("-P", required=True)
    p.add_argument("--var", default="x", help="spine variable (default: x)")

    p = sub.add_parser("build", parents=[common], help="build a gadget rewrite system")
    p.add_argument("kind", choices=["single", "qr"])
    p.add_argument("-P", required=True)
    p.add_argument("-Q", required=True)
    p.add_argument("--format", choices=["json", "tpdb"])

    p = sub.add_parser("check", parents=[common], help="check an interpretation against a TRS")
    p.add_argument("--trs", required=True, help="TRS in JSON format")
    p.add_argument("--interp", required=True, help="interpretation JSON")

    p = sub.add_parser("search", parents=[common], help="bounded searches")
    p.add_argument("kind", choices=["witness", "linear"])
    p.add_argument("-P")
    p.add_argument("-Q")
    p.add_argument("--trs", help="search on this TRS instead of the one built from -P/-Q")
    p.add_argument("--bound", type=int)
    p.add_argument("--coeff-bound", type=int, dest="coeff_bound")

    p = sub.add_parser("minimal-h", parents=[common], help="smallest h orienting the 8-rule system")
    p.add_argument("-P", required=True)
    p.add_argument("-Q", required=True)
    p.add_argument("--witness", help="comma-separated positive values (default: search)")
    p.add_argument("--bound", type=int, help="witness search bound when --witness is absent")
    p.add_argument("--hmax", type=int)
    p.add_argument("--delta")
    return parser


def _settings(args) -> dict:
    config = {}
    if args.config:
        try:
            config = json.loads(_read(args.config))
        except json.JSONDecodeError as e:
            raise InputError(f"{args.config}: {e}") from None
        if not isinstance(config, dict):
            raise InputError(f"{args.config}: expected a JSON object")
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise InputError(f"{args.config}: unknown keys {sorted(unknown)}")
    out = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else config.get(key, default)
    for key in ("bound", "coeff_bound", "hmax", "threads"):
        if not isinstance(out[key], int) or out[key] < 1:
            raise InputError(f"{key.replace('_', '-')} must be a positive integer")
    try:
        out["delta"] = Fraction(str(out["delta"]))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad delta {out['delta']!r}") from None
    if out["delta"] <= 0:
        raise InputError("delta must be positive")
    if out["format"] not in ("json", "tpdb"):
        raise InputError(f"unknown format {out['format']!r}")
    return out


def _cmd_reduce(args, s, out) -> int:
    r = _poly(args.R, "-R")
    report = hilbert_pipeline(r, SearchConfig(witness_bound=s["bound"], threads=s["threads"]))
    lines = []
    for b in report.branches:
        found = f"witness {b.witness.values}" if b.witness else "none"
        lines.append(f"signs {b.signs}: P = {b.p}, Q = {b.q}: {found}")
    root = report.root()
    lines.append(f"root: {root}" if root is not None else f"no root found up to bound {s['bound']}")
    _emit(out, args, report.to_dict(), "\n".join(lines))
    return EXIT_OK if root is not None else EXIT_NONE


def _cmd_encode(args, s, out) -> int:
    p = _poly(args.P, "-P")
    try:
        term = encode_poly(p, args.var)
    except ValueError as e:
        raise InputError(str(e)) from None
    _write(out, iter_term_json(term) if args.json else iter_term_text(term))
    out.write("\n")
    return EXIT_OK


def _cmd_build(args, s, out) -> int:
    p, q = _poly(args.P, "-P"), _poly(args.Q, "-Q")
    builder = build_single_rule_trs if args.kind == "single" else build_qr_trs
    try:
        trs = builder(p, q)
    except ValueError as e:
        raise InputError(str(e)) from None
    _write(out, iter_serialize(trs, "json" if args.json else s["format"]))
    return EXIT_OK


def _load_trs(path: str):
    try:
        return parse_json(_read(path))
    except (json.JSONDecodeError, KeyError, TypeError, TermError) as e:
        raise InputError(f"{path}: invalid TRS ({e})") from None


def _cmd_check(args, s, out) -> int:
    trs = _load_trs(args.trs)
    try:
        interp = Interpretation.from_json(_read(args.interp), trs.signature)
    except (json.JSONDecodeError, KeyError, ValueError) as e:
        raise InputError(f"{args.interp}: invalid interpretation ({e})") from None
    missing = [sym.name for sym in trs.signature if sym not in interp]
    if missing:
        raise InputError(f"no interpretation for {', '.join(missing)}")
    monotone = is_monotone(interp)
    results, failure = [], None
    for k, rule in enumerate(trs.rules, 1):
        try:
            cert = orients(interp, rule, k)
            results.append({"rule": k, "oriented": True, "difference": str(cert.difference)})
        except NotOriented as e:
            failure = e
            results.append(
                {
                    "rule": k,
                    "oriented": False,
                    "monomial": str(Polynomial({e.monomial: 1})),
                    "coefficient": str(e.coefficient),
                    "difference": str(e.difference),
                }
            )
            break
    ok = failure is None and monotone
    lines = [
        f"rule {r['rule']}: " + ("oriented, difference " + r["difference"] if r["oriented"] else str(failure))
        for r in results
    ]
    if not monotone:
        lines.append("interpretation is not monotone under the pure-power criterion")
    lines.append("certified" if ok else "not certified")
    _emit(out, args, {"monotone": monotone, "rules": results, "certified": ok}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_NONE


def _cmd_search(args, s, out) -> int:
    if args.kind == "witness" or args.trs is None:
        p, q = _poly(args.P, "-P"), _poly(args.Q, "-Q")
    if args.kind == "witness":
        try:
            w = witness_search(p, q, s["bound"], threads=s["threads"])
        except ValueError as e:
            raise InputError(str(e)) from None
        payload = {"witness": dict(zip(w.variables, w.values)) if w else None, "bound": s["bound"]}
        text = f"witness {w.point()}" if w else f"no witness up to bound {s['bound']}"
        _emit(out, args, payload, text)
        return EXIT_OK if w else EXIT_NONE
    if args.trs is not None:
        trs = _load_trs(args.trs)
        names = None
    else:
        try:
            trs = build_single_rule_trs(p, q)
        except ValueError as e:
            raise InputError(str(e)) from None
        names = _names(p, q)
    cfg = SearchConfig(coeff_bound=s["coeff_bound"], threads=s["threads"])
    interp = linear_interp_search(trs, cfg)
    payload = {"coeff_bound": s["coeff_bound"], "interpretation": None, "witness": None}
    if interp is None:
        _emit(out, args, payload, f"no linear interpretation with coefficients up to {s['coeff_bound']}")
        return EXIT_NONE
    payload["interpretation"] = json.loads(interp.to_json())
    lines = [f"{sym.name} -> {poly}" for sym, poly in interp.assignment.items()]
    if names is not None:
        w = extract_witness(interp, names)
        payload["witness"] = w.point()
        lines.append(f"extracted witness {w.point()}")
    _emit(out, args, payload, "\n".join(lines))
    return EXIT_OK


def _cmd_minimal_h(args, s, out) -> int:
    p, q = _poly(args.P, "-P"), _poly(args.Q, "-Q")
    names = _names(p, q)
    if args.witness:
        try:
            values = tuple(int(v) for v in args.witness.split(","))
            w = Witness(values, names)
        except ValueError as e:
            raise InputError(f"--witness: {e}") from None
    else:
        w = witness_search(p, q, s["bound"], names, s["threads"])
        if w is None:
            _emit(out, args, {"h": None, "witness": None}, f"no witness up to bound {s['bound']}")
            return EXIT_NONE
    try:
        h = minimal_h(p, q, w, s["delta"], s["hmax"])
    except ValueError as e:
        raise InputError(str(e)) from None
    payload = {"h": h, "witness": w.point(), "hmax": s["hmax"], "delta": str(s["delta"])}
    text = f"h = {h} orients all 8 rules (witness {w.point()})" if h else f"no h <= {s['hmax']}"
    _emit(out, args, payload, text)
    return EXIT_OK if h else EXIT_NONE


COMMANDS = {
    "reduce": _cmd_reduce,
    "encode": _cmd_encode,
    "build": _cmd_build,
    "check": _cmd_check,
    "search": _cmd_search,
    "minimal-h": _cmd_minimal_h,
}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        settings = _settings(args)
        return COMMANDS[args.command](args, settings, out)
    except InputError as e:
        err.write(f"polyterm: error: {e}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
