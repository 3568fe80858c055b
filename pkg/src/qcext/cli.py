"""Command-line front end: ``qcext {check,extend,beltrami,render}``.

Exit codes: 0 pass/certified, 2 criterion failed or build not certified,
1 usage or input error. Every output embeds the run configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import beltrami, criteria, extensions
from .cxexpr import ExprError, ExprSyntaxError
from .grid import AnnulusGrid, DiskGrid
from .maps import HarmonicMap, MapError
from .render import render_svg
from .weights import InadmissibleWeightError, WeightError, load_weight_spec

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


class InputError(Exception):
    pass


def _fmt(x: float) -> str:
    return "%.17g" % x


def _pair(text: str | None):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"expected re,im but got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise InputError(f"bad number in {text!r}") from exc


def _grid_size(text: str | None, default):
    if text is None:
        return default
    try:
        r, a = (int(t) for t in text.lower().split("x"))
    except ValueError as exc:
        raise InputError(f"--grid expects RxA, got {text!r}") from exc
    if r < 2 or a < 4:
        raise InputError("--grid too small")
    return r + (r % 2), a


def _load_json(text: str, what: str) -> dict:
    try:
        if text.strip().startswith("{"):
            return json.loads(text)
        return json.loads(Path(text).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {what}: {exc}") from exc


def _load_map(args) -> HarmonicMap:
    spec = _load_json(args.map, "map")
    lam = _pair(args.__dict__.get("lam"))
    if lam is not None:
        spec["lambda"] = [lam.real, lam.imag]
    alpha = _pair(args.__dict__.get("alpha"))
    if alpha is not None and spec.get("form") == "teichmuller":
        spec["alpha"] = [alpha.real, alpha.imag]
    for key in ("lambda", "alpha"):
        if isinstance(spec.get(key), list):
            spec[key] = complex(*spec[key])
    if "h" not in spec:
        raise InputError("map spec needs an 'h' expression")
    return HarmonicMap.from_spec(spec)


def _weight(args):
    if args.weight is None:
        return None
    try:
        return load_weight_spec(args.weight)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read weight: {exc}") from exc


def _config(args, command: str) -> dict:
    keys = ("map", "weight", "criterion", "construction", "k", "lam", "alpha", "grid", "out", "report")
    cfg = {"command": command}
    for key in keys:
        if key in args.__dict__:
            cfg[key] = args.__dict__[key]
    for key in ("map", "weight"):
        val = cfg.get(key)
        if val is not None:
            cfg[key] = _load_json(val, key)
    return cfg


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _csv(header, rows, comments) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _default_construction(f: HarmonicMap) -> str:
    if f.form == "teichmuller":
        return "teichmuller"
    from .cxexpr import Const
    if isinstance(f.g, Const) and f.g.value == 0:
        return "ahlfors"
    return "harmonic_lambda"


def _build(args, f):
    tag = args.construction or _default_construction(f)
    k = args.k
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", extensions.NonCertifiedWarning)
        return extensions.build_extension(tag, f, _weight(args), lam=_pair(args.lam) if tag != "teichmuller" else None,
                                          alpha=_pair(args.alpha), k=k)


# --------------------------------------------------------------------------


def cmd_check(args) -> int:
    f = _load_map(args)
    if args.criterion is None:
        raise InputError("check needs --criterion")
    if args.k is None or not 0 <= args.k < 1:
        raise InputError("check needs --k in [0, 1)")
    r, a = _grid_size(args.grid, (128, 512))
    report = criteria.check(args.criterion, f, _weight(args), k=args.k, grid=DiskGrid(r, a))
    out = report.to_dict()
    out["config"] = _config(args, "check")
    _write(args.out, _json(out))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_extend(args) -> int:
    f = _load_map(args)
    E = _build(args, f)
    r, a = _grid_size(args.grid, (32, 128))
    zi = DiskGrid(r, a, depth=9.0, include_origin=True).points()
    ze = AnnulusGrid(r, a).points()
    z = np.concatenate([zi, ze])
    F = E(z)
    rows = [(p.real, p.imag, q.real, q.imag, "interior" if abs(p) < 1 else "exterior") for p, q in zip(z, F)]
    comments = [f"certified: {str(E.certified).lower()}", f"construction: {E.tag}",
                "config: " + json.dumps(_config(args, "extend"))]
    _write(args.out, _csv(["re_z", "im_z", "re_F", "im_F", "region"], rows, comments))
    if args.report:
        _write(args.report, _trace_csv(E, comments))
    return EXIT_OK if E.certified else EXIT_FAIL


def _trace_csv(E, comments) -> str:
    tr = extensions.boundary_trace(E)
    return _csv(["theta", "re_in", "im_in", "re_out", "im_out", "gap"], tr.rows(), comments)


def cmd_beltrami(args) -> int:
    f = _load_map(args)
    E = _build(args, f)
    r, a = _grid_size(args.grid, (64, 256))
    cert = beltrami.max_dilatation(E, DiskGrid(r, a, depth=9.0, include_origin=False), AnnulusGrid(r, a))
    config = _config(args, "beltrami")
    rows = []
    for g in cert.grids:
        for p, m in zip(g.z, g.mu):
            rows.append((p.real, p.imag, m.real, m.imag, float(abs(m)), g.region))
    comments = [f"certified: {str(cert.certified).lower()}", "config: " + json.dumps(config)]
    _write(args.out, _csv(["re_z", "im_z", "re_mu", "im_mu", "abs_mu", "region"], rows, comments))
    report = cert.to_dict()
    report["construction"] = E.tag
    report["config"] = config
    rpath = args.report
    if rpath is None and args.out not in (None, "-"):
        rpath = str(Path(args.out).with_suffix(".json"))
    if rpath is not None:
        _write(rpath, _json(report))
    return EXIT_OK if cert.certified else EXIT_FAIL


def cmd_render(args) -> int:
    f = _load_map(args)
    E = _build(args, f)
    svg = render_svg(E, metadata=_config(args, "render"))
    _write(args.out, svg)
    return EXIT_OK if E.certified else EXIT_FAIL


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcext", description="Univalence criteria and quasiconformal extensions.")
    sub = p.add_subparsers(dest="command", required=True)
    handlers = {"check": cmd_check, "extend": cmd_extend, "beltrami": cmd_beltrami, "render": cmd_render}
    for name, fn in handlers.items():
        s = sub.add_parser(name)
        s.set_defaults(func=fn)
        s.add_argument("--map", required=True, help="map spec JSON file or inline JSON")
        s.add_argument("--weight", help="weight spec JSON file or inline JSON")
        s.add_argument("--criterion", help="criterion tag (check)")
        s.add_argument("--construction", choices=extensions.CONSTRUCTIONS, help="extension tag")
        s.add_argument("--k", type=float, help="target margin in [0,1)")
        s.add_argument("--lambda", dest="lam", metavar="RE,IM")
        s.add_argument("--alpha", metavar="RE,IM")
        s.add_argument("--grid", metavar="RxA")
        s.add_argument("--out", help="output path (stdout if omitted)")
        s.add_argument("--report", help="secondary output (trace CSV / certification JSON)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ExprSyntaxError as exc:
        print(f"qcext: parse error at offset {exc.offset}: {exc}", file=sys.stderr)
    except InadmissibleWeightError as exc:
        print(f"qcext: inadmissible weight, condition {exc.condition}: {exc}", file=sys.stderr)
    except (InputError, ExprError, MapError, WeightError, criteria.CriterionError,
            extensions.ExtensionError, beltrami.BeltramiError, ValueError, KeyError) as exc:
        print(f"qcext: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
