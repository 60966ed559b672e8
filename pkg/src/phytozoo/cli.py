"""Command-line front end.

Subcommands: fp, simulate, classify-params, sweep, basin, portrait.
Exit codes: 0 ok, 2 invalid input, 3 regime precondition unmet, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from phytozoo import dynamics
from phytozoo.errors import DomainError, PreconditionError, RegimeError
from phytozoo.fixed_points import all_fixed_points, existence_verdict, positive_fixed_points, uhat_bounds
from phytozoo.model import Params, State
from phytozoo.regions import (
    class_signature_holds,
    convergence_checklists,
    invariance_checklist,
    parameter_subclasses,
    verify_invariance,
)
from phytozoo.stability import classify

EXIT_OK, EXIT_INPUT, EXIT_REGIME, EXIT_IO = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _params(args, swept: str | None = None) -> Params:
    values = {}
    for name in ("beta", "r", "theta", "c"):
        value = getattr(args, name)
        if value is None:
            if name != swept:
                raise CliError(f"--{name} is required", EXIT_INPUT)
            value = args.start
        values[name] = value
    return Params(args.h, **values)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit_table(args, command: str, header: list[str], rows, sidecar: dict) -> None:
    """CSV at --out (default <command>.csv) plus a JSON sidecar; or one JSON file."""
    if args.format == "json":
        doc = dict(sidecar, columns=header, rows=[list(r) for r in rows])
        _write_text(args.out or f"{command}.json", _json_text(doc))
        return
    out = args.out or f"{command}.csv"
    _write_text(out, _csv_text(header, rows))
    _write_text(str(Path(out).with_suffix(".json")), _json_text(sidecar))


def _settings(args, max_steps: int) -> dynamics.SimSettings:
    return dynamics.SimSettings(max_steps, args.conv_tol, args.escape)


def _complex_json(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def cmd_fp(args) -> int:
    params = _params(args)
    verdict = existence_verdict(params)
    points = []
    for fp in all_fixed_points(params):
        rep = classify(fp, params)
        points.append(
            {
                "label": fp.label,
                "u": fp.u,
                "v": fp.v,
                "p": rep.coeffs.p,
                "q": rep.coeffs.q,
                "lambda": [_complex_json(z) for z in rep.eigenvalues],
                "class": rep.fp_class,
                "ns_flag": rep.ns_flag,
                "degenerate": fp.degenerate,
                "note": rep.note,
            }
        )
    doc = {"params": params.as_dict(), "fixed_points": points, "regime": verdict.regime, "note": verdict.note}
    if args.format == "json":
        _write_text(args.out, _json_text(doc))
    elif args.format == "csv":
        rows = [
            (pt["label"], pt["u"], pt["v"], pt["p"], pt["q"],
             pt["lambda"][0]["re"], pt["lambda"][0]["im"], pt["lambda"][1]["re"], pt["lambda"][1]["im"], pt["class"])
            for pt in points
        ]
        header = ["label", "u", "v", "p", "q", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im", "class"]
        _write_text(args.out, _csv_text(header, rows))
    else:
        lines = [f"regime: {verdict.regime} (interior fixed points: {verdict.count})"]
        if verdict.note:
            lines.append(f"note: {verdict.note}")
        for pt in points:
            lam = ", ".join(f"{z['re']:.6g}{z['im']:+.6g}i" for z in pt["lambda"])
            lines.append(
                f"{pt['label']:7s} u={fmt(pt['u'])} v={fmt(pt['v'])} p={pt['p']:.6g} q={pt['q']:.6g} "
                f"lambda=[{lam}] {pt['class']}{' NS' if pt['ns_flag'] else ''}"
            )
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = _params(args)
    if args.target is not None and args.target not in {fp.label for fp in all_fixed_points(params)}:
        raise CliError(f"requested fixed point {args.target} does not exist for these parameters", EXIT_REGIME)
    res = dynamics.simulate(State(args.u0, args.v0), params, args.steps, args.conv_tol, args.escape)
    if args.out is not None:
        rows = ((int(n), float(u), float(v)) for n, (u, v) in zip(res.index, res.iterates))
        _write_text(args.out, _csv_text(["n", "u", "v"], rows))
    line = f"verdict={res.verdict_text} steps={res.steps_used}"
    if res.stride > 1:
        line = f"stride={res.stride}\n" + line
    if args.target is not None:
        line = f"target={args.target} reached={'yes' if res.limit == args.target else 'no'}\n" + line
    print(line)
    return EXIT_OK


def cmd_classify_params(args) -> int:
    params = _params(args)
    verdict = existence_verdict(params)
    doc: dict = {"params": params.as_dict(), "existence": asdict(verdict)}
    if params.h == 1:
        try:
            lo, hi = uhat_bounds(params)
            doc["uhat"] = [lo, hi]
        except DomainError:
            lo = hi = None
            doc["uhat"] = None
        subclasses = parameter_subclasses(params)
        doc["subclasses"] = [
            {"subclass": sc.subclass, "class": sc.cls,
             "signature_ok": lo is not None and class_signature_holds(sc.cls, (lo, hi))}
            for sc in subclasses
        ]
    checklists = [invariance_checklist(reg, params) for reg in (("M2", "M3", "M4") if params.h == 1 else ("N",))]
    checklists += convergence_checklists(params)
    doc["checklists"] = [
        {"name": cl.name, "holds": cl.holds, "items": [{"hypothesis": t, "pass": ok} for t, ok in cl.items]}
        for cl in checklists
    ]
    if args.samples:
        doc["invariance_samples"] = []
        for reg in ("M1", "M2", "M3", "M4") if params.h == 1 else ("N",):
            rep = verify_invariance(reg, params, args.samples, args.seed)
            doc["invariance_samples"].append(
                {"region": reg, "samples": rep.samples, "violations": len(rep.violations),
                 "hypotheses_hold": rep.hypotheses.holds}
            )

    if args.format == "json":
        _write_text(args.out, _json_text(doc))
        return EXIT_OK
    lines = [f"existence: {verdict.count} interior fixed point(s); {verdict.regime}"]
    if params.h == 1:
        if doc["uhat"] is None:
            lines.append("uhat: none (v' < 0 for every u)")
        else:
            lines.append(f"uhat- = {fmt(lo)}  uhat+ = {fmt(hi)}")
        names = ", ".join(f"({s['subclass']})" for s in doc["subclasses"]) or "none"
        lines.append(f"subclasses: {names}")
    for cl in checklists:
        lines.append(f"[{'PASS' if cl.holds else 'FAIL'}] {cl.name}")
        for text, ok in cl.items:
            lines.append(f"    {'pass' if ok else 'fail'}: {text}")
    for row in doc.get("invariance_samples", []):
        lines.append(f"{row['region']}: {row['violations']} of {row['samples']} sampled points leave in one step")
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    params = _params(args, swept=args.param)
    rows = dynamics.sweep_profile(args.param, args.start, args.stop, args.steps, params)
    points = dynamics.ns_sweep(args.param, args.start, args.stop, args.steps, params)
    sidecar = {
        "command": "sweep",
        "params": {k: v for k, v in params.as_dict().items() if k != args.param},
        "config": {"param": args.param, "from": args.start, "to": args.stop, "steps": args.steps,
                   "q_tol": dynamics.NS_Q_TOL, "param_tol": dynamics.NS_PARAM_TOL},
        "crossings": [asdict(p) for p in points],
        "skipped": args.steps - len(rows),
    }
    table = [(r.value, r.u_minus, r.p, r.q, r.fp_class) for r in rows]
    _emit_table(args, "sweep", ["param", "u_minus", "p", "q", "class"], table, sidecar)
    return EXIT_OK


def _parse_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(f"cannot parse number list {text!r}", EXIT_INPUT) from exc


def cmd_basin(args) -> int:
    params = _params(args)
    settings = _settings(args, args.max_steps)
    if args.u is not None:
        u_values = _parse_list(args.u)
    elif args.start is not None and args.stop is not None:
        u_values = [float(x) for x in np.linspace(args.start, args.stop, args.steps)]
    else:
        interior = positive_fixed_points(params)
        if len(interior) < 2:
            raise RegimeError("no Eplus: parameters are not bistable")
        u_values = [interior[1].u]
    boundary = dynamics.basin_boundary(u_values, params, args.v_tol, args.scan, settings, args.workers)
    sidecar = {
        "command": "basin",
        "params": params.as_dict(),
        "config": {"u_values": u_values, "v_tol": args.v_tol, "scan": args.scan, **asdict(settings)},
        "notes": boundary.notes,
    }
    _emit_table(args, "basin", ["u", "v_star"], boundary.samples, sidecar)
    return EXIT_OK


def _parse_grid(text: str) -> dynamics.Grid:
    try:
        uspec, vspec = text.split(",")
        u0, u1, nu = uspec.split(":")
        v0, v1, nv = vspec.split(":")
        return dynamics.Grid(float(u0), float(u1), int(nu), float(v0), float(v1), int(nv))
    except ValueError as exc:
        raise CliError(f"--grid must look like u0:u1:nu,v0:v1:nv (got {text!r})", EXIT_INPUT) from exc


def cmd_portrait(args) -> int:
    params = _params(args)
    grid = _parse_grid(args.grid)
    settings = _settings(args, args.steps)
    cells = dynamics.portrait(grid, params, settings, args.workers)
    sidecar = {
        "command": "portrait",
        "params": params.as_dict(),
        "config": {"grid": asdict(grid), **asdict(settings)},
    }
    _emit_table(args, "portrait", ["u", "v", "verdict"], [(s.u, s.v, verdict) for s, verdict in cells], sidecar)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--h", type=int, choices=(1, 2), required=True, help="response order")
    for name in ("beta", "r", "theta", "c"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--out", help="output path")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--conv-tol", type=float, default=dynamics.CONV_TOL)
    sim.add_argument("--escape", type=float, default=dynamics.ESCAPE_RADIUS)
    sim.add_argument("--workers", type=int, default=None)

    parser = argparse.ArgumentParser(prog="phytozoo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fp", parents=[common], help="fixed points and their types")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_fp)

    p = sub.add_parser("simulate", parents=[common, sim], help="iterate one trajectory")
    p.add_argument("--u0", type=float, required=True)
    p.add_argument("--v0", type=float, required=True)
    p.add_argument("--steps", type=int, default=dynamics.MAX_STEPS)
    p.add_argument("--target", choices=("E0", "E1", "Eminus", "Eplus"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classify-params", parents=[common], help="parameter classes and hypothesis checklists")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--samples", type=int, default=0, help="also sample invariant regions")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classify_params)

    p = sub.add_parser("sweep", parents=[common], help="scan q(u-) and locate q = 1 crossings")
    p.add_argument("--param", choices=dynamics.SWEEPABLE, required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("basin", parents=[common, sim], help="bisect the Eminus/E1 basin boundary")
    p.add_argument("--u", help="comma-separated u values (default: u of Eplus)")
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int, default=20, help="number of u values between --from and --to")
    p.add_argument("--v-tol", type=float, default=1e-6)
    p.add_argument("--scan", type=int, default=40, help="v intervals scanned per u before bisection")
    p.add_argument("--max-steps", type=int, default=dynamics.MAX_STEPS)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_basin)

    p = sub.add_parser("portrait", parents=[common, sim], help="verdict for every cell of a grid")
    p.add_argument("--grid", required=True, help="u0:u1:nu,v0:v1:nv")
    p.add_argument("--steps", type=int, default=dynamics.MAX_STEPS)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_portrait)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except RegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
