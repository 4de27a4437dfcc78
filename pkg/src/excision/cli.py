"""Command-line front end.

Commands
--------
identity    accumulate the McShane sum, report the deficiency from 1/2
tree        stream the enumerated nodes as CSV or JSON
intervals   excision-interval layout with a disjointness verdict
dimension   gap sets and box-counting slope estimates per depth
scan        branch-ratio convergence along a prescribed branch
render      SVG figure of the uplift configuration
verify      run every invariant suite, machine-readable report

Parameters come from flags or an INI config file (flags win); environment
variables are never consulted.  All numeric output is written as decimal
strings at the full working precision.  Exit codes: 0 success, 1 unmet
tolerance or failed verification, 2 bad configuration, 3 interval overlap.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import mpmath as mp

from .cantor import (
    BranchSpec,
    box_dimension_estimate,
    build_gaps,
    dimension_scale_ladder,
    ratio_convergence_scan,
)
from .errors import ConfigError, ExcisionError, OverlapDetected
from .fricke import Budget, FrickeParams, enumerate_tree, solve_c, validate_params
from .identity import (
    excision_interval,
    interval_layout,
    length_spectrum,
    mcshane_sum,
    summand_mpf,
    width_mpf,
)
from .properties import verify_all
from .render import SceneSpec, render_scene
from .scalars import parse_scalar, scalar_str

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_OVERLAP = 3

_CONFIG_KEYS = {
    "params": ("a", "b", "c", "solve_c"),
    "numeric": ("precision", "mode"),
    "budget": ("max_depth", "max_z", "max_nodes"),
    "output": ("out", "format"),
    "identity": ("tol",),
    "dimension": ("depths", "scales", "per_level"),
    "scan": ("prefix", "block", "iterations"),
    "render": ("window", "layers", "level"),
    "verify": ("profile", "perturb"),
}


def _load_config(path: str | None) -> dict:
    values: dict = {}
    if not path:
        return values
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    for section, keys in _CONFIG_KEYS.items():
        if parser.has_section(section):
            for key in parser.options(section):
                if key not in keys:
                    raise ConfigError(f"unknown key [{section}] {key}")
                values[key] = parser.get(section, key)
    return values


def _merged(args: argparse.Namespace, cfg: dict, key: str, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in cfg:
        return cfg[key]
    return default


def _build_params(args, cfg) -> FrickeParams:
    prec = int(_merged(args, cfg, "precision", 256))
    mode = _merged(args, cfg, "mode", "auto")
    a = _merged(args, cfg, "a")
    b = _merged(args, cfg, "b")
    c = _merged(args, cfg, "c")
    use_solve = bool(_merged(args, cfg, "solve_c", False))
    if a is None or b is None:
        raise ConfigError("parameters a and b are required")
    if use_solve:
        if c is not None:
            raise ConfigError("give either c or --solve-c, not both")
        c = solve_c(a, b, mode=mode, prec=prec)
    elif c is None:
        raise ConfigError("parameter c is required (or pass --solve-c)")
    return validate_params(a, b, c, mode=mode, prec=prec)


def _build_budget(args, cfg) -> Budget:
    max_depth = _merged(args, cfg, "max_depth")
    max_z = _merged(args, cfg, "max_z")
    max_nodes = _merged(args, cfg, "max_nodes")
    if max_depth is None and max_z is None and max_nodes is None:
        max_depth, max_z = 25, "100000000"
    budget = Budget(
        max_depth=None if max_depth is None else int(max_depth),
        max_z=None if max_z is None else Fraction(str(max_z)),
        max_nodes=None if max_nodes is None else int(max_nodes),
    )
    budget.validate()
    return budget


def _out_path(args, cfg, default_name: str) -> Path | None:
    out = _merged(args, cfg, "out")
    if out is None:
        return None
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / default_name


def _write_text(path: Path | None, text: str) -> None:
    if path is not None:
        path.write_text(text, encoding="utf-8")


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _node_rows(params: FrickeParams, budget: Budget):
    prec = params.ctx.prec
    for node in enumerate_tree(params, budget):
        iv = excision_interval(node.E, params, node.path)
        yield {
            "path": node.path,
            "depth": node.depth,
            "x": scalar_str(node.triple[0], prec),
            "y": scalar_str(node.triple[1], prec),
            "z": scalar_str(node.triple[2], prec),
            "width": scalar_str(width_mpf(node.z, params), prec),
            "summand": scalar_str(summand_mpf(node.z, params), prec),
            "lo": scalar_str(params.ctx.mpf(iv.lo), prec),
            "hi": scalar_str(params.ctx.mpf(iv.hi), prec),
        }


TREE_COLUMNS = ("path", "depth", "x", "y", "z", "width", "summand", "lo", "hi")
INTERVAL_COLUMNS = ("path", "z", "lo", "hi", "width", "summand")


def _csv_text(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def cmd_identity(args, cfg) -> int:
    params = _build_params(args, cfg)
    budget = _build_budget(args, cfg)
    tol = mp.mpf(str(_merged(args, cfg, "tol", "1e-6")))
    report = mcshane_sum(params, budget)
    prec = params.ctx.prec
    print("mcshane identity check")
    print(f"  partial sum   {scalar_str(report.partial_sum, prec)}")
    print(f"  normalized    {scalar_str(report.normalized, prec)}")
    print(f"  deficiency    {scalar_str(report.deficiency, prec)}")
    print(f"  nodes         {report.node_count}")
    print(f"  max z         {scalar_str(report.max_z, prec)}")
    print(f"  monotone      {report.monotone}")
    print(f"  bounded       {report.bounded}")
    _write_text(_out_path(args, cfg, "identity.json"), _json_dump(report.as_dict(params)))
    with params.ctx.workprec():
        ok = abs(report.deficiency) < tol and report.monotone and report.bounded
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_tree(args, cfg) -> int:
    params = _build_params(args, cfg)
    budget = _build_budget(args, cfg)
    fmt = _merged(args, cfg, "format", "csv")
    rows = list(_node_rows(params, budget))
    if fmt == "json":
        text = _json_dump({"nodes": rows})
        path = _out_path(args, cfg, "tree.json")
    elif fmt == "csv":
        text = _csv_text(rows, TREE_COLUMNS)
        path = _out_path(args, cfg, "tree.csv")
    else:
        raise ConfigError(f"unsupported tree format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        _write_text(path, text)
        print(f"wrote {path} ({len(rows)} nodes)")
    return EXIT_OK


def cmd_intervals(args, cfg) -> int:
    params = _build_params(args, cfg)
    budget = _build_budget(args, cfg)
    level = _merged(args, cfg, "level")
    layout = interval_layout(params, level=None if level is None else int(level),
                             budget=budget)
    prec = params.ctx.prec
    rows = []
    for iv in layout.intervals:
        rows.append({
            "path": iv.source,
            "z": scalar_str(iv.zvalue, prec),
            "lo": scalar_str(params.ctx.mpf(iv.lo), prec),
            "hi": scalar_str(params.ctx.mpf(iv.hi), prec),
            "width": scalar_str(iv.width_value(params), prec),
            "summand": scalar_str(summand_mpf(iv.zvalue, params), prec),
        })
    text = _csv_text(rows, INTERVAL_COLUMNS)
    path = _out_path(args, cfg, "intervals.csv")
    if path is None:
        sys.stdout.write(text)
    else:
        _write_text(path, text)
    with params.ctx.workprec():
        amb_lo = scalar_str(params.ctx.mpf(layout.ambient[0]), prec)
        amb_hi = scalar_str(params.ctx.mpf(layout.ambient[1]), prec)
    print(f"intervals      {len(rows)}")
    print(f"ambient        [{amb_lo}, {amb_hi}]")
    print(f"total excised  {scalar_str(layout.total_excised, prec)}")
    print("disjoint       True")
    return EXIT_OK


def cmd_dimension(args, cfg) -> int:
    params = _build_params(args, cfg)
    depths = _parse_depths(_merged(args, cfg, "depths", "5:20"))
    per_level = float(_merged(args, cfg, "per_level", 3.0))
    scales_arg = _merged(args, cfg, "scales")
    prec = params.ctx.prec
    rows = []
    summary = []
    for depth in depths:
        gaps = build_gaps(params, depth)
        if scales_arg:
            scales = [parse_scalar(s, params.ctx.__class__(exact=False, prec=prec))
                      for s in str(scales_arg).split(",")]
        else:
            scales = dimension_scale_ladder(params, depth, per_level=per_level)
        est = box_dimension_estimate(gaps, scales, prec)
        for scale, count, local in est.points:
            rows.append({
                "depth": depth,
                "gap_count": len(gaps.gaps),
                "gap_total": scalar_str(gaps.total_gap, prec),
                "box_scale": scalar_str(scale, prec),
                "box_count": count,
                "slope": "" if local is None else f"{local:.6f}",
            })
        summary.append({"depth": depth, "slope": est.slope,
                        "gap_count": len(gaps.gaps),
                        "gap_total": scalar_str(gaps.total_gap, prec)})
        print(f"depth {depth:3d}  gaps {len(gaps.gaps):6d}  slope {est.slope:.6f}")
    text = _csv_text(rows, ("depth", "gap_count", "gap_total", "box_scale",
                            "box_count", "slope"))
    path = _out_path(args, cfg, "dimension.csv")
    if path is not None:
        _write_text(path, text)
        _write_text(path.with_suffix(".json"), _json_dump({"estimates": summary}))
    return EXIT_OK


def _parse_depths(spec: str) -> list[int]:
    spec = str(spec)
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in spec.split(",")]


def cmd_scan(args, cfg) -> int:
    params = _build_params(args, cfg)
    spec = BranchSpec(
        prefix=str(_merged(args, cfg, "prefix", "m")),
        block=str(_merged(args, cfg, "block", "L")),
        iterations=int(_merged(args, cfg, "iterations", 30)),
    )
    report = ratio_convergence_scan(spec, params)
    prec = params.ctx.prec
    print(f"branch {spec.prefix} block {spec.block} x{spec.iterations}")
    print(f"  final ratio   {scalar_str(report.final_ratio, prec)}")
    print(f"  predicted     {scalar_str(report.predicted_limit, prec)}")
    print(f"  gap           {scalar_str(report.final_gap, prec)}")
    print(f"  max precision {report.max_prec_used}")
    payload = {
        "prefix": spec.prefix,
        "block": spec.block,
        "iterations": spec.iterations,
        "constant_tail": report.constant_tail,
        "ratios": [scalar_str(r, prec) for r in report.ratios],
        "final_ratio": scalar_str(report.final_ratio, prec),
        "predicted_limit": scalar_str(report.predicted_limit, prec),
        "final_gap": scalar_str(report.final_gap, prec),
        "max_prec_used": report.max_prec_used,
    }
    _write_text(_out_path(args, cfg, "scan.json"), _json_dump(payload))
    return EXIT_OK


def cmd_render(args, cfg) -> int:
    params = _build_params(args, cfg)
    window = _parse_window(_merged(args, cfg, "window", "-1,4,0,2.5"))
    layers = tuple(str(_merged(args, cfg, "layers",
                               "uplift,line,intervals,apexes")).split(","))
    level = int(_merged(args, cfg, "level", 2))
    scene = SceneSpec(window=window, layers=layers, level=level)
    svg = render_scene(params, scene)
    path = _out_path(args, cfg, "scene.svg")
    if path is None:
        sys.stdout.write(svg)
    else:
        _write_text(path, svg)
        print(f"wrote {path}")
    return EXIT_OK


def _parse_window(spec: str) -> tuple:
    parts = [float(s) for s in str(spec).split(",")]
    if len(parts) != 4:
        raise ConfigError("window must be x0,x1,y0,y1")
    return ((parts[0], parts[1]), (parts[2], parts[3]))


def cmd_verify(args, cfg) -> int:
    params = _build_params(args, cfg)
    profile = str(_merged(args, cfg, "profile", "default"))
    perturb = bool(_merged(args, cfg, "perturb", False))
    results = verify_all(params, profile=profile, perturb=perturb)
    all_ok = True
    for res in results:
        flag = "pass" if res.passed else "FAIL"
        print(f"[{flag}] {res.name:<10} cases {res.cases:>7}  worst {res.worst_residual:.3e}")
        for note in res.notes:
            print(f"        - {note}")
        all_ok = all_ok and res.passed
    _write_text(_out_path(args, cfg, "verify.json"),
                _json_dump({"groups": [r.as_dict() for r in results],
                            "passed": all_ok}))
    return EXIT_OK if all_ok else EXIT_TOLERANCE


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="excision",
        description="Elliptic-element trees, excision intervals and the McShane identity")
    top.add_argument("--config", help="INI config file; flags override it")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--a")
        p.add_argument("--b")
        p.add_argument("--c")
        p.add_argument("--solve-c", dest="solve_c", action="store_const", const=True,
                       help="derive c from a and b (smaller root)")
        p.add_argument("--precision", type=int, help="working precision in bits")
        p.add_argument("--mode", choices=("auto", "exact", "float"))
        p.add_argument("--max-depth", dest="max_depth", type=int)
        p.add_argument("--max-z", dest="max_z")
        p.add_argument("--max-nodes", dest="max_nodes", type=int)
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("identity", help="McShane sum and deficiency")
    common(p)
    p.add_argument("--tol", help="acceptable |1/2 - normalized| (default 1e-6)")
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("tree", help="stream enumerated nodes")
    common(p)
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("intervals", help="excision interval layout")
    common(p)
    p.add_argument("--level", type=int, help="L/R cut level (both roots are level 0)")
    p.set_defaults(func=cmd_intervals)

    p = sub.add_parser("dimension", help="box-counting slope estimates")
    common(p)
    p.add_argument("--depths", help="range like 5:20 or comma list")
    p.add_argument("--scales", help="comma list of explicit scales")
    p.add_argument("--per-level", dest="per_level", help="ladder depth factor")
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("scan", help="branch-ratio convergence")
    common(p)
    p.add_argument("--prefix", help="start node path, e.g. m or nLR")
    p.add_argument("--block", help="repeating word over L/R")
    p.add_argument("--iterations", type=int, help="number of moves to take")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("render", help="emit an SVG scene")
    common(p)
    p.add_argument("--window", help="x0,x1,y0,y1 plane window")
    p.add_argument("--layers", help="comma list from uplift,isometric,line,intervals,apexes,hexagon")
    p.add_argument("--level", type=int)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="run all invariant suites")
    common(p)
    p.add_argument("--profile", choices=("default", "quick"))
    p.add_argument("--perturb", action="store_const", const=True,
                   help="fault injection: corrupt one matrix entry")
    p.set_defaults(func=cmd_verify)
    return top


def main(argv=None) -> int:
    # deep branches carry z-entries with tens of thousands of digits
    sys.set_int_max_str_digits(10_000_000)
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except OverlapDetected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERLAP
    except (ConfigError, ExcisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
