"""Command-line front end: ``conemix {verify,partition,grow,table}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .certify import CERTIFIED, FAILED
from .map_family import BWD, EPS, ETA, FWD, ParameterOutOfWindow, Params

EXIT_OK, EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
DEFAULT_PARAM = {ETA: 0.25, EPS: 0.05}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    branch: Optional[str]
    param: Optional[float]
    window: Optional[tuple[float, float]]
    seed: int
    out: Optional[str]
    fmt: str
    max_iters: int
    curves: Optional[str]
    steps: int = 21

    def params(self) -> Params:
        branch = self.branch or EPS
        value = DEFAULT_PARAM[branch] if self.param is None else self.param
        try:
            return Params(branch, value)
        except ParameterOutOfWindow as exc:
            raise UsageError(str(exc)) from exc


def _window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window must look like lo:hi, got {text!r}") from exc
    if not lo < hi:
        raise argparse.ArgumentTypeError("window needs lo < hi")
    return lo, hi


def _num(x) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(config: RunConfig) -> int:
    from .inequality_verifier import full_report

    if config.fmt != "json":
        raise UsageError("verify writes json only")
    report = full_report(config.branch or "all", window=config.window)
    _emit(report.to_json(), config.out)
    verdict = report.verdict
    if verdict == CERTIFIED:
        return EXIT_OK
    return EXIT_FAILED if verdict == FAILED else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# partition
# ---------------------------------------------------------------------------

def partition_polygons(params: Params, curves: Optional[str] = None) -> list:
    """Rows (domain, label, part, return_time, block, vertices) to draw."""
    from .partition_geometry import a2_subdivision, eps_regions, return_partition

    rows = []
    for domain in ("backward_A", "forward_frak_a"):
        for r in return_partition(domain, params):
            rows.append((domain, r.label, r.part, r.return_time, r.itinerary_block, r.float_lift()))
    if params.branch == EPS:
        a4, a5 = a2_subdivision(params)
        for r in a4 + a5:
            rows.append(("A2_subdivision", r.label, r.part, r.return_time, r.itinerary_block, r.float_lift()))
        for reg in eps_regions(params, curves):
            rows.append(("segment_region", reg.label, reg.host, reg.power, reg.direction, reg.float_polygon()))
    return rows


SVG_FILL = {"A1": "#9e9e9e", "A2": "#d0d0d0", "A3": "#6e6e6e", "A4": "#505050", "A5": "#e6e6e6"}


def render_svg(rows: Sequence, size: int = 640) -> str:
    xs = [p[0] for row in rows for p in row[5]]
    ys = [p[1] for row in rows for p in row[5]]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    scale = (size - 40) / max(x1 - x0, y1 - y0)

    def tx(p):
        return 20 + (p[0] - x0) * scale, size - 20 - (p[1] - y0) * scale

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    for domain, label, part, rt, block, verts in rows:
        pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(tx, verts))
        fill = SVG_FILL.get(label.upper(), "none")
        opacity = "0.35" if domain == "forward_frak_a" else "0.8"
        parts.append(f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" stroke="black" '
                     f'stroke-width="0.8"><title>{domain} {label} {part}</title></polygon>')
        cx = sum(v[0] for v in verts) / len(verts)
        cy = sum(v[1] for v in verts) / len(verts)
        lx, ly = tx((cx, cy))
        parts.append(f'<text x="{lx:.1f}" y="{ly:.1f}" font-size="11" text-anchor="middle">{label} ({rt})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_partition(config: RunConfig) -> int:
    rows = partition_polygons(config.params(), config.curves)
    if config.fmt == "svg":
        _emit(render_svg(rows), config.out)
    elif config.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["domain", "label", "part", "return_time", "block", "vertex", "x", "y"])
        for domain, label, part, rt, block, verts in rows:
            for k, (x, y) in enumerate(verts):
                w.writerow([domain, label, part, rt, block, k, _num(x), _num(y)])
        _emit(buf.getvalue(), config.out)
    else:
        data = [
            {"domain": d, "label": lab, "part": part, "return_time": rt, "block": blk,
             "vertices": [[x, y] for x, y in verts]}
            for d, lab, part, rt, blk, verts in rows
        ]
        _emit(json.dumps(data, sort_keys=True, indent=2) + "\n", config.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# grow
# ---------------------------------------------------------------------------

def grow_pair(params: Params, seed: int, max_iters: int, curves=None) -> dict:
    """One backward and one forward trace from seeded random curves, with the
    intersection of their segment witnesses."""
    from .growth_engine import grow_until_segment, in_a1, random_seed, witness_intersection

    rng = random.Random(seed)
    traces = {}
    for direction in (BWD, FWD):
        start = random_seed(rng, direction, params)
        trace = grow_until_segment(start, direction, params, max_iters, curves)
        traces[direction] = (start, trace)
    result = {
        "branch": params.branch,
        "param": params.value_f,
        "seed": seed,
        "traces": {d: {"seed_curve": s.to_dict(), **t.to_dict()} for d, (s, t) in traces.items()},
        "intersection": None,
        "intersection_in_A1": False,
    }
    h, v = traces[BWD][1].witness, traces[FWD][1].witness
    if h is not None and v is not None:
        point = witness_intersection(h.curve, v.curve)
        if point is not None:
            result["intersection"] = list(point)
            result["intersection_in_A1"] = in_a1(point, params.eta_f)
    return result


def cmd_grow(config: RunConfig) -> int:
    if config.fmt != "json":
        raise UsageError("grow writes json only")
    result = grow_pair(config.params(), config.seed, config.max_iters, config.curves)
    _emit(json.dumps(result, sort_keys=True, indent=2) + "\n", config.out)
    return EXIT_OK if result["intersection_in_A1"] else EXIT_FAILED


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

def table_rows(branch: str, lo: float, hi: float, steps: int) -> tuple[list, list]:
    from .cone_engine import min_expansion, minimal_cone
    from .inequality_verifier import b1, b2

    count = len(BLOCKS[branch])
    header = ["param"]
    for direction in (FWD, BWD):
        header += [f"{direction}_K{j}" for j in range(1, count + 1)]
        header += [f"{direction}_cone_lo", f"{direction}_cone_hi"]
    if branch == EPS:
        header += ["B1", "B2"]
    rows = []
    for k in range(steps):
        v = lo + (hi - lo) * k / (steps - 1) if steps > 1 else lo
        if k == steps - 1:
            v = hi
        p = Params(branch, v)
        row = [v]
        for direction in (FWD, BWD):
            cone = minimal_cone(direction, p)
            prefix = "M" if direction == FWD else "MF"
            row += [min_expansion(f"{prefix}{j}", cone, p).lo for j in range(1, count + 1)]
            row += [cone.g_lo.mid(), cone.g_hi.mid()]
        if branch == EPS:
            row += [b1(v).mid(), b2(v).mid()]
        rows.append(row)
    return header, rows


BLOCKS = {ETA: (1, 2, 3), EPS: (1, 2, 3, 4)}


def default_window(branch: str) -> tuple[float, float]:
    from .inequality_verifier import eps_window

    if branch == EPS:
        return eps_window()
    return 1e-4, 1.0 / 3.0 - 1e-4


def cmd_table(config: RunConfig) -> int:
    branch = config.branch or EPS
    lo, hi = config.window or default_window(branch)
    try:
        Params(branch, lo), Params(branch, hi)
    except ParameterOutOfWindow as exc:
        raise UsageError(str(exc)) from exc
    header, rows = table_rows(branch, lo, hi, config.steps)
    if config.fmt == "json":
        _emit(json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n", config.out)
    elif config.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_num(x) for x in r])
        _emit(buf.getvalue(), config.out)
    else:
        raise UsageError("table writes csv or json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

COMMANDS = {"verify": cmd_verify, "partition": cmd_partition, "grow": cmd_grow, "table": cmd_table}
DEFAULT_FORMAT = {"verify": "json", "partition": "svg", "grow": "json", "table": "csv"}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conemix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--branch", choices=(ETA, EPS))
        p.add_argument("--param", type=float)
        p.add_argument("--window", type=_window)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--format", dest="fmt", choices=("json", "csv", "svg"))
        p.add_argument("--max-iters", type=int, default=200)
        p.add_argument("--curves")
        p.add_argument("--steps", type=int, default=21, help="grid points for table")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        branch=args.branch,
        param=args.param,
        window=args.window,
        seed=args.seed,
        out=args.out,
        fmt=args.fmt or DEFAULT_FORMAT[args.command],
        max_iters=args.max_iters,
        curves=args.curves,
        steps=args.steps,
    )
    if config.seed < 0 or config.seed >= 2 ** 64:
        print("conemix: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[config.command](config)
    except UsageError as exc:
        print(f"conemix: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
