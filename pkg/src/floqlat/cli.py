"""Command-line front end writing spectra and reports as CSV or JSON.

All energies and frequencies are emitted in units of ``1/T``; ``T`` is
recorded in the JSON ``meta`` block. CSV columns per subcommand:

=================  ==========================================================
pbc-spectrum       k_plus, k_minus, band, value
strip-spectrum     k, band, value
compare            check, max_abs_dev, mean_abs_dev, pairs_matched,
                   degeneracy_factor, max_pair_split, tol, verdict
edge-wavefunction  model, cell, density
phase-scan         jt, m, gap, gap_numeric, gapless, floquet_edges,
                   static_edges
nogo-check         m, compatible, required_abs_m
=================  ==========================================================

Relative ``-o`` paths resolve against ``$FLOQLAT_OUTPUT_DIR`` when it is set.
"""
import argparse
import csv
import io
import json
import math
import os
import re
import sys

import numpy as np

from floqlat import __version__, duality, floquet, staticlat
from floqlat.floquet import ModelParams
from floqlat.spectra import bz_grid

OUTPUT_DIR_ENV = "FLOQLAT_OUTPUT_DIR"
SCHEMA = 1

_PI_TOKEN = re.compile(r"^\s*([-+]?)((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*$")


class UsageError(Exception):
    """Invalid parameter; the message names the offending flag."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_real(text):
    """Parse a decimal or a multiple of pi such as ``"1.5pi"``, ``"pi"``, ``"0.5*pi"``."""
    m = _PI_TOKEN.match(text)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        return sign * float(m.group(2) or 1.0) * math.pi
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or pi multiple: {text!r}") from None


def build_parser():
    parser = _Parser(prog="floqlat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"floqlat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, jt=True):
        if jt:
            sp.add_argument("--jt", type=parse_real, default=1.5 * math.pi,
                            help="drive strength J*T, e.g. 1.5pi (default 1.5pi)")
        sp.add_argument("--T", type=parse_real, default=1.0, help="drive period (default 1)")
        sp.add_argument("--variant", choices=("A", "B"), default="A",
                        help="static chain: A Wilson-Dirac, B SSH")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")

    sp = sub.add_parser("pbc-spectrum", help="bulk bands on a square momentum grid")
    common(sp)
    sp.add_argument("--model", choices=("floquet", "static", "shifted"), default="floquet",
                    help="floquet quasienergies, static H_s eigenvalues, or shifted Floquet values")
    sp.add_argument("--method", choices=("numeric", "analytic"), default="numeric")
    sp.add_argument("--grid", type=int, default=64, help="points per momentum axis")

    sp = sub.add_parser("strip-spectrum", help="spectrum of a strip open in one direction")
    common(sp)
    sp.add_argument("--model", choices=("floquet", "static", "shifted"), default="floquet")
    sp.add_argument("--open", dest="open_dir", choices=floquet.OPEN_DIRS, default="x-minus")
    sp.add_argument("--sites", type=int, default=6, help="unit cells across the strip")
    sp.add_argument("--nk", type=int, default=64, help="conserved-momentum samples")

    sp = sub.add_parser("compare", help="Floquet vs. static spectra, bulk and strip")
    common(sp)
    sp.add_argument("--open", dest="open_dir", choices=floquet.OPEN_DIRS, default="x-minus",
                    help="open direction of the static strip (Floquet strip is open in x-minus)")
    sp.add_argument("--sites", type=int, default=6)
    sp.add_argument("--grid", type=int, default=48)
    sp.add_argument("--nk", type=int, default=64)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("edge-wavefunction", help="left-edge densities of the in-gap states")
    common(sp)
    sp.add_argument("--sites", type=int, default=7)
    sp.add_argument("--k-plus", type=parse_real, default=0.0)

    sp = sub.add_parser("phase-scan", help="bulk gap and edge census versus J*T")
    common(sp, jt=False)
    sp.add_argument("--jt-min", type=parse_real, default=0.1 * math.pi)
    sp.add_argument("--jt-max", type=parse_real, default=1.9 * math.pi)
    sp.add_argument("--steps", type=int, default=37)
    sp.add_argument("--sites", type=int, default=6)
    sp.add_argument("--grid", type=int, default=33)

    sp = sub.add_parser("nogo-check", help="2D Wilson-Dirac compatibility over a mass grid")
    common(sp, jt=False)
    sp.add_argument("--m-min", type=float, default=-1.0)
    sp.add_argument("--m-max", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=1e-3)
    return parser


def _validate(args):
    def jt_ok(flag, value):
        if not 0 < value < 2 * math.pi:
            raise UsageError(f"{flag} must lie in (0, 2pi), got {value:g}")

    if not args.T > 0:
        raise UsageError(f"--T must be positive, got {args.T:g}")
    if hasattr(args, "jt"):
        jt_ok("--jt", args.jt)
    for flag in ("grid", "nk", "sites", "steps"):
        value = getattr(args, flag, None)
        if value is not None and value < (1 if flag == "steps" else 2):
            raise UsageError(f"--{flag} must be >= {1 if flag == 'steps' else 2}, got {value}")
    if args.command == "phase-scan":
        jt_ok("--jt-min", args.jt_min)
        jt_ok("--jt-max", args.jt_max)
        if args.jt_max < args.jt_min:
            raise UsageError("--jt-max must be >= --jt-min")
    if args.command == "nogo-check":
        for flag, v in (("--m-min", args.m_min), ("--m-max", args.m_max)):
            if abs(v) > 1:
                raise UsageError(f"{flag} must lie in [-1, 1], got {v:g}")
        if args.m_max < args.m_min:
            raise UsageError("--m-max must be >= --m-min")
        if not args.step > 0:
            raise UsageError(f"--step must be positive, got {args.step:g}")
    if args.command == "compare" and getattr(args, "tol") <= 0:
        raise UsageError(f"--tol must be positive, got {args.tol:g}")


def _params(args, sites_dir="x-minus", jt=None):
    sites = getattr(args, "sites", 6)
    return ModelParams(
        args.jt if jt is None else jt,
        args.T,
        args.variant,
        n_minus=sites if sites_dir == "x-minus" else 6,
        n_plus=sites if sites_dir == "x-plus" else 6,
    )


# -- commands: each returns (columns, rows, json data, extra meta) ------------


def _band_rows(k_cols, values):
    rows = []
    for i in range(values.shape[0]):
        for b in range(values.shape[1]):
            rows.append(list(k_cols[i]) + [b, values[i, b]])
    return rows


def _spectrum_values(model, table_fn, p):
    table = table_fn()
    if model == "shifted":
        return duality.pi_shift(table, p.T).table()
    return table


def cmd_pbc_spectrum(args):
    p = _params(args)
    if args.model == "static":
        table = staticlat.static_pbc_spectrum(args.grid, p)
    else:
        table = _spectrum_values(
            args.model, lambda: floquet.pbc_spectrum(args.grid, p, method=args.method), p
        )
    rows = _band_rows(table.k, table.values)
    data = {"k_plus": table.k[:, 0], "k_minus": table.k[:, 1], "values": table.values}
    return ["k_plus", "k_minus", "band", "value"], rows, data, {"model": args.model, "grid": args.grid}


def cmd_strip_spectrum(args):
    p = _params(args, args.open_dir)
    ks = bz_grid(args.nk)
    if args.model == "static":
        table = staticlat.static_strip_spectrum(ks, p, args.open_dir).table()
    else:
        table = _spectrum_values(
            args.model, lambda: floquet.strip_quasienergies(ks, p, args.open_dir).table(), p
        )
    rows = _band_rows(table.k[:, None], table.values)
    meta = {"model": args.model, "open": args.open_dir, "sites": args.sites, "nk": args.nk}
    return ["k", "band", "value"], rows, {"k": table.k, "values": table.values}, meta


_REPORT_COLS = [
    "max_abs_dev", "mean_abs_dev", "pairs_matched", "degeneracy_factor",
    "max_pair_split", "tol", "verdict",
]


def cmd_compare(args):
    p = _params(args, "x-minus")
    if args.open_dir == "x-plus":
        p = ModelParams(p.jt, p.T, p.variant, n_minus=args.sites, n_plus=args.sites)
    pbc = duality.pbc_equivalence(p, args.grid, tol=args.tol)
    strip = duality.strip_equivalence(p, bz_grid(args.nk), tol=args.tol, static_dir=args.open_dir)
    reports = {"pbc": pbc.as_dict(), "strip": strip.as_dict()}
    rows = [[name] + [rep[c] for c in _REPORT_COLS] for name, rep in reports.items()]
    meta = {"open": args.open_dir, "sites": args.sites, "grid": args.grid, "nk": args.nk}
    return ["check"] + _REPORT_COLS, rows, reports, meta


def cmd_edge_wavefunction(args):
    p = _params(args)
    profiles = duality.edge_wavefunctions(p, k_plus=args.k_plus)
    rows, data = [], {}
    for name, prof in profiles.items():
        if prof is None:
            data[name] = None
            continue
        for cell, rho in enumerate(prof.density):
            rows.append([name, cell, rho])
        data[name] = {"density": prof.density, "decay_length": prof.decay_length,
                      "center": prof.center}
    return ["model", "cell", "density"], rows, data, {"sites": args.sites, "k_plus": args.k_plus}


_SCAN_COLS = ["jt", "m", "gap", "gap_numeric", "gapless", "floquet_edges", "static_edges"]


def cmd_phase_scan(args):
    p = ModelParams(args.jt_min, args.T, args.variant, n_minus=args.sites)
    grid = np.linspace(args.jt_min, args.jt_max, args.steps)
    scan = duality.phase_scan(grid, p, n_grid=args.grid)
    rows = [[getattr(r, c) for c in _SCAN_COLS] for r in scan]
    data = {c: [row[i] for row in rows] for i, c in enumerate(_SCAN_COLS)}
    meta = {"jt_min": args.jt_min, "jt_max": args.jt_max, "steps": args.steps, "sites": args.sites}
    return _SCAN_COLS, rows, data, meta


def cmd_nogo_check(args):
    n = int(round((args.m_max - args.m_min) / args.step)) + 1
    ms = np.linspace(args.m_min, args.m_max, n)
    reports = [staticlat.wd2p1_nogo(m, args.T) for m in ms]
    rows = [[r.m, r.compatible, r.required_abs_m] for r in reports]
    data = {
        "m": ms,
        "compatible": [r.compatible for r in reports],
        "required_abs_m": reports[0].required_abs_m,
        "solutions": [list(s) for s in reports[0].solutions],
        "boundary_line_residual": max(r.boundary_line_residual for r in reports),
        "any_compatible": any(r.compatible for r in reports),
    }
    return ["m", "compatible", "required_abs_m"], rows, data, {"step": args.step}


COMMANDS = {
    "pbc-spectrum": cmd_pbc_spectrum,
    "strip-spectrum": cmd_strip_spectrum,
    "compare": cmd_compare,
    "edge-wavefunction": cmd_edge_wavefunction,
    "phase-scan": cmd_phase_scan,
    "nogo-check": cmd_nogo_check,
}


# -- serialization ----------------------------------------------------------


def format_value(x):
    """CSV cell text: 12 significant digits, no negative zero, lowercase booleans."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0:
            x = 0.0
        return format(x, ".12g")
    return str(x)


def to_csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(x) for x in row])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return 0.0 if x == 0 else x
    return x


def to_json(meta, data):
    doc = {"schema": SCHEMA, "meta": _jsonable(meta), "data": _jsonable(data)}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def resolve_output(path):
    if path == "-" or os.path.isabs(path):
        return path
    base = os.environ.get(OUTPUT_DIR_ENV)
    return os.path.join(base, path) if base else path


def emit(text, path):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
    except UsageError as exc:
        print(f"floqlat: error: {exc}", file=sys.stderr)
        return 2
    try:
        columns, rows, data, extra = COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - report and map to exit 1
        print(f"floqlat: internal error: {exc}", file=sys.stderr)
        return 1
    meta = {"command": args.command, "T": args.T, "units": "1/T", "version": __version__,
            "variant": args.variant}
    if hasattr(args, "jt"):
        meta["jt"] = args.jt
        meta["m"] = math.cos(args.jt / 2)
    meta.update(extra)
    text = to_csv(columns, rows) if args.format == "csv" else to_json(meta, data)
    try:
        emit(text, resolve_output(args.output))
    except OSError as exc:
        print(f"floqlat: cannot write {args.output}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
