"""``qsp`` command line: model, price, analyze, lattice, plotdata.

Exit status is 0 on success, 2 for invalid input (bad flags, domain or bound
violations) and 1 for runtime failures such as unreadable files.

Curve arguments accept a ``i,p`` CSV path or one of ``demo:NAME``,
``linear:DP,P,SAMPLES`` and ``random:N`` (seeded by ``--seed``).
"""

import argparse
import contextlib
import json
import os
from pathlib import Path
import sys

import numpy as np

from . import analysis, lattice, pricing
from .curve import LinearCurveSpec, linear_curve, read_curve_csv
from .errors import (CurveError, DomainError, LatticeError, LatticeFormatError,
                     QSPError)
from .families import DEMO_FAMILIES, DEMO_K2, demo_curve, demo_curves, random_curve
from .referendum import outcome_probability_bought

OUT_DIR_ENV = "QSP_OUT_DIR"
FIGURES = (4, 5, 6, 7, 9, 10)


class UsageError(Exception):
    pass


def fmt(x):
    """Shortest decimal that reads back as the same float64."""
    return repr(float(x))


def _parse_range(text):
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def load_curve(source, seed=None):
    if source.startswith("demo:"):
        name = source[5:]
        if name not in DEMO_FAMILIES:
            raise UsageError(f"unknown demo curve {name!r}; choose from {', '.join(DEMO_FAMILIES)}")
        return demo_curve(name)
    if source.startswith("linear:"):
        try:
            dp, p0, n = source[7:].split(",")
            spec = LinearCurveSpec(float(dp), float(p0), int(n))
        except ValueError as exc:
            raise UsageError(f"bad linear curve {source!r}: {exc}") from None
        return linear_curve(spec)
    if source.startswith("random:"):
        try:
            n = int(source[7:])
        except ValueError:
            raise UsageError(f"bad random curve {source!r}") from None
        return random_curve(np.random.default_rng(seed), n_max=n, n_min=n)
    return read_curve_csv(source)


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


# -- commands ----------------------------------------------------------------

def cmd_model(args, out):
    if args.i_range is not None:
        lo, hi = args.i_range
        if lo < 0:
            raise DomainError("i range must start at 0 or above")
        start = max(lo - 1, 0)
        ps = {i: outcome_probability_bought(args.y, args.n, i) for i in range(start, hi + 1)}
        rows = [(i, ps[i], ps[i] - ps[i - 1] if i else None) for i in range(lo, hi + 1)]
        if args.format == "json":
            json.dump({"y": args.y, "n": args.n,
                       "rows": [{"i": i, "p": p, "dp": dp} for i, p, dp in rows]},
                      out, indent=2)
            out.write("\n")
        else:
            out.write(f"# y={fmt(args.y)} n={args.n}\n")
            out.write("i,p,dp\n")
            for i, p, dp in rows:
                out.write(f"{i},{fmt(p)},{'' if dp is None else fmt(dp)}\n")
        return
    i = args.i or 0
    p = outcome_probability_bought(args.y, args.n, i)
    if args.format == "json":
        json.dump({"y": args.y, "n": args.n, "i": i, "p": p}, out)
        out.write("\n")
    elif args.format == "csv":
        out.write(f"y,n,i,p\n{fmt(args.y)},{args.n},{i},{fmt(p)}\n")
    else:
        out.write(fmt(p) + "\n")


def cmd_price(args, out):
    curve = load_curve(args.curve, args.seed)
    schedule = pricing.build_schedule(pricing.QSP(curve, args.k2))
    i_max = trace = None
    if args.v is not None:
        i_max = pricing.i_max_general(curve, pricing.PricingParams(args.k2, args.v))
        if args.trace:
            trace = pricing.rational_buyer(schedule, curve, args.v)
    if args.format == "json":
        doc = json.loads(pricing.schedule_to_json(schedule))
        if i_max is not None:
            doc["v"] = args.v
            doc["i_max"] = i_max
        if trace is not None:
            doc["trace"] = [{"i": i, "gain": g, "c": c, "bought": b}
                            for i, g, c, b in trace.decisions]
            doc["i_stop"] = trace.i_stop
        json.dump(doc, out, indent=2)
        out.write("\n")
        return
    if i_max is not None:
        out.write(f"# k2={fmt(args.k2)} v={fmt(args.v)}\n# i_max={i_max}\n")
    if trace is None:
        out.write(pricing.schedule_to_csv(schedule))
        return
    seen = {i: (g, b) for i, g, _, b in trace.decisions}
    out.write("i,c,gain,bought\n")
    for i, c in enumerate(schedule.prices, 1):
        g, b = seen.get(i, (None, None))
        out.write(f"{i},{fmt(c)},{'' if g is None else fmt(g)},"
                  f"{'' if b is None else int(b)}\n")


def _k2_grid(args):
    if args.sweep is not None:
        return args.sweep
    lo, hi, count = args.sweep_log
    return list(np.geomspace(lo, hi, int(count)))


def cmd_analyze(args, out):
    curve = load_curve(args.curve, args.seed)
    if args.sweep is not None or args.sweep_log is not None:
        if not args.v_list:
            raise UsageError("--sweep needs --v-list")
        rows = analysis.k2_sweep(curve, args.v_list, _k2_grid(args))
        best = analysis.optimal_k2_range(rows)
        if args.format == "json":
            json.dump({"values": args.v_list, "rows": rows,
                       "optimal_k2_range": best}, out, indent=2)
            out.write("\n")
            return
        out.write(f"# values={','.join(fmt(v) for v in args.v_list)}\n")
        out.write(f"# optimal_k2_range={'none' if best is None else ','.join(map(fmt, best))}\n")
        out.write("# big k2: more spread of i_max (finer V) | small k2: bigger V allowed\n")
        cols = ["k2", "feasible", "min_diff", "flattened", "optimal", "spread", "v_max_allowed"]
        out.write(",".join(cols) + "\n")
        for r in rows:
            out.write(",".join(_cell(r[c]) for c in cols) + "\n")
        return
    if args.k2 is None:
        raise UsageError("--k2 is required")
    i_max = args.imax
    if args.v is not None:
        i_max = pricing.i_max_general(curve, pricing.PricingParams(args.k2, args.v))
    if i_max is None and not args.v_list:
        raise UsageError("one of --imax, --v or --v-list is required")
    report = analysis.analyze(curve, args.k2, i_max=i_max, values=args.v_list)
    if args.format == "csv":
        out.write("field,value\n")
        for key, value in vars(report).items():
            if key == "granularity":
                for gk, gv in (value or {}).items():
                    out.write(f"granularity.{gk},{_cell(gv)}\n")
            else:
                out.write(f"{key},{_cell(value)}\n")
    else:
        out.write(report.to_json() + "\n")


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) for v in value)
    return str(value)


def cmd_lattice(args, out):
    if args.action == "build":
        spec = lattice.LatticeSpec(args.y_start, args.y_step, args.y_count,
                                   args.n_max, args.i_cap)
        table = lattice.build_lattice(spec, allow_large=args.allow_large,
                                      workers=args.workers)
        lattice.save(table, args.path)
        out.write(f"wrote {spec.cells} cells to {args.path}\n")
    elif args.action == "export":
        lattice.export_csv(lattice.load(args.path), out)
    else:
        if None in (args.y, args.n, args.i):
            raise UsageError("query needs --y, --n and --i")
        p = lattice.query(lattice.load(args.path), args.y, args.n, args.i)
        if args.format == "json":
            out.write(json.dumps({"y": args.y, "n": args.n, "i": args.i, "p": p}) + "\n")
        else:
            out.write(fmt(p) + "\n")


# -- plot data ---------------------------------------------------------------

def _write_series(out_dir, name, header_lines, columns, rows, as_json):
    path = Path(out_dir) / (name + (".json" if as_json else ".csv"))
    with open(path, "w", newline="") as fh:
        if as_json:
            json.dump({"notes": header_lines, "columns": columns,
                       "rows": [list(r) for r in rows]}, fh, indent=1)
            fh.write("\n")
            return path
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for r in rows:
            fh.write(",".join("" if v is None else (fmt(v) if isinstance(v, float) else str(v))
                              for v in r) + "\n")
    return path


def _y_label(y):
    return f"{y:.2f}"


def plotdata(fig, out_dir, as_json=False):
    """Write the data series behind one figure; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if fig == 4:
        ys = [k / 100 for k in range(101)]
        for n in (1, 3, 10, 30, 100, 1000):
            paths.append(_write_series(
                out_dir, f"fig4_n{n}",
                ["p(y, n): yes-outcome probability vs average-voter yes-probability",
                 f"n = {n} (reconstructed: the n values are not stated with the figure)"],
                ["y", "p"], [(y, outcome_probability_bought(y, n, 0)) for y in ys], as_json))
    elif fig == 5:
        for y in (0.49, 0.5, 0.51):
            paths.append(_write_series(
                out_dir, f"fig5_y{_y_label(y)}",
                ["p(y, n) for n = 1..1000",
                 f"y = {y} (reconstructed: the two values around 0.5 are not stated)"],
                ["n", "p"], [(n, outcome_probability_bought(y, n, 0)) for n in range(1, 1001)],
                as_json))
    elif fig in (6, 7):
        for k in range(1, 10):
            y = k / 10
            ps = [outcome_probability_bought(y, 100, i) for i in range(61)]
            if fig == 6:
                rows = list(enumerate(ps))
                head = ["p(y, 100, i) for i = 0..60 bought votes", f"y = {y}"]
                cols = ["i", "p"]
            else:
                rows = [(i, ps[i] - ps[i - 1]) for i in range(1, 61)]
                head = ["dp(i) = p(y, 100, i) - p(y, 100, i-1) for i = 1..60", f"y = {y}"]
                cols = ["i", "dp"]
            paths.append(_write_series(out_dir, f"fig{fig}_y{_y_label(y)}", head, cols, rows,
                                       as_json))
    elif fig in (9, 10):
        for name, curve in demo_curves().items():
            desc = DEMO_FAMILIES[name][1]
            schedule = pricing.build_schedule(pricing.QSP(curve, DEMO_K2))
            head = [f"demo curve {name}: {desc} (reconstructed illustration)",
                    f"K2 = {DEMO_K2}, N = {curve.n}"]
            if fig == 9:
                rows = [(0, curve[0], None)] + [
                    (i, curve[i], schedule.prices[i - 1]) for i in range(1, curve.n + 1)]
                paths.append(_write_series(out_dir, f"fig9_{name}", head, ["i", "p", "c"],
                                           rows, as_json))
                continue
            wit = analysis.big_o_witness(curve, DEMO_K2)
            m_i = analysis.i_squared_constant(DEMO_K2)
            head += [f"M_p = {fmt(wit.m)} ({wit.regime}); M_i = 1/K2 = {fmt(m_i)}"]
            rows = []
            total = 0.0
            for i in range(curve.n + 1):
                if i:
                    total = analysis.total_cost_closed_form(curve, DEMO_K2, i)
                rows.append((i, total, wit.m * curve[i] ** 2, m_i * float(i) ** 2))
            paths.append(_write_series(out_dir, f"fig10_{name}", head,
                                       ["i_max", "total_cost", "m_p2_bound", "m_i2_ref"],
                                       rows, as_json))
    else:
        raise UsageError(f"no data for figure {fig}; valid figures: "
                         f"{', '.join(map(str, FIGURES))}")
    return paths


def cmd_plotdata(args, out):
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    for path in plotdata(args.figure, out_dir, as_json=args.format == "json"):
        out.write(f"{path}\n")


# -- parser ------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS,
                        help="output format")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for random:N curves")

    parser = argparse.ArgumentParser(prog="qsp", parents=[common],
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", parents=[common], help="referendum outcome probability")
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--i", type=int)
    g.add_argument("--i-range", type=_parse_range, metavar="A..B")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("price", parents=[common], help="QSP price schedule and i_max")
    p.add_argument("curve")
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--v", type=float)
    p.add_argument("--trace", action="store_true", help="include the rational buyer trace")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("analyze", parents=[common], help="total cost and K2 trade-off")
    p.add_argument("curve")
    p.add_argument("--k2", type=float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--imax", type=int)
    g.add_argument("--v", type=float)
    p.add_argument("--v-list", type=_float_list, metavar="V1,V2,...")
    s = p.add_mutually_exclusive_group()
    s.add_argument("--sweep", type=_float_list, metavar="K2A,K2B,...")
    s.add_argument("--sweep-log", type=float, nargs=3, metavar=("LO", "HI", "COUNT"))
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lattice", parents=[common], help="precomputed p(y,n,i) grids")
    p.add_argument("action", choices=("build", "export", "query"))
    p.add_argument("path")
    p.add_argument("--y-start", type=float, default=0.0)
    p.add_argument("--y-step", type=float, default=0.01)
    p.add_argument("--y-count", type=int, default=101)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--i-cap", type=int, default=501)
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--y", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--i", type=int)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("plotdata", parents=[common], help="CSV data behind the figures")
    p.add_argument("figure", type=int)
    p.add_argument("--out-dir", help=f"directory for the files (default: ${OUT_DIR_ENV} or .)")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("format", "out", "seed"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        with _output(args.out) as out:
            args.func(args, out)
    except (UsageError, DomainError, CurveError) as exc:
        print(f"qsp: error: {exc}", file=sys.stderr)
        return 2
    except LatticeFormatError as exc:
        print(f"qsp: error: {exc}", file=sys.stderr)
        return 1
    except LatticeError as exc:
        print(f"qsp: error: {exc}", file=sys.stderr)
        return 2
    except (QSPError, OSError) as exc:
        print(f"qsp: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
