"""Batch command line: run cases, build convergence tables, scan stability.

    levelsweep run       --case ex2d-quartic --scheme third --nx 160 --nt 16
    levelsweep eoc       --case ex1d-smooth --scheme third --levels 4
    levelsweep stability --scheme third --dim 1 --cmax 100

Every command writes delimited output (stdout, plus ``--out`` for a CSV
file) and renders a matplotlib figure next to it when ``--plot`` is given.

Exit codes: 0 success, 2 usage error (unknown case/scheme/flags), 3 a solve
produced non-finite values (the diagnostic snapshot path is printed), 4 a
degenerate amplification symbol was hit.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .cases import get_case
from .errors import ConfigurationError, DegenerateSymbolError, DivergenceError
from .experiments import CSV_HEADER, eoc_table, run_case, run_ladder, write_records_csv
from .stability import (
    box_edge_max,
    instability_threshold,
    scan_max_magnitude,
)

SCHEME_CHOICES = ("second", "hr", "third")


def _add_common_run_flags(p):
    p.add_argument("--case", required=True, help="benchmark case id (e.g. ex1d-smooth)")
    p.add_argument("--scheme", required=True, help="second | hr | third")
    p.add_argument("--sweeps", type=int, default=None, help="Gauss-Seidel passes per solve")
    p.add_argument("--w", default=None, help="second-order weight: value or 'preferred'")
    p.add_argument("--ladder", default=None, help="named resolution ladder of the case")
    p.add_argument(
        "--cross-sampling", choices=("symmetric", "printed"), default="symmetric",
        help="sampling of the off-centre Courant factor in the 2D mixed terms",
    )
    p.add_argument(
        "--hr-predictor", default="0.5",
        help="2D high-resolution predictor: weight value or 'third'",
    )
    p.add_argument("--out", default=None, help="write CSV here")
    p.add_argument("--plot", action="store_true", help="render a figure next to the output")


def _parse_w(text):
    if text is None or text == "preferred":
        return text
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"--w expects a number or 'preferred', got {text!r}")


def _parse_predictor(text):
    if text in ("third", "preferred"):
        return text
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(
            f"--hr-predictor expects a weight, 'preferred' or 'third', got {text!r}"
        )


def _figure_path(out, default_stem):
    stem = os.path.splitext(out)[0] if out else default_stem
    return stem + ".png"


def cmd_run(args):
    case = get_case(args.case)
    if args.scheme not in SCHEME_CHOICES:
        raise ConfigurationError(f"unknown scheme {args.scheme!r}; pick from {SCHEME_CHOICES}")
    snapshot_dir = args.snapshots
    result = run_case(
        case,
        args.scheme,
        args.nx,
        args.nt,
        sweeps=args.sweeps,
        w=_parse_w(args.w),
        snapshot_dir=snapshot_dir,
        cross_sampling=args.cross_sampling,
        hr_predictor=_parse_predictor(args.hr_predictor),
        return_final=args.plot,
    )
    record, final = result if args.plot else (result, None)
    lines = [CSV_HEADER, record.csv_row()]
    print("\n".join(lines))
    if args.out:
        write_records_csv([record], args.out)
    if args.plot:
        from .reporting import solution_figure

        path = _figure_path(args.out, f"levelsweep-run-{case.id}-{args.scheme}")
        solution_figure(case, final, case.t_final, record, path)
        print(f"figure: {path}")
    return 0


def cmd_eoc(args):
    case = get_case(args.case)
    if args.scheme not in SCHEME_CHOICES:
        raise ConfigurationError(f"unknown scheme {args.scheme!r}; pick from {SCHEME_CHOICES}")
    records = run_ladder(
        case,
        args.scheme,
        levels=args.levels,
        ladder=args.ladder,
        sweeps=args.sweeps,
        w=_parse_w(args.w),
        with_anchor=not args.no_anchor,
        cross_sampling=args.cross_sampling,
        hr_predictor=_parse_predictor(args.hr_predictor),
    )
    print(eoc_table(records, fmt="text"), end="")
    if args.out:
        write_records_csv(records, args.out)
    if args.plot:
        from .reporting import eoc_figure

        path = _figure_path(args.out, f"levelsweep-eoc-{case.id}-{args.scheme}")
        eoc_figure(records, case, path)
        print(f"figure: {path}")
    return 0


def cmd_stability(args):
    scheme = args.scheme
    dim = args.dim
    if scheme.endswith("2d"):
        dim = 2
    if dim not in (1, 2):
        raise ConfigurationError("--dim must be 1 or 2")
    if dim == 2 and not scheme.endswith("2d"):
        scheme = scheme + "2d"
    w = _parse_w(args.w) or 0.5
    if args.cmax < 0:
        raise ConfigurationError("--cmax must be nonnegative")
    if args.cmax == 0:
        values = np.array([0.0])
    else:
        values = np.geomspace(max(args.cmax * 1e-4, 1e-2), args.cmax, args.grid)
    report = scan_max_magnitude(
        scheme, values, w=w, n_theta=args.freq, refine_steps=args.refine
    )
    print("\n".join(report.csv_lines()))
    summary = f"# max_abs_g={report.max_abs_g:.10g}"
    if report.argmax:
        summary += (
            f" at C={report.argmax[0]:.6g} D={report.argmax[1]:.6g}"
            f" theta=({report.argmax[3]:.6g},{report.argmax[4]:.6g})"
        )
    print(summary)
    if dim == 2 and report.max_abs_g > 1.0 + 1e-9 and args.cmax > 0:
        m, d_at, _, _ = box_edge_max(scheme, args.cmax, w=w)
        print(f"# box_max_at_cmax={m:.6g} (C={args.cmax:.6g}, D={d_at:.6g})")
        try:
            thr = instability_threshold(scheme, w=w, lo=min(1.0, args.cmax / 4), hi=args.cmax)
            print(f"# instability_threshold={thr:.4f}")
        except ConfigurationError:
            pass
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(report.csv_lines()) + "\n")
    if args.plot:
        from .reporting import stability_figure

        path = _figure_path(args.out, f"levelsweep-stability-{scheme}")
        stability_figure(report, path)
        print(f"figure: {path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="levelsweep",
        description="Semi-implicit level-set advection benchmarks and stability scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one resolution level of a case")
    _add_common_run_flags(p_run)
    p_run.add_argument("--nx", type=int, required=True, help="cells per axis (I)")
    p_run.add_argument("--nt", type=int, required=True, help="time steps (N)")
    p_run.add_argument("--snapshots", default=None, help="directory for per-step CSV snapshots")
    p_run.set_defaults(fn=cmd_run)

    p_eoc = sub.add_parser("eoc", help="walk a case ladder and build the EOC table")
    _add_common_run_flags(p_eoc)
    p_eoc.add_argument("--levels", type=int, default=None, help="ladder levels to run")
    p_eoc.add_argument(
        "--no-anchor", action="store_true",
        help="skip the hidden coarse anchor run (first row EOC stays blank)",
    )
    p_eoc.set_defaults(fn=cmd_eoc)

    p_st = sub.add_parser("stability", help="scan the amplification factor magnitude")
    p_st.add_argument("--scheme", required=True,
                      help="first | second | third (append 2d or use --dim 2)")
    p_st.add_argument("--dim", type=int, default=1)
    p_st.add_argument("--cmax", type=float, required=True)
    p_st.add_argument("--grid", type=int, default=17, help="Courant samples per axis")
    p_st.add_argument("--freq", type=int, default=256, help="frequency samples per axis")
    p_st.add_argument("--refine", type=int, default=4, help="refinement rounds")
    p_st.add_argument("--w", default=None, help="weight of the parametric scheme")
    p_st.add_argument("--out", default=None)
    p_st.add_argument("--plot", action="store_true")
    p_st.set_defaults(fn=cmd_stability)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.snapshot_path:
            print(f"diagnostic snapshot: {exc.snapshot_path}", file=sys.stderr)
        return 3
    except DegenerateSymbolError as exc:
        print(
            f"error: degenerate symbol at courant={exc.courant} theta={exc.theta}",
            file=sys.stderr,
        )
        return 4


if __name__ == "__main__":
    sys.exit(main())
