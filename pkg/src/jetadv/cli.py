"""Command-line harness for convergence studies, runs, contours, diagnostics.

Subcommands
-----------
converge   error-vs-resolution table with an empirical order column
run        single simulation, optional node-jet CSV dump
contour    level-set benchmark against the Lagrangian marker oracle
diagnose   stability-theory identity checks with PASS/FAIL rows

All output is deterministic CSV (the wall-clock seconds column is the
only value that varies between invocations).  Exit codes: 0 success,
1 I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analytic import AnalyticField, cosine_product_ic, gaussian_hump_ic
from .characteristics import ConstantVelocity, SwirlVelocity, VelocityModel
from .diagnostics import (
    average_identity_residual,
    extract_contour,
    hausdorff_distance,
    marker_oracle,
    random_trig_poly,
    stability_functional,
    write_contours,
)
from .jetfield import GridSpec, JetField, dump_csv, linf_node_error, sample_from_function
from .jetupdate import SchemeConfig, advance, step, upwind_step

UPWIND_DT_FACTOR = 1.0 / math.sqrt(2.0)
CONTOUR_RADIUS = 0.15
CONTOUR_LEVEL = math.exp(-10.0 * CONTOUR_RADIUS**2)

REPORT_HEADER = "scheme,k,strategy,h,dt,t_final,T,linf_error,seconds,steps"


@dataclass(frozen=True)
class SchemePreset:
    k: int
    strategy: str
    stepper: str


SCHEMES = {
    "bilinear": SchemePreset(0, "analytic", "euler"),
    "bicubic": SchemePreset(1, "analytic", "ssprk3"),
    "bicubic-gridfd": SchemePreset(1, "grid_fd", "ssprk3"),
    "biquintic": SchemePreset(2, "epsilon_fd", "rk5_cash_karp"),
    "biquintic-gridfd": SchemePreset(2, "grid_fd", "rk5_cash_karp"),
}
SCHEME_CHOICES = tuple(SCHEMES) + ("upwind",)
IC_CHOICES = ("cosine", "hump")
VELOCITY_CHOICES = ("swirl", "zero")


@dataclass
class RunReport:
    """One benchmark row: scheme identity, discretization, error, cost."""

    scheme: str
    k: int
    strategy: str
    h: float
    dt: float
    t_final: float
    period: float
    linf_error: float | None
    seconds: float
    steps: int

    def __post_init__(self) -> None:
        for name in ("h", "dt", "t_final", "period", "seconds"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name}={v} must be finite and non-negative")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.linf_error is not None:
            e = float(self.linf_error)
            if not (math.isfinite(e) and e >= 0.0):
                raise ValueError("linf_error must be finite and non-negative")

    def row(self, order: str = "") -> str:
        err = "nan" if self.linf_error is None else f"{self.linf_error:.6e}"
        cells = [self.scheme, str(self.k), self.strategy, f"{self.h:.12g}",
                 f"{self.dt:.12g}", f"{self.t_final:.12g}", f"{self.period:.12g}",
                 err, f"{self.seconds:.3f}", str(self.steps)]
        if order:
            cells.append(order)
        return ",".join(cells)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a finite rational")


def _fraction_list(text: str) -> list[Fraction]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty spacing list")
    try:
        return [Fraction(t) for t in items]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            f"{text!r} is not a comma-separated list of finite rationals")


def _grid_from_h(parser: argparse.ArgumentParser, h: Fraction) -> GridSpec:
    if h <= 0:
        parser.error(f"--h {h} must be positive")
    inv = 1 / h
    if inv.denominator != 1:
        parser.error(f"--h {h} must evenly divide the unit square")
    return GridSpec.unit_square(int(inv))


def _make_ic(name: str) -> AnalyticField:
    return cosine_product_ic() if name == "cosine" else gaussian_hump_ic()


def _make_velocity(name: str, period: float) -> VelocityModel:
    if name == "swirl":
        return SwirlVelocity(T=period)
    return ConstantVelocity((0.0, 0.0))


def _exact_is_ic(velocity: str, t_final: float, period: float) -> bool:
    if velocity == "zero":
        return True
    cycles = t_final / period
    return abs(cycles - round(cycles)) < 1e-12


def run_scheme(scheme: str, grid: GridSpec, period: float, t_final: float,
               ic: AnalyticField, velocity: str) -> tuple[JetField | None, RunReport]:
    """Run one scheme from the sampled IC to t_final; time only the march."""
    vel = _make_velocity(velocity, period)
    h = float(np.max(grid.spacing))
    exact_known = _exact_is_ic(velocity, t_final, period)

    if scheme == "upwind":
        values = ic(grid.node_points())
        nominal = h * UPWIND_DT_FACTOR
        n = max(1, math.ceil(t_final / nominal - 1e-9))
        dt = t_final / n
        t0 = time.perf_counter()
        t = 0.0
        for _ in range(n):
            values = upwind_step(grid, values, t, dt, vel)
            t += dt
        seconds = time.perf_counter() - t0
        err = float(np.max(np.abs(values - ic(grid.node_points())))) if exact_known else None
        return None, RunReport("upwind", 0, "upwind", h, dt, t_final, period, err, seconds, n)

    preset = SCHEMES[scheme]
    config = SchemeConfig(k=preset.k, strategy=preset.strategy, stepper=preset.stepper)
    fld = sample_from_function(grid, preset.k, ic)
    t0 = time.perf_counter()
    fld, n, dt = advance(fld, vel, t_final, config)
    seconds = time.perf_counter() - t0
    err = linf_node_error(fld, ic) if exact_known else None
    report = RunReport(scheme, preset.k, preset.strategy, h, dt, t_final, period,
                       err, seconds, n)
    return fld, report


def cmd_converge(args, parser) -> int:
    if args.T <= 0:
        parser.error("--T must be positive")
    if args.tfinal <= 0:
        parser.error("--tfinal must be positive")
    ic = _make_ic(args.ic)
    print(REPORT_HEADER + ",order")
    prev: tuple[float, float] | None = None
    for h in args.h_list:
        grid = _grid_from_h(parser, h)
        _, report = run_scheme(args.scheme, grid, args.T, args.tfinal, ic, args.velocity)
        order = ""
        if prev is not None and report.linf_error and prev[1]:
            h_prev, e_prev = prev
            order = f"{math.log(e_prev / report.linf_error) / math.log(h_prev / report.h):.3f}"
        print(report.row(order=order if order else "nan"))
        if report.linf_error is not None:
            prev = (report.h, report.linf_error)
    return 0


def cmd_run(args, parser) -> int:
    if args.T <= 0:
        parser.error("--T must be positive")
    if args.tfinal <= 0:
        parser.error("--tfinal must be positive")
    if args.out and args.scheme == "upwind":
        parser.error("--out needs a jet scheme; the upwind reference has no jets to dump")
    grid = _grid_from_h(parser, args.h)
    ic = _make_ic(args.ic)
    fld, report = run_scheme(args.scheme, grid, args.T, args.tfinal, ic, args.velocity)
    if args.out:
        try:
            with open(args.out, "w") as stream:
                dump_csv(fld, stream)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 1
    print(REPORT_HEADER)
    print(report.row())
    return 0


def cmd_contour(args, parser) -> int:
    if args.T <= 0:
        parser.error("--T must be positive")
    if args.scheme == "upwind":
        parser.error("contour benchmark needs a jet scheme")
    grid = _grid_from_h(parser, args.h)
    ic = gaussian_hump_ic()
    preset = SCHEMES[args.scheme]
    t_eval = args.T if args.time == "final" else 0.5 * args.T

    fld0 = sample_from_function(grid, preset.k, ic)
    initial = extract_contour(fld0, CONTOUR_LEVEL, args.refine)
    if not initial:
        print("error: initial condition never crosses the contour level", file=sys.stderr)
        return 1
    seed = max(initial, key=len)

    vel = _make_velocity("swirl", args.T)
    config = SchemeConfig(k=preset.k, strategy=preset.strategy, stepper=preset.stepper)
    fld, n_steps, dt = advance(fld0, vel, t_eval, config)
    scheme_lines = extract_contour(fld, CONTOUR_LEVEL, args.refine)
    markers = marker_oracle(seed, vel, t_eval, args.dt_markers)

    try:
        with open(f"{args.out_prefix}-scheme.csv", "w") as stream:
            write_contours(scheme_lines, stream)
        with open(f"{args.out_prefix}-markers.csv", "w") as stream:
            write_contours([markers], stream)
    except OSError as exc:
        print(f"error: cannot write contour files: {exc}", file=sys.stderr)
        return 1

    if scheme_lines:
        verts = np.concatenate([line.points for line in scheme_lines], axis=0)
        dist = hausdorff_distance(verts, markers)
    else:
        dist = float("nan")
    print("scheme,h,time,phi_c,hausdorff,scheme_polylines,marker_vertices,steps,dt")
    print(f"{args.scheme},{float(args.h):.12g},{t_eval:.12g},{CONTOUR_LEVEL:.12g},"
          f"{dist:.6e},{len(scheme_lines)},{len(markers)},{n_steps},{dt:.12g}")
    return 0


DIAG_HEADER = "case,index,value,bound,status"


def _diag_row(case: str, index: int, value: float, bound: float, ok: bool) -> str:
    return f"{case},{index},{value:.12e},{bound:.12e},{'PASS' if ok else 'FAIL'}"


def cmd_diagnose(args, parser) -> int:
    print(DIAG_HEADER)
    if args.what == "functional-monotonicity":
        grid = GridSpec.unit_interval(args.N)
        ic = AnalyticField.from_string("sin(2*pi*x)", ("x",))
        fld = sample_from_function(grid, args.k, ic)
        vel = ConstantVelocity((args.speed,))
        config = SchemeConfig(k=args.k)
        dt = float(grid.spacing[0])
        prev = stability_functional(fld, args.k)
        for i in range(args.steps):
            fld = step(fld, dt, vel, config)
            cur = stability_functional(fld, args.k)
            print(_diag_row("functional-monotonicity", i + 1, cur, prev + 1e-9,
                            cur <= prev + 1e-9))
            prev = cur
    elif args.what == "average-identity":
        grid = GridSpec.unit_interval(args.N)
        f = AnalyticField.from_string("sin(2*pi*x)", ("x",))
        residual = average_identity_residual(f, grid, args.k)
        print(_diag_row("average-identity", 0, residual, 1e-10, residual <= 1e-10))
    else:  # minimizer-inequality
        for trial in range(args.trials):
            rng = np.random.default_rng(9000 + trial)
            f = random_trig_poly(rng, args.p)
            grid = GridSpec.unit_interval(16) if args.p == 1 else GridSpec.unit_square(16)
            fld = sample_from_function(grid, args.k, f)
            f_interp = stability_functional(fld, args.k)
            f_exact = stability_functional(f, args.k, grid=grid)
            bound = f_exact * (1.0 + 1e-9) + 1e-12
            print(_diag_row("minimizer-inequality", trial, f_interp, bound,
                            f_interp <= bound))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetadv",
        description="Semi-Lagrangian jet-scheme advection benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp_):
        sp_.add_argument("--scheme", required=True, choices=SCHEME_CHOICES)
        sp_.add_argument("--T", type=float, default=1.0,
                         help="swirl reversal period (default 1)")
        sp_.add_argument("--tfinal", type=float, default=None,
                         help="end time (default: T)")
        sp_.add_argument("--ic", choices=IC_CHOICES, default="cosine")
        sp_.add_argument("--velocity", choices=VELOCITY_CHOICES, default="swirl")

    sp = sub.add_parser("converge", help="error table over a list of spacings")
    add_common(sp)
    sp.add_argument("--h-list", dest="h_list", type=_fraction_list, required=True,
                    help="comma-separated spacings, fractions allowed (1/25,1/50)")
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("run", help="single simulation with optional jet dump")
    add_common(sp)
    sp.add_argument("--h", type=_fraction, required=True,
                    help="grid spacing, fraction allowed (1/150)")
    sp.add_argument("--out", default=None, help="write node-jet CSV dump here")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("contour", help="hump contour benchmark vs marker oracle")
    sp.add_argument("--scheme", default="biquintic", choices=SCHEME_CHOICES)
    sp.add_argument("--h", type=_fraction, default=Fraction(1, 100))
    sp.add_argument("--T", type=float, default=10.0)
    sp.add_argument("--time", choices=("half", "final"), default="final")
    sp.add_argument("--refine", type=int, default=4)
    sp.add_argument("--out-prefix", dest="out_prefix", default="contour")
    sp.add_argument("--dt-markers", dest="dt_markers", type=float, default=None)
    sp.set_defaults(func=cmd_contour)

    sp = sub.add_parser("diagnose", help="stability-theory identity checks")
    sp.add_argument("what", choices=("functional-monotonicity", "average-identity",
                                     "minimizer-inequality"))
    sp.add_argument("--k", type=int, default=1, choices=(0, 1, 2))
    sp.add_argument("--N", type=int, default=32)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--speed", type=float, default=0.37)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--p", type=int, default=1, choices=(1, 2))
    sp.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "tfinal", None) is None and hasattr(args, "tfinal"):
        args.tfinal = args.T
    try:
        return args.func(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
