"""Acceptance gate: every primary benchmark criterion, one PASS line each.

Run `pytest tests/test_acceptance.py -s` to see a [PASS]/[FAIL] line per
criterion as it completes.  The swirl benchmarks dominate the runtime
(several minutes total; the fixed-resolution biquintic row and the
contour round trip are the slow ones).  Setting JETADV_RUN_EXTENDED=1
additionally enables the half-hour fine-grid instability experiment.

Reference error levels for the fixed-resolution table and the tolerance
factors, slope targets, and property bounds are frozen here on purpose;
loosening them is a behavior change, not a test fix.
"""

import math
import os

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

from jetadv import (
    AnalyticField,
    CellData,
    ConstantVelocity,
    GridSpec,
    Polyline,
    SchemeConfig,
    SwirlVelocity,
    advance,
    cell_eval,
    cosine_product_ic,
    eval_derivs,
    extract_contour,
    gaussian_hump_ic,
    hausdorff_distance,
    marker_oracle,
    sample_from_function,
    stability_functional,
    step,
    trace_foot,
)
from jetadv.diagnostics import E_k, average_identity_residual, random_trig_poly
from jetadv.jetupdate import update_node_analytic, update_node_epsilon_fd
from jetadv.cli import run_scheme

RUN_EXTENDED = os.environ.get("JETADV_RUN_EXTENDED") == "1"

# per-step cost collected from the fixed-resolution runs, reported (never
# asserted) at the end of the table tests
_COST = {}


def criterion(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    print(line, flush=True)
    assert ok, line


# ── fixed-resolution swirl accuracy ─────────────────────────────────────
# h = 1/150, T = tfinal = 1, cosine-product IC, scheme-specific dt rules

TABLE_REFERENCE = {
    # scheme -> (reference linf error, allowed agreement factor)
    "bilinear": (1.69e-1, 2.0),
    "upwind": (1.92e-1, 2.0),
    "bicubic": (1.35e-4, 3.0),
    "bicubic-gridfd": (2.31e-4, 3.0),
    "biquintic": (8.23e-8, 5.0),
}
BIQUINTIC_ABS_CAP = 5e-7   # eps-FD round-off floor sits just below this


class TestSwirlAccuracyTable:
    @pytest.mark.parametrize("scheme", list(TABLE_REFERENCE))
    def test_error_matches_reference(self, scheme):
        ref, factor = TABLE_REFERENCE[scheme]
        grid = GridSpec.unit_square(150)
        _, rep = run_scheme(scheme, grid, 1.0, 1.0, cosine_product_ic(), "swirl")
        _COST[scheme] = rep.seconds / rep.steps
        err = rep.linf_error
        ok = ref / factor <= err <= ref * factor
        if scheme == "biquintic":
            ok = ok and err <= BIQUINTIC_ABS_CAP
        criterion(f"swirl-accuracy {scheme} h=1/150",
                  ok, f"linf={err:.4e}, reference {ref:.2e} within x{factor:g}")

    def test_per_step_cost_ordering_info(self):
        # informational only: wall-clock depends on the machine
        if len(_COST) == len(TABLE_REFERENCE):
            ranking = " < ".join(f"{s} ({c:.3f}s)"
                                 for s, c in sorted(_COST.items(), key=lambda kv: kv[1]))
            print(f"[INFO] per-step cost at h=1/150: {ranking}", flush=True)


# ── convergence slopes ──────────────────────────────────────────────────

class TestConvergenceSlopes:
    @pytest.mark.parametrize("scheme,target,tol", [
        ("bilinear", 1.0, 0.3),
        ("bicubic", 3.0, 0.3),
        ("biquintic", 5.0, 0.5),
    ])
    def test_slope(self, scheme, target, tol):
        # least-squares fit over h in {1/25, 1/50, 1/100}; the bilinear
        # error is still saturating on these grids, which drags its fit
        # toward the low edge of the band
        sizes = (25, 50, 100)
        errs = []
        for n in sizes:
            _, rep = run_scheme(scheme, GridSpec.unit_square(n), 1.0, 1.0,
                                cosine_product_ic(), "swirl")
            errs.append(rep.linf_error)
        slope = np.polyfit(np.log([1.0 / n for n in sizes]), np.log(errs), 1)[0]
        criterion(f"convergence-slope {scheme}",
                  abs(slope - target) <= tol,
                  f"slope={slope:.3f}, target {target:g} +/- {tol:g}")


# ── long-horizon stability ──────────────────────────────────────────────

class TestStability:
    def test_bicubic_gridfd_twenty_periods_bounded(self):
        _, rep = run_scheme("bicubic-gridfd", GridSpec.unit_square(50), 1.0, 20.0,
                            cosine_product_ic(), "swirl")
        criterion("stability bicubic-gridfd h=1/50 t=20",
                  rep.linf_error < 1.0,
                  f"linf={rep.linf_error:.4e} < 1 after {rep.steps} steps")

    @pytest.mark.extended
    @pytest.mark.skipif(not RUN_EXTENDED,
                        reason="set JETADV_RUN_EXTENDED=1 for the ~30 min fine-grid run")
    def test_extended_biquintic_gridfd_error_grows_under_refinement(self):
        # KNOWN RED.  The k=2 grid-scale reconstruction is expected to
        # destabilize under refinement, with the twenty-period error at
        # h=1/128 overtaking h=1/64.  Calibrated runs of this
        # implementation still improve fifth-order across that pair
        # (9.92e-5 -> 3.32e-6, both with period-linear error growth).
        # The instability itself is real here, one step finer: at
        # h=1/160 the trajectory is linear to t=16 then turns
        # super-linear, ending at 6.96e-6 > 3.32e-6, so refinement
        # degrades the 128->160 pair while it still helps 64->128.  The
        # check is kept at its stated pair to flag the offset rather
        # than loosen it.
        errs = {}
        for n in (64, 128):
            _, rep = run_scheme("biquintic-gridfd", GridSpec.unit_square(n), 1.0, 20.0,
                                cosine_product_ic(), "swirl")
            errs[n] = rep.linf_error
        criterion("extended biquintic-gridfd refinement instability",
                  errs[128] > errs[64],
                  f"linf(1/64)={errs[64]:.4e} vs linf(1/128)={errs[128]:.4e}")


# ── property suite: polynomial reproduction ─────────────────────────────

def _poly_partial(coeffs, deriv):
    c = coeffs
    for axis, order in enumerate(deriv):
        for _ in range(order):
            c = np.polynomial.polynomial.polyder(c, axis=axis)
    return c


def _poly_eval(coeffs, pts):
    if coeffs.ndim == 1:
        return np.polynomial.polynomial.polyval(pts[..., 0], coeffs)
    return np.polynomial.polynomial.polyval2d(pts[..., 0], pts[..., 1], coeffs)


def _exact_cell(coeffs, origin, edges, k):
    p = coeffs.ndim
    vals = np.empty((2,) * p + (k + 1,) * p)
    for q in np.ndindex(*(2,) * p):
        vertex = origin + np.asarray(q) * edges
        for alpha in np.ndindex(*(k + 1,) * p):
            vals[q + alpha] = _poly_eval(_poly_partial(coeffs, alpha), vertex[None])[0]
    return CellData(origin=origin, edge_lengths=edges, k=k, values=vals)


class TestPolynomialReproduction:
    @pytest.mark.parametrize("k", (0, 1, 2))
    @pytest.mark.parametrize("p", (1, 2))
    def test_100_random_polynomials(self, k, p):
        rng = np.random.default_rng(1234 + 10 * k + p)
        n = 2 * k + 1
        worst = 0.0
        for _ in range(100):
            coeffs = rng.uniform(-2.0, 2.0, size=(n + 1,) * p)
            origin = rng.uniform(-1.0, 1.0, p)
            edges = rng.uniform(0.1, 2.0, p)
            cell = _exact_cell(coeffs, origin, edges, k)
            pts = origin + rng.uniform(0.0, 1.0, (5, p)) * edges
            scale = max(1.0, float(np.max(np.abs(coeffs))))
            for x in pts:
                want = _poly_eval(coeffs, x[None])[0]
                worst = max(worst, abs(cell_eval(cell, x) - want) / scale)
        criterion(f"pn-reproduction k={k} p={p}",
                  worst <= 1e-12,
                  f"max rel residual {worst:.2e} over 100 random polynomials")


# ── property suite: interpolation order ─────────────────────────────────

class TestInterpolationOrder:
    # axis-aligned derivative indices only: there the n+1-|a| rate is
    # sharp.  Mixed 2-D derivatives superconverge at n+1-max(a) for the
    # tensor-product interpolant, so a slope-equality check would fail
    # in the scheme's favor.
    @pytest.mark.parametrize("k,a", [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
    def test_slope_1d(self, k, a):
        f = AnalyticField.from_string("sin(2*pi*x+0.4) + 0.3*cos(4*pi*x)", ("x",))
        rng = np.random.default_rng(7)
        pts = rng.uniform(0.0, 1.0, size=(200, 1))
        sizes = (16, 32, 64)
        errs = []
        for n in sizes:
            fld = sample_from_function(GridSpec.unit_interval(n), k, f)
            got = eval_derivs(fld, pts, [(a,)])[:, 0]
            errs.append(np.max(np.abs(got - f(pts, deriv=(a,)))))
        slope = np.polyfit(np.log([1.0 / n for n in sizes]), np.log(errs), 1)[0]
        order = 2 * k + 2 - a
        criterion(f"interpolation-order k={k} deriv={a} 1d",
                  abs(slope - order) <= 0.2,
                  f"slope={slope:.3f}, target {order} +/- 0.2")

    @pytest.mark.parametrize("k,a", [(1, (1, 0)), (2, (0, 2))])
    def test_slope_2d(self, k, a):
        f = AnalyticField.from_string("sin(2*pi*x+0.4)*cos(2*pi*y-0.2)", ("x", "y"))
        rng = np.random.default_rng(7)
        pts = rng.uniform(0.0, 1.0, size=(200, 2))
        sizes = (8, 16, 32)
        errs = []
        for n in sizes:
            fld = sample_from_function(GridSpec.unit_square(n), k, f)
            got = eval_derivs(fld, pts, [a])[:, 0]
            errs.append(np.max(np.abs(got - f(pts, deriv=a))))
        slope = np.polyfit(np.log([1.0 / n for n in sizes]), np.log(errs), 1)[0]
        order = 2 * k + 2 - sum(a)
        criterion(f"interpolation-order k={k} deriv={a} 2d",
                  abs(slope - order) <= 0.2,
                  f"slope={slope:.3f}, target {order} +/- 0.2")


# ── property suite: stability theory ────────────────────────────────────

class TestStabilityTheory:
    @pytest.mark.parametrize("k", (0, 1))
    @pytest.mark.parametrize("p", (1, 2))
    def test_projection_minimizes_functional(self, k, p):
        grid = GridSpec.unit_interval(16) if p == 1 else GridSpec.unit_square(16)
        worst = -np.inf
        for trial in range(20):
            rng = np.random.default_rng(1000 * p + 100 * k + trial)
            f = random_trig_poly(rng, p)
            fld = sample_from_function(grid, k, f)
            f_interp = stability_functional(fld, k)
            f_exact = stability_functional(f, k, grid=grid)
            worst = max(worst, f_interp - f_exact * (1.0 + 1e-9))
        criterion(f"minimizer-inequality p={p} k={k}",
                  worst <= 1e-12,
                  f"max excess {worst:.2e} over 20 random trig polynomials")

    @pytest.mark.parametrize("k", (0, 1))
    def test_functional_monotone_under_advection(self, k):
        grid = GridSpec.unit_interval(32)
        f = AnalyticField.from_string("sin(2*pi*x)", ("x",))
        fld = sample_from_function(grid, k, f)
        vel = ConstantVelocity((0.37,))
        config = SchemeConfig(k=k)
        dt = float(grid.spacing[0])
        prev = stability_functional(fld, k)
        worst = -np.inf
        for _ in range(200):
            fld = step(fld, dt, vel, config)
            cur = stability_functional(fld, k)
            worst = max(worst, cur - prev)
            prev = cur
        criterion(f"functional-monotonicity k={k}",
                  worst <= 1e-9,
                  f"max per-step increase {worst:.2e} over 200 steps")

    @pytest.mark.parametrize("k", (0, 1))
    def test_average_identity(self, k):
        grid = GridSpec.unit_interval(16)
        f = AnalyticField.from_string("sin(2*pi*x)", ("x",))
        res = average_identity_residual(f, grid, k)
        criterion(f"average-identity k={k}",
                  res <= 1e-10, f"residual {res:.2e} <= 1e-10")

    def test_kernel_norm_closed_form(self):
        xg, wg = leggauss(20)
        z = 0.5 * (xg + 1.0)
        got = 0.5 * np.sum(wg * E_k(z, 0) ** 2)
        criterion("kernel-norm constant",
                  abs(got - 1.0 / 12.0) <= 1e-12,
                  f"quadrature {got:.15f} vs closed form 1/12")


# ── property suite: superconsistency cross-checks ───────────────────────

class TestSuperconsistency:
    def test_analytic_vs_epsfd_node_updates(self):
        f = AnalyticField.from_string("0.005*cos(2*pi*x)*cos(2*pi*y)", ("x", "y"))
        g = GridSpec.unit_square(20)
        fld = sample_from_function(g, 1, f)
        vel = SwirlVelocity(T=1.0)
        dt = float(g.spacing[0])
        rng = np.random.default_rng(31)
        pts = g.node_points()
        worst = 0.0
        for _ in range(100):
            i, j = rng.integers(0, 20, 2)
            x = pts[i, j]
            ja = update_node_analytic(fld, x, dt, dt, vel, 1).values
            je = update_node_epsilon_fd(fld, x, dt, dt, vel, 1).values
            worst = max(worst, float(np.max(np.abs(ja - je))))
        criterion("cross-strategy node-update agreement",
                  worst <= 1e-7,
                  f"max entry diff {worst:.2e} over 100 random nodes")

    def test_foot_map_derivatives_vs_eps_differences(self):
        vel = SwirlVelocity(T=1.0)
        rng = np.random.default_rng(25)
        x = rng.uniform(0.1, 0.9, (50, 2))
        eps = 1e-6
        worst = 0.0
        for stepper in ("euler", "ssprk3", "rk5_cash_karp"):
            res = trace_foot(x, 0.8, 0.02, vel, stepper, deriv_order=2)
            for j in range(2):
                ej = np.zeros(2)
                ej[j] = eps
                fp = trace_foot(x + ej, 0.8, 0.02, vel, stepper, deriv_order=1)
                fm = trace_foot(x - ej, 0.8, 0.02, vel, stepper, deriv_order=1)
                grad_fd = (fp.foot - fm.foot) / (2.0 * eps)
                worst = max(worst, float(np.max(np.abs(res.grad_foot[:, :, j] - grad_fd))))
                hess_fd = (fp.grad_foot - fm.grad_foot) / (2.0 * eps)
                worst = max(worst, float(np.max(np.abs(res.hess_foot[:, :, :, j] - hess_fd))))
        criterion("foot-map derivative propagation",
                  worst <= 1e-8,
                  f"max deviation from eps-differences {worst:.2e}")


# ── contour tracking ────────────────────────────────────────────────────

CONTOUR_RADIUS = 0.15
CONTOUR_CENTER = (0.5, 0.75)


def _circle(m):
    theta = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    return np.column_stack([CONTOUR_CENTER[0] + CONTOUR_RADIUS * np.cos(theta),
                            CONTOUR_CENTER[1] + CONTOUR_RADIUS * np.sin(theta)])


class TestContourTracking:
    def test_full_period_contour_returns_to_circle(self):
        # h=1/100, T=tfinal=10: the exact solution is back to the IC, so
        # the extracted level set must sit on the initial circle.  About
        # 1.8e-3 of the measured distance is already present at t=0
        # (discrete vertex sampling plus the periodic image tails
        # shifting the level set); the threshold leaves room for it.
        grid = GridSpec.unit_square(100)
        fld = sample_from_function(grid, 2, gaussian_hump_ic())
        level = math.exp(-10.0 * CONTOUR_RADIUS**2)
        vel = SwirlVelocity(T=10.0)
        config = SchemeConfig(k=2, strategy="epsilon_fd", stepper="rk5_cash_karp")
        fld, _, _ = advance(fld, vel, 10.0, config)
        lines = extract_contour(fld, level, 4)
        assert lines, "no contour found at final time"
        verts = np.concatenate([ln.points for ln in lines], axis=0)
        dist = hausdorff_distance(verts, _circle(1000))
        criterion("contour-tracking biquintic h=1/100 t=T=10",
                  dist < 5e-3, f"hausdorff={dist:.3e} < 5e-3")

    def test_marker_oracle_round_trip(self):
        vel = SwirlVelocity(T=10.0)
        seed = Polyline(points=_circle(100), closed=True)
        back = marker_oracle(seed, vel, 10.0)
        dev = float(np.max(np.abs(back.points - seed.points)))
        criterion("marker-oracle round trip",
                  dev <= 1e-6, f"max marker deviation {dev:.2e} <= 1e-6")
