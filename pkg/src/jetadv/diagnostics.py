"""Stability diagnostics, 1-D projection identities, and contour tools.

The stability functional integrates the square of the lowest derivative
not controlled by the node jets, beta = (k+1, ..., k+1).  Interpolants
are only piecewise smooth, so all integration is composite per-cell
Gauss-Legendre; with the default 6 points per axis the quadrature is
exact for every polynomial integrand arising from degree-(2k+1)
interpolants.

Contours of a jet field are extracted by marching squares on a refined
sampling of the interpolant, and compared against a Lagrangian marker
oracle advected with the high-order stepper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.spatial.distance import directed_hausdorff

from .characteristics import VelocityModel, advect_forward
from .hermite import basis_matrix
from .jetfield import GridSpec, JetField, eval_global

__all__ = [
    "QuadratureSpec",
    "Polyline",
    "r_k",
    "mu_k",
    "E_k",
    "stability_functional",
    "average_identity_residual",
    "extract_contour",
    "marker_oracle",
    "hausdorff_distance",
    "write_contours",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule: m sample points per cell per axis."""

    samples_per_cell_per_axis: int = 6

    def __post_init__(self) -> None:
        if self.samples_per_cell_per_axis < 2:
            raise ValueError("need at least 2 quadrature points per cell per axis")


@dataclass
class Polyline:
    """Ordered 2-D vertex chain; closed means last connects back to first."""

    points: np.ndarray
    closed: bool = False

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("a polyline needs an (n, 2) array with n >= 2")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polyline coordinates must be finite")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]


# ---------------------------------------------------------------------------
# projection error kernels

# r_k(x) = x^(k+1) (1-x)^(k+1) / (2k+2)!  and  mu_k = r_k^(k+1),
# hard-coded as ascending power coefficients
_R_COEFFS = {
    0: np.array([0.0, 0.5, -0.5]),
    1: np.array([0.0, 0.0, 1.0, -2.0, 1.0]) / 24.0,
    2: np.array([0.0, 0.0, 0.0, 1.0, -3.0, 3.0, -1.0]) / 720.0,
}
_MU_COEFFS = {
    0: np.array([0.5, -1.0]),
    1: np.array([1.0, -6.0, 6.0]) / 12.0,
    2: np.array([1.0, -12.0, 30.0, -20.0]) / 120.0,
}


def _check_k(k: int) -> None:
    if k not in (0, 1, 2):
        raise ValueError(f"k={k} must be 0, 1, or 2")


def r_k(x, k: int):
    """Cell-local error kernel x^(k+1)(1-x)^(k+1) / (2k+2)!."""
    _check_k(k)
    return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), _R_COEFFS[k])


def mu_k(x, k: int):
    """(k+1)-th derivative of r_k; mean zero over [0, 1]."""
    _check_k(k)
    return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), _MU_COEFFS[k])


def E_k(z, k: int):
    """Period-one extension of mu_k: E_k(z) = mu_k(z mod 1)."""
    z = np.asarray(z, dtype=float)
    return mu_k(z - np.floor(z), k)


# ---------------------------------------------------------------------------
# composite quadrature over the grid


def _unit_gauss(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped from [-1, 1] to [0, 1]."""
    xg, wg = leggauss(m)
    return 0.5 * (xg + 1.0), 0.5 * wg


def _axis_factor(n: int, xg: np.ndarray, order: int, h: float) -> np.ndarray:
    """Basis values at unit samples with physical scaling, shape (k+1, 2, m)."""
    b = basis_matrix(n, xg, order)
    k = (n - 1) // 2
    scale = h ** (np.arange(k + 1.0) - order)
    return b * scale[:, np.newaxis, np.newaxis]


def _interp_samples(fld: JetField, deriv: tuple[int, ...], xg: np.ndarray) -> np.ndarray:
    """Derivative of the interpolant at the per-cell unit samples xg.

    Returns a flat sample grid, shape (N1*m,) in 1-D or (N1*m, N2*m) in
    2-D, ordered cell-major so it lines up with the coordinate arrays
    built by _axis_coords.
    """
    grid = fld.grid
    n = 2 * fld.k + 1
    m = xg.size
    if grid.p == 1:
        corners = np.stack([fld.data, np.roll(fld.data, -1, axis=0)], axis=1)
        bx = _axis_factor(n, xg, deriv[0], float(grid.spacing[0]))
        return np.einsum("nqa,aqg->ng", corners, bx).reshape(-1)
    corners = np.empty(fld.data.shape[:2] + (2, 2) + fld.data.shape[2:])
    for qx in (0, 1):
        for qy in (0, 1):
            corners[:, :, qx, qy] = np.roll(fld.data, (-qx, -qy), axis=(0, 1))
    if fld.cell_cross:
        for (a, b), table in fld.cell_cross.items():
            corners[..., a, b] = table
    bx = _axis_factor(n, xg, deriv[0], float(grid.spacing[0]))
    by = _axis_factor(n, xg, deriv[1], float(grid.spacing[1]))
    vals = np.einsum("ijqrab,aqg,brh->ijgh", corners, bx, by)
    n1, n2 = vals.shape[:2]
    return vals.transpose(0, 2, 1, 3).reshape(n1 * m, n2 * m)


def _axis_coords(grid: GridSpec, axis: int, xg: np.ndarray) -> np.ndarray:
    n = grid.nodes_per_axis[axis]
    h = float(grid.spacing[axis])
    cells = np.arange(n)[:, np.newaxis] + xg[np.newaxis, :]
    return (grid.lo[axis] + h * cells).reshape(-1)


def _axis_weights(grid: GridSpec, axis: int, wg: np.ndarray) -> np.ndarray:
    h = float(grid.spacing[axis])
    return np.tile(h * wg, grid.nodes_per_axis[axis])


def stability_functional(field_or_function, k: int,
                         quad: QuadratureSpec | None = None,
                         grid: GridSpec | None = None) -> float:
    """Integral of (d^beta phi)^2 over the domain, beta = (k+1, ..., k+1).

    Accepts a JetField (integrated cell by cell, which keeps grid-line
    jump discontinuities out of the quadrature) or a smooth callable
    f(points, deriv) together with an explicit grid.
    """
    _check_k(k)
    quad = quad or QuadratureSpec()
    xg, wg = _unit_gauss(quad.samples_per_cell_per_axis)
    if isinstance(field_or_function, JetField):
        fld = field_or_function
        grid = fld.grid
        deriv = (k + 1,) * grid.p
        vals = _interp_samples(fld, deriv, xg)
    else:
        if grid is None:
            raise ValueError("integrating a bare function requires an explicit grid")
        deriv = (k + 1,) * grid.p
        if grid.p == 1:
            pts = _axis_coords(grid, 0, xg)
            vals = np.asarray(field_or_function(pts, deriv=deriv), dtype=float)
        else:
            cx = _axis_coords(grid, 0, xg)
            cy = _axis_coords(grid, 1, xg)
            pts = np.stack(np.meshgrid(cx, cy, indexing="ij"), axis=-1)
            vals = np.asarray(field_or_function(pts, deriv=deriv), dtype=float)
    w0 = _axis_weights(grid, 0, wg)
    if grid.p == 1:
        return float(np.dot(w0, vals * vals))
    w1 = _axis_weights(grid, 1, wg)
    return float(np.einsum("i,j,ij->", w0, w1, vals * vals))


def average_identity_residual(f, grid: GridSpec, k: int,
                              quad: QuadratureSpec | None = None) -> float:
    """Defect of the projection average identity on a periodic 1-D grid.

    Both sides of

        integral(H_f) = integral(f) - h^(k+1) * integral(E_k((x-lo)/h) f^(k+1))

    are computed by the same composite quadrature, where H_f interpolates
    the k-jet of f on the grid; returns their absolute difference.
    """
    _check_k(k)
    if grid.p != 1:
        raise ValueError("the average identity is 1-D")
    from .jetfield import sample_from_function

    quad = quad or QuadratureSpec()
    xg, wg = _unit_gauss(quad.samples_per_cell_per_axis)
    h = float(grid.spacing[0])
    lo = float(grid.lo[0])
    fld = sample_from_function(grid, k, f)
    w = _axis_weights(grid, 0, wg)
    pts = _axis_coords(grid, 0, xg)

    lhs = float(np.dot(w, _interp_samples(fld, (0,), xg)))
    int_f = float(np.dot(w, np.asarray(f(pts), dtype=float)))
    kernel = E_k((pts - lo) / h, k)
    int_corr = float(np.dot(w, kernel * np.asarray(f(pts, deriv=(k + 1,)), dtype=float)))
    rhs = int_f - h ** (k + 1) * int_corr
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# random smooth test functions


class TrigPoly:
    """Period-one trig polynomial with closed-form partial derivatives.

    phi(x) = sum_j amp_j cos(2 pi w_j . x + theta_j); every derivative
    in direction d multiplies by 2 pi w_jd and shifts the phase by pi/2.
    """

    def __init__(self, amps, waves, phases):
        self.amps = np.asarray(amps, dtype=float)
        self.waves = np.asarray(waves, dtype=float)
        self.phases = np.asarray(phases, dtype=float)
        if self.waves.ndim != 2 or self.waves.shape[0] != self.amps.size:
            raise ValueError("waves must be (n_modes, p)")

    @property
    def p(self) -> int:
        return self.waves.shape[1]

    def __call__(self, points, deriv=None):
        pts = np.asarray(points, dtype=float)
        if self.p == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., np.newaxis]
        if deriv is None:
            deriv = (0,) * self.p
        order = int(sum(deriv))
        factor = self.amps * np.prod((2.0 * np.pi * self.waves) ** np.asarray(deriv, dtype=float),
                                     axis=1)
        phase = 2.0 * np.pi * (pts @ self.waves.T) + self.phases + 0.5 * np.pi * order
        return np.cos(phase) @ factor


def random_trig_poly(rng: np.random.Generator, p: int, n_modes: int = 3,
                     max_wave: int = 2) -> TrigPoly:
    """Draw a nonzero random trig polynomial on the period-one lattice."""
    amps = rng.uniform(-1.0, 1.0, size=n_modes)
    waves = rng.integers(-max_wave, max_wave + 1, size=(n_modes, p))
    # keep at least one genuinely oscillatory mode so the functional is positive
    if not np.any(waves):
        waves[0, 0] = 1
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_modes)
    return TrigPoly(amps, waves, phases)


# ---------------------------------------------------------------------------
# contour extraction


def _pair_saddle(center_inside: bool, diag_inside: bool):
    # edge slots: 0 bottom, 1 right, 2 top, 3 left
    if center_inside == diag_inside:
        return ((0, 1), (3, 2))
    return ((0, 3), (1, 2))


def extract_contour(fld: JetField, phi_c: float, refine: int = 4) -> list[Polyline]:
    """Marching-squares level set of the interpolant at level phi_c.

    Each grid cell is sampled on a refine x refine subgrid of the
    interpolant (inclusive of the far domain edge), crossings are placed
    by linear interpolation along sample edges, and ambiguous saddle
    cells are split according to the interpolant's value at the cell
    center.  Loops crossing the periodic seam come back as open chains.
    Returns polylines in a deterministic order; empty list if the level
    is never crossed.
    """
    if fld.grid.p != 2:
        raise ValueError("contour extraction is 2-D only")
    if refine < 1:
        raise ValueError("refine must be >= 1")
    grid = fld.grid
    mx = grid.nodes_per_axis[0] * refine
    my = grid.nodes_per_axis[1] * refine
    xs = np.linspace(grid.lo[0], grid.hi[0], mx + 1)
    ys = np.linspace(grid.lo[1], grid.hi[1], my + 1)
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    vals = eval_global(fld, pts.reshape(-1, 2)).reshape(mx + 1, my + 1)

    inside = vals > phi_c
    c00 = inside[:-1, :-1]
    c10 = inside[1:, :-1]
    c01 = inside[:-1, 1:]
    c11 = inside[1:, 1:]
    count = c00.astype(int) + c10 + c01 + c11
    active = np.argwhere((count > 0) & (count < 4))
    if active.size == 0:
        return []

    def crossing(i0, j0, i1, j1):
        va = vals[i0, j0]
        vb = vals[i1, j1]
        t = (phi_c - va) / (vb - va)
        return (xs[i0] + t * (xs[i1] - xs[i0]), ys[j0] + t * (ys[j1] - ys[j0]))

    saddle_centers = []
    for i, j in active:
        if count[i, j] == 2 and c00[i, j] == c11[i, j]:
            saddle_centers.append((0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])))
    if saddle_centers:
        cv = eval_global(fld, np.asarray(saddle_centers))
        saddle_inside = iter(np.atleast_1d(cv) > phi_c)

    # segments between edge keys; a key names the sample edge the
    # crossing sits on, so shared edges stitch exactly
    segments: list[tuple[tuple, tuple]] = []
    coords: dict[tuple, tuple[float, float]] = {}
    for i, j in active:
        flags = (c00[i, j], c10[i, j], c01[i, j], c11[i, j])
        # edge slots: bottom, right, top, left
        keys = (("x", i, j), ("y", i + 1, j), ("x", i, j + 1), ("y", i, j))
        cross = [None] * 4
        if flags[0] != flags[1]:
            cross[0] = crossing(i, j, i + 1, j)
        if flags[1] != flags[3]:
            cross[1] = crossing(i + 1, j, i + 1, j + 1)
        if flags[2] != flags[3]:
            cross[2] = crossing(i, j + 1, i + 1, j + 1)
        if flags[0] != flags[2]:
            cross[3] = crossing(i, j, i, j + 1)
        hit = [s for s in range(4) if cross[s] is not None]
        for s in hit:
            coords[keys[s]] = cross[s]
        if len(hit) == 2:
            segments.append((keys[hit[0]], keys[hit[1]]))
        elif len(hit) == 4:
            for a, b in _pair_saddle(next(saddle_inside), bool(flags[0])):
                segments.append((keys[a], keys[b]))

    return _stitch(segments, coords)


def _stitch(segments, coords) -> list[Polyline]:
    adjacency: dict[tuple, list[tuple]] = {}
    for a, b in segments:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)

    visited: set[tuple] = set()
    out: list[tuple[int, tuple, list[tuple]]] = []

    def walk(start):
        path = [start]
        visited.add(start)
        cur = start
        while True:
            nxt = [n for n in adjacency[cur] if n not in visited]
            if not nxt:
                break
            cur = nxt[0]
            visited.add(cur)
            path.append(cur)
        return path

    open_ends = sorted(key for key, nbrs in adjacency.items() if len(nbrs) == 1)
    for key in open_ends:
        if key not in visited:
            out.append((0, key, walk(key)))
    for key in sorted(adjacency):
        if key not in visited:
            out.append((1, key, walk(key)))

    polylines = []
    for kind, _, path in sorted(out, key=lambda t: (t[0], t[1])):
        if len(path) < 2:
            continue
        pts = np.asarray([coords[key] for key in path])
        polylines.append(Polyline(points=pts, closed=kind == 1))
    return polylines


# ---------------------------------------------------------------------------
# marker oracle and metrics


def marker_oracle(initial: Polyline, vel: VelocityModel, t_final: float,
                  dt_markers: float | None = None) -> Polyline:
    """Advect the polyline's vertices forward as Lagrangian markers."""
    if dt_markers is None:
        dt_markers = t_final / 1.0e4
    n = max(1, math.ceil(t_final / dt_markers - 1e-9))
    pts = advect_forward(initial.points, 0.0, t_final, vel, n)
    return Polyline(points=pts, closed=initial.closed)


def hausdorff_distance(a, b) -> float:
    """Symmetric discrete Hausdorff distance between two vertex sets."""
    pa = a.points if isinstance(a, Polyline) else np.asarray(a, dtype=float)
    pb = b.points if isinstance(b, Polyline) else np.asarray(b, dtype=float)
    return max(directed_hausdorff(pa, pb)[0], directed_hausdorff(pb, pa)[0])


def write_contours(polylines: list[Polyline], stream) -> None:
    """CSV dump `polyline_id,vertex_id,x,y` with 17 significant digits."""
    stream.write("polyline_id,vertex_id,x,y\n")
    for pid, line in enumerate(polylines):
        for vid, (x, y) in enumerate(line.points):
            stream.write(f"{pid},{vid},{x:.17g},{y:.17g}\n")
