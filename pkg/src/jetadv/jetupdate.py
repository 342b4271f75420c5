"""Jet-update strategies, the advect-and-project time step, and upwinding.

One time step advances every node jet by (i) tracing the characteristic
through the node one RK step backward, (ii) evaluating the previous
interpolant (and its derivatives) at the foot, and (iii) re-assembling
the node's partial k-jet.  Three strategies differ only in how the
derivative entries are produced:

* analytic: chain rule through the foot map's Jacobian/Hessian,
* epsilon_fd: tiny-offset finite differences of the advected values
  (for k=2, a hybrid of the analytic total 2-jet and centered
  differences in x),
* grid_fd: advect the total k-jet analytically, then reconstruct the
  missing cross derivatives per cell from grid-scale stencils.

All per-node updates read the frozen previous field and write a fresh
one, so the node map is order-independent.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .characteristics import VelocityModel, rk_step, trace_foot
from .jetfield import GridSpec, JetField, NodeJet, eval_derivs, locate_cell, _eval_at_cells, _gather_corners

__all__ = [
    "SchemeConfig",
    "DEFAULT_EPSILON",
    "default_stepper",
    "update_node_analytic",
    "update_node_epsilon_fd",
    "reconstruct_cross_cubic",
    "reconstruct_cross_quintic",
    "step",
    "advance",
    "upwind_step",
]

DEFAULT_EPSILON = float(np.finfo(float).eps ** 0.25)

_STRATEGIES = ("analytic", "epsilon_fd", "grid_fd")
_DEFAULT_STEPPERS = {0: "euler", 1: "ssprk3", 2: "rk5_cash_karp"}


def default_stepper(k: int) -> str:
    """Stepper whose local order matches the interpolant's accuracy."""
    return _DEFAULT_STEPPERS[k]


@dataclass
class SchemeConfig:
    """Configuration of one jet scheme.

    Parameters
    ----------
    k : int
        Jet order (0, 1, or 2); interpolant degree is 2k+1 per axis.
    strategy : str
        'analytic', 'epsilon_fd', or 'grid_fd'.  For k=2 the analytic
        strategy is realized as the hybrid used by 'epsilon_fd' (a fully
        analytic partial 2-jet would need third and fourth derivatives
        of the foot map).
    stepper : str or None
        Backward-tracing RK method; None picks the default for k.
    dt_scale : float
        Nominal time step as a multiple of the grid spacing.
    dt_fixed : float or None
        Overrides dt_scale with an absolute nominal step when set.
    epsilon : float
        Offset for the epsilon_fd stencils (default: fourth root of
        machine epsilon, balancing truncation against round-off).
    hyperplane_ownership : str
        Convention for points on grid hyperplanes; only 'upper' (the
        cell on the upper side owns its lower faces) is implemented.
    """

    k: int
    strategy: str = "analytic"
    stepper: str | None = None
    dt_scale: float = 1.0
    dt_fixed: float | None = None
    epsilon: float = DEFAULT_EPSILON
    hyperplane_ownership: str = "upper"

    def __post_init__(self) -> None:
        if self.k not in (0, 1, 2):
            raise ValueError(f"k={self.k} must be 0, 1, or 2")
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"strategy {self.strategy!r} must be one of {_STRATEGIES}")
        if self.strategy == "grid_fd" and self.k not in (1, 2):
            raise ValueError("grid_fd reconstruction needs k in {1, 2}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.dt_fixed is not None and self.dt_fixed <= 0:
            raise ValueError("dt_fixed must be positive")
        if self.dt_scale <= 0:
            raise ValueError("dt_scale must be positive")
        if self.hyperplane_ownership != "upper":
            raise ValueError("only the 'upper' hyperplane ownership convention is implemented")
        if self.stepper is None:
            self.stepper = default_stepper(self.k)

    def nominal_dt(self, grid: GridSpec) -> float:
        if self.dt_fixed is not None:
            return self.dt_fixed
        return self.dt_scale * float(np.max(grid.spacing))


# ---------------------------------------------------------------------------
# chain-rule assembly


def _chain_total_jet(fld: JetField, corners: np.ndarray, xi: np.ndarray,
                     grad_foot: np.ndarray | None, hess_foot: np.ndarray | None,
                     order: int) -> tuple[np.ndarray, np.ndarray | None, np.ndarray | None]:
    """Total jet of the advected solution at traced feet (2-D).

    Evaluates the previous interpolant in caller-supplied cells and
    applies the first/second-order chain rules with the foot map's
    Jacobian G and Hessian T:

        phi_a  = sum_i H_i G[i,a]
        phi_ab = sum_i H_i T[i,a,b] + sum_ij H_ij G[i,a] G[j,b]
    """
    derivs = [(0, 0)]
    if order >= 1:
        derivs += [(1, 0), (0, 1)]
    if order >= 2:
        derivs += [(2, 0), (1, 1), (0, 2)]
    vals = _eval_at_cells(fld, corners, xi, derivs)
    phi = vals[:, 0]
    grad = hess = None
    if order >= 1:
        dh = vals[:, 1:3]
        grad = np.einsum("mi,mia->ma", dh, grad_foot)
    if order >= 2:
        d2h = np.empty((vals.shape[0], 2, 2))
        d2h[:, 0, 0] = vals[:, 3]
        d2h[:, 0, 1] = vals[:, 4]
        d2h[:, 1, 0] = vals[:, 4]
        d2h[:, 1, 1] = vals[:, 5]
        hess = (np.einsum("mi,miab->mab", dh, hess_foot)
                + np.einsum("mia,mij,mjb->mab", grad_foot, d2h, grad_foot))
    return phi, grad, hess


def _advect_k0(fld: JetField, x: np.ndarray, t_new: float, dt: float,
               vel: VelocityModel, stepper: str) -> np.ndarray:
    foot = rk_step(x, t_new, -dt, vel, stepper, 0).foot
    p = fld.grid.p
    vals = eval_derivs(fld, foot, [(0,) * p])
    return vals.reshape((-1,) + (1,) * p)


def _advect_analytic_k1(fld: JetField, x: np.ndarray, t_new: float, dt: float,
                        vel: VelocityModel, stepper: str) -> np.ndarray:
    res = rk_step(x, t_new, -dt, vel, stepper, 2)
    cell, xi = locate_cell(fld.grid, res.foot)
    corners = _gather_corners(fld, cell)
    phi, grad, hess = _chain_total_jet(fld, corners, xi, res.grad_foot, res.hess_foot, 2)
    out = np.empty((x.shape[0], 2, 2))
    out[:, 0, 0] = phi
    out[:, 1, 0] = grad[:, 0]
    out[:, 0, 1] = grad[:, 1]
    out[:, 1, 1] = hess[:, 0, 1]
    return out


def _advect_epsfd_k1(fld: JetField, x: np.ndarray, t_new: float, dt: float,
                     vel: VelocityModel, stepper: str, eps: float) -> np.ndarray:
    m = x.shape[0]
    offsets = np.array([[0.0, 0.0], [eps, eps], [-eps, eps], [eps, -eps], [-eps, -eps]])
    pts = (x[np.newaxis, :, :] + offsets[:, np.newaxis, :]).reshape(5 * m, 2)
    feet = rk_step(pts, t_new, -dt, vel, stepper, 0).foot.reshape(5, m, 2)
    # all stencil feet use the central foot's owning cell; displacements
    # stay unwrapped so the periodic seam cannot split a stencil
    cell, xi_c = locate_cell(fld.grid, feet[0])
    corners = _gather_corners(fld, cell)
    h = fld.grid.spacing
    vals = np.empty((4, m))
    for s in range(4):
        xi_s = xi_c + (feet[s + 1] - feet[0]) / h
        vals[s] = _eval_at_cells(fld, corners, xi_s, [(0, 0)])[:, 0]
    vpp, vmp, vpm, vmm = vals
    out = np.empty((m, 2, 2))
    out[:, 0, 0] = 0.25 * (vpp + vmp + vpm + vmm)
    out[:, 1, 0] = (vpp - vmp + vpm - vmm) / (4.0 * eps)
    out[:, 0, 1] = (vpp + vmp - vpm - vmm) / (4.0 * eps)
    out[:, 1, 1] = (vpp - vmp - vpm + vmm) / (4.0 * eps * eps)
    return out


def _advect_hybrid_k2(fld: JetField, x: np.ndarray, t_new: float, dt: float,
                      vel: VelocityModel, stepper: str, eps: float) -> np.ndarray:
    m = x.shape[0]
    offsets = np.array([[0.0, 0.0], [eps, 0.0], [-eps, 0.0]])
    pts = (x[np.newaxis, :, :] + offsets[:, np.newaxis, :]).reshape(3 * m, 2)
    res = rk_step(pts, t_new, -dt, vel, stepper, 2)
    feet = res.foot.reshape(3, m, 2)
    grads = res.grad_foot.reshape(3, m, 2, 2)
    hesss = res.hess_foot.reshape(3, m, 2, 2, 2)
    cell, xi_c = locate_cell(fld.grid, feet[0])
    corners = _gather_corners(fld, cell)
    h = fld.grid.spacing
    phi, grad, hess_c = _chain_total_jet(fld, corners, xi_c, grads[0], hesss[0], 2)
    side = []
    for s in (1, 2):
        xi_s = xi_c + (feet[s] - feet[0]) / h
        side.append(_chain_total_jet(fld, corners, xi_s, grads[s], hesss[s], 2)[2])
    hess_p, hess_m = side
    out = np.empty((m, 3, 3))
    out[:, 0, 0] = phi
    out[:, 1, 0] = grad[:, 0]
    out[:, 0, 1] = grad[:, 1]
    out[:, 2, 0] = hess_c[:, 0, 0]
    out[:, 1, 1] = hess_c[:, 0, 1]
    out[:, 0, 2] = hess_c[:, 1, 1]
    # centered eps-differences in x of the analytic second derivatives
    out[:, 2, 1] = (hess_p[:, 0, 1] - hess_m[:, 0, 1]) / (2.0 * eps)
    out[:, 1, 2] = (hess_p[:, 1, 1] - hess_m[:, 1, 1]) / (2.0 * eps)
    out[:, 2, 2] = (hess_p[:, 1, 1] - 2.0 * hess_c[:, 1, 1] + hess_m[:, 1, 1]) / (eps * eps)
    return out


def _advect_total_jet_nodes(fld: JetField, x: np.ndarray, t_new: float, dt: float,
                            vel: VelocityModel, stepper: str, k: int) -> np.ndarray:
    """Total-k-jet advection used as phase one of the grid_fd strategies."""
    res = rk_step(x, t_new, -dt, vel, stepper, min(k, 2))
    cell, xi = locate_cell(fld.grid, res.foot)
    corners = _gather_corners(fld, cell)
    phi, grad, hess = _chain_total_jet(fld, corners, xi, res.grad_foot, res.hess_foot, k)
    out = np.zeros((x.shape[0], k + 1, k + 1))
    out[:, 0, 0] = phi
    out[:, 1, 0] = grad[:, 0]
    out[:, 0, 1] = grad[:, 1]
    if k == 2:
        out[:, 2, 0] = hess[:, 0, 0]
        out[:, 1, 1] = hess[:, 0, 1]
        out[:, 0, 2] = hess[:, 1, 1]
    return out


def _advect_p1_analytic(fld: JetField, x: np.ndarray, t_new: float, dt: float,
                        vel: VelocityModel, stepper: str, k: int) -> np.ndarray:
    res = rk_step(x, t_new, -dt, vel, stepper, min(k, 2))
    cell, xi = locate_cell(fld.grid, res.foot)
    corners = _gather_corners(fld, cell)
    vals = _eval_at_cells(fld, corners, xi, [(d,) for d in range(k + 1)])
    out = np.empty((x.shape[0], k + 1))
    out[:, 0] = vals[:, 0]
    if k >= 1:
        g = res.grad_foot[:, 0, 0]
        out[:, 1] = g * vals[:, 1]
    if k == 2:
        t2 = res.hess_foot[:, 0, 0, 0]
        out[:, 2] = t2 * vals[:, 1] + g * g * vals[:, 2]
    return out


# ---------------------------------------------------------------------------
# grid-scale cross-derivative reconstructions


def _cross_extrapolate(near_a, near_b, far_a, far_b):
    # bilinear fit in the rotated frame (x+y, x-y) through the four edge
    # midpoints, extrapolated to a vertex
    return 0.75 * (near_a + near_b) - 0.25 * (far_a + far_b)


def reconstruct_cross_cubic(phi, phi_x, phi_y, h: float) -> np.ndarray:
    """Recover phi_xy at a cell's 4 vertices from its total 1-jet data.

    Inputs are arrays of shape (..., 2, 2) indexed [..., qx, qy] over
    vertices; phi itself does not enter the stencils but completes the
    total-jet interface.  Edge-midpoint values of phi_xy come from
    centered differences of phi_x and phi_y along the edges; each vertex
    then extrapolates the four midpoints bilinearly in the rotated
    coordinate frame.  Second-order accurate in h.
    """
    phi_x = np.asarray(phi_x, dtype=float)
    phi_y = np.asarray(phi_y, dtype=float)
    mx0 = (phi_x[..., 0, 1] - phi_x[..., 0, 0]) / h  # edge x=0
    mx1 = (phi_x[..., 1, 1] - phi_x[..., 1, 0]) / h  # edge x=h
    my0 = (phi_y[..., 1, 0] - phi_y[..., 0, 0]) / h  # edge y=0
    my1 = (phi_y[..., 1, 1] - phi_y[..., 0, 1]) / h  # edge y=h
    out = np.empty(phi_x.shape)
    out[..., 0, 0] = _cross_extrapolate(mx0, my0, mx1, my1)
    out[..., 1, 0] = _cross_extrapolate(my0, mx1, mx0, my1)
    out[..., 0, 1] = _cross_extrapolate(mx0, my1, my0, mx1)
    out[..., 1, 1] = _cross_extrapolate(mx1, my1, mx0, my0)
    return out


def _quintic_vertex00(px, py, pxx, pxy, pyy, h: float):
    h2 = h * h
    xxy = ((-px[..., 0, 0] + px[..., 1, 0] + px[..., 0, 1] - px[..., 1, 1]) / h2
           + 6.0 * (-py[..., 0, 0] + py[..., 1, 0]) / h2
           + (-pxx[..., 0, 0] - pxx[..., 1, 0] + pxx[..., 0, 1] + pxx[..., 1, 1]) / (2.0 * h)
           + (-4.0 * pxy[..., 0, 0] - 2.0 * pxy[..., 1, 0]) / h)
    xyy = (6.0 * (-px[..., 0, 0] + px[..., 0, 1]) / h2
           + (-py[..., 0, 0] + py[..., 1, 0] + py[..., 0, 1] - py[..., 1, 1]) / h2
           + (-4.0 * pxy[..., 0, 0] - 2.0 * pxy[..., 0, 1]) / h
           + (-pyy[..., 0, 0] + pyy[..., 1, 0] - pyy[..., 0, 1] + pyy[..., 1, 1]) / (2.0 * h))
    xxyy = (6.0 * (px[..., 0, 0] - px[..., 1, 0] - px[..., 0, 1] + px[..., 1, 1]) / (h2 * h)
            + 6.0 * (py[..., 0, 0] - py[..., 1, 0] - py[..., 0, 1] + py[..., 1, 1]) / (h2 * h)
            + (7.0 * pxy[..., 0, 0] - pxy[..., 1, 0] - pxy[..., 0, 1] - 5.0 * pxy[..., 1, 1]) / h2)
    return xxy, xyy, xxyy


def reconstruct_cross_quintic(phi, phi_x, phi_y, phi_xx, phi_xy, phi_yy,
                              h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Recover (phi_xxy, phi_xyy, phi_xxyy) at a cell's 4 vertices.

    Inputs are total-2-jet arrays of shape (..., 2, 2) indexed
    [..., qx, qy]; phi itself does not enter the stencils.  The vertex
    (0,0) stencils are applied directly; the other vertices reuse them
    on reflected data (x -> h-x and/or y -> h-y), flipping the sign of
    every quantity of odd derivative order along a reflected axis.
    Accuracy is O(h^(6-s)) for the order-s output derivative.
    """
    arrs = [np.asarray(a, dtype=float) for a in (phi_x, phi_y, phi_xx, phi_xy, phi_yy)]
    # parity of each input under (x-reflection, y-reflection)
    odd = [(True, False), (False, True), (False, False), (True, True), (False, False)]
    shape = arrs[0].shape
    out_xxy = np.empty(shape)
    out_xyy = np.empty(shape)
    out_xxyy = np.empty(shape)
    for qx in (0, 1):
        for qy in (0, 1):
            refl = []
            for a, (ox, oy) in zip(arrs, odd):
                r = a
                if qx:
                    r = np.flip(r, axis=-2)
                    if ox:
                        r = -r
                if qy:
                    r = np.flip(r, axis=-1)
                    if oy:
                        r = -r
                refl.append(r)
            xxy, xyy, xxyy = _quintic_vertex00(*refl, h)
            out_xxy[..., qx, qy] = -xxy if qy else xxy    # one y-derivative
            out_xyy[..., qx, qy] = -xyy if qx else xyy    # one x-derivative
            out_xxyy[..., qx, qy] = xxyy                  # even in both
    return out_xxy, out_xyy, out_xxyy


def _corner_stack(a: np.ndarray) -> np.ndarray:
    """Grid array (N1, N2) -> per-cell corner array (N1, N2, 2, 2), periodic."""
    out = np.empty(a.shape + (2, 2))
    for qx in (0, 1):
        for qy in (0, 1):
            out[..., qx, qy] = np.roll(a, (-qx, -qy), axis=(0, 1))
    return out


# ---------------------------------------------------------------------------
# the time step


def _worker_count() -> int:
    try:
        w = int(os.environ.get("JETADV_THREADS", "1"))
    except ValueError:
        w = 1
    return max(1, w)


def _map_nodes(fn, x: np.ndarray) -> np.ndarray:
    """Apply a per-node batch kernel, optionally split across threads.

    JETADV_THREADS > 1 shards the node batch; rows are independent, so
    the result is bit-identical to the single-threaded map.
    """
    workers = _worker_count()
    m = x.shape[0]
    if workers == 1 or m < 4 * workers:
        return fn(x)
    bounds = np.linspace(0, m, workers + 1).astype(int)
    chunks = [x[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts, axis=0)


def _advect_partial_jet(fld: JetField, x: np.ndarray, t_new: float, dt: float,
                        vel: VelocityModel, config: SchemeConfig) -> np.ndarray:
    k = config.k
    if k == 0:
        return _advect_k0(fld, x, t_new, dt, vel, config.stepper)
    if k == 1:
        if config.strategy == "epsilon_fd":
            return _advect_epsfd_k1(fld, x, t_new, dt, vel, config.stepper, config.epsilon)
        return _advect_analytic_k1(fld, x, t_new, dt, vel, config.stepper)
    # k == 2: analytic total 2-jet plus centered eps-differences in x
    return _advect_hybrid_k2(fld, x, t_new, dt, vel, config.stepper, config.epsilon)


def step(fld: JetField, dt: float, vel: VelocityModel, config: SchemeConfig) -> JetField:
    """One advect-and-project step; returns a fresh field at time + dt.

    The previous field stays untouched (double buffering): every node
    update sees the same frozen interpolant.  For the grid_fd strategy
    the total k-jet is advected first, then each node's missing cross
    derivatives are reconstructed from its owning cell's vertex data.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if config.k != fld.k:
        raise ValueError(f"config k={config.k} does not match field k={fld.k}")
    grid = fld.grid
    t_new = fld.time + dt
    x = grid.node_points().reshape(-1, grid.p)

    if grid.p == 1:
        if config.strategy != "analytic":
            raise ValueError("1-D fields support the analytic strategy only")
        jets = _advect_p1_analytic(fld, x, t_new, dt, vel, config.stepper, config.k)
        data = jets.reshape(tuple(grid.nodes_per_axis) + (config.k + 1,))
        return JetField(grid=grid, k=config.k, data=data, time=t_new)

    if config.strategy == "grid_fd":
        jets = _map_nodes(
            lambda xc: _advect_total_jet_nodes(fld, xc, t_new, dt, vel, config.stepper, config.k), x)
    else:
        jets = _map_nodes(lambda xc: _advect_partial_jet(fld, xc, t_new, dt, vel, config), x)
    shape = tuple(grid.nodes_per_axis)
    data = jets.reshape(shape + (config.k + 1, config.k + 1))

    if config.strategy == "grid_fd":
        # phase two: each cell reconstructs the missing cross derivatives
        # at its own four vertices from its own total-jet data.  The
        # values are cell-owned (adjoining cells disagree at shared
        # vertices, so the interpolant is C0 only); node data records the
        # owning cell's vertex-(0,0) value for dumps and node metrics.
        h1, h2 = (float(s) for s in grid.spacing)
        if not math.isclose(h1, h2, rel_tol=1e-12):
            raise ValueError("grid_fd reconstruction requires square cells")
        h = h1
        if config.k == 1:
            cs = [_corner_stack(data[..., a, b]) for a, b in ((0, 0), (1, 0), (0, 1))]
            cross = {(1, 1): reconstruct_cross_cubic(*cs, h)}
        else:
            cs = [_corner_stack(data[..., a, b])
                  for a, b in ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))]
            xxy, xyy, xxyy = reconstruct_cross_quintic(*cs, h)
            cross = {(2, 1): xxy, (1, 2): xyy, (2, 2): xxyy}
        for (a, b), table in cross.items():
            data[..., a, b] = table[..., 0, 0]
        return JetField(grid=grid, k=config.k, data=data, time=t_new, cell_cross=cross)
    return JetField(grid=grid, k=config.k, data=data, time=t_new)


def advance(fld: JetField, vel: VelocityModel, t_final: float,
            config: SchemeConfig) -> tuple[JetField, int, float]:
    """March the field to t_final with a uniform step near the nominal dt.

    The span is divided into n = ceil(span / nominal) equal steps so the
    actual dt never exceeds the nominal rule.  Returns (field, n, dt).
    """
    span = t_final - fld.time
    if span <= 0:
        raise ValueError("t_final must exceed the field's current time")
    nominal = config.nominal_dt(fld.grid)
    n = max(1, math.ceil(span / nominal - 1e-9))
    dt = span / n
    for _ in range(n):
        fld = step(fld, dt, vel, config)
    return fld, n, dt


def update_node_analytic(fld: JetField, x_node: np.ndarray, t_new: float, dt: float,
                         vel: VelocityModel, k: int) -> NodeJet:
    """Advect one node's partial k-jet with analytic chain rules."""
    cfg = SchemeConfig(k=k, strategy="analytic")
    x = np.asarray(x_node, dtype=float).reshape(1, -1)
    if x.shape[1] == 1:
        vals = _advect_p1_analytic(fld, x, t_new, dt, vel, cfg.stepper, k)
        return NodeJet(vals[0])
    return NodeJet(_advect_partial_jet(fld, x, t_new, dt, vel, cfg)[0])


def update_node_epsilon_fd(fld: JetField, x_node: np.ndarray, t_new: float, dt: float,
                           vel: VelocityModel, k: int,
                           epsilon: float = DEFAULT_EPSILON) -> NodeJet:
    """Advect one node's partial k-jet with epsilon-offset stencils."""
    cfg = SchemeConfig(k=k, strategy="epsilon_fd", epsilon=epsilon)
    x = np.asarray(x_node, dtype=float).reshape(1, -1)
    return NodeJet(_advect_partial_jet(fld, x, t_new, dt, vel, cfg)[0])


# ---------------------------------------------------------------------------
# first-order upwind reference


def upwind_step(grid: GridSpec, values: np.ndarray, t: float, dt: float,
                vel: VelocityModel) -> np.ndarray:
    """One forward-Euler step of dimension-by-dimension upwind differencing.

    values holds node scalars of shape nodes_per_axis (2-D).  The stencil
    side follows the sign of the local velocity; periodic wrap via roll.
    Raises when the step violates the CFL bound dt*(|u|/h1 + |v|/h2) <= 1.
    """
    if grid.p != 2:
        raise ValueError("upwind reference scheme is 2-D only")
    values = np.asarray(values, dtype=float)
    h1, h2 = grid.spacing
    v = vel.eval(grid.node_points(), t)
    u, w = v[..., 0], v[..., 1]
    cfl = dt * float(np.max(np.abs(u) / h1 + np.abs(w) / h2))
    if cfl > 1.0 + 1e-9:
        raise ValueError(f"CFL violated: dt*max(|u|/h1+|v|/h2) = {cfl:.3f} > 1")
    dxm = (values - np.roll(values, 1, axis=0)) / h1
    dxp = (np.roll(values, -1, axis=0) - values) / h1
    dym = (values - np.roll(values, 1, axis=1)) / h2
    dyp = (np.roll(values, -1, axis=1) - values) / h2
    adv = (np.maximum(u, 0.0) * dxm + np.minimum(u, 0.0) * dxp
           + np.maximum(w, 0.0) * dym + np.minimum(w, 0.0) * dyp)
    return values - dt * adv
