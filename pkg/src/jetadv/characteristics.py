"""Velocity models and backward characteristic tracing.

The advection step needs, for every grid node x, the foot of the
characteristic through (x, t_new): one explicit Runge-Kutta step backward
in time over [t_new - dt, t_new].  Differentiating the same RK formulas
with respect to the starting point x yields the Jacobian and Hessian of
the foot map, which the jet update consumes; propagating those stage by
stage keeps every derivative update consistent with one single foot map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "VelocityModel",
    "ConstantVelocity",
    "RigidRotation",
    "SwirlVelocity",
    "FootResult",
    "BUTCHER_TABLEAUS",
    "swirl_velocity",
    "swirl_gradient",
    "swirl_hessian",
    "trace_foot",
    "rk_step",
    "advect_forward",
]


class VelocityModel:
    """Evaluable velocity field with spatial gradient and Hessian.

    eval(x, t)  -> (..., p)      velocity components
    grad(x, t)  -> (..., p, p)   entry [i, j] = d v_i / d x_j
    hess(x, t)  -> (..., p, p, p) entry [i, j, l] = d^2 v_i / d x_j d x_l

    max_speed, when known, bounds |v| over all space and time (used for
    CFL checks).
    """

    p = 2
    max_speed: float | None = None

    def eval(self, x: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def grad(self, x: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def hess(self, x: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError


class ConstantVelocity(VelocityModel):
    """Uniform velocity; gradient and Hessian vanish identically."""

    def __init__(self, v):
        self.v = np.atleast_1d(np.asarray(v, dtype=float))
        self.p = self.v.size
        self.max_speed = float(np.linalg.norm(self.v))

    def eval(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.v, x.shape).copy()

    def grad(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape + (self.p,))

    def hess(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape + (self.p, self.p))


class RigidRotation(VelocityModel):
    """Counterclockwise rotation about a center: v = omega * (-(y-cy), x-cx)."""

    def __init__(self, omega: float = 1.0, center=(0.0, 0.0)):
        self.omega = float(omega)
        self.center = np.asarray(center, dtype=float)

    def eval(self, x, t):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        out[..., 0] = -self.omega * (x[..., 1] - self.center[1])
        out[..., 1] = self.omega * (x[..., 0] - self.center[0])
        return out

    def grad(self, x, t):
        x = np.asarray(x, dtype=float)
        g = np.zeros(x.shape + (2,))
        g[..., 0, 1] = -self.omega
        g[..., 1, 0] = self.omega
        return g

    def hess(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape + (2, 2))


def swirl_velocity(x, y, t: float, T: float):
    """Deforming swirl on the unit square.

    u =  cos(pi t / T) sin^2(pi x) sin(2 pi y)
    v = -cos(pi t / T) sin(2 pi x) sin^2(pi y)

    Divergence-free, zero on the square's boundary, maximum speed 1.  The
    cosine factor reverses the flow over [0, T], so the exact solution
    returns to the initial state at every whole multiple of T.
    """
    if T <= 0:
        raise ValueError("period T must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.cos(np.pi * t / T)
    u = c * np.sin(np.pi * x) ** 2 * np.sin(2 * np.pi * y)
    v = -c * np.sin(2 * np.pi * x) * np.sin(np.pi * y) ** 2
    return u, v


def swirl_gradient(x, y, t: float, T: float):
    """Spatial gradient of the swirl field: rows du, dv; columns d/dx, d/dy."""
    if T <= 0:
        raise ValueError("period T must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.cos(np.pi * t / T)
    pi = np.pi
    u_x = c * pi * np.sin(2 * pi * x) * np.sin(2 * pi * y)
    u_y = 2 * pi * c * np.sin(pi * x) ** 2 * np.cos(2 * pi * y)
    v_x = -2 * pi * c * np.cos(2 * pi * x) * np.sin(pi * y) ** 2
    v_y = -c * pi * np.sin(2 * pi * x) * np.sin(2 * pi * y)
    g = np.empty(x.shape + (2, 2))
    g[..., 0, 0] = u_x
    g[..., 0, 1] = u_y
    g[..., 1, 0] = v_x
    g[..., 1, 1] = v_y
    return g


def swirl_hessian(x, y, t: float, T: float):
    """Second spatial derivatives of the swirl field, [i, j, l] = d2 v_i / dx_j dx_l."""
    if T <= 0:
        raise ValueError("period T must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = np.cos(np.pi * t / T)
    pi = np.pi
    u_xx = 2 * pi**2 * c * np.cos(2 * pi * x) * np.sin(2 * pi * y)
    u_xy = 2 * pi**2 * c * np.sin(2 * pi * x) * np.cos(2 * pi * y)
    u_yy = -4 * pi**2 * c * np.sin(pi * x) ** 2 * np.sin(2 * pi * y)
    v_xx = 4 * pi**2 * c * np.sin(2 * pi * x) * np.sin(pi * y) ** 2
    v_xy = -2 * pi**2 * c * np.cos(2 * pi * x) * np.sin(2 * pi * y)
    v_yy = -2 * pi**2 * c * np.sin(2 * pi * x) * np.cos(2 * pi * y)
    hs = np.empty(x.shape + (2, 2, 2))
    hs[..., 0, 0, 0] = u_xx
    hs[..., 0, 0, 1] = u_xy
    hs[..., 0, 1, 0] = u_xy
    hs[..., 0, 1, 1] = u_yy
    hs[..., 1, 0, 0] = v_xx
    hs[..., 1, 0, 1] = v_xy
    hs[..., 1, 1, 0] = v_xy
    hs[..., 1, 1, 1] = v_yy
    return hs


class SwirlVelocity(VelocityModel):
    """VelocityModel wrapper around the swirl formulas with period T."""

    max_speed = 1.0

    def __init__(self, T: float = 1.0):
        if T <= 0:
            raise ValueError("period T must be positive")
        self.T = float(T)

    def eval(self, x, t):
        x = np.asarray(x, dtype=float)
        u, v = swirl_velocity(x[..., 0], x[..., 1], t, self.T)
        return np.stack([u, v], axis=-1)

    def grad(self, x, t):
        x = np.asarray(x, dtype=float)
        return swirl_gradient(x[..., 0], x[..., 1], t, self.T)

    def hess(self, x, t):
        x = np.asarray(x, dtype=float)
        return swirl_hessian(x[..., 0], x[..., 1], t, self.T)


@dataclass(eq=False)
class FootResult:
    """Foot of a traced characteristic with optional foot-map derivatives.

    foot has the shape of the input points; grad_foot[i, j] = d foot_i /
    d x_j and hess_foot[i, j, l] = d^2 foot_i / d x_j d x_l are present
    exactly when the requested derivative order covers them.
    """

    foot: np.ndarray
    grad_foot: np.ndarray | None = None
    hess_foot: np.ndarray | None = None


# c: stage times as fractions of the step; a: strictly lower-triangular
# stage weights; b: output weights.
BUTCHER_TABLEAUS: dict[str, tuple[list[float], list[list[float]], list[float]]] = {
    "euler": ([0.0], [[]], [1.0]),
    "ssprk3": (
        [0.0, 1.0, 0.5],
        [[], [1.0], [0.25, 0.25]],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ),
    # fifth-order component of the Cash-Karp pair
    "rk5_cash_karp": (
        [0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0],
        [
            [],
            [1.0 / 5.0],
            [3.0 / 40.0, 9.0 / 40.0],
            [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0],
            [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0],
            [1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0,
             44275.0 / 110592.0, 253.0 / 4096.0],
        ],
        [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0],
    ),
}


def rk_step(x: np.ndarray, t_start: float, dt_signed: float, vel: VelocityModel,
            stepper: str, deriv_order: int) -> FootResult:
    """One explicit RK step of dy/ds = v(y, s), from t_start to t_start + dt_signed.

    x has shape (M, p).  With deriv_order >= 1 the Jacobian of the result
    with respect to x is propagated through every stage by the product
    rule; with deriv_order = 2 the Hessian follows from the second-order
    chain rule applied stage-wise.  Negative dt_signed steps backward.
    """
    if stepper not in BUTCHER_TABLEAUS:
        raise ValueError(f"unknown stepper {stepper!r}, expected one of {sorted(BUTCHER_TABLEAUS)}")
    if deriv_order not in (0, 1, 2):
        raise ValueError("deriv_order must be 0, 1, or 2")
    c, a, b = BUTCHER_TABLEAUS[stepper]
    x = np.asarray(x, dtype=float)
    m_pts, p = x.shape
    eye = np.broadcast_to(np.eye(p), (m_pts, p, p))

    ks: list[np.ndarray] = []
    gks: list[np.ndarray] = []
    tks: list[np.ndarray] = []
    for s in range(len(c)):
        y = x.copy()
        for j, w in enumerate(a[s]):
            if w:
                y += w * ks[j]
        tau = t_start + c[s] * dt_signed
        ks.append(dt_signed * vel.eval(y, tau))
        if deriv_order >= 1:
            gy = eye.copy()
            for j, w in enumerate(a[s]):
                if w:
                    gy += w * gks[j]
            jv = vel.grad(y, tau)
            gks.append(dt_signed * np.einsum("mij,mjl->mil", jv, gy))
            if deriv_order == 2:
                ty = np.zeros((m_pts, p, p, p))
                for j, w in enumerate(a[s]):
                    if w:
                        ty += w * tks[j]
                hv = vel.hess(y, tau)
                tks.append(dt_signed * (
                    np.einsum("miab,maj,mbl->mijl", hv, gy, gy)
                    + np.einsum("mia,majl->mijl", jv, ty)
                ))

    foot = x.copy()
    for w, k in zip(b, ks):
        if w:
            foot += w * k
    grad_foot = None
    hess_foot = None
    if deriv_order >= 1:
        grad_foot = eye.copy()
        for w, gk in zip(b, gks):
            if w:
                grad_foot += w * gk
    if deriv_order == 2:
        hess_foot = np.zeros((m_pts, p, p, p))
        for w, tk in zip(b, tks):
            if w:
                hess_foot += w * tk
    return FootResult(foot=foot, grad_foot=grad_foot, hess_foot=hess_foot)


def trace_foot(x: np.ndarray, t_new: float, dt: float, vel: VelocityModel,
               stepper: str, deriv_order: int = 0) -> FootResult:
    """Trace characteristics one step backward from (x, t_new) to t_new - dt.

    Accepts a single point of shape (p,) or a batch (M, p); the result
    keeps the input's shape.  deriv_order selects how many derivatives of
    the foot map to propagate (0, 1, or 2).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[np.newaxis] if single else x
    res = rk_step(pts, t_new, -dt, vel, stepper, deriv_order)
    if single:
        return FootResult(
            foot=res.foot[0],
            grad_foot=None if res.grad_foot is None else res.grad_foot[0],
            hess_foot=None if res.hess_foot is None else res.hess_foot[0],
        )
    return res


def advect_forward(x: np.ndarray, t_start: float, t_end: float, vel: VelocityModel,
                   n_steps: int, stepper: str = "rk5_cash_karp") -> np.ndarray:
    """March points forward from t_start to t_end in n_steps equal RK steps."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[np.newaxis].copy() if single else x.copy()
    dt = (t_end - t_start) / n_steps
    t = t_start
    for _ in range(n_steps):
        pts = rk_step(pts, t, dt, vel, stepper, 0).foot
        t += dt
    return pts[0] if single else pts
