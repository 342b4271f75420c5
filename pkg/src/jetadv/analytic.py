"""Analytic scalar fields that can report any partial derivative.

Grid sampling, reference errors, and the diagnostics all want exact
derivatives of a closed-form field.  AnalyticField wraps a sympy
expression and lambdifies each requested partial on demand, so callers
get vectorized numpy evaluation without hand-written derivative formulas.
"""

from __future__ import annotations

import numpy as np
import sympy as sp


class AnalyticField:
    """A p-variate scalar field with exact partial derivatives.

    Instances are callable: ``field(points, deriv)`` evaluates the mixed
    partial of multi-order ``deriv`` (default: the field itself) at
    ``points`` of shape (..., p) (or a bare (p,) point, or a scalar for
    p=1), returning an array of shape points.shape[:-1].
    """

    def __init__(self, expr: sp.Expr, symbols: tuple[sp.Symbol, ...]):
        self.expr = sp.sympify(expr)
        self.symbols = tuple(symbols)
        self.p = len(self.symbols)
        self._fns: dict[tuple[int, ...], object] = {}

    @classmethod
    def from_string(cls, text: str, var_names: tuple[str, ...]) -> "AnalyticField":
        symbols = sp.symbols(var_names)
        if not isinstance(symbols, (tuple, list)):
            symbols = (symbols,)
        return cls(sp.sympify(text), tuple(symbols))

    def partial(self, deriv: tuple[int, ...]):
        """Return a vectorized callable for the given mixed partial."""
        deriv = tuple(int(d) for d in deriv)
        if len(deriv) != self.p or any(d < 0 for d in deriv):
            raise ValueError(f"deriv {deriv} must be {self.p} non-negative integers")
        if deriv not in self._fns:
            dexpr = self.expr
            for sym, order in zip(self.symbols, deriv):
                if order:
                    dexpr = sp.diff(dexpr, sym, order)
            self._fns[deriv] = sp.lambdify(self.symbols, dexpr, modules="numpy")
        return self._fns[deriv]

    def __call__(self, points: np.ndarray, deriv: tuple[int, ...] | None = None) -> np.ndarray:
        if deriv is None:
            deriv = (0,) * self.p
        pts = np.asarray(points, dtype=float)
        if self.p == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., np.newaxis]
        if pts.shape[-1] != self.p:
            raise ValueError(f"points have trailing size {pts.shape[-1]}, expected {self.p}")
        coords = [pts[..., i] for i in range(self.p)]
        out = self.partial(tuple(deriv))(*coords)
        # lambdify collapses constant expressions to scalars
        return np.broadcast_to(np.asarray(out, dtype=float), pts.shape[:-1]).copy()


def cosine_product_ic() -> AnalyticField:
    """Periodic product of cosines on the unit square.

    One full period across the square in x and two in y; the standard
    smooth initial condition for the swirl accuracy benchmarks.
    """
    x, y = sp.symbols("x y")
    return AnalyticField(sp.cos(2 * sp.pi * x) * sp.cos(4 * sp.pi * y), (x, y))


def gaussian_hump_ic(x0: float = 0.5, y0: float = 0.75, sharpness: float = 10.0,
                     images: int = 3) -> AnalyticField:
    """Periodized Gaussian hump on the unit square.

    A lattice sum of exp(-sharpness*((x-x0)^2+(y-y0)^2)) over integer
    image offsets -images..images per axis.  With the default sharpness
    the nearest neglected image is ~1e-20 after derivative factors, so
    the truncated sum is periodic to far below solver tolerances.
    """
    if images < 1:
        raise ValueError("images must be >= 1")
    x, y = sp.symbols("x y")
    total = sp.Integer(0)
    for i in range(-images, images + 1):
        for j in range(-images, images + 1):
            total += sp.exp(-sharpness * ((x - x0 - i) ** 2 + (y - y0 - j) ** 2))
    return AnalyticField(total, (x, y))


def zero_field(p: int = 2) -> AnalyticField:
    names = ("x", "y", "z")[:p]
    symbols = sp.symbols(names)
    if p == 1:
        symbols = (symbols,) if isinstance(symbols, sp.Symbol) else symbols
    return AnalyticField(sp.Integer(0), tuple(symbols))
