"""One-dimensional Hermite bases and tensor-product cell interpolants.

A cell of a rectangular grid carries a polynomial of odd degree n in each
coordinate separately, pinned down by the values and partial derivatives
(up to order k = (n-1)/2 per axis) attached to the 2^p cell vertices.
This module provides the 1-D endpoint basis polynomials, their exact
derivatives, and evaluation of the tensor-product interpolant at arbitrary
points and derivative orders.  Evaluation outside [0,1]^p is permitted:
the polynomials extend globally, which callers rely on when a stencil
straddles a cell boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npp

SUPPORTED_DEGREES = (1, 3, 5)

# Ascending-power coefficients of the right-endpoint bases w[n, alpha]:
# the unique degree-n polynomial whose alpha-th derivative equals 1 at x=1
# while every other endpoint derivative of order <= (n-1)/2 vanishes.
_RIGHT_COEFFS: dict[tuple[int, int], np.ndarray] = {
    (1, 0): np.array([0.0, 1.0]),
    (3, 0): np.array([0.0, 0.0, 3.0, -2.0]),
    (3, 1): np.array([0.0, 0.0, -1.0, 1.0]),
    (5, 0): np.array([0.0, 0.0, 0.0, 10.0, -15.0, 6.0]),
    (5, 1): np.array([0.0, 0.0, 0.0, -4.0, 7.0, -3.0]),
    (5, 2): np.array([0.0, 0.0, 0.0, 0.5, -1.0, 0.5]),
}

_DERIV_COEFFS: dict[tuple[int, int, int], np.ndarray] = {}


def _right_deriv_coeffs(n: int, alpha: int, order: int) -> np.ndarray:
    key = (n, alpha, order)
    if key not in _DERIV_COEFFS:
        _DERIV_COEFFS[key] = npp.polyder(_RIGHT_COEFFS[(n, alpha)], order)
    return _DERIV_COEFFS[key]


@dataclass(frozen=True)
class BasisId:
    """Identifies one 1-D Hermite basis polynomial.

    Parameters
    ----------
    n : int
        Odd polynomial degree, one of 1, 3, 5.
    alpha : int
        Derivative index in 0..(n-1)/2 that this basis carries.
    q : int
        Endpoint tag: 0 for the left endpoint, 1 for the right.
    """

    n: int
    alpha: int
    q: int

    def __post_init__(self) -> None:
        if self.n not in SUPPORTED_DEGREES:
            raise ValueError(f"unsupported degree n={self.n}, expected one of {SUPPORTED_DEGREES}")
        k = (self.n - 1) // 2
        if not 0 <= self.alpha <= k:
            raise ValueError(f"alpha={self.alpha} out of range 0..{k} for n={self.n}")
        if self.q not in (0, 1):
            raise ValueError(f"endpoint tag q={self.q} must be 0 or 1")


def basis_value(basis: BasisId, x: float) -> float:
    """Evaluate the basis polynomial at x (anywhere on the real line)."""
    return basis_derivative(basis, x, 0)


def basis_derivative(basis: BasisId, x: float, order: int) -> float:
    """Evaluate the order-th derivative of the basis polynomial at x.

    Orders above the polynomial degree return 0 exactly.  Left-endpoint
    bases are obtained from the mirror relation
    w[n, alpha, q=0](x) = (-1)^alpha * w[n, alpha, q=1](1 - x),
    whose order-th derivative picks up a further (-1)^order.
    """
    if order < 0:
        raise ValueError(f"derivative order {order} must be non-negative")
    if order > basis.n:
        return 0.0
    coeffs = _right_deriv_coeffs(basis.n, basis.alpha, order)
    if basis.q == 1:
        return float(npp.polyval(x, coeffs))
    sign = -1.0 if (basis.alpha + order) % 2 else 1.0
    return sign * float(npp.polyval(1.0 - x, coeffs))


def basis_matrix(n: int, xs: np.ndarray, order: int) -> np.ndarray:
    """Evaluate every (alpha, q) basis derivative on an array of points.

    Parameters
    ----------
    n : int
        Odd polynomial degree.
    xs : ndarray
        Evaluation points in cell-relative coordinates, any shape.
    order : int
        Derivative order applied to every basis.

    Returns
    -------
    ndarray, shape (k+1, 2) + xs.shape
        Entry [alpha, q, ...] holds the order-th derivative of basis
        (n, alpha, q) at the corresponding point.
    """
    if n not in SUPPORTED_DEGREES:
        raise ValueError(f"unsupported degree n={n}, expected one of {SUPPORTED_DEGREES}")
    xs = np.asarray(xs, dtype=float)
    k = (n - 1) // 2
    out = np.empty((k + 1, 2) + xs.shape)
    if order > n:
        out.fill(0.0)
        return out
    mirrored = 1.0 - xs
    for alpha in range(k + 1):
        coeffs = _right_deriv_coeffs(n, alpha, order)
        out[alpha, 1] = npp.polyval(xs, coeffs)
        sign = -1.0 if (alpha + order) % 2 else 1.0
        out[alpha, 0] = sign * npp.polyval(mirrored, coeffs)
    return out


@dataclass(frozen=True)
class CellData:
    """Vertex derivative data defining one cell's interpolant.

    Parameters
    ----------
    origin : ndarray, shape (p,)
        Coordinates of the cell's lower corner.
    edge_lengths : ndarray, shape (p,)
        Strictly positive cell extents per axis.
    k : int
        Per-axis derivative order carried at each vertex; the interpolant
        degree is n = 2k+1 per axis.
    values : ndarray, shape (2,)*p + (k+1,)*p
        Vertex data in physical derivative units, indexed
        [q_1, ..., q_p, alpha_1, ..., alpha_p]: entry (q, alpha) is the
        mixed partial of multi-order alpha at vertex q.
    """

    origin: np.ndarray
    edge_lengths: np.ndarray
    k: int
    values: np.ndarray

    def __post_init__(self) -> None:
        origin = np.atleast_1d(np.asarray(self.origin, dtype=float))
        edges = np.atleast_1d(np.asarray(self.edge_lengths, dtype=float))
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "edge_lengths", edges)
        object.__setattr__(self, "values", values)
        p = origin.size
        if edges.size != p:
            raise ValueError("origin and edge_lengths disagree on dimension")
        if np.any(edges <= 0.0):
            raise ValueError("edge lengths must be strictly positive")
        expected = (2,) * p + (self.k + 1,) * p
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} does not match {expected}")

    @property
    def p(self) -> int:
        return self.origin.size


def cell_eval(cell: CellData, x: np.ndarray, deriv: tuple[int, ...] | None = None) -> float:
    """Evaluate a partial derivative of the cell interpolant at a point.

    The point is mapped to cell-relative coordinates; derivative data
    stored in physical units is rescaled internally by edge_length^alpha,
    and the requested derivative divides by edge_length^deriv per axis.
    Points outside the cell are valid (polynomial extension).
    """
    p = cell.p
    deriv = (0,) * p if deriv is None else tuple(int(d) for d in deriv)
    if len(deriv) != p or any(d < 0 for d in deriv):
        raise ValueError(f"deriv {deriv} must be {p} non-negative integers")
    n = 2 * cell.k + 1
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = (x - cell.origin) / cell.edge_lengths
    alphas = np.arange(cell.k + 1)
    # Per-axis factor [q, alpha] = basis deriv * edge^(alpha - deriv_i);
    # integer exponents keep the vertex identity exact in floating point.
    factors = []
    for i in range(p):
        b = basis_matrix(n, xi[i], deriv[i])  # (k+1, 2)
        scale = cell.edge_lengths[i] ** (alphas - deriv[i])
        factors.append(b.T * scale[np.newaxis, :])  # (2, k+1)
    if p == 1:
        return float(np.einsum("qa,qa->", cell.values, factors[0]))
    if p == 2:
        return float(np.einsum("qras,qa,rs->", cell.values, factors[0], factors[1]))
    raise NotImplementedError("cell_eval supports p in {1, 2}")
