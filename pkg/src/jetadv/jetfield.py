"""Periodic grid storage of node jets and global interpolant evaluation.

A JetField keeps, at every node of a periodic rectangular grid, the
partial k-jet: all mixed derivatives d^alpha phi with each alpha_i <= k,
in physical units.  Any point in space falls into exactly one owning grid
cell (points on grid hyperplanes belong to the cell on their upper side),
and evaluation assembles that cell's interpolant from the jets at its
2^p vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .hermite import CellData, basis_matrix

__all__ = [
    "GridSpec",
    "NodeJet",
    "JetField",
    "locate_cell",
    "eval_global",
    "assemble_cell",
    "sample_from_function",
    "linf_node_error",
    "dump_csv",
    "deriv_column_names",
]


@dataclass(eq=False)
class GridSpec:
    """Periodic rectangular grid: box [lo_i, hi_i) with N_i nodes per axis.

    Node N_i is identified with node 0, so the spacing is
    h_i = (hi_i - lo_i) / N_i and there are prod(N_i) distinct nodes.
    """

    lo: np.ndarray
    hi: np.ndarray
    nodes_per_axis: np.ndarray

    def __post_init__(self) -> None:
        self.lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        self.nodes_per_axis = np.atleast_1d(np.asarray(self.nodes_per_axis, dtype=int))
        if not (self.lo.size == self.hi.size == self.nodes_per_axis.size):
            raise ValueError("lo, hi, nodes_per_axis disagree on dimension")
        if np.any(self.nodes_per_axis < 2):
            raise ValueError("need at least 2 nodes per axis")
        if np.any(self.hi <= self.lo):
            raise ValueError("domain box must have positive extent")

    @classmethod
    def unit_square(cls, n: int) -> "GridSpec":
        return cls(np.zeros(2), np.ones(2), np.full(2, n))

    @classmethod
    def unit_interval(cls, n: int) -> "GridSpec":
        return cls(np.zeros(1), np.ones(1), np.full(1, n))

    @property
    def p(self) -> int:
        return self.lo.size

    @property
    def spacing(self) -> np.ndarray:
        return (self.hi - self.lo) / self.nodes_per_axis

    def node_axes(self) -> list[np.ndarray]:
        h = self.spacing
        return [self.lo[i] + h[i] * np.arange(self.nodes_per_axis[i]) for i in range(self.p)]

    def node_points(self) -> np.ndarray:
        """All node coordinates, shape (*nodes_per_axis, p), row-major."""
        mesh = np.meshgrid(*self.node_axes(), indexing="ij")
        return np.stack(mesh, axis=-1)


@dataclass(eq=False)
class NodeJet:
    """Partial k-jet at one node: values[alpha_1, ..., alpha_p], physical units."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        shape = self.values.shape
        if len(shape) < 1 or any(s != shape[0] for s in shape):
            raise ValueError("jet values must be a (k+1)^p hypercube")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("jet values must be finite")

    @property
    def k(self) -> int:
        return self.values.shape[0] - 1


@dataclass(eq=False)
class JetField:
    """One partial k-jet per grid node plus the current time.

    data has shape (*nodes_per_axis,) + (k+1,)*p, indexed
    [i_1, ..., i_p, alpha_1, ..., alpha_p].  Fields are treated as
    immutable during a time step; updates build a fresh instance.

    cell_cross optionally holds cell-owned values for selected jet
    entries: a map from entry (a, b) to an array of shape
    (*nodes_per_axis, 2, 2) giving that entry at each cell's own four
    vertices.  Evaluation in a cell then prefers the cell's values over
    the node data, which makes the interpolant merely C0 across grid
    lines.  This is how grid-scale cross-derivative reconstructions
    stay local to a single cell (2-D only); node data keeps the owning
    cell's vertex-(0,0) value so dumps stay well defined.
    """

    grid: GridSpec
    k: int
    data: np.ndarray
    time: float = 0.0
    cell_cross: dict | None = None

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=float)
        expected = tuple(self.grid.nodes_per_axis) + (self.k + 1,) * self.grid.p
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} does not match {expected}")
        if self.cell_cross is not None:
            if self.grid.p != 2:
                raise ValueError("cell_cross overrides are 2-D only")
            want = tuple(self.grid.nodes_per_axis) + (2, 2)
            for entry, table in self.cell_cross.items():
                if np.shape(table) != want:
                    raise ValueError(f"cell_cross[{entry}] shape {np.shape(table)} != {want}")

    def node_jet(self, index: tuple[int, ...]) -> NodeJet:
        return NodeJet(self.data[tuple(index)].copy())

    def node_values(self) -> np.ndarray:
        """Function values at all nodes, shape (*nodes_per_axis,)."""
        return self.data[(Ellipsis,) + (0,) * self.grid.p]


def locate_cell(grid: GridSpec, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map points to (owning cell index, local coordinates in [0,1)^p).

    Points are first wrapped periodically into the box.  A point exactly
    on a grid hyperplane belongs to the cell on its upper side (local
    coordinate 0 there), which makes evaluation single-sided and
    deterministic.
    """
    x = np.asarray(x, dtype=float)
    n = grid.nodes_per_axis
    t = np.mod((x - grid.lo) / grid.spacing, n)
    # mod can land exactly on n for tiny negative input; wrap to 0
    t = np.where(t >= n, 0.0, t)
    cell = np.floor(t).astype(int)
    np.minimum(cell, n - 1, out=cell)
    return cell, t - cell


def _gather_corners(fld: JetField, cell: np.ndarray) -> np.ndarray:
    """Corner jets of the given cells: shape (M, 2, ..., 2, (k+1), ..., (k+1))."""
    n = fld.grid.nodes_per_axis
    p = fld.grid.p
    if p == 1:
        idx = (cell[:, 0][:, None] + np.arange(2)[None, :]) % n[0]
        return fld.data[idx]
    i1 = (cell[:, 0][:, None, None] + np.array([[0], [1]])[None]) % n[0]
    i2 = (cell[:, 1][:, None, None] + np.array([[0, 1]])[None]) % n[1]
    # fancy indexing copies, so the patch below cannot alias fld.data
    corners = fld.data[i1, i2]
    if fld.cell_cross:
        for (a, b), table in fld.cell_cross.items():
            corners[..., a, b] = table[cell[:, 0], cell[:, 1]]
    return corners


def _eval_at_cells(fld: JetField, corners: np.ndarray, xi: np.ndarray,
                   derivs: list[tuple[int, ...]]) -> np.ndarray:
    """Evaluate interpolant derivatives with cells fixed by the caller.

    xi are cell-relative coordinates and may lie outside [0,1) when a
    caller deliberately extends a cell's polynomial beyond its box.
    Returns shape (M, len(derivs)).
    """
    grid = fld.grid
    p = grid.p
    k = fld.k
    n = 2 * k + 1
    h = grid.spacing
    alphas = np.arange(k + 1)
    out = np.empty((xi.shape[0], len(derivs)))
    # basis matrices are per (axis, order); reuse across requested derivs
    cache: dict[tuple[int, int], np.ndarray] = {}

    def axis_factor(axis: int, order: int) -> np.ndarray:
        key = (axis, order)
        if key not in cache:
            b = basis_matrix(n, xi[:, axis], order)  # (k+1, 2, M)
            scale = h[axis] ** (alphas - order)
            cache[key] = b * scale[:, None, None]
        return cache[key]

    for col, dv in enumerate(derivs):
        if p == 1:
            out[:, col] = np.einsum("mqa,aqm->m", corners, axis_factor(0, dv[0]))
        else:
            out[:, col] = np.einsum(
                "mqrab,aqm,brm->m",
                corners, axis_factor(0, dv[0]), axis_factor(1, dv[1]),
            )
    return out


def eval_derivs(fld: JetField, x: np.ndarray, derivs: list[tuple[int, ...]],
                cell: np.ndarray | None = None, xi: np.ndarray | None = None) -> np.ndarray:
    """Evaluate several derivatives of the global interpolant at points x.

    x has shape (M, p).  If cell/xi are omitted they come from
    locate_cell; passing them lets a caller force evaluation in a chosen
    cell (with xi the unwrapped relative coordinates in that cell).
    """
    x = np.asarray(x, dtype=float)
    if cell is None or xi is None:
        cell, xi = locate_cell(fld.grid, x)
    corners = _gather_corners(fld, cell)
    return _eval_at_cells(fld, corners, xi, derivs)


def eval_global(fld: JetField, x: np.ndarray, deriv: tuple[int, ...] | None = None) -> np.ndarray:
    """Evaluate one derivative of the global interpolant.

    Accepts a single point of shape (p,) (returns a scalar) or a batch of
    shape (..., p) (returns shape (...,)).  Points are wrapped
    periodically; hyperplane points evaluate single-sided in their owning
    cell.
    """
    if deriv is None:
        deriv = (0,) * fld.grid.p
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[np.newaxis] if single else x.reshape(-1, fld.grid.p)
    vals = eval_derivs(fld, pts, [tuple(int(d) for d in deriv)])[:, 0]
    if single:
        return float(vals[0])
    return vals.reshape(x.shape[:-1])


def assemble_cell(fld: JetField, cell_index: tuple[int, ...]) -> CellData:
    """Build the CellData of one grid cell from its corner jets."""
    grid = fld.grid
    p = grid.p
    idx = np.asarray(cell_index, dtype=int).reshape(1, p)
    corners = _gather_corners(fld, idx)[0]  # (2,)*p + (k+1,)*p already
    origin = grid.lo + grid.spacing * np.mod(idx[0], grid.nodes_per_axis)
    return CellData(origin=origin, edge_lengths=grid.spacing.copy(), k=fld.k,
                    values=corners.copy())


def sample_from_function(grid: GridSpec, k: int, f) -> JetField:
    """Sample the partial k-jet of a jet-evaluable function at every node.

    f must accept (points, deriv) with points of shape (..., p) and a
    derivative multi-index, and return exact partials; AnalyticField
    satisfies this.
    """
    pts = grid.node_points()
    p = grid.p
    shape = tuple(grid.nodes_per_axis) + (k + 1,) * p
    data = np.empty(shape)
    for alpha in itertools.product(range(k + 1), repeat=p):
        data[(Ellipsis,) + alpha] = f(pts, alpha)
    return JetField(grid=grid, k=k, data=data, time=0.0)


def linf_node_error(fld: JetField, exact) -> float:
    """Max absolute difference of node function values against exact(x)."""
    pts = fld.grid.node_points()
    return float(np.max(np.abs(fld.node_values() - np.asarray(exact(pts), dtype=float))))


def deriv_column_names(k: int, p: int) -> list[str]:
    """CSV column names for jet entries in lexicographic alpha order."""
    names = []
    for alpha in itertools.product(range(k + 1), repeat=p):
        if sum(alpha) == 0:
            names.append("phi")
        else:
            names.append("phi_" + "x" * alpha[0] + ("y" * alpha[1] if p > 1 else ""))
    return names


def dump_csv(fld: JetField, stream) -> None:
    """Write the field as CSV: node indices, coordinates, jet entries.

    Two-dimensional fields only.  Header is i,j,x,y followed by one
    column per jet entry in lexicographic alpha order; values carry 17
    significant digits.
    """
    grid = fld.grid
    if grid.p != 2:
        raise ValueError("CSV dump is defined for 2-D fields")
    names = deriv_column_names(fld.k, 2)
    stream.write("i,j,x,y," + ",".join(names) + "\n")
    xs, ys = grid.node_axes()
    k1 = fld.k + 1
    for i in range(grid.nodes_per_axis[0]):
        for j in range(grid.nodes_per_axis[1]):
            jet = fld.data[i, j].reshape(k1 * k1)
            cells = [str(i), str(j), f"{xs[i]:.17g}", f"{ys[j]:.17g}"]
            cells += [f"{v:.17g}" for v in jet]
            stream.write(",".join(cells) + "\n")
