"""Endpoint basis polynomials and the cell-local Hermite interpolant.

Oracle values come from an independent symbolic solve of the endpoint
conditions (degree-n polynomial, prescribed derivative deltas at 0 and
1), recorded as plain literals here.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetadv import BasisId, CellData, basis_derivative, basis_matrix, basis_value, cell_eval

DEGREES = (1, 3, 5)

# (n, alpha, q) -> (value at 1/2, first derivative at 1/2)
HALF_POINT = {
    (1, 0, 0): (0.5, -1.0),
    (1, 0, 1): (0.5, 1.0),
    (3, 0, 0): (0.5, -1.5),
    (3, 1, 0): (0.125, -0.25),
    (3, 0, 1): (0.5, 1.5),
    (3, 1, 1): (-0.125, -0.25),
    (5, 0, 0): (0.5, -1.875),
    (5, 1, 0): (5.0 / 32.0, -7.0 / 16.0),
    (5, 2, 0): (1.0 / 64.0, -1.0 / 32.0),
    (5, 0, 1): (0.5, 1.875),
    (5, 1, 1): (-5.0 / 32.0, -7.0 / 16.0),
    (5, 2, 1): (1.0 / 64.0, 1.0 / 32.0),
}


class TestBasis:
    @pytest.mark.parametrize("n", DEGREES)
    def test_endpoint_deltas(self, n):
        # d^m w_alpha^q at endpoint qq must be delta(m=alpha)*delta(qq=q)
        k = (n - 1) // 2
        for alpha in range(k + 1):
            for q in (0, 1):
                b = BasisId(n, alpha, q)
                for m in range(k + 1):
                    for qq in (0, 1):
                        want = 1.0 if (m == alpha and qq == q) else 0.0
                        got = basis_derivative(b, float(qq), m)
                        assert got == pytest.approx(want, abs=1e-13)

    def test_half_point_oracle(self):
        for (n, alpha, q), (val, slope) in HALF_POINT.items():
            b = BasisId(n, alpha, q)
            assert basis_value(b, 0.5) == pytest.approx(val, rel=1e-14)
            assert basis_derivative(b, 0.5, 1) == pytest.approx(slope, rel=1e-14)

    @pytest.mark.parametrize("n", DEGREES)
    def test_mirror_symmetry(self, n):
        # left basis is the reflected right basis with alternating sign
        k = (n - 1) // 2
        xs = np.linspace(0.0, 1.0, 11)
        for alpha in range(k + 1):
            left = np.array([basis_value(BasisId(n, alpha, 0), x) for x in xs])
            right = np.array([basis_value(BasisId(n, alpha, 1), x) for x in xs])
            assert np.allclose(left, (-1.0) ** alpha * right[::-1], atol=1e-14)

    @pytest.mark.parametrize("n", DEGREES)
    def test_partition_of_unity(self, n):
        xs = np.linspace(0.0, 1.0, 17)
        total = np.array([basis_value(BasisId(n, 0, 0), x) + basis_value(BasisId(n, 0, 1), x)
                          for x in xs])
        assert np.allclose(total, 1.0, atol=1e-13)

    def test_derivative_beyond_degree_is_zero(self):
        assert basis_derivative(BasisId(1, 0, 1), 0.3, 2) == 0.0
        assert basis_derivative(BasisId(3, 1, 0), 0.7, 4) == 0.0

    def test_basis_matrix_layout(self):
        xs = np.array([0.0, 0.5, 1.0])
        m = basis_matrix(3, xs, 0)
        assert m.shape == (2, 2, 3)
        assert m[0, 1, 2] == pytest.approx(1.0)    # value basis at its endpoint
        assert m[0, 1, 1] == pytest.approx(0.5)
        assert m[1, 1, 1] == pytest.approx(-0.125)

    def test_invalid_ids_rejected(self):
        with pytest.raises(ValueError):
            BasisId(2, 0, 0)
        with pytest.raises(ValueError):
            BasisId(3, 2, 0)
        with pytest.raises(ValueError):
            BasisId(3, 0, 2)
        with pytest.raises(ValueError):
            BasisId(3, -1, 1)


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
            c = _poly_partial(coeffs, alpha)
            vals[q + alpha] = _poly_eval(c, vertex[np.newaxis])[0]
    return CellData(origin=origin, edge_lengths=edges, k=k, values=vals)


@st.composite
def cell_and_poly(draw, p):
    k = draw(st.sampled_from((0, 1, 2)))
    n = 2 * k + 1
    shape = (n + 1,) * p
    coeffs = np.array(draw(st.lists(st.floats(-2, 2), min_size=int(np.prod(shape)),
                                    max_size=int(np.prod(shape))))).reshape(shape)
    origin = np.array([draw(st.floats(-1, 1)) for _ in range(p)])
    edges = np.array([draw(st.floats(0.1, 2.0)) for _ in range(p)])
    return k, coeffs, origin, edges


class TestCellInterpolant:
    @given(cell_and_poly(p=1))
    def test_reproduces_pn_polynomials_1d(self, case):
        k, coeffs, origin, edges = case
        cell = _exact_cell(coeffs, origin, edges, k)
        xs = origin + np.linspace(0.1, 0.9, 5)[:, None] * edges
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        for x in xs:
            want = _poly_eval(coeffs, x[np.newaxis])[0]
            assert cell_eval(cell, x) == pytest.approx(want, abs=5e-12 * scale)

    @given(cell_and_poly(p=2))
    def test_reproduces_pn_polynomials_2d(self, case):
        k, coeffs, origin, edges = case
        cell = _exact_cell(coeffs, origin, edges, k)
        rng = np.random.default_rng(7)
        pts = origin + rng.uniform(0, 1, (5, 2)) * edges
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        for x in pts:
            want = _poly_eval(coeffs, x[np.newaxis])[0]
            assert cell_eval(cell, x) == pytest.approx(want, abs=5e-12 * scale)

    @given(cell_and_poly(p=2))
    def test_reproduces_derivatives_too(self, case):
        k, coeffs, origin, edges = case
        cell = _exact_cell(coeffs, origin, edges, k)
        x = origin + 0.37 * edges
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        for deriv in ((1, 0), (0, 1), (k, k)):
            want = _poly_eval(_poly_partial(coeffs, deriv), x[np.newaxis])[0]
            got = cell_eval(cell, x, deriv)
            # deriv amplifies round-off by 1/edge^|deriv|
            tol = 5e-11 * scale / float(np.prod(edges ** np.asarray(deriv)))
            assert got == pytest.approx(want, abs=tol)

    def test_cubic_center_value(self):
        # x^3 y^3 is a 2-3 polynomial: center value must be exactly 1/64
        coeffs = np.zeros((4, 4))
        coeffs[3, 3] = 1.0
        cell = _exact_cell(coeffs, np.zeros(2), np.ones(2), 1)
        assert cell_eval(cell, np.array([0.5, 0.5])) == pytest.approx(1.0 / 64.0, rel=1e-14)

    def test_vertex_values_bit_exact(self):
        rng = np.random.default_rng(3)
        vals = rng.normal(size=(2, 2, 2, 2))
        cell = CellData(origin=np.array([0.2, -0.1]), edge_lengths=np.array([0.3, 0.7]),
                        k=1, values=vals)
        for q1 in (0, 1):
            for q2 in (0, 1):
                x = cell.origin + np.array([q1, q2]) * cell.edge_lengths
                assert cell_eval(cell, x) == vals[q1, q2, 0, 0]

    def test_unit_scaling_of_derivative_data(self):
        # same unit-cell data on a stretched cell: value at the mapped
        # point only matches when derivative data carries physical units
        base = np.zeros((2, 2, 2, 2))
        base[:, :, 0, 0] = [[0.0, 0.0], [1.0, 1.0]]   # phi = x on unit cell
        base[:, :, 1, 0] = 1.0
        stretched = base.copy()
        stretched[:, :, 0, 0] *= 2.0                   # phi = x on [0,2]: values 0/2
        cell = CellData(origin=np.zeros(2), edge_lengths=np.array([2.0, 1.0]),
                        k=1, values=stretched)
        assert cell_eval(cell, np.array([1.2, 0.5])) == pytest.approx(1.2, rel=1e-14)
        assert cell_eval(cell, np.array([1.2, 0.5]), (1, 0)) == pytest.approx(1.0, rel=1e-14)

    def test_celldata_validation(self):
        with pytest.raises(ValueError):
            CellData(origin=np.zeros(2), edge_lengths=np.array([1.0, -1.0]), k=1,
                     values=np.zeros((2, 2, 2, 2)))
        with pytest.raises(ValueError):
            CellData(origin=np.zeros(2), edge_lengths=np.ones(2), k=1,
                     values=np.zeros((2, 2, 3, 3)))
