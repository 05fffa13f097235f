import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.domain.model.grid_schema import GlobalGrid
from app.domain.model.stencil_schema import (
    DiffusionProblem,
    GridFunction,
    InterpMode,
    StencilField,
    StencilPattern,
    whole_extent,
)
from app.domain.service.multigrid_service import multigrid_service
from app.foundation.errors import NumericalError

from tests.oracles import dense_interp, dense_operator, random_spd_five_point


def problem(n=9, r=16.0, aspect=16.0):
    return DiffusionProblem(grid=GlobalGrid(dims=(n, n)), r=r, aspect=aspect)


def test_discretize_isotropic_under_compensating_aspect():
    A = multigrid_service.discretize(problem())
    c = A.coefficients
    assert_allclose(c[4, 4], [4.0, -1.0, -1.0, -1.0, -1.0])
    assert c[0, 4, 1] == 0.0 and c[-1, 4, 2] == 0.0
    assert c[4, 0, 3] == 0.0 and c[4, -1, 4] == 0.0
    assert c[0, 0, 0] == 4.0
    dense = dense_operator(c)
    assert_allclose(dense, dense.T)


def test_discretize_rejects_small_grid():
    with pytest.raises(ValueError):
        multigrid_service.discretize(DiffusionProblem(grid=GlobalGrid(dims=(2, 5))))


def test_rhs_scales_by_cell_area():
    p = DiffusionProblem(grid=GlobalGrid(dims=(7, 3)), rhs=2.0)
    hx, hy = p.spacings()
    assert hx == pytest.approx(1 / 8) and hy == pytest.approx(1 / 4)
    assert_allclose(multigrid_service.rhs(p).values, np.full((7, 3), 2.0 * hx * hy))


def test_residual_matches_dense_matvec():
    A = random_spd_five_point(6, 5, 0)
    rng = np.random.default_rng(1)
    x = GridFunction.of(rng.standard_normal((6, 5)))
    b = GridFunction.of(rng.standard_normal((6, 5)))
    r = multigrid_service.residual(A, x, b)
    expected = b.values.ravel() - dense_operator(A.coefficients) @ x.values.ravel()
    assert_allclose(r.values.ravel(), expected, rtol=1e-13, atol=1e-13)
    assert_array_equal(multigrid_service.residual(A, GridFunction.zeros((6, 5)), b).values, b.values)


def test_relax_single_sweep_by_hand():
    coef = np.zeros((3, 3, 5))
    coef[:, :, 0] = 2.0
    coef[1:, :, 1] = -1.0
    coef[:-1, :, 2] = -1.0
    A = StencilField(pattern=StencilPattern.FIVE_POINT, coefficients=coef, extent=whole_extent((3, 3)))
    b = GridFunction.of(np.ones((3, 3)))
    x = multigrid_service.relax(A, GridFunction.zeros((3, 3)), b, 1)
    # 색 0 (i+j 짝수) 먼저: x = 1/2, 다음 색 1: x = (1 + 1/2 + 1/2)/2 또는 (1 + 1/2)/2
    assert x.values[0, 0] == 0.5
    assert x.values[1, 1] == 0.5
    assert x.values[1, 0] == 1.0
    assert x.values[0, 1] == 0.75


def test_relax_reduces_energy_error():
    A = random_spd_five_point(8, 7, 3)
    dense = dense_operator(A.coefficients)
    rng = np.random.default_rng(4)
    x_true = rng.standard_normal(56)
    b = GridFunction.of((dense @ x_true).reshape(8, 7))
    x = GridFunction.of(rng.standard_normal((8, 7)))

    def energy(v):
        e = v.values.ravel() - x_true
        return e @ dense @ e

    prev = energy(x)
    for _ in range(10):
        x = multigrid_service.relax(A, x, b, 1)
        cur = energy(x)
        assert cur < prev
        prev = cur


def test_relax_rejects_zero_center():
    A = random_spd_five_point(4, 4, 5)
    A.coefficients[2, 2, 0] = 0.0
    with pytest.raises(NumericalError):
        multigrid_service.relax(A, GridFunction.zeros((4, 4)), GridFunction.zeros((4, 4)), 1)


@pytest.mark.parametrize("dims", [(9, 9), (8, 7)])
def test_restrict_matches_dense_transpose(dims):
    A = random_spd_five_point(*dims, seed=6)
    P = multigrid_service.build_interp(A)
    r = GridFunction.of(np.random.default_rng(7).standard_normal(dims))
    bc = multigrid_service.restrict_residual(r, P)
    expected = dense_interp(P.weights, dims).T @ r.values.ravel()
    assert_allclose(bc.values.ravel(), expected, rtol=1e-13, atol=1e-13)
    zero = multigrid_service.restrict_residual(GridFunction.zeros(dims), P)
    assert not zero.values.any()


@pytest.mark.parametrize("residual_correction", [True, False])
def test_interp_correct_matches_dense_oracle(residual_correction):
    dims = (9, 8)
    A = random_spd_five_point(*dims, seed=8)
    P = multigrid_service.build_interp(A)
    rng = np.random.default_rng(9)
    x = GridFunction.of(rng.standard_normal(dims))
    xc = GridFunction.of(rng.standard_normal(P.coarse_extent.dims))
    r = GridFunction.of(rng.standard_normal(dims))
    out = multigrid_service.interp_correct(x, xc, r, A, P, residual_correction)
    expected = x.values.ravel() + dense_interp(P.weights, dims) @ xc.values.ravel()
    if residual_correction:
        term = r.values / A.center
        term[0::2, 0::2] = 0.0
        expected = expected + term.ravel()
    assert_allclose(out.values.ravel(), expected, rtol=1e-13, atol=1e-13)


def test_interp_correct_with_zero_inputs_is_identity():
    A = random_spd_five_point(7, 7, 10)
    P = multigrid_service.build_interp(A)
    x = GridFunction.of(np.arange(49.0).reshape(7, 7))
    out = multigrid_service.interp_correct(x, GridFunction.zeros((4, 4)), GridFunction.zeros((7, 7)), A, P)
    assert_array_equal(out.values, x.values)


def test_bilinear_interp_preserves_constants_at_edges():
    A = random_spd_five_point(9, 9, 11)
    P = multigrid_service.build_interp(A, InterpMode.BILINEAR)
    x = multigrid_service.interp_correct(GridFunction.zeros((9, 9)), GridFunction.of(np.ones((5, 5))),
                                         GridFunction.zeros((9, 9)), A, P)
    assert_allclose(x.values, np.ones((9, 9)))
