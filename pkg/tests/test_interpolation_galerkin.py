import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.domain.model.grid_schema import GlobalGrid
from app.domain.model.stencil_schema import DiffusionProblem, InterpMode, StencilField, StencilPattern, whole_extent
from app.domain.service.multigrid_service import multigrid_service
from app.foundation.stencil import interp_to_csr, stencil_to_csr
from app.foundation.stencil.compass import C, E, N, P_E, P_N, P_NE, P_S, P_W, S, W

from tests.oracles import dense_interp, dense_operator, random_spd_five_point


def laplacian(n):
    p = DiffusionProblem(grid=GlobalGrid(dims=(n, n)), r=1.0)
    return multigrid_service.discretize(p)


def test_operator_induced_equals_bilinear_for_constant_coefficients_in_interior():
    A = laplacian(17)
    P = multigrid_service.build_interp(A)
    w = P.weights
    # y 경계에서 떨어진 내부 조대점
    assert_allclose(w[:8, 1:8, P_E], 0.5)
    assert_allclose(w[1:9, 1:8, P_W], 0.5)
    assert_allclose(w[1:8, :8, P_N], 0.5)
    assert_allclose(w[1:8, 1:9, P_S], 0.5)
    assert_allclose(w[1:7, 1:7, P_NE], 0.25)
    assert P.fallback_points == 0


def test_operator_induced_weights_follow_jump_coefficient():
    A = random_spd_five_point(9, 9, 20)
    coef = A.coefficients
    k1, k2 = 1.0, 1000.0
    coef[3, 4] = 0.0
    coef[3, 4, W] = -k1
    coef[3, 4, E] = -k2
    coef[3, 4, C] = k1 + k2
    P = multigrid_service.build_interp(A)
    # 세밀점 (3, 4) = 조대 (1, 2)의 e 방향, 조대 (2, 2)의 w 방향
    assert P.weights[1, 2, P_E] == pytest.approx(k1 / (k1 + k2))
    assert P.weights[2, 2, P_W] == pytest.approx(k2 / (k1 + k2))


def test_constant_preserved_on_whole_grid():
    A = laplacian(17)
    P = multigrid_service.build_interp(A)
    x = (dense_interp(P.weights, (17, 17)) @ np.ones(81)).reshape(17, 17)
    assert_allclose(x, 1.0, rtol=0, atol=1e-14)


@pytest.mark.parametrize("n", [9, 17, 33])
def test_constant_preserved_on_every_level(n):
    p = DiffusionProblem(grid=GlobalGrid(dims=(n, n)), r=16.0, aspect=16.0)
    h = multigrid_service.build_hierarchy(p)
    for lvl in h.levels[1:]:
        nx, ny = lvl.P.fine_dims
        ones = np.ones(lvl.P.weights.shape[0] * lvl.P.weights.shape[1])
        x = dense_interp(lvl.P.weights, (nx, ny)) @ ones
        assert_allclose(x, 1.0, rtol=0, atol=1e-12)


def test_boundary_adjacent_edge_points_get_half_weights():
    A = laplacian(9)
    P = multigrid_service.build_interp(A)
    # y = 0 행과 x = 0 열의 간선점 (경계 연결이 제거된 행)
    assert_allclose(P.weights[:4, 0, P_E], 0.5)
    assert_allclose(P.weights[1:5, 0, P_W], 0.5)
    assert_allclose(P.weights[0, :4, P_N], 0.5)
    assert_allclose(P.weights[0, 1:5, P_S], 0.5)


def test_degenerate_denominator_falls_back_to_bilinear(caplog):
    A = random_spd_five_point(7, 7, 21)
    coef = A.coefficients
    # x 방향 결합이 없는 x-간선점
    coef[1, 2] = 0.0
    coef[1, 2, C] = 1.0
    coef[1, 2, N] = -0.5
    coef[1, 2, S] = -0.5
    with caplog.at_level(logging.WARNING):
        P = multigrid_service.build_interp(A)
    assert P.fallback_points >= 1
    assert P.weights[0, 1, P_E] == 0.5
    assert P.weights[1, 1, P_W] == 0.5
    assert "bilinear" in caplog.text


@pytest.mark.parametrize("n", [5, 8, 11, 17])
@pytest.mark.parametrize("mode", [InterpMode.OPERATOR_INDUCED, InterpMode.BILINEAR])
def test_galerkin_matches_dense_triple_product(n, mode):
    A = random_spd_five_point(n, n, 30 + n)
    P = multigrid_service.build_interp(A, mode)
    Ac = multigrid_service.galerkin(A, P)
    assert Ac.pattern is StencilPattern.NINE_POINT
    Pd = dense_interp(P.weights, (n, n))
    expected = Pd.T @ dense_operator(A.coefficients) @ Pd
    got = dense_operator(Ac.coefficients)
    assert_allclose(got, expected, rtol=1e-12, atol=1e-12 * np.abs(expected).max())
    assert_allclose(got, got.T, atol=1e-12 * np.abs(got).max())


def test_galerkin_of_nine_point_operator_stays_nine_point():
    A = random_spd_five_point(17, 17, 40)
    P1 = multigrid_service.build_interp(A)
    A1 = multigrid_service.galerkin(A, P1)
    P2 = multigrid_service.build_interp(A1)
    A2 = multigrid_service.galerkin(A1, P2)
    Pd = dense_interp(P2.weights, A1.dims)
    expected = Pd.T @ dense_operator(A1.coefficients) @ Pd
    assert_allclose(dense_operator(A2.coefficients), expected, rtol=1e-12, atol=1e-12 * np.abs(expected).max())


def test_sparse_assembly_matches_dense_loops():
    A = random_spd_five_point(6, 9, 41)
    assert_allclose(stencil_to_csr(A.coefficients).toarray(), dense_operator(A.coefficients))
    P = multigrid_service.build_interp(A)
    assert_allclose(interp_to_csr(P).toarray(), dense_interp(P.weights, (6, 9)))


def test_nine_point_stencil_field_checks_shape():
    with pytest.raises(ValueError):
        StencilField(pattern=StencilPattern.NINE_POINT, coefficients=np.zeros((3, 3, 5)),
                     extent=whole_extent((3, 3)))
