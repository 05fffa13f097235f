"""
scipy.sparse 기반 연산자 조립과 Galerkin 조대 연산자 A_c = P^T A P
"""
import numpy as np
import scipy.sparse as sp

from app.domain.model.grid_schema import LocalExtent
from app.domain.model.stencil_schema import InterpField, StencilField, StencilPattern
from app.foundation.errors import NumericalError
from app.foundation.stencil.compass import INTERP_OFFSETS, OFFSET_TO_STENCIL, STENCIL_OFFSETS


def stencil_to_csr(coef: np.ndarray) -> sp.csr_matrix:
    """계수 배열을 전역 희소 행렬로 조립합니다. 행 인덱스는 i * n_y + j 입니다."""
    nx, ny, npts = coef.shape
    idx = np.arange(nx * ny).reshape(nx, ny)
    rows, cols, data = [], [], []
    for k in range(npts):
        dx, dy = STENCIL_OFFSETS[k]
        i0, i1 = max(0, -dx), min(nx, nx - dx)
        j0, j1 = max(0, -dy), min(ny, ny - dy)
        if i0 >= i1 or j0 >= j1:
            continue
        rows.append(idx[i0:i1, j0:j1].ravel())
        cols.append(idx[i0 + dx:i1 + dx, j0 + dy:j1 + dy].ravel())
        data.append(coef[i0:i1, j0:j1, k].ravel())
    return sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nx * ny, nx * ny),
    )


def interp_to_csr(P: InterpField) -> sp.csr_matrix:
    """보간 가중치를 (세밀 점 수 × 조대 점 수) 희소 행렬로 조립합니다."""
    nx, ny = P.fine_dims
    ncx, ncy = P.coarse_extent.dims
    cidx = np.arange(ncx * ncy).reshape(ncx, ncy)
    I, J = np.meshgrid(np.arange(ncx), np.arange(ncy), indexing="ij")
    rows = [(2 * I * ny + 2 * J).ravel()]
    cols = [cidx.ravel()]
    data = [np.ones(ncx * ncy)]
    for k, (dx, dy) in INTERP_OFFSETS.items():
        fi, fj = 2 * I + dx, 2 * J + dy
        ok = (fi >= 0) & (fi < nx) & (fj >= 0) & (fj < ny)
        rows.append((fi * ny + fj)[ok])
        cols.append(cidx[ok])
        data.append(P.weights[:, :, k][ok])
    return sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nx * ny, ncx * ncy),
    )


def galerkin(A: StencilField, P: InterpField) -> StencilField:
    """
    A_c = P^T A P 를 계산하여 9점 조대 스텐실로 변환합니다.

    Raises:
        NumericalError: 조대 연산자가 9점 범위를 벗어나는 경우
    """
    ncx, ncy = P.coarse_extent.dims
    Pm = interp_to_csr(P)
    Ac = (Pm.T @ (stencil_to_csr(A.coefficients) @ Pm)).tocsr()
    Ac.sum_duplicates()
    coo = Ac.tocoo()
    ri, rj = np.divmod(coo.row, ncy)
    ci, cj = np.divmod(coo.col, ncy)
    dx, dy = ci - ri, cj - rj
    if coo.nnz and (np.abs(dx).max() > 1 or np.abs(dy).max() > 1):
        raise NumericalError("Galerkin 조대 연산자가 9점 스텐실 범위를 벗어났습니다.")
    table = np.zeros((3, 3), dtype=int)
    for (ox, oy), k in OFFSET_TO_STENCIL.items():
        table[ox + 1, oy + 1] = k
    coef = np.zeros((ncx, ncy, 9))
    coef[ri, rj, table[dx + 1, dy + 1]] = coo.data
    return StencilField(
        pattern=StencilPattern.NINE_POINT,
        coefficients=coef,
        extent=LocalExtent(dims=(ncx, ncy), offset=(0, 0)),
    )
