"""
연산자 유도(operator-induced) 보간과 bilinear 보간 가중치 구성
"""
import logging
from typing import Tuple

import numpy as np

from app.domain.model.grid_schema import LocalExtent
from app.domain.model.stencil_schema import InterpField, InterpMode, StencilField
from app.foundation.grid.partition import coarsen_dims
from app.foundation.stencil.compass import (
    E, N, NE, NW, S, SE, SW, W,
    P_E, P_N, P_NE, P_NW, P_S, P_SE, P_SW, P_W,
)

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e3 * np.finfo(float).eps


def _edge_weights(a: np.ndarray, rowabs: np.ndarray, lo_dirs, hi_dirs,
                  mode: InterpMode) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    간선점에서 양쪽 조대 이웃으로 가는 가중치 (-L/Cc, -R/Cc).

    접힌 중심 Cc = C + (수직 방향 결합)에서 행 합(row sum)을 뺀 값, 즉 -(L + R)을 씁니다.
    행 합이 0인 내부에서는 같은 값이고, Dirichlet 경계 인접 행의 대각 잉여분은 분모에서 빠집니다.
    """
    if mode is InterpMode.BILINEAR:
        half = np.full(a.shape[:2], 0.5)
        return half, half.copy(), 0
    low = sum(a[:, :, d] for d in lo_dirs)
    high = sum(a[:, :, d] for d in hi_dirs)
    collapsed = -(low + high)
    bad = np.abs(collapsed) < DEGENERATE_TOL * rowabs
    safe = np.where(bad, 1.0, collapsed)
    return np.where(bad, 0.5, -low / safe), np.where(bad, 0.5, -high / safe), int(bad.sum())


def build_interp(A: StencilField, mode: InterpMode = InterpMode.OPERATOR_INDUCED) -> InterpField:
    """
    세밀 연산자 A로부터 보간 가중치 P를 구성합니다.

    x-간선점(i 홀수, j 짝수)은 y 방향 결합을 중심으로 모아 1차원 문제로 풀고,
    y-간선점도 같은 방식으로 처리합니다. 셀 중심은 이미 구한 간선 가중치를 이용해
    네 모서리 조대점 가중치를 구합니다. 분모가 0에 가까운 점은 bilinear 가중치로 대체합니다.

    Args:
        A: 세밀 레벨 연산자 (5점 또는 9점)
        mode: 보간 방식

    Returns:
        InterpField: 조대점별 (nw, n, ne, w, e, sw, s, se) 가중치
    """
    a = A.as_nine()
    nx, ny = A.dims
    ncx, ncy = coarsen_dims((nx, ny))
    w = np.zeros((ncx, ncy, 8))
    rowabs = np.abs(a).sum(axis=2)
    fallback = 0

    # x-간선점: 세밀 (2a+1, 2b) → 조대 (a, b) [e], (a+1, b) [w]
    ax = a[1::2, 0::2]
    lx = ax.shape[0]
    ww, we, bad = _edge_weights(ax, rowabs[1::2, 0::2], (W, NW, SW), (E, NE, SE), mode)
    fallback += bad
    w[:lx, :, P_E] = ww
    kx = min(lx, ncx - 1)
    w[1:1 + kx, :, P_W] = we[:kx]

    # y-간선점: 세밀 (2a, 2b+1) → 조대 (a, b) [n], (a, b+1) [s]
    ay = a[0::2, 1::2]
    ly = ay.shape[1]
    ws, wn, bad = _edge_weights(ay, rowabs[0::2, 1::2], (S, SW, SE), (N, NW, NE), mode)
    fallback += bad
    w[:, :ly, P_N] = ws
    ky = min(ly, ncy - 1)
    w[:, 1:1 + ky, P_S] = wn[:, :ky]

    # 셀 중심: 세밀 (2a+1, 2b+1)
    ac = a[1::2, 1::2]
    if ac.size:
        if mode is InterpMode.BILINEAR:
            quarter = np.full(ac.shape[:2], 0.25)
            w_sw, w_se, w_nw, w_ne = quarter, quarter, quarter, quarter
        else:
            xwP = np.zeros((lx, ncy + 1))
            xeP = np.zeros((lx, ncy + 1))
            xwP[:, :ncy] = ww
            xeP[:, :ncy] = we
            ysP = np.zeros((ncx + 1, ly))
            ynP = np.zeros((ncx + 1, ly))
            ysP[:ncx] = ws
            ynP[:ncx] = wn
            # 중심 계수에서 행 합을 뺀 값 (비대각 성분 합의 부호 반전)
            cc = -ac[:, :, 1:].sum(axis=2)
            bad_c = np.abs(cc) < DEGENERATE_TOL * rowabs[1::2, 1::2]
            safe = np.where(bad_c, 1.0, cc)
            fallback += int(bad_c.sum())

            def corner(diag, side_x, edge_x, side_y, edge_y):
                val = -(ac[:, :, diag] + ac[:, :, side_x] * edge_x + ac[:, :, side_y] * edge_y) / safe
                return np.where(bad_c, 0.25, val)

            w_sw = corner(SW, W, ysP[0:lx], S, xwP[:, 0:ly])
            w_se = corner(SE, E, ysP[1:lx + 1], S, xeP[:, 0:ly])
            w_nw = corner(NW, W, ynP[0:lx], N, xwP[:, 1:ly + 1])
            w_ne = corner(NE, E, ynP[1:lx + 1], N, xeP[:, 1:ly + 1])
        w[:lx, :ly, P_NE] = w_sw
        w[1:1 + kx, :ly, P_NW] = w_se[:kx]
        w[:lx, 1:1 + ky, P_SE] = w_nw[:, :ky]
        w[1:1 + kx, 1:1 + ky, P_SW] = w_ne[:kx, :ky]

    if fallback:
        logger.warning("보간 분모가 0에 가까워 bilinear 가중치로 대체한 세밀점: %d개 (격자 %dx%d)",
                       fallback, nx, ny)

    return InterpField(
        weights=w,
        coarse_extent=LocalExtent(dims=(ncx, ncy), offset=(0, 0)),
        fine_dims=(nx, ny),
        mode=mode,
        fallback_points=fallback,
    )
