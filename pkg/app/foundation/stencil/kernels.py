"""
스텐실 기반 멀티그리드 커널 (행렬-벡터 곱, 유색 Gauss-Seidel, 잔차, 제한, 보간 보정)

모든 커널은 폭 1의 할로(halo)를 가진 패딩 배열 위에서 동작하며 전역 인덱스 오프셋을
인자로 받습니다. 직렬 풀이는 오프셋 (0, 0)의 전체 격자 패치를, 논리 랭크는 자신의 로컬
패치를 넘깁니다. 같은 격자점에서는 두 경우 모두 동일한 순서로 연산합니다.
"""
from typing import Sequence, Tuple

import numpy as np

from app.foundation.errors import NumericalError
from app.foundation.stencil.compass import (
    INTERP_OFFSETS,
    P_E,
    P_N,
    P_NE,
    P_NW,
    P_S,
    P_SE,
    P_SW,
    P_W,
    STENCIL_OFFSETS,
)


def pad(values: np.ndarray) -> np.ndarray:
    """폭 1의 0 할로를 두른 배열 (Dirichlet 경계)"""
    return np.pad(np.asarray(values, dtype=float), 1)


def color_map(lo: Sequence[int], shape: Tuple[int, int], n_colors: int) -> np.ndarray:
    """
    전역 인덱스 패리티로 정해지는 격자점 색상.
    2색: (i + j) mod 2, 4색: (i mod 2) + 2 (j mod 2)
    """
    i = lo[0] + np.arange(shape[0])[:, None]
    j = lo[1] + np.arange(shape[1])[None, :]
    if n_colors == 2:
        return (i + j) % 2
    if n_colors == 4:
        return (i % 2) + 2 * (j % 2)
    raise ValueError(f"지원하지 않는 색 수입니다: {n_colors}")


def check_center(coef: np.ndarray) -> None:
    if coef.size and np.any(coef[..., 0] == 0.0):
        raise NumericalError("중심 계수 C가 0인 격자점이 있습니다.")


def offdiag_product(coef: np.ndarray, xp: np.ndarray) -> np.ndarray:
    """비대각 성분과 이웃 값의 곱의 합 (W, E, S, N, SW, SE, NW, NE 순)"""
    nx, ny = coef.shape[:2]
    acc = np.zeros((nx, ny))
    for k in range(1, coef.shape[2]):
        dx, dy = STENCIL_OFFSETS[k]
        acc += coef[:, :, k] * xp[1 + dx:1 + dx + nx, 1 + dy:1 + dy + ny]
    return acc


def apply_stencil(coef: np.ndarray, xp: np.ndarray) -> np.ndarray:
    return coef[:, :, 0] * xp[1:-1, 1:-1] + offdiag_product(coef, xp)


def residual_patch(coef: np.ndarray, xp: np.ndarray, b: np.ndarray) -> np.ndarray:
    """r = b - A x (할로 값은 xp에 채워져 있어야 함)"""
    return b - apply_stencil(coef, xp)


def relax_color(coef: np.ndarray, xp: np.ndarray, b: np.ndarray,
                colors: np.ndarray, color: int) -> None:
    """한 색상의 격자점을 제자리에서 갱신합니다."""
    off = offdiag_product(coef, xp)
    mask = colors == color
    interior = xp[1:-1, 1:-1]
    interior[mask] = (b[mask] - off[mask]) / coef[:, :, 0][mask]


def restrict_patch(weights: np.ndarray, rp: np.ndarray,
                   fine_lo: Sequence[int], coarse_lo: Sequence[int]) -> np.ndarray:
    """
    b_c = P^T r 를 조대 영역에 대해 계산합니다.

    Args:
        weights: 조대 영역의 보간 가중치 (m_x, m_y, 8)
        rp: 세밀 잔차의 패딩 배열 (내부 시작 전역 인덱스 fine_lo)
        fine_lo: 세밀 패치의 전역 시작 인덱스
        coarse_lo: 조대 영역의 전역 시작 인덱스

    Returns:
        np.ndarray: 조대 영역의 우변 (m_x, m_y)
    """
    mx, my = weights.shape[:2]
    bx = 1 + 2 * coarse_lo[0] - fine_lo[0]
    by = 1 + 2 * coarse_lo[1] - fine_lo[1]
    if mx == 0 or my == 0:
        return np.zeros((mx, my))
    if bx < 1 or by < 1 or bx + 2 * mx > rp.shape[0] or by + 2 * my > rp.shape[1]:
        raise ValueError("제한 연산에 필요한 세밀 잔차가 패치 범위를 벗어났습니다.")
    out = rp[bx:bx + 2 * mx - 1:2, by:by + 2 * my - 1:2].copy()
    for k in range(8):
        dx, dy = INTERP_OFFSETS[k]
        out += weights[:, :, k] * rp[bx + dx:bx + dx + 2 * mx - 1:2, by + dy:by + dy + 2 * my - 1:2]
    return out


def _parity_slices(lo: int, n: int, parity: int, coarse_lo: int):
    """전역 패리티가 parity인 로컬 인덱스 슬라이스와 대응 조대 패딩 인덱스 시작점"""
    first = (parity - lo) % 2
    count = len(range(first, n, 2))
    gi = lo + first
    coarse_start = (gi - parity) // 2 - coarse_lo + 1
    return slice(first, n, 2), count, coarse_start


def interp_correct_patch(xp: np.ndarray, r: np.ndarray, center: np.ndarray,
                         wp: np.ndarray, xcp: np.ndarray,
                         fine_lo: Sequence[int], coarse_lo: Sequence[int],
                         residual_correction: bool = True) -> None:
    """
    u ← u + I u_c + r/C 를 세밀 패치 내부에 제자리로 적용합니다.

    주입점은 u += u_c, x-간선점은 u + ω_w u_w + ω_e u_e + r/C,
    y-간선점은 u + ω_s u_s + ω_n u_n + r/C,
    셀 중심은 u + ω_sw u_sw + ω_se u_se + ω_nw u_nw + ω_ne u_ne + r/C 입니다.

    Args:
        xp: 세밀 해의 패딩 배열 (내부만 갱신)
        r: 세밀 잔차 (내부 크기)
        center: 세밀 연산자 중심 계수 (내부 크기)
        wp: 조대 가중치의 패딩 배열 (내부 시작 coarse_lo)
        xcp: 조대 보정의 패딩 배열 (내부 시작 coarse_lo)
        fine_lo: 세밀 패치 전역 시작 인덱스
        coarse_lo: 조대 패치 전역 시작 인덱스
        residual_correction: r/C 항 포함 여부
    """
    x = xp[1:-1, 1:-1]
    nx, ny = x.shape
    for px in (0, 1):
        si, ci, ai = _parity_slices(fine_lo[0], nx, px, coarse_lo[0])
        if ci == 0:
            continue
        for py in (0, 1):
            sj, cj, aj = _parity_slices(fine_lo[1], ny, py, coarse_lo[1])
            if cj == 0:
                continue
            I0 = slice(ai, ai + ci)
            I1 = slice(ai + 1, ai + 1 + ci)
            J0 = slice(aj, aj + cj)
            J1 = slice(aj + 1, aj + 1 + cj)
            if px == 0 and py == 0:
                x[si, sj] = x[si, sj] + xcp[I0, J0]
                continue
            if px == 1 and py == 0:
                upd = (x[si, sj]
                       + wp[I0, J0, P_E] * xcp[I0, J0]
                       + wp[I1, J0, P_W] * xcp[I1, J0])
            elif px == 0 and py == 1:
                upd = (x[si, sj]
                       + wp[I0, J0, P_N] * xcp[I0, J0]
                       + wp[I0, J1, P_S] * xcp[I0, J1])
            else:
                upd = (x[si, sj]
                       + wp[I0, J0, P_NE] * xcp[I0, J0]
                       + wp[I1, J0, P_NW] * xcp[I1, J0]
                       + wp[I0, J1, P_SE] * xcp[I0, J1]
                       + wp[I1, J1, P_SW] * xcp[I1, J1])
            if residual_correction:
                upd = upd + r[si, sj] / center[si, sj]
            x[si, sj] = upd


def pad_weights(weights: np.ndarray) -> np.ndarray:
    return np.pad(weights, ((1, 1), (1, 1), (0, 0)))
