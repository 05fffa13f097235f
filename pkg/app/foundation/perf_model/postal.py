"""
멀티그리드 V-사이클 구성 요소별 포스탈 모델 시간 식

모든 격자 값은 8바이트 배정밀도로 가정합니다.
"""
from math import prod
from typing import Optional, Sequence

from app.domain.model.grid_schema import GlobalGrid, ProcBlock
from app.domain.model.perf_schema import LevelShape, MachineParams, RedistMode

WORD_BYTES = 8


def ceil_log2(n: int) -> int:
    """⌈log2 n⌉ (n ≥ 1)"""
    return (n - 1).bit_length()


def t_exchange(local_dims: Sequence[int], m: MachineParams) -> float:
    """폭 1 할로 교환: 2·D·α + 2·Σn_d·8·β"""
    d = len(local_dims)
    return 2 * d * m.alpha + 2 * sum(local_dims) * WORD_BYTES * m.beta


def t_smooth(shape: LevelShape, m: MachineParams) -> float:
    """n_c 색 Gauss-Seidel: 2·n_s·Πn_d·(ν1+ν2)·γ + n_c·(ν1+ν2)·T_exchange"""
    sweeps = shape.nu1 + shape.nu2
    compute = 2 * shape.stencil_points * prod(shape.local_dims) * sweeps * m.gamma
    return compute + shape.colors * sweeps * t_exchange(shape.local_dims, m)


def t_residual(shape: LevelShape, m: MachineParams) -> float:
    return 2 * shape.stencil_points * prod(shape.local_dims) * m.gamma + t_exchange(shape.local_dims, m)


def t_restrict(shape: LevelShape, m: MachineParams) -> float:
    # 제한 연산은 할로 통신이 필요 없음
    return 2 * shape.stencil_points * prod(shape.local_dims) * m.gamma


def interp_flops(fine_local: Sequence[int], coarse_local: Sequence[int]) -> int:
    """보간 보정의 flop 수 (2D/3D)"""
    nf = prod(fine_local)
    nc = prod(coarse_local)
    if len(fine_local) == 2:
        return nf + 20 * nc + 6 * sum(coarse_local)
    n0, n1, n2 = coarse_local
    return nf + 60 * nc + 15 * n0 * n2 + 6 * n1 * n2 + n2


def t_interp(shape_f: LevelShape, shape_c: LevelShape, m: MachineParams) -> float:
    """
    보간 보정 시간.
    2D: (Πn^l + 20·Πn^{l-1} + 6·Σn^{l-1})·γ + T_exchange
    3D: (Πn^l + 60·Πn^{l-1} + 15·n_0 n_2 + 6·n_1 n_2 + n_2)·γ + T_exchange
    """
    return interp_flops(shape_f.local_dims, shape_c.local_dims) * m.gamma + t_exchange(shape_f.local_dims, m)


def t_gather(block: ProcBlock, m: MachineParams) -> float:
    """블록 내 gather: ⌈log2 p_block⌉·α + n_block·((p_block − 1)/p_block)·8·β"""
    p = block.block_size
    return ceil_log2(p) * m.alpha + block.local_points * ((p - 1) / p) * WORD_BYTES * m.beta


def t_agglomerate(block: Optional[ProcBlock], m: MachineParams, mode: RedistMode) -> float:
    """
    재분배 비용. 재분배가 없으면 0, Redundant는 gather만, NonRedundant는 gather + 같은 크기의 scatter
    """
    if block is None:
        return 0.0
    gather = t_gather(block, m)
    scatter = 0.0 if mode is RedistMode.REDUNDANT else gather
    return gather + scatter


def cholesky_solve_flops(coarse: GlobalGrid) -> int:
    return coarse.size ** 2


def t_cgsolve(coarse: GlobalGrid, block: Optional[ProcBlock], m: MachineParams,
              mode: RedistMode = RedistMode.NON_REDUNDANT) -> float:
    """최조대 직접 풀이: T_agglomerate^0 + (ΠN_d^0)²·γ"""
    return t_agglomerate(block, m, mode) + cholesky_solve_flops(coarse) * m.gamma
