"""
격자 조대화, 블록 분할, 프로세서 블록 응집을 위한 격자 산술 모듈

모든 함수는 불변 값만 다루며 부작용이 없습니다.
"""
from functools import lru_cache
from itertools import product
from math import ceil, prod
from typing import List, Optional, Sequence, Tuple

from app.domain.model.grid_schema import GlobalGrid, LocalExtent, ProcBlock, ProcessorGrid


def coarsen_dims(dims: Sequence[int]) -> Tuple[int, ...]:
    return tuple((n - 1) // 2 + 1 for n in dims)


def coarsen_grid(g: GlobalGrid) -> GlobalGrid:
    """
    표준 2배 조대화를 적용한 조대 격자를 반환합니다.

    Args:
        g: 세밀 격자

    Returns:
        GlobalGrid: N_c = ⌊(N - 1)/2⌋ + 1 을 차원별로 적용한 격자

    Raises:
        ValueError: N_d < 3 인 차원이 있어 조대화할 수 없는 경우
    """
    if any(n < 3 for n in g.dims):
        raise ValueError(f"N_d < 3 인 격자는 조대화할 수 없습니다: {g}")
    return GlobalGrid(dims=coarsen_dims(g.dims))


def is_coarsest(g: GlobalGrid, coarse_max: int = 3) -> bool:
    """직접 풀이 대상 격자인지 (더 조대화하지 않는지) 판정합니다."""
    return max(g.dims) <= coarse_max or min(g.dims) < 3


def build_grid_sequence(g: GlobalGrid, coarse_max: int = 3) -> List[GlobalGrid]:
    """
    세밀 격자에서 최조대 격자까지의 격자 목록 (세밀 → 조대 순)
    """
    grids = [g]
    while not is_coarsest(grids[-1], coarse_max):
        grids.append(coarsen_grid(grids[-1]))
    return grids


def split_1d(n: int, p: int, c: int) -> Tuple[int, int]:
    """
    n개 점을 p개 랭크로 나눌 때 c번째 랭크의 (시작, 크기).
    앞쪽 (n mod p)개 랭크가 ⌈n/p⌉개, 나머지가 ⌊n/p⌋개를 갖습니다.
    """
    base, rem = divmod(n, p)
    size = base + 1 if c < rem else base
    start = c * base + min(c, rem)
    return start, size


def partition(g: GlobalGrid, p: ProcessorGrid, rank_coord: Sequence[int]) -> LocalExtent:
    """
    준균등 블록 분할로 랭크의 로컬 영역을 계산합니다.

    Args:
        g: 전역 격자
        p: 프로세서 격자
        rank_coord: 랭크 좌표

    Returns:
        LocalExtent: 해당 랭크의 로컬 영역 (p_d > N_d 이면 빈 영역일 수 있음)
    """
    if len(rank_coord) != p.ndim or any(not 0 <= c < pd for c, pd in zip(rank_coord, p.dims)):
        raise ValueError(f"랭크 좌표 {tuple(rank_coord)}가 프로세서 격자 {p} 범위를 벗어났습니다.")
    parts = [split_1d(n, pd, c) for n, pd, c in zip(g.dims, p.dims, rank_coord)]
    return LocalExtent(dims=tuple(s for _, s in parts), offset=tuple(o for o, _ in parts))


def max_local_dims(dims: Sequence[int], procs: Sequence[int]) -> Tuple[int, ...]:
    """가장 큰 로컬 영역의 크기 ⌈N_d / p_d⌉"""
    return tuple(ceil(n / p) for n, p in zip(dims, procs))


def agglomerate_blocks(fine: ProcessorGrid, coarse: ProcessorGrid, g: GlobalGrid,
                       local_dims: Optional[Sequence[int]] = None) -> ProcBlock:
    """
    세밀 프로세서 격자를 조대 프로세서 격자로 응집할 때의 블록 정보.

    Args:
        fine: 응집 전 프로세서 격자
        coarse: 응집 후 프로세서 격자
        g: 응집이 일어나는 전역 조대 격자
        local_dims: 응집 후 로컬 크기 (없으면 ⌈N/p_coarse⌉)

    Returns:
        ProcBlock: p_block = Π⌈p_fine/p_coarse⌉, n_block = Πlocal_dims

    Raises:
        ValueError: coarse가 fine보다 차원별로 크지 않은 경우가 아닐 때
    """
    if fine.ndim != coarse.ndim or any(c > f for c, f in zip(coarse.dims, fine.dims)):
        raise ValueError(f"조대 프로세서 격자 {coarse}는 {fine} 이하여야 합니다.")
    per_dim = tuple(ceil(f / c) for f, c in zip(fine.dims, coarse.dims))
    return ProcBlock(
        ranks_per_dim=per_dim,
        block_size=prod(per_dim),
        local_points=prod(local_dims if local_dims is not None else max_local_dims(g.dims, coarse.dims)),
    )


def block_members(fine: ProcessorGrid, coarse: ProcessorGrid,
                  coarse_coord: Sequence[int]) -> List[Tuple[int, ...]]:
    """
    조대 랭크 하나에 대응하는 세밀 랭크 좌표 목록 (사전식 순서, 첫 원소가 루트)
    """
    per_dim = [ceil(f / c) for f, c in zip(fine.dims, coarse.dims)]
    ranges = [range(cc * k, min((cc + 1) * k, f))
              for cc, k, f in zip(coarse_coord, per_dim, fine.dims)]
    return list(product(*ranges))


def coarsen_extent(ext: LocalExtent) -> LocalExtent:
    """
    세밀 영역이 소유한 주입점(짝수 인덱스)으로 유도되는 조대 영역.
    [a0, a1) → [⌈a0/2⌉, ⌈a1/2⌉)
    """
    lo = tuple((a + 1) // 2 for a in ext.offset)
    hi = tuple((a + 1) // 2 for a in ext.stop)
    return LocalExtent(dims=tuple(h - l for l, h in zip(lo, hi)), offset=lo)


def agglomerate_extent(extents: Sequence[LocalExtent]) -> LocalExtent:
    """
    블록 구성원 영역들의 합집합 (텐서곱 블록이므로 직사각형). 빈 영역은 무시합니다.
    """
    ndim = len(extents[0].dims)
    filled = [e for e in extents if not e.is_empty]
    if not filled:
        return LocalExtent(dims=(0,) * ndim, offset=extents[0].offset)
    lo = tuple(min(e.offset[d] for e in filled) for d in range(ndim))
    hi = tuple(max(e.stop[d] for e in filled) for d in range(ndim))
    union = LocalExtent(dims=tuple(h - l for l, h in zip(lo, hi)), offset=lo)
    if sum(e.size for e in filled) != union.size:
        raise ValueError("블록 구성원 영역이 직사각형 합집합을 이루지 않습니다.")
    return union


@lru_cache(maxsize=4096)
def tile_bounds(n: int, p0: int, p: int, depth: int = 0) -> Tuple[int, ...]:
    """
    p0개 랭크의 준균등 분할을 연속한 ⌈p0/p⌉개씩 묶은 p개 타일의 경계를 depth번 조대화한 좌표로 반환합니다.
    조대화는 경계마다 ⌈a / 2^depth⌉ 이며 coarsen_extent를 depth번 적용한 결과와 같습니다.
    """
    group = ceil(p0 / p)
    step = 2 ** depth
    return tuple(-(-split_1d(n, p0, min(c * group, p0))[0] // step) for c in range(p + 1))


@lru_cache(maxsize=4096)
def tiled_local_dims(fine_dims: Tuple[int, ...], origin: Tuple[int, ...], procs: Tuple[int, ...],
                     depth: int) -> Tuple[int, ...]:
    """
    처음 프로세서 격자 origin의 분할을 procs로 묶은 타일이 depth 레벨에서 갖는 차원별 최대 폭

    Args:
        fine_dims: 최세밀 전역 격자 크기
        origin: 최세밀 레벨을 분할한 프로세서 격자
        procs: 현재 프로세서 격자 (차원별로 origin을 나누어떨어지게 묶은 격자)
        depth: 레벨 (세밀 격자가 0)
    """
    out = []
    for n, q, p in zip(fine_dims, origin, procs):
        bounds = tile_bounds(n, q, p, depth)
        out.append(max(b - a for a, b in zip(bounds, bounds[1:])))
    return tuple(out)


@lru_cache(maxsize=4096)
def tiling_survives(fine_dims: Tuple[int, ...], origin: Tuple[int, ...], procs: Tuple[int, ...],
                    depth: int) -> bool:
    """최세밀 레벨에서 비어 있지 않던 타일이 depth 레벨에서도 모두 비어 있지 않은지"""
    for n, q, p in zip(fine_dims, origin, procs):
        top = tile_bounds(n, q, p, 0)
        low = tile_bounds(n, q, p, depth)
        for c in range(p):
            if top[c + 1] > top[c] and low[c + 1] == low[c]:
                return False
    return True


def nests(fine: ProcessorGrid, coarse: ProcessorGrid) -> bool:
    """coarse가 차원별로 fine을 나누어떨어지게 묶는지 (블록 크기가 모두 같음)"""
    return fine.ndim == coarse.ndim and all(f % c == 0 for f, c in zip(fine.dims, coarse.dims))
