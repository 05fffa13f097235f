"""
성능 모델 서비스: 경로별 레벨 형상 구성, V-사이클 시간 예측, 모델이 의미하는 통신량 계산
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from app.domain.model.grid_schema import GlobalGrid, ProcBlock, ProcessorGrid
from app.domain.model.perf_schema import CostBreakdown, LevelCost, LevelShape, MachineParams, RedistMode, Traffic
from app.domain.model.sim_schema import CommKind
from app.domain.model.stencil_schema import StencilPattern
from app.domain.repository.machine_repository import DEFAULT_MACHINE_FILE, load_machine
from app.foundation import settings
from app.foundation.grid import LevelLayout, agglomerate_blocks, tiled_local_dims
from app.foundation.perf_model import (
    WORD_BYTES,
    carried_values,
    ceil_log2,
    exchange_traffic,
    gather_traffic,
    scatter_traffic,
    t_agglomerate,
    t_cgsolve,
    t_interp,
    t_residual,
    t_restrict,
    t_smooth,
)

logger = logging.getLogger(__name__)


def level_pattern(depth: int) -> StencilPattern:
    """세밀 레벨은 5점, Galerkin 레벨은 9점"""
    return StencilPattern.FIVE_POINT if depth == 0 else StencilPattern.NINE_POINT


class PerfModelService:

    def load_machine(self, path: Optional[str] = None) -> MachineParams:
        """경로가 없으면 REDIST_MACHINE_FILE, 그것도 없으면 내장 Blue Waters 파일을 사용합니다."""
        return load_machine(path or settings.default_machine_file() or DEFAULT_MACHINE_FILE)

    def level_shape(self, grid: GlobalGrid, proc: ProcessorGrid, depth: int,
                    nu1: int = 2, nu2: int = 1,
                    local_dims: Optional[Tuple[int, ...]] = None,
                    coarse_local_dims: Optional[Tuple[int, ...]] = None) -> LevelShape:
        """local_dims가 없으면 proc이 grid를 직접 나눈 타일의 최대 폭을 씁니다."""
        pattern = level_pattern(depth)
        if local_dims is None:
            local_dims = tiled_local_dims(grid.dims, proc.dims, proc.dims, 0)
        return LevelShape(
            local_dims=tuple(local_dims),
            coarse_local_dims=None if coarse_local_dims is None else tuple(coarse_local_dims),
            global_dims=grid.dims,
            proc_dims=proc.dims,
            stencil_points=pattern.points,
            colors=pattern.colors,
            nu1=nu1,
            nu2=nu2,
        )

    def coarse_shape(self, coarse: GlobalGrid, fine: LevelShape) -> LevelShape:
        """보간 식의 n^{l-1}: 세밀 레벨의 타일이 조대 격자에서 갖는 로컬 크기"""
        local_dims = fine.coarse_local_dims
        if local_dims is None:
            local_dims = tiled_local_dims(coarse.dims, fine.proc_dims, fine.proc_dims, 0)
        return fine.model_copy(update={"local_dims": tuple(local_dims), "global_dims": coarse.dims,
                                       "coarse_local_dims": None})

    def level_cost(self, shape: LevelShape, coarse: GlobalGrid, m: MachineParams, depth: int) -> LevelCost:
        """처리되는 한 레벨의 스무딩, 잔차, 제한, 보간 시간"""
        return LevelCost(
            depth=depth,
            grid=shape.global_dims,
            proc=shape.proc_dims,
            smooth=t_smooth(shape, m),
            residual=t_residual(shape, m),
            restrict=t_restrict(shape, m),
            interp=t_interp(shape, self.coarse_shape(coarse, shape), m),
        )

    def processed_levels_cost(self, grids: Sequence[GlobalGrid], proc: ProcessorGrid,
                              start: int, stop: int, m: MachineParams,
                              nu1: int = 2, nu2: int = 1,
                              origin: Optional[ProcessorGrid] = None) -> float:
        """
        레벨 start..stop-1 을 같은 프로세서 격자에서 처리하는 시간 (레벨 순서대로 누적).
        로컬 크기는 최세밀 격자를 origin(기본값 proc)으로 나눈 분할을 proc으로 묶은 타일의 최대 폭입니다.
        """
        origin = origin or proc
        fine = grids[0].dims
        total = 0.0
        for d in range(start, stop):
            shape = self.level_shape(grids[d], proc, d, nu1, nu2,
                                     tiled_local_dims(fine, origin.dims, proc.dims, d),
                                     tiled_local_dims(fine, origin.dims, proc.dims, d + 1))
            lc = self.level_cost(shape, grids[d + 1], m, d)
            total += lc.smooth + lc.residual + lc.restrict + lc.interp
        return total

    def level_shapes_for_path(self, procs: Sequence[ProcessorGrid], grids: Sequence[GlobalGrid],
                              nu1: int = 2, nu2: int = 1) -> List[LevelShape]:
        """
        레벨별 실행 프로세서 격자에서 레벨 형상을 만듭니다 (세밀 → 조대 순).
        로컬 크기는 procs[0]의 분할을 각 레벨의 프로세서 격자로 묶은 타일이 그 레벨에서 갖는 최대 폭입니다.
        """
        fine, origin = grids[0].dims, procs[0].dims
        last = len(grids) - 1
        return [
            self.level_shape(g, p, d, nu1, nu2, tiled_local_dims(fine, origin, p.dims, d),
                             tiled_local_dims(fine, origin, p.dims, d + 1) if d < last else None)
            for d, (g, p) in enumerate(zip(grids, procs))
        ]

    def blocks(self, shapes: Sequence[LevelShape]) -> Dict[int, ProcBlock]:
        """프로세서 격자가 바뀌는 레벨의 응집 블록 (응집 로컬 크기는 그 레벨의 형상)"""
        out = {}
        for d in range(1, len(shapes)):
            if shapes[d].proc_dims != shapes[d - 1].proc_dims:
                out[d] = agglomerate_blocks(
                    ProcessorGrid(dims=shapes[d - 1].proc_dims),
                    ProcessorGrid(dims=shapes[d].proc_dims),
                    GlobalGrid(dims=shapes[d].global_dims),
                    shapes[d].local_dims,
                )
        return out

    def rank_exchange_traffic(self, shape: LevelShape) -> Traffic:
        """
        한 랭크가 한 레벨에서 V-사이클 한 번 동안 보내는 교환 통신량 (t_exchange의 계산 방식).
        교환 횟수는 색마다 한 번씩 ν1 + ν2 스윕, 잔차 뒤 한 번, 보간 뒤 한 번입니다.
        """
        exchanges = shape.colors * (shape.nu1 + shape.nu2) + 2
        return Traffic(
            messages=exchanges * 2 * len(shape.local_dims),
            bytes=exchanges * 2 * sum(shape.local_dims) * WORD_BYTES,
        )

    def t_vcycle(self, shapes: Sequence[LevelShape], m: MachineParams,
                 mode: RedistMode = RedistMode.NON_REDUNDANT) -> CostBreakdown:
        """
        V-사이클 예측 시간. 레벨 1..L-1(세밀 쪽)의 스무딩, 잔차, 제한, 보간, 응집 시간과
        최조대 직접 풀이(그 레벨로의 응집 포함) 시간을 합산합니다.

        Args:
            shapes: 세밀 → 조대 순 레벨 형상 (마지막이 최조대)
            m: 머신 파라미터
            mode: 재분배 방식

        Returns:
            CostBreakdown: 항목별 합계와 레벨별 비용
        """
        blocks = self.blocks(shapes)
        coarsest = len(shapes) - 1
        levels: List[LevelCost] = []
        messages = 0
        nbytes = 0.0
        for d, shape in enumerate(shapes):
            block = blocks.get(d)
            if d == coarsest:
                cg = t_cgsolve(GlobalGrid(dims=shape.global_dims), block, m, mode)
                levels.append(LevelCost(depth=d, grid=shape.global_dims, proc=shape.proc_dims, cgsolve=cg))
            else:
                lc = self.level_cost(shape, GlobalGrid(dims=shapes[d + 1].global_dims), m, d)
                lc.agglomerate = t_agglomerate(block, m, mode)
                levels.append(lc)
                per_rank = self.rank_exchange_traffic(shape)
                messages += per_rank.messages
                nbytes += per_rank.bytes
            if block is not None:
                copies = 1 if mode is RedistMode.REDUNDANT else 2
                p = block.block_size
                messages += copies * ceil_log2(p)
                nbytes += copies * block.local_points * ((p - 1) / p) * WORD_BYTES
        return CostBreakdown.from_levels(levels, messages=messages, bytes=nbytes)

    def implied_traffic(self, layouts: Sequence[LevelLayout], mode: RedistMode,
                        nu1: int = 2, nu2: int = 1) -> Dict[Tuple[int, CommKind], Traffic]:
        """
        실제 타일링에서 모델의 교환/gather/scatter 항이 의미하는 레벨·종류별 정확한 통신량.
        교환은 이웃 면마다 메시지 하나와 면의 값 (앞 차원 할로에서 실려 가는 모서리 값 포함) 입니다.
        """
        expected: Dict[Tuple[int, CommKind], Traffic] = {}

        def add(key, t: Traffic) -> None:
            if t.messages or t.bytes:
                expected[key] = expected.get(key, Traffic()) + t

        coarsest = len(layouts) - 1
        gather_kind = CommKind.ALLGATHER if mode is RedistMode.REDUNDANT else CommKind.GATHER
        for lay in layouts:
            if lay.depth < coarsest:
                colors = level_pattern(lay.depth).colors
                per_exchange = exchange_traffic(lay.tasks, lay.proc.dims)
                add((lay.depth, CommKind.EXCHANGE), per_exchange.scaled(colors * (nu1 + nu2) + 2))
            if lay.redistributed:
                for coord in lay.proc.coords():
                    members = [lay.restricted[c] for c in lay.members(coord)]
                    add((lay.depth, gather_kind), gather_traffic(members, mode))
                    add((lay.depth, CommKind.SCATTER), scatter_traffic(members, mode))
        return expected

    def rank_exchange_bounds(self, layouts: Sequence[LevelLayout],
                             nu1: int = 2, nu2: int = 1) -> Dict[int, Traffic]:
        """
        레벨별 한 랭크의 V-사이클당 교환 통신량 상한.
        t_vcycle이 가정하는 2·D 메시지와 2·Σn_d 값에 차원 순서 교환이 싣는 모서리 값을 더합니다.
        로컬 크기는 그 레벨 태스크 영역의 최대 폭입니다.
        """
        bounds = {}
        for lay in layouts[:-1]:
            shape = self.level_shape(lay.grid, lay.proc, lay.depth, nu1, nu2, lay.widest())
            model = self.rank_exchange_traffic(shape)
            exchanges = shape.colors * (nu1 + nu2) + 2
            corners = 2 * sum(carried_values(shape.local_dims, axis) for axis in range(len(shape.local_dims)))
            bounds[lay.depth] = model + Traffic(bytes=exchanges * corners * WORD_BYTES)
        return bounds


perf_model_service = PerfModelService()
