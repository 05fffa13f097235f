"""
재분배 경로 계획 서비스

탐색 상태 (P, G)는 프로세서 격자 P가 전역 격자 G부터 병렬 조대화를 맡는다는 뜻입니다.
P는 최소 한 레벨(G)을 처리하고, 다음 격자가 트리거 조건을 만족하거나 최조대 격자가 될 때까지
조대화를 계속합니다. 그 격자 G_k에서 더 작은 프로세서 격자로 재분배가 일어납니다.
"""
import logging
import time
from math import ceil, prod
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.domain.model.grid_schema import GlobalGrid, LocalExtent, ProcessorGrid, format_dims
from app.domain.model.perf_schema import MachineParams, RedistMode
from app.domain.model.redist_schema import (
    HeuristicKind,
    HeuristicWeights,
    RedistPath,
    RedistState,
    SearchStats,
    TriggerThreshold,
)
from app.domain.repository.report_repository import parse_paths_text
from app.domain.service.perf_model_service import perf_model_service
from app.foundation.errors import PlanError
from app.foundation.grid import (
    agglomerate_blocks,
    build_grid_sequence,
    max_local_dims,
    nests,
    tiled_local_dims,
    tiling_survives,
)
from app.foundation.perf_model import ceil_log2, t_agglomerate, t_cgsolve
from app.foundation.search import SearchResult, astar, brute_force

logger = logging.getLogger(__name__)


def enumerate_coarse_grids(proc: ProcessorGrid, grid: GlobalGrid) -> List[ProcessorGrid]:
    """
    1×…×1 에서 시작해 응집 로컬 크기가 가장 큰 차원의 랭크 수를 두 배로 늘려 가며
    proc보다 작은 후보 프로세서 격자를 모두 나열합니다. 동률이면 낮은 차원을 먼저 늘립니다.

    Args:
        proc: 현재 프로세서 격자 (각 차원 상한)
        grid: 재분배가 일어나는 전역 조대 격자

    Returns:
        List[ProcessorGrid]: 후보 목록 (길이 ≤ ⌈log2 n_p⌉ + 1, proc 자신은 제외)
    """
    if proc.total == 1:
        return []
    cur = [1] * proc.ndim
    out: List[ProcessorGrid] = []
    while tuple(cur) != proc.dims:
        out.append(ProcessorGrid(dims=tuple(cur)))
        local = [ceil(n / p) for n, p in zip(grid.dims, cur)]
        dims = [d for d in range(proc.ndim) if cur[d] * 2 <= proc.dims[d]]
        if not dims:
            break
        d = max(dims, key=lambda k: (local[k], -k))
        cur[d] *= 2
    return out


def redistribution_trigger(local: Union[LocalExtent, Sequence[int]], threshold: TriggerThreshold) -> bool:
    """min_d n_d < min_extent 또는 Πn_d < min_points 이면 재분배"""
    dims = local.dims if isinstance(local, LocalExtent) else tuple(local)
    return min(dims) < threshold.min_extent or prod(dims) < threshold.min_points


class RedistSearchSpace:
    """
    재분배 탐색 그래프. 간선 비용은 두 재분배 사이 레벨들의 모델 시간과 응집 시간의 합이고,
    1×1 목표 상태의 종단 비용은 남은 직렬 레벨과 최조대 직접 풀이 시간입니다.
    """

    def __init__(self, fine: GlobalGrid, proc: ProcessorGrid, machine: MachineParams,
                 mode: RedistMode = RedistMode.NON_REDUNDANT,
                 threshold: TriggerThreshold = TriggerThreshold(),
                 nu1: int = 2, nu2: int = 1, coarse_max: int = 3,
                 heuristic: HeuristicKind = HeuristicKind.ADMISSIBLE,
                 weights: HeuristicWeights = HeuristicWeights()):
        if fine.ndim != proc.ndim:
            raise PlanError(f"격자 {fine}와 프로세서 격자 {proc}의 차원이 다릅니다.")
        self.grids = build_grid_sequence(fine, coarse_max)
        self.proc = proc
        self.machine = machine
        self.mode = mode
        self.threshold = threshold
        self.nu1 = nu1
        self.nu2 = nu2
        self.heuristic_kind = heuristic
        self.weights = weights
        self._edge_cache: Dict[Tuple, float] = {}

    @property
    def coarsest(self) -> int:
        return len(self.grids) - 1

    def state(self, proc: ProcessorGrid, depth: int) -> RedistState:
        return RedistState(proc=proc, grid=self.grids[depth], depth=depth)

    def start(self) -> RedistState:
        return self.state(self.proc, 0)

    def is_goal(self, s: RedistState) -> bool:
        return s.is_goal

    def order_key(self, s: RedistState) -> tuple:
        return s.proc.total, s.proc.dims, s.grid.dims, s.depth

    def local_dims(self, proc: ProcessorGrid, depth: int) -> Tuple[int, ...]:
        """초기 분할을 proc으로 묶은 타일의 depth 레벨 최대 폭"""
        return tiled_local_dims(self.grids[0].dims, self.proc.dims, proc.dims, depth)

    def tiles_survive(self, proc: ProcessorGrid, depth: int) -> bool:
        return tiling_survives(self.grids[0].dims, self.proc.dims, proc.dims, depth)

    def transition_depth(self, s: RedistState) -> int:
        """
        s의 프로세서 격자가 처리를 넘기는 레벨 k (레벨 s.depth..k-1 을 처리).
        트리거 전이라도 다음 레벨에서 타일이 비게 되면 그 레벨에서 재분배합니다.
        """
        if s.depth >= self.coarsest:
            return self.coarsest
        k = s.depth + 1
        while k < self.coarsest and not redistribution_trigger(
                max_local_dims(self.grids[k].dims, s.proc.dims), self.threshold) \
                and self.tiles_survive(s.proc, k + 1):
            k += 1
        return k

    def admits(self, proc: ProcessorGrid, target: ProcessorGrid, depth: int) -> bool:
        """
        target이 depth 레벨부터 처리할 수 있는지: 블록이 proc을 나누어떨어지게 묶고,
        target의 타일이 처리하는 첫 레벨의 조대 격자에서도 비지 않아야 합니다.
        """
        return nests(proc, target) and self.tiles_survive(target, depth + 1)

    def candidates(self, s: RedistState) -> List[ProcessorGrid]:
        if s.is_goal:
            return []
        k = self.transition_depth(s)
        if k == self.coarsest:
            return [ProcessorGrid.ones(s.proc.ndim)]
        return [p for p in enumerate_coarse_grids(s.proc, self.grids[k]) if self.admits(s.proc, p, k)]

    def edge_cost(self, s: RedistState, target: ProcessorGrid) -> float:
        key = (s.key, target.dims)
        if key not in self._edge_cache:
            k = self.transition_depth(s)
            levels = perf_model_service.processed_levels_cost(
                self.grids, s.proc, s.depth, k, self.machine, self.nu1, self.nu2, self.proc)
            block = agglomerate_blocks(s.proc, target, self.grids[k], self.local_dims(target, k))
            self._edge_cache[key] = levels + t_agglomerate(block, self.machine, self.mode)
        return self._edge_cache[key]

    def successors(self, s: RedistState):
        k = self.transition_depth(s)
        return [(self.state(p, k), self.edge_cost(s, p)) for p in self.candidates(s)]

    def goal_cost(self, s: RedistState) -> float:
        serial = perf_model_service.processed_levels_cost(
            self.grids, s.proc, s.depth, self.coarsest, self.machine, self.nu1, self.nu2, self.proc)
        return serial + t_cgsolve(self.grids[self.coarsest], None, self.machine, self.mode)

    def heuristic(self, s: RedistState) -> float:
        """
        기본값은 통신을 무시하고 현재 프로세서 격자의 로컬 크기로 남은 레벨을 계산하는 하한입니다.
        """
        if self.heuristic_kind is HeuristicKind.WEIGHTED:
            return (self.weights.grid * s.grid.size * self.machine.gamma
                    + self.weights.proc * ceil_log2(s.proc.total) * self.machine.alpha)
        free = self.machine.computation_only()
        remaining = perf_model_service.processed_levels_cost(
            self.grids, s.proc, s.depth, self.coarsest, free, self.nu1, self.nu2, self.proc)
        return remaining + t_cgsolve(self.grids[self.coarsest], None, free)


class RedistPlanService:

    def build_search_space(self, fine: GlobalGrid, proc: ProcessorGrid, machine: MachineParams,
                           **options) -> RedistSearchSpace:
        return RedistSearchSpace(fine, proc, machine, **options)

    def _to_path(self, result: SearchResult) -> RedistPath:
        return RedistPath(states=result.path, transition_costs=result.edge_costs, total=result.cost)

    def search_astar(self, space: RedistSearchSpace) -> Tuple[RedistPath, SearchStats]:
        started = time.perf_counter()
        result = astar(space)
        path = self._to_path(result)
        stats = SearchStats(expanded_nodes=result.expanded, generated_nodes=result.generated,
                            path_length=len(path.states), wall_time=time.perf_counter() - started)
        logger.info("A* 탐색: %s, 비용 %.6g s, 확장 %d, %.3f s",
                    path.arrow_notation(), path.total, stats.expanded_nodes, stats.wall_time)
        return path, stats

    def search_brute(self, space: RedistSearchSpace) -> Tuple[RedistPath, SearchStats]:
        started = time.perf_counter()
        result = brute_force(space)
        path = self._to_path(result)
        stats = SearchStats(expanded_nodes=result.expanded, generated_nodes=result.generated,
                            path_length=len(path.states), wall_time=time.perf_counter() - started)
        logger.info("전수 탐색: 비용 %.6g s, 방문 노드 %d, %.3f s",
                    path.total, stats.expanded_nodes, stats.wall_time)
        return path, stats

    def heuristic_h(self, space: RedistSearchSpace, s: RedistState) -> float:
        return space.heuristic(s)

    def path_cost_g(self, space: RedistSearchSpace, prefix: Sequence[RedistState]) -> float:
        """접두 경로의 누적 비용 (각 전이마다 레벨 비용 + 응집 비용)"""
        g = 0.0
        for s, nxt in zip(prefix, prefix[1:]):
            g += space.edge_cost(s, nxt.proc)
        return g

    def parse_path(self, text: str) -> List[Tuple[int, ...]]:
        """'64x32 -> 16x1 -> 1x1' → [(64, 32), (16, 1), (1, 1)]"""
        return parse_paths_text(text)[0][1]

    def evaluate_path(self, space: RedistSearchSpace, procs: Sequence[Tuple[int, ...]]) -> RedistPath:
        """
        명시적 프로세서 격자 순서의 모델 비용을 계산합니다. 마지막이 1×1이 아니면 1×1을 덧붙이고,
        열거 관계를 벗어난 전이는 issues에 기록합니다.

        Raises:
            PlanError: 차원이 다르거나, 차원별로 커지거나, 랭크 수가 줄지 않는 전이
        """
        grids = [ProcessorGrid(dims=tuple(p)) for p in procs]
        if grids[0] != space.proc:
            raise PlanError(f"경로의 시작 {grids[0]}가 초기 프로세서 격자 {space.proc}와 다릅니다.")
        if grids[-1].total != 1:
            grids.append(ProcessorGrid.ones(space.proc.ndim))
        issues: List[str] = []
        states = [space.start()]
        costs: List[float] = []
        g = 0.0
        for target in grids[1:]:
            cur = states[-1]
            if target.ndim != cur.proc.ndim or any(t > c for t, c in zip(target.dims, cur.proc.dims)) \
                    or target.total >= cur.proc.total:
                raise PlanError(f"{cur.proc} → {target}: 차원별로 줄어드는 전이가 아닙니다.")
            if target not in space.candidates(cur):
                issues.append(f"{cur.proc} → {target} @ {space.grids[space.transition_depth(cur)]}: 열거 후보가 아닙니다.")
            w = space.edge_cost(cur, target)
            costs.append(w)
            g += w
            states.append(space.state(target, space.transition_depth(cur)))
        last = space.goal_cost(states[-1])
        costs.append(last)
        path = RedistPath(states=states, transition_costs=costs, total=g + last, issues=issues)
        for issue in issues:
            logger.warning("경로 검증: %s", issue)
        return path

    def run_procs(self, space: RedistSearchSpace, path: RedistPath) -> List[ProcessorGrid]:
        """레벨별 실행 프로세서 격자 (세밀 → 조대 순, 최조대는 1×1)"""
        procs = []
        for d in range(len(space.grids)):
            active = [s for s in path.states if s.depth <= d]
            procs.append(active[-1].proc)
        return procs

    def enumeration_rows(self, space: RedistSearchSpace, s: Optional[RedistState] = None) -> List[dict]:
        """상태 s(기본: 초기 상태)의 재분배 후보와 응집 로컬 크기"""
        s = s or space.start()
        k = space.transition_depth(s)
        grid = space.grids[k]
        return [
            {"proc": format_dims(p.dims), "local": format_dims(max_local_dims(grid.dims, p.dims))}
            for p in space.candidates(s)
        ]


redist_plan_service = RedistPlanService()
