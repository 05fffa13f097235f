"""
탐색 알고리즘 벤치마크 서비스 (랭크 수 2^h 에 따른 전수 탐색 노드 수와 A* 확장 수)
"""
import logging
from typing import Dict, List, Optional, Tuple

from app.domain.model.config_schema import RunConfig, SweepKind
from app.domain.model.grid_schema import GlobalGrid, ProcessorGrid, format_dims
from app.domain.model.perf_schema import MachineParams
from app.domain.service.redist_plan_service import redist_plan_service

logger = logging.getLogger(__name__)

BENCH_COLUMNS = [
    "h", "n_p", "proc", "grid", "brute_nodes", "astar_expanded", "astar_generated",
    "astar_cost", "brute_cost", "path",
]


def wide_instance(h: int) -> Tuple[ProcessorGrid, GlobalGrid]:
    """
    2^h × 1 프로세서 격자와 넓은 격자 (4·2^h) × (2^(h+3)+1).
    모든 재분배가 y 방향 조대화로 트리거되어 탐색 트리 노드 수가 2^h 가 됩니다.
    """
    return ProcessorGrid(dims=(2 ** h, 1)), GlobalGrid(dims=(4 * 2 ** h, 2 ** (h + 3) + 1))


def weak_instance(h: int, local: Tuple[int, ...]) -> Tuple[ProcessorGrid, GlobalGrid]:
    """2^h 랭크를 x부터 번갈아 두 배로 늘린 프로세서 격자, 전역 격자 = local × proc"""
    dims = [1] * len(local)
    for k in range(h):
        dims[k % len(local)] *= 2
    return ProcessorGrid(dims=tuple(dims)), GlobalGrid(dims=tuple(n * p for n, p in zip(local, dims)))


def strong_instance(h: int, grid: Tuple[int, ...]) -> Tuple[ProcessorGrid, GlobalGrid]:
    """전역 격자를 고정하고 프로세서 격자를 차원마다 2^h 로 늘립니다."""
    return ProcessorGrid(dims=(2 ** h,) * len(grid)), GlobalGrid(dims=tuple(grid))


class BenchService:

    def instances(self, config: RunConfig) -> List[Tuple[int, ProcessorGrid, GlobalGrid]]:
        out = []
        for h in range(config.max_exp + 1):
            if config.sweep is SweepKind.WIDE:
                proc, grid = wide_instance(h)
            elif config.sweep is SweepKind.WEAK:
                proc, grid = weak_instance(h, config.local or config.grid)
            else:
                proc, grid = strong_instance(h, config.global_grid().dims)
                if any(p > n for p, n in zip(proc.dims, grid.dims)):
                    logger.info("강한 스케일링 sweep 중단: %s 랭크가 격자 %s보다 많습니다.", proc, grid)
                    break
            out.append((h, proc, grid))
        return out

    def search_bench(self, config: RunConfig, machine: MachineParams) -> List[Dict]:
        """
        sweep 종류에 따라 랭크 수를 두 배씩 늘리며 A*와 전수 탐색을 실행합니다.
        출력 행에는 실행 시간이 포함되지 않으므로 같은 설정이면 같은 결과가 나옵니다.
        """
        rows = []
        for h, proc, grid in self.instances(config):
            space = redist_plan_service.build_search_space(
                grid, proc, machine,
                mode=config.mode,
                threshold=config.threshold(),
                nu1=config.nu1,
                nu2=config.nu2,
                coarse_max=config.coarse_max,
                heuristic=config.heuristic,
                weights=config.heuristic_weights,
            )
            path, stats = redist_plan_service.search_astar(space)
            row = {
                "h": h,
                "n_p": proc.total,
                "proc": format_dims(proc.dims),
                "grid": format_dims(grid.dims),
                "brute_nodes": None,
                "astar_expanded": stats.expanded_nodes,
                "astar_generated": stats.generated_nodes,
                "astar_cost": path.total,
                "brute_cost": None,
                "path": path.arrow_notation(),
            }
            if config.brute:
                brute_path, brute_stats = redist_plan_service.search_brute(space)
                row["brute_nodes"] = brute_stats.expanded_nodes
                row["brute_cost"] = brute_path.total
            rows.append(row)
            logger.debug("bench h=%d %s: A* %d, brute %s", h, proc, stats.expanded_nodes, row["brute_nodes"])
        return rows


bench_service = BenchService()
