"""
재분배 계획 컨트롤러: RunConfig를 받아 계획, 경로 비교, 탐색 벤치마크 문서를 만듭니다.
"""
import logging
from typing import Any, Dict, List, Sequence, Tuple

from app.domain.model.config_schema import RunConfig
from app.domain.model.grid_schema import format_dims
from app.domain.model.perf_schema import MachineParams
from app.domain.model.redist_schema import RedistPath
from app.domain.service.bench_service import bench_service
from app.domain.service.perf_model_service import perf_model_service
from app.domain.service.redist_plan_service import RedistSearchSpace, redist_plan_service

logger = logging.getLogger(__name__)

STATE_COLUMNS = ["step", "proc", "grid", "depth", "cost"]
PATH_COLUMNS = ["label", "path", "total", "rank", "valid", "issues"]


def machine_doc(m: MachineParams) -> Dict[str, float]:
    return {"alpha": m.alpha, "beta": m.beta, "gamma": m.gamma}


def state_rows(path: RedistPath) -> List[Dict[str, Any]]:
    """경로의 상태별 행. cost는 그 상태에서 나가는 전이 비용(마지막은 종단 비용)입니다."""
    return [
        {"step": i, "proc": format_dims(s.proc.dims), "grid": format_dims(s.grid.dims),
         "depth": s.depth, "cost": c}
        for i, (s, c) in enumerate(zip(path.states, path.transition_costs))
    ]


class PlanController:

    def __init__(self):
        self.service = redist_plan_service

    def search_space(self, config: RunConfig, machine: MachineParams) -> RedistSearchSpace:
        return self.service.build_search_space(
            config.global_grid(), config.proc_grid(), machine,
            mode=config.mode,
            threshold=config.threshold(),
            nu1=config.nu1,
            nu2=config.nu2,
            coarse_max=config.coarse_max,
            heuristic=config.heuristic,
            weights=config.heuristic_weights,
        )

    def plan(self, config: RunConfig) -> Dict[str, Any]:
        """
        초기 상태의 재분배 후보 열거와 A* 최적 경로, 전이별 모델 비용, 탐색 통계를 담은 문서

        Args:
            config: 실행 설정

        Returns:
            Dict[str, Any]: 키 순서가 고정된 계획 문서
        """
        machine = perf_model_service.load_machine(config.machine)
        space = self.search_space(config, machine)
        path, stats = self.service.search_astar(space)
        start = space.start()
        procs = self.service.run_procs(space, path)
        shapes = perf_model_service.level_shapes_for_path(procs, space.grids, config.nu1, config.nu2)
        breakdown = perf_model_service.t_vcycle(shapes, machine, config.mode)
        doc: Dict[str, Any] = {
            "grid": format_dims(space.grids[0].dims),
            "proc": format_dims(space.proc.dims),
            "mode": config.mode.value,
            "machine": machine_doc(machine),
            "levels": len(space.grids),
            "message": "no redistribution needed" if start.is_goal else "",
            "transition_grid": format_dims(space.grids[space.transition_depth(start)].dims),
            "enumeration": self.service.enumeration_rows(space, start),
            "path": path.arrow_notation(),
            "states": state_rows(path),
            "total": path.total,
            "breakdown": breakdown.model_dump(exclude={"levels"}),
            "stats": stats.model_dump(exclude={"wall_time"}),
        }
        logger.info("계획: %s (%.6g s)", doc["path"], path.total)
        return doc

    def evaluate_paths(self, config: RunConfig,
                       paths: Sequence[Tuple[str, List[Tuple[int, ...]]]]) -> Dict[str, Any]:
        """
        명시적 경로들의 모델 비용을 계산하고 비용 순위를 매깁니다.
        열거 후보가 아닌 전이를 가진 경로는 valid=False로 표시되지만 비용은 계산됩니다.

        Raises:
            PlanError: 구조적으로 잘못된 경로 (시작 격자 불일치, 줄지 않는 전이)
        """
        machine = perf_model_service.load_machine(config.machine)
        space = self.search_space(config, machine)
        evaluated = [(label, self.service.evaluate_path(space, procs)) for label, procs in paths]
        order = sorted(range(len(evaluated)), key=lambda i: evaluated[i][1].total)
        ranks = {i: r + 1 for r, i in enumerate(order)}
        rows = [
            {"label": label, "path": path.arrow_notation(), "total": path.total, "rank": ranks[i],
             "valid": path.is_valid, "issues": "; ".join(path.issues)}
            for i, (label, path) in enumerate(evaluated)
        ]
        return {
            "grid": format_dims(space.grids[0].dims),
            "proc": format_dims(space.proc.dims),
            "mode": config.mode.value,
            "machine": machine_doc(machine),
            "cheapest": rows[order[0]]["label"],
            "most_expensive": rows[order[-1]]["label"],
            "all_valid": all(r["valid"] for r in rows),
            "paths": rows,
        }

    def search_bench(self, config: RunConfig) -> Dict[str, Any]:
        machine = perf_model_service.load_machine(config.machine)
        rows = bench_service.search_bench(config, machine)
        return {"sweep": config.sweep.value, "mode": config.mode.value, "rows": rows}


# 싱글톤 인스턴스
plan_controller = PlanController()
