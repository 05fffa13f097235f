"""
풀이 컨트롤러: 직렬 V-사이클 풀이와 (선택적으로) 논리 랭크 재분배 시뮬레이션
"""
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from app.domain.controller.plan_controller import plan_controller
from app.domain.model.config_schema import RunConfig
from app.domain.model.grid_schema import ProcessorGrid, format_dims
from app.domain.model.stencil_schema import DiffusionProblem, MGHierarchy
from app.domain.service.multigrid_service import multigrid_service
from app.domain.service.perf_model_service import perf_model_service
from app.domain.service.sim_exec_service import sim_exec_service
from app.foundation.errors import PlanError, ReconciliationError

logger = logging.getLogger(__name__)

# 시뮬레이션 해와 직렬 해의 최대 상대 차이 허용치
SIM_TOLERANCE = 1e-12


def relative_max_diff(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    diff = float(np.max(np.abs(a - b))) if a.size else 0.0
    return diff / scale if scale > 0 else diff


class SolveController:

    def __init__(self):
        self.service = multigrid_service

    def problem(self, config: RunConfig, rhs: Any = 1.0) -> DiffusionProblem:
        return DiffusionProblem(grid=config.global_grid(), r=config.r, aspect=config.aspect, rhs=rhs)

    def hierarchy(self, config: RunConfig, problem: DiffusionProblem) -> MGHierarchy:
        return self.service.build_hierarchy(
            problem, config.nu1, config.nu2, config.interp, config.coarse_max, config.residual_correction)

    def run_procs(self, config: RunConfig) -> List[ProcessorGrid]:
        """config.plan이 있으면 그 경로를, 없으면 A* 최적 경로를 레벨별 프로세서 격자로 바꿉니다."""
        machine = perf_model_service.load_machine(config.machine)
        space = plan_controller.search_space(config, machine)
        if config.plan:
            path = plan_controller.service.evaluate_path(space, config.plan)
            if not path.is_valid:
                raise PlanError(f"시뮬레이션 경로가 열거 관계를 벗어납니다: {'; '.join(path.issues)}")
        else:
            path, _ = plan_controller.service.search_astar(space)
        logger.info("시뮬레이션 경로: %s", path.arrow_notation())
        return plan_controller.service.run_procs(space, path)

    def solve(self, config: RunConfig, rhs: Any = 1.0) -> Dict[str, Any]:
        """
        V(ν1, ν2) 사이클을 cycles번 실행해 잔차 노름과 감소율을 보고합니다.
        simulate가 켜져 있으면 같은 사이클을 논리 랭크 위에서 실행해 직렬 결과와 비교하고
        이벤트 로그를 모델 통신량과 조정합니다.

        Raises:
            NumericalError: 발산 또는 분해 실패
            ReconciliationError: 이벤트 로그가 모델과 다르거나 시뮬레이션 해가 직렬 해와 다른 경우
        """
        problem = self.problem(config, rhs)
        h = self.hierarchy(config, problem)
        b = self.service.rhs(problem)
        report = self.service.solve(h, b, config.cycles)
        doc: Dict[str, Any] = {
            "grid": format_dims(problem.grid.dims),
            "levels": h.num_levels,
            "coarsest": format_dims(h.levels[0].grid.dims),
            "r": config.r,
            "aspect": config.aspect,
            "nu1": config.nu1,
            "nu2": config.nu2,
            "interp": config.interp.value,
            "cycles": config.cycles,
            "residual_norms": report.residual_norms,
            "factors": report.factors,
            "max_factor": report.max_factor,
        }
        if config.simulate:
            doc["simulation"] = self.simulate(config, h, b, report.solution)
        return doc

    def simulate(self, config: RunConfig, h: MGHierarchy, b, serial: Optional[np.ndarray]) -> Dict[str, Any]:
        procs = self.run_procs(config)
        seed = config.seed if config.shuffle_ranks else None
        x, log, rec = sim_exec_service.simulate(h, procs, b, config.cycles, config.mode, seed)
        diff = relative_max_diff(serial, x.values)
        if diff > SIM_TOLERANCE:
            logger.warning("시뮬레이션 해가 직렬 해와 다릅니다: %.3e", diff)
            raise ReconciliationError(
                f"시뮬레이션 해와 직렬 해의 상대 차이 {diff:.3e}가 허용치 {SIM_TOLERANCE:g}를 넘습니다.", rec)
        total = log.total()
        return {
            "mode": config.mode.value,
            "procs": [format_dims(p.dims) for p in procs],
            "max_rel_diff": diff,
            "messages": total.messages,
            "bytes": total.bytes,
            "reconciled": rec.ok,
            "checked": rec.checked,
            "events": log.rows(),
        }


# 싱글톤 인스턴스
solve_controller = SolveController()
