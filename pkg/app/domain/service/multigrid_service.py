"""
직렬 기준 멀티그리드 풀이 서비스 (이산화, 스무딩, 전달 연산, Galerkin 조대화, V-사이클)
"""
import logging
from typing import List, Optional, TextIO

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from app.domain.model.grid_schema import GlobalGrid
from app.domain.model.stencil_schema import (
    DiffusionProblem,
    GridFunction,
    InterpField,
    InterpMode,
    MGHierarchy,
    MGLevel,
    StencilField,
    StencilPattern,
    whole_extent,
)
from app.domain.model.solve_schema import ConvergenceReport
from app.domain.repository.hierarchy_repository import read_hierarchy, write_hierarchy
from app.foundation.errors import ConfigError, NumericalError
from app.foundation.grid import build_grid_sequence
from app.foundation.stencil import (
    build_interp as _build_interp,
    check_center,
    color_map,
    galerkin as _galerkin,
    interp_correct_patch,
    pad,
    pad_weights,
    relax_color,
    residual_patch,
    restrict_patch,
    stencil_to_csr,
)
from app.foundation.stencil.compass import C, E, N, S, W

logger = logging.getLogger(__name__)

DIVERGENCE_STREAK = 3


class MultigridService:
    """
    BoxMG 방식의 변분(variational) 멀티그리드 직렬 구현
    """

    def discretize(self, problem: DiffusionProblem) -> StencilField:
        """
        -∇·(D∇u) = f 의 5점 유한체적 이산화 (동차 Dirichlet)

        Args:
            problem: 확산 문제 (D = diag(1/r, r))

        Returns:
            StencilField: W = E = -(1/r)·h_y/h_x, S = N = -r·h_x/h_y, C = -(W+E+S+N)

        Raises:
            ValueError: N_d < 3 인 격자
        """
        nx, ny = problem.grid.dims
        if nx < 3 or ny < 3:
            raise ValueError(f"이산화하려면 각 차원이 3 이상이어야 합니다: {problem.grid}")
        hx, hy = problem.spacings()
        r = problem.r
        west = -(1.0 / r) * hy / hx
        south = -r * hx / hy
        coef = np.zeros((nx, ny, 5))
        coef[:, :, W] = west
        coef[:, :, E] = west
        coef[:, :, S] = south
        coef[:, :, N] = south
        coef[:, :, C] = -(coef[:, :, W] + coef[:, :, E] + coef[:, :, S] + coef[:, :, N])
        # 경계 연결 제거 (중심 계수는 유지)
        coef[0, :, W] = 0.0
        coef[-1, :, E] = 0.0
        coef[:, 0, S] = 0.0
        coef[:, -1, N] = 0.0
        return StencilField(pattern=StencilPattern.FIVE_POINT, coefficients=coef,
                            extent=whole_extent((nx, ny)))

    def rhs(self, problem: DiffusionProblem) -> GridFunction:
        """유한체적 우변 f·h_x·h_y"""
        hx, hy = problem.spacings()
        return GridFunction.of(problem.sample_rhs() * (hx * hy))

    def relax(self, A: StencilField, x: GridFunction, b: GridFunction, sweeps: int) -> GridFunction:
        """유색 Gauss-Seidel (5점 2색, 9점 4색), 색 순서 0, 1, …"""
        check_center(A.coefficients)
        xp = pad(x.values)
        n_colors = A.pattern.colors
        colors = color_map((0, 0), A.dims, n_colors)
        for _ in range(sweeps):
            for color in range(n_colors):
                relax_color(A.coefficients, xp, b.values, colors, color)
        return GridFunction(values=xp[1:-1, 1:-1].copy(), extent=x.extent)

    def residual(self, A: StencilField, x: GridFunction, b: GridFunction) -> GridFunction:
        return GridFunction(values=residual_patch(A.coefficients, pad(x.values), b.values), extent=x.extent)

    def build_interp(self, A: StencilField, mode: InterpMode = InterpMode.OPERATOR_INDUCED) -> InterpField:
        return _build_interp(A, mode)

    def galerkin(self, A: StencilField, P: InterpField) -> StencilField:
        return _galerkin(A, P)

    def restrict_residual(self, r: GridFunction, P: InterpField) -> GridFunction:
        """b_c = P^T r"""
        values = restrict_patch(P.weights, pad(r.values), (0, 0), (0, 0))
        return GridFunction(values=values, extent=whole_extent(values.shape))

    def interp_correct(self, x_f: GridFunction, x_c: GridFunction, r_f: GridFunction,
                       A_f: StencilField, P: InterpField, residual_correction: bool = True) -> GridFunction:
        """u ← u + P u_c (+ r/C, 주입점 제외)"""
        check_center(A_f.coefficients)
        xp = pad(x_f.values)
        interp_correct_patch(xp, r_f.values, A_f.center, pad_weights(P.weights), pad(x_c.values),
                             (0, 0), (0, 0), residual_correction)
        return GridFunction(values=xp[1:-1, 1:-1].copy(), extent=x_f.extent)

    def factor_coarse(self, A0: StencilField):
        dense = stencil_to_csr(A0.coefficients).toarray()
        try:
            return cho_factor(dense, lower=True)
        except LinAlgError as e:
            logger.error("최조대 연산자 Cholesky 분해 실패: %s", e)
            raise NumericalError(f"최조대 연산자가 양의 정부호가 아닙니다: {e}") from e

    def build_hierarchy(self, problem: DiffusionProblem, nu1: int = 2, nu2: int = 1,
                        interp_mode: InterpMode = InterpMode.OPERATOR_INDUCED,
                        coarse_max: int = 3, residual_correction: bool = True) -> MGHierarchy:
        """
        세밀 연산자에서 최조대 레벨까지 보간과 Galerkin 연산자를 구성하고 A_0을 분해합니다.
        """
        A = self.discretize(problem)
        return self.hierarchy_from_operator(A, nu1, nu2, interp_mode, coarse_max, residual_correction)

    def hierarchy_from_operator(self, A: StencilField, nu1: int = 2, nu2: int = 1,
                                interp_mode: InterpMode = InterpMode.OPERATOR_INDUCED,
                                coarse_max: int = 3, residual_correction: bool = True) -> MGHierarchy:
        grids = build_grid_sequence(GlobalGrid(dims=A.dims), coarse_max)
        ops: List[StencilField] = [A]
        interps: List[InterpField] = []
        for _ in grids[1:]:
            P = self.build_interp(ops[-1], interp_mode)
            interps.append(P)
            ops.append(self.galerkin(ops[-1], P))
        L = len(grids)
        levels = [MGLevel(grid=grids[L - 1 - l], A=ops[L - 1 - l],
                          P=interps[L - 1 - l] if l > 0 else None) for l in range(L)]
        factor = self.factor_coarse(levels[0].A)
        logger.info("멀티그리드 계층 구성: 레벨 %d개, %s → %s, 보간 %s",
                    L, grids[0], grids[-1], interp_mode.value)
        return MGHierarchy(levels=levels, nu1=nu1, nu2=nu2, coarse_factor=factor,
                           interp_mode=interp_mode, residual_correction=residual_correction)

    def dump_hierarchy(self, h: MGHierarchy, out: TextIO) -> int:
        params = {
            "nu1": str(h.nu1),
            "nu2": str(h.nu2),
            "interp": h.interp_mode.value,
            "residual_correction": "1" if h.residual_correction else "0",
        }
        return write_hierarchy([(lvl.grid, lvl.A, lvl.P) for lvl in h.levels], params, out)

    def load_hierarchy(self, src: TextIO) -> MGHierarchy:
        """
        덤프된 계층을 읽고 최조대 연산자를 다시 분해합니다.

        Raises:
            ConfigError: 파일 형식 오류
            NumericalError: 최조대 연산자 분해 실패
        """
        params, levels = read_hierarchy(src)
        if not levels:
            raise ConfigError("계층 파일에 레벨이 없습니다.")
        mg_levels = [MGLevel(grid=g, A=A, P=P) for g, A, P in levels]
        return MGHierarchy(
            levels=mg_levels,
            nu1=int(params.get("nu1", 2)),
            nu2=int(params.get("nu2", 1)),
            coarse_factor=self.factor_coarse(mg_levels[0].A),
            interp_mode=InterpMode(params.get("interp", InterpMode.OPERATOR_INDUCED.value)),
            residual_correction=params.get("residual_correction", "1") == "1",
        )

    def coarse_solve(self, h: MGHierarchy, b: GridFunction) -> GridFunction:
        values = cho_solve(h.coarse_factor, b.values.ravel()).reshape(b.values.shape)
        return GridFunction(values=values, extent=b.extent)

    def vcycle(self, h: MGHierarchy, x: GridFunction, b: GridFunction) -> GridFunction:
        """V(ν1, ν2) 사이클 한 번"""
        return self._cycle(h, h.num_levels - 1, x, b)

    def _cycle(self, h: MGHierarchy, l: int, x: GridFunction, b: GridFunction) -> GridFunction:
        if l == 0:
            return self.coarse_solve(h, b)
        level = h.levels[l]
        x = self.relax(level.A, x, b, h.nu1)
        r = self.residual(level.A, x, b)
        bc = self.restrict_residual(r, level.P)
        xc = self._cycle(h, l - 1, GridFunction.zeros(bc.values.shape), bc)
        x = self.interp_correct(x, xc, r, level.A, level.P, h.residual_correction)
        return self.relax(level.A, x, b, h.nu2)

    def solve(self, h: MGHierarchy, b: GridFunction, cycles: int,
              x0: Optional[GridFunction] = None) -> ConvergenceReport:
        """
        V-사이클을 반복하며 사이클별 잔차 노름(L2)과 감소율을 기록합니다.

        Raises:
            NumericalError: 감소율이 연속 3회 1 이상인 경우 (발산)
        """
        A = h.levels[-1].A
        x = x0 or GridFunction.zeros(A.dims)
        report = ConvergenceReport(residual_norms=[self._norm(self.residual(A, x, b))])
        for _ in range(cycles):
            x = self.vcycle(h, x, b)
            report.record(self._norm(self.residual(A, x, b)))
            if report.diverging(DIVERGENCE_STREAK):
                logger.error("V-사이클 발산: 감소율 %s", report.factors[-DIVERGENCE_STREAK:])
                raise NumericalError(f"V-사이클이 발산합니다 (감소율 {report.factors[-1]:.3g}).")
        report.solution = x.values
        return report

    @staticmethod
    def _norm(r: GridFunction) -> float:
        return float(np.linalg.norm(r.values))


multigrid_service = MultigridService()
