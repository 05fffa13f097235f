"""
CLI와 HTTP 요청이 공유하는 실행 설정(RunConfig) 스키마
"""
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from app.domain.model.grid_schema import GlobalGrid, ProcessorGrid
from app.domain.model.perf_schema import RedistMode
from app.domain.model.redist_schema import HeuristicKind, HeuristicWeights, TriggerThreshold
from app.domain.model.stencil_schema import InterpMode
from app.foundation import settings


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TABLE = "table"


class SweepKind(str, Enum):
    WIDE = "wide"
    WEAK = "weak"
    STRONG = "strong"


def _positive_dims(v: Optional[Tuple[int, ...]], name: str) -> Optional[Tuple[int, ...]]:
    if v is None:
        return v
    if len(v) not in (2, 3) or any(n < 1 for n in v):
        raise ValueError(f"{name}는 양의 정수 2~3개여야 합니다: {v}")
    return tuple(v)


class RunConfig(BaseModel):
    """
    한 번의 실행 설정. grid(전역 크기)와 local(약한 스케일링 로컬 크기) 중 정확히 하나를 지정합니다.
    """
    grid: Optional[Tuple[int, ...]] = Field(None, description="전역 격자 크기")
    local: Optional[Tuple[int, ...]] = Field(None, description="랭크당 로컬 크기 (전역 = local × proc)")
    proc: Tuple[int, ...] = Field((1, 1), description="프로세서 격자")
    machine: Optional[str] = Field(None, description="머신 파라미터 파일 경로")
    nu1: int = Field(2, ge=0)
    nu2: int = Field(1, ge=0)
    cycles: int = Field(10, ge=1)
    mode: RedistMode = RedistMode.NON_REDUNDANT
    trigger_extent: int = Field(default_factory=settings.trigger_min_extent, ge=1)
    trigger_points: int = Field(default_factory=settings.trigger_min_points, ge=1)
    coarse_max: int = Field(default_factory=settings.coarse_max_extent, ge=1)
    interp: InterpMode = InterpMode.OPERATOR_INDUCED
    residual_correction: bool = True
    seed: int = 0
    r: float = Field(1.0, gt=0, description="비등방성 비율 (1이면 등방성)")
    aspect: Optional[float] = Field(None, gt=0, description="셀 비율 h_y / h_x (None이면 단위 정사각형)")
    heuristic: HeuristicKind = HeuristicKind.ADMISSIBLE
    heuristic_weights: HeuristicWeights = Field(default_factory=HeuristicWeights)
    simulate: bool = Field(False, description="solve 시 논리 랭크 시뮬레이션 사용")
    plan: Optional[List[Tuple[int, ...]]] = Field(None, description="solve에 사용할 프로세서 격자 경로 (없으면 A* 최적 경로)")
    shuffle_ranks: bool = Field(False, description="랭크 실행 순서를 seed로 섞음")
    sweep: SweepKind = SweepKind.WIDE
    max_exp: int = Field(6, ge=0, le=16, description="search-bench의 최대 지수 h (n_p = 2^h)")
    brute: bool = Field(True, description="search-bench에서 전수 탐색 실행 여부")
    format: OutputFormat = OutputFormat.JSON
    out: Optional[str] = None

    @field_validator("grid")
    @classmethod
    def _check_grid(cls, v):
        return _positive_dims(v, "grid")

    @field_validator("local")
    @classmethod
    def _check_local(cls, v):
        return _positive_dims(v, "local")

    @field_validator("proc")
    @classmethod
    def _check_proc(cls, v):
        return _positive_dims(v, "proc")

    @model_validator(mode="after")
    def _check_sizes(self) -> "RunConfig":
        if (self.grid is None) == (self.local is None):
            raise ValueError("grid와 local 중 정확히 하나만 지정해야 합니다.")
        dims = self.grid or self.local
        if len(dims) != len(self.proc):
            raise ValueError(f"격자 차원 {dims}와 프로세서 격자 차원 {self.proc}가 다릅니다.")
        return self

    def global_grid(self) -> GlobalGrid:
        if self.grid is not None:
            return GlobalGrid(dims=self.grid)
        return GlobalGrid(dims=tuple(n * p for n, p in zip(self.local, self.proc)))

    def proc_grid(self) -> ProcessorGrid:
        return ProcessorGrid(dims=self.proc)

    def threshold(self) -> TriggerThreshold:
        return TriggerThreshold(min_extent=self.trigger_extent, min_points=self.trigger_points)


class PathsRequest(BaseModel):
    """경로 비교 요청: 실행 설정과 경로 파일 내용"""
    config: RunConfig
    paths: str = Field(..., description="한 줄에 하나의 경로 ('1: 64x32 -> 64x16 -> 1x1')")
