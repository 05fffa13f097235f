"""
재분배 탐색 공간의 상태, 경로, 탐색 통계를 위한 Pydantic 스키마 모델
"""
from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.domain.model.grid_schema import GlobalGrid, ProcessorGrid, format_dims


class TriggerThreshold(BaseModel):
    """재분배 트리거 기준: min_d n_d < min_extent 또는 Πn_d < min_points"""
    model_config = ConfigDict(frozen=True)

    min_extent: int = Field(3, ge=1)
    min_points: int = Field(16, ge=1)


class HeuristicKind(str, Enum):
    ADMISSIBLE = "admissible"
    WEIGHTED = "weighted"


class HeuristicWeights(BaseModel):
    """가중 휴리스틱 h(s) = w_grid·ΠN·γ + w_proc·⌈log2 n_p⌉·α 의 가중치"""
    model_config = ConfigDict(frozen=True)

    grid: float = 1.0
    proc: float = 1.0


class RedistState(BaseModel):
    """
    탐색 상태: 프로세서 격자와 그 격자가 담당을 시작하는 전역 조대 격자
    depth는 세밀 격자(0)부터 센 레벨 인덱스입니다.
    """
    model_config = ConfigDict(frozen=True)

    proc: ProcessorGrid
    grid: GlobalGrid
    depth: int = Field(..., ge=0)

    @property
    def key(self) -> Tuple[Tuple[int, ...], int]:
        return self.proc.dims, self.depth

    @property
    def is_goal(self) -> bool:
        return self.proc.total == 1

    def __str__(self) -> str:
        return f"{self.proc} @ {self.grid}"


class RedistPath(BaseModel):
    """
    초기 상태에서 1×1 목표 상태까지의 경로와 전이별 모델 비용
    """
    states: List[RedistState]
    transition_costs: List[float] = Field(default_factory=list, description="전이별 비용 (마지막은 목표의 종단 비용)")
    total: float = 0.0
    issues: List[str] = Field(default_factory=list, description="열거 관계를 벗어난 전이 등 검증 결과")

    @model_validator(mode="after")
    def _check(self) -> "RedistPath":
        if not self.states:
            raise ValueError("경로에는 최소 한 개의 상태가 필요합니다.")
        return self

    @property
    def is_valid(self) -> bool:
        return not self.issues

    @property
    def proc_sequence(self) -> List[Tuple[int, ...]]:
        return [s.proc.dims for s in self.states]

    def arrow_notation(self) -> str:
        """'64×32 → 64×16 → … → 1×1' 형식"""
        return " → ".join(format_dims(s.proc.dims) for s in self.states)


class SearchStats(BaseModel):
    expanded_nodes: int = 0
    generated_nodes: int = 0
    path_length: int = 0
    wall_time: float = 0.0
