"""
포스탈(postal) 성능 모델의 입력과 결과를 위한 Pydantic 스키마 모델
"""
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class RedistMode(str, Enum):
    """재분배 방식: 블록 내 allgather 후 중복 계산(Redundant) 또는 루트 gather/scatter(NonRedundant)"""
    REDUNDANT = "redundant"
    NON_REDUNDANT = "non_redundant"


class MachineParams(BaseModel):
    """
    포스탈 모델 파라미터 (α: 지연 시간, β: 바이트당 전송 시간, γ: flop당 연산 시간)
    """
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., ge=0, description="메시지 지연 시간 [s]")
    beta: float = Field(..., ge=0, description="역대역폭 [s/byte]")
    gamma: float = Field(..., ge=0, description="역연산 속도 [s/flop]")

    def computation_only(self) -> "MachineParams":
        """통신 비용을 0으로 둔 머신 (α = β = 0)"""
        return MachineParams(alpha=0.0, beta=0.0, gamma=self.gamma)


class LevelShape(BaseModel):
    """
    한 레벨의 모델 입력 형상 (로컬/전역 크기, 프로세서 격자, 스텐실 점 수, 색 수, 스무딩 횟수)
    """
    model_config = ConfigDict(frozen=True)

    local_dims: Tuple[int, ...]
    global_dims: Tuple[int, ...]
    proc_dims: Tuple[int, ...]
    coarse_local_dims: Optional[Tuple[int, ...]] = Field(None, description="같은 타일이 다음 조대 레벨에서 갖는 로컬 크기")
    stencil_points: int = 9
    colors: int = 4
    nu1: int = 2
    nu2: int = 1

    @field_validator("stencil_points")
    @classmethod
    def _check_points(cls, v: int) -> int:
        if v not in (5, 9, 27):
            raise ValueError(f"스텐실 점 수는 5, 9, 27 중 하나여야 합니다: {v}")
        return v

    @field_validator("colors")
    @classmethod
    def _check_colors(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"색 수는 1 이상이어야 합니다: {v}")
        return v


class LevelCost(BaseModel):
    """레벨별 비용 항목 (세밀 → 조대 인덱스 depth)"""
    depth: int
    grid: Tuple[int, ...]
    proc: Tuple[int, ...]
    smooth: float = 0.0
    residual: float = 0.0
    restrict: float = 0.0
    interp: float = 0.0
    agglomerate: float = 0.0
    cgsolve: float = 0.0


class CostBreakdown(BaseModel):
    """
    V-사이클 예측 시간의 항목별 합계

    total은 여섯 항목의 합과 정확히 같으며 messages/bytes는 모델 식이 가정하는 통신량입니다.
    """
    smooth: float = 0.0
    residual: float = 0.0
    restrict: float = 0.0
    interp: float = 0.0
    agglomerate: float = 0.0
    cgsolve: float = 0.0
    total: float = 0.0
    messages: int = 0
    bytes: float = 0.0
    levels: List[LevelCost] = Field(default_factory=list)

    @classmethod
    def from_levels(cls, levels: List[LevelCost], messages: int = 0,
                    bytes: float = 0.0) -> "CostBreakdown":
        parts = {
            key: sum(getattr(lc, key) for lc in levels)
            for key in ("smooth", "residual", "restrict", "interp", "agglomerate", "cgsolve")
        }
        total = (parts["smooth"] + parts["residual"] + parts["restrict"]
                 + parts["interp"] + parts["agglomerate"] + parts["cgsolve"])
        return cls(**parts, total=total, messages=messages, bytes=bytes, levels=levels)


class Traffic(BaseModel):
    """메시지 수와 바이트 수"""
    messages: int = 0
    bytes: int = 0

    def __add__(self, other: "Traffic") -> "Traffic":
        return Traffic(messages=self.messages + other.messages, bytes=self.bytes + other.bytes)

    def scaled(self, times: int) -> "Traffic":
        return Traffic(messages=self.messages * times, bytes=self.bytes * times)
