"""
격자, 로컬 영역, 프로세서 격자를 위한 Pydantic 스키마 모델
"""
from itertools import product
from math import prod
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def format_dims(dims: Tuple[int, ...]) -> str:
    """(64, 32) → '64×32'"""
    return "×".join(str(d) for d in dims)


class GlobalGrid(BaseModel):
    """
    전역 격자 (차원별 격자점 수)
    """
    model_config = ConfigDict(frozen=True)

    dims: Tuple[int, ...] = Field(..., description="차원별 격자점 수 N_d")

    @field_validator("dims")
    @classmethod
    def _check_dims(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(v) not in (2, 3):
            raise ValueError(f"격자 차원은 2 또는 3이어야 합니다: {v}")
        if any(n < 1 for n in v):
            raise ValueError(f"모든 N_d는 1 이상이어야 합니다: {v}")
        return tuple(v)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return prod(self.dims)

    def __str__(self) -> str:
        return format_dims(self.dims)


class LocalExtent(BaseModel):
    """
    한 랭크가 소유하는 로컬 영역 (크기와 전역 시작 인덱스)
    """
    model_config = ConfigDict(frozen=True)

    dims: Tuple[int, ...] = Field(..., description="로컬 격자점 수 n_d")
    offset: Tuple[int, ...] = Field(..., description="전역 시작 인덱스")

    @model_validator(mode="after")
    def _check(self) -> "LocalExtent":
        if len(self.dims) != len(self.offset):
            raise ValueError("dims와 offset의 차원이 다릅니다.")
        if any(n < 0 for n in self.dims) or any(o < 0 for o in self.offset):
            raise ValueError(f"음수 크기/오프셋은 허용되지 않습니다: {self.dims}, {self.offset}")
        return self

    @property
    def size(self) -> int:
        return prod(self.dims)

    @property
    def stop(self) -> Tuple[int, ...]:
        return tuple(o + n for o, n in zip(self.offset, self.dims))

    @property
    def is_empty(self) -> bool:
        return any(n == 0 for n in self.dims)


class ProcessorGrid(BaseModel):
    """
    텐서곱 형태의 프로세서(랭크) 배치
    """
    model_config = ConfigDict(frozen=True)

    dims: Tuple[int, ...] = Field(..., description="차원별 랭크 수 p_d")

    @field_validator("dims")
    @classmethod
    def _check_dims(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(v) not in (2, 3):
            raise ValueError(f"프로세서 격자 차원은 2 또는 3이어야 합니다: {v}")
        if any(p < 1 for p in v):
            raise ValueError(f"모든 p_d는 1 이상이어야 합니다: {v}")
        return tuple(v)

    @property
    def total(self) -> int:
        return prod(self.dims)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    def coords(self):
        """랭크 좌표를 사전식 순서로 순회합니다."""
        return product(*(range(p) for p in self.dims))

    def __str__(self) -> str:
        return format_dims(self.dims)

    @classmethod
    def ones(cls, ndim: int) -> "ProcessorGrid":
        return cls(dims=(1,) * ndim)


class ProcBlock(BaseModel):
    """
    재분배 시 하나의 조대 태스크로 묶이는 프로세서 블록
    """
    model_config = ConfigDict(frozen=True)

    ranks_per_dim: Tuple[int, ...] = Field(..., description="차원별 ⌈p_d^fine / p_d^coarse⌉")
    block_size: int = Field(..., description="블록 내 랭크 수 p_block")
    local_points: int = Field(..., description="블록의 응집된 로컬 격자점 수 n_block")
