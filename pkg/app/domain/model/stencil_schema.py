"""
스텐실 연산자, 보간, 격자 함수, 멀티그리드 계층을 위한 Pydantic 스키마 모델
"""
from enum import Enum
from typing import Any, Callable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.domain.model.grid_schema import GlobalGrid, LocalExtent


class StencilPattern(str, Enum):
    FIVE_POINT = "five_point"
    NINE_POINT = "nine_point"

    @property
    def points(self) -> int:
        return 5 if self is StencilPattern.FIVE_POINT else 9

    @property
    def colors(self) -> int:
        """Gauss-Seidel 색 수 (5점: 적흑 2색, 9점: 4색)"""
        return 2 if self is StencilPattern.FIVE_POINT else 4


class InterpMode(str, Enum):
    BILINEAR = "bilinear"
    OPERATOR_INDUCED = "operator_induced"


def whole_extent(dims: Tuple[int, ...]) -> LocalExtent:
    return LocalExtent(dims=tuple(dims), offset=(0,) * len(dims))


class StencilField(BaseModel):
    """
    격자점별 5점/9점 연산자 계수 A_l (실제 행렬 원소 값으로 저장)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    pattern: StencilPattern
    coefficients: np.ndarray = Field(..., description="(n_x, n_y, 5|9) 계수 배열, compass 순서")
    extent: LocalExtent

    @model_validator(mode="after")
    def _check_shape(self) -> "StencilField":
        expected = tuple(self.extent.dims) + (self.pattern.points,)
        if self.coefficients.shape != expected:
            raise ValueError(f"계수 배열 형태 {self.coefficients.shape}가 {expected}와 다릅니다.")
        return self

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(self.extent.dims)

    @property
    def center(self) -> np.ndarray:
        return self.coefficients[..., 0]

    def as_nine(self) -> np.ndarray:
        """9점 계수 배열 (5점이면 대각 성분을 0으로 채움)"""
        if self.pattern is StencilPattern.NINE_POINT:
            return self.coefficients
        out = np.zeros(self.dims + (9,))
        out[..., :5] = self.coefficients
        return out


class InterpField(BaseModel):
    """
    조대점에 저장되는 보간 가중치 P_l (nw, n, ne, w, e, sw, s, se)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray = Field(..., description="(N_cx, N_cy, 8) 가중치 배열")
    coarse_extent: LocalExtent
    fine_dims: Tuple[int, ...]
    mode: InterpMode = InterpMode.OPERATOR_INDUCED
    fallback_points: int = Field(0, description="bilinear 가중치로 대체된 세밀점 수")

    @model_validator(mode="after")
    def _check_shape(self) -> "InterpField":
        expected = tuple(self.coarse_extent.dims) + (8,)
        if self.weights.shape != expected:
            raise ValueError(f"가중치 배열 형태 {self.weights.shape}가 {expected}와 다릅니다.")
        return self


class GridFunction(BaseModel):
    """
    격자점별 스칼라 값 (x_l, b_l, r_l)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    extent: LocalExtent

    @model_validator(mode="after")
    def _check_shape(self) -> "GridFunction":
        if self.values.shape != tuple(self.extent.dims):
            raise ValueError(f"값 배열 형태 {self.values.shape}가 {self.extent.dims}와 다릅니다.")
        return self

    @classmethod
    def zeros(cls, dims: Tuple[int, ...]) -> "GridFunction":
        return cls(values=np.zeros(dims), extent=whole_extent(dims))

    @classmethod
    def of(cls, values: np.ndarray) -> "GridFunction":
        return cls(values=np.asarray(values, dtype=float), extent=whole_extent(values.shape))


RhsSource = Union[Callable[[np.ndarray, np.ndarray], np.ndarray], np.ndarray, float]


class DiffusionProblem(BaseModel):
    """
    -∇·(D∇u) = f, D = diag(1/r, r), 동차 Dirichlet 경계 조건

    aspect가 주어지면 h_x = 1/(N_x + 1), h_y = aspect · h_x 로 셀 비율을 고정하고,
    없으면 단위 정사각형에서 h_d = 1/(N_d + 1)을 사용합니다.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: GlobalGrid
    r: float = Field(1.0, description="비등방성 비율")
    rhs: Any = Field(1.0, description="f(x, y) 함수, 샘플 배열 또는 상수")
    aspect: Optional[float] = Field(None, description="셀 비율 h_y / h_x")

    @field_validator("r")
    @classmethod
    def _check_r(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"비등방성 비율 r은 양수여야 합니다: {v}")
        return v

    def spacings(self) -> Tuple[float, float]:
        nx, ny = self.grid.dims
        hx = 1.0 / (nx + 1)
        if self.aspect is None:
            return hx, 1.0 / (ny + 1)
        return hx, self.aspect * hx

    def sample_rhs(self) -> np.ndarray:
        """우변 f를 격자점에서 샘플링합니다."""
        hx, hy = self.spacings()
        nx, ny = self.grid.dims
        if isinstance(self.rhs, np.ndarray):
            if self.rhs.shape != (nx, ny):
                raise ValueError(f"우변 배열 형태 {self.rhs.shape}가 격자 {self.grid}와 다릅니다.")
            return self.rhs.astype(float)
        if callable(self.rhs):
            xs = hx * np.arange(1, nx + 1)
            ys = hy * np.arange(1, ny + 1)
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            return np.asarray(self.rhs(X, Y), dtype=float)
        return np.full((nx, ny), float(self.rhs))


class MGLevel(BaseModel):
    """계층의 한 레벨: 연산자 A_l, 보간 P_l (레벨 0은 None), 격자"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: GlobalGrid
    A: StencilField
    P: Optional[InterpField] = None


class MGHierarchy(BaseModel):
    """
    V-사이클 입력: levels[0]이 최조대, levels[-1]이 최세밀 레벨
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    levels: List[MGLevel]
    nu1: int = 2
    nu2: int = 1
    coarse_factor: Any = Field(..., description="scipy.linalg.cho_factor 결과 (A_0의 Cholesky 인자)")
    interp_mode: InterpMode = InterpMode.OPERATOR_INDUCED
    residual_correction: bool = Field(True, description="보간 보정에 r/C 항을 더할지 여부")

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    @property
    def grids(self) -> List[GlobalGrid]:
        """세밀 → 조대 순 격자 목록"""
        return [lvl.grid for lvl in reversed(self.levels)]
