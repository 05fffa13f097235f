"""
풀이 결과(수렴 기록) 스키마
"""
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class ConvergenceReport(BaseModel):
    """사이클별 잔차 노름과 감소율 (residual_norms[0]은 초기 잔차)"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    residual_norms: List[float] = Field(default_factory=list)
    factors: List[float] = Field(default_factory=list)
    solution: Optional[np.ndarray] = Field(None, exclude=True)

    def record(self, norm: float) -> None:
        prev = self.residual_norms[-1]
        self.factors.append(norm / prev if prev > 0 else 0.0)
        self.residual_norms.append(norm)

    def diverging(self, streak: int) -> bool:
        tail = self.factors[-streak:]
        return len(tail) == streak and all(f >= 1.0 for f in tail)

    @property
    def max_factor(self) -> float:
        return max(self.factors, default=0.0)
