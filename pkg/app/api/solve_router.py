"""
멀티그리드 풀이 API 라우터
"""
import logging
from typing import Any, Dict

from fastapi import APIRouter, HTTPException

from app.domain.controller.solve_controller import solve_controller
from app.domain.model.config_schema import RunConfig
from app.foundation.errors import ReconciliationError, http_status

logger = logging.getLogger(__name__)

# 라우터 설정
router = APIRouter(prefix="/solver", tags=["Multigrid Solver"])


@router.post("/solve", response_model=Dict[str, Any])
def solve(config: RunConfig) -> Dict[str, Any]:
    """
    V-사이클 풀이. simulate=true이면 논리 랭크 시뮬레이션 결과와 조정 결과가 함께 반환됩니다.
    """
    try:
        return solve_controller.solve(config)
    except ReconciliationError as e:
        detail = {"message": str(e), "report": e.report.model_dump(mode="json") if e.report else None}
        raise HTTPException(status_code=409, detail=detail) from e
    except Exception as e:
        status = http_status(e)
        if status == 500:
            logger.exception("풀이 요청 처리 실패")
        raise HTTPException(status_code=status, detail=str(e)) from e
