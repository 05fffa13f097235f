"""
재분배 계획 API 라우터
"""
import logging
from typing import Any, Dict

from fastapi import APIRouter, HTTPException

from app.domain.controller.plan_controller import plan_controller
from app.domain.model.config_schema import PathsRequest, RunConfig
from app.domain.repository.report_repository import parse_paths_text
from app.foundation.errors import http_status

logger = logging.getLogger(__name__)

# 라우터 설정
router = APIRouter(prefix="/redist", tags=["Redistribution Planner"])


def _fail(e: Exception) -> HTTPException:
    status = http_status(e)
    if status == 500:
        logger.exception("계획 요청 처리 실패")
    return HTTPException(status_code=status, detail=str(e))


@router.post("/plan", response_model=Dict[str, Any])
def plan(config: RunConfig) -> Dict[str, Any]:
    """
    초기 프로세서 격자의 재분배 후보와 A* 최적 경로를 계산합니다.

    Returns:
        Dict[str, Any]: CLI `plan --format json`과 같은 계획 문서
    """
    try:
        return plan_controller.plan(config)
    except Exception as e:
        raise _fail(e) from e


@router.post("/paths", response_model=Dict[str, Any])
def paths(request: PathsRequest) -> Dict[str, Any]:
    """명시적 경로들의 모델 비용과 순위. 열거 관계를 벗어난 경로는 valid=false로 표시됩니다."""
    try:
        return plan_controller.evaluate_paths(request.config, parse_paths_text(request.paths, source="request"))
    except Exception as e:
        raise _fail(e) from e


@router.post("/search-bench", response_model=Dict[str, Any])
def search_bench(config: RunConfig) -> Dict[str, Any]:
    try:
        return plan_controller.search_bench(config)
    except Exception as e:
        raise _fail(e) from e
