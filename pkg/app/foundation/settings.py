"""
환경 변수(.env) 기반 기본 설정 모듈

로컬 개발 환경에서는 .env 파일을 읽고, 값이 없으면 내장 기본값을 사용합니다.
"""

import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

_DEFAULTS = {
    "REDIST_TRIGGER_EXTENT": "3",
    "REDIST_TRIGGER_POINTS": "16",
    "REDIST_COARSE_MAX": "3",
    "REDIST_LOG_LEVEL": "INFO",
}


def _get_int(name: str) -> int:
    raw = os.getenv(name, _DEFAULTS[name])
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"환경 변수 {name}의 값이 정수가 아닙니다: {raw}") from e
    if value < 1:
        raise ValueError(f"환경 변수 {name}의 값은 1 이상이어야 합니다: {value}")
    return value


def trigger_min_extent() -> int:
    """재분배 트리거의 최소 로컬 크기 (차원별)"""
    return _get_int("REDIST_TRIGGER_EXTENT")


def trigger_min_points() -> int:
    """재분배 트리거의 최소 로컬 격자점 수"""
    return _get_int("REDIST_TRIGGER_POINTS")


def coarse_max_extent() -> int:
    """최조대 격자 직접 풀이로 전환하는 최대 차원 크기"""
    return _get_int("REDIST_COARSE_MAX")


def default_machine_file() -> Optional[str]:
    """기본 머신 파라미터 파일 경로 (설정되지 않았으면 None)"""
    return os.getenv("REDIST_MACHINE_FILE") or None


def log_level() -> str:
    return os.getenv("REDIST_LOG_LEVEL", _DEFAULTS["REDIST_LOG_LEVEL"]).upper()
