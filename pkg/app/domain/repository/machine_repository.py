"""
머신 파라미터 파일(key = value 텍스트)을 읽는 리포지토리 모듈
"""
import logging
import os
import re
from typing import Dict

from app.domain.model.perf_schema import MachineParams
from app.foundation.errors import ConfigError

logger = logging.getLogger(__name__)

_KEYS = {
    "alpha_s": "alpha",
    "beta_s_per_byte": "beta",
    "gamma_s_per_flop": "gamma",
}
_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:=|\s)\s*(\S+)\s*$")


def parse_machine(text: str, source: str = "<string>") -> MachineParams:
    """
    머신 파라미터 텍스트를 파싱합니다.

    Args:
        text: 'key = value' 또는 'key value' 형식의 줄들 (# 주석 허용)
        source: 오류 메시지에 표시할 출처

    Returns:
        MachineParams: α, β, γ

    Raises:
        ConfigError: 알 수 없는 키, 누락된 키, 숫자가 아닌 값, 음수 값
    """
    values: Dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _LINE.match(line)
        if not match:
            raise ConfigError(f"{source}:{lineno}: 해석할 수 없는 줄입니다: {raw!r}")
        key, value = match.groups()
        if key not in _KEYS:
            raise ConfigError(f"{source}:{lineno}: 알 수 없는 키입니다: {key}")
        try:
            values[_KEYS[key]] = float(value)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: {key}의 값이 숫자가 아닙니다: {value}") from e
    missing = [k for k, field in _KEYS.items() if field not in values]
    if missing:
        raise ConfigError(f"{source}: 누락된 키: {', '.join(missing)}")
    try:
        return MachineParams(**values)
    except ValueError as e:
        raise ConfigError(f"{source}: 잘못된 머신 파라미터: {e}") from e


def load_machine(path: str) -> MachineParams:
    if not os.path.exists(path):
        raise ConfigError(f"머신 파라미터 파일을 찾을 수 없습니다: {path}")
    with open(path, "r", encoding="utf-8") as f:
        machine = parse_machine(f.read(), source=path)
    logger.info("머신 파라미터 로드: %s (α=%g, β=%g, γ=%g)", path, machine.alpha, machine.beta, machine.gamma)
    return machine


# 프로젝트 루트 기준 기본 머신 파일
_project_root = os.path.abspath(os.path.join(os.path.dirname(os.path.abspath(__file__)), "../../.."))
DEFAULT_MACHINE_FILE = os.path.join(_project_root, "fixtures", "machines", "blue_waters.txt")
