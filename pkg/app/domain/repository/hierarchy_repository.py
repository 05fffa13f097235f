"""
멀티그리드 계층의 텍스트 덤프/로드 리포지토리

형식 (한 줄에 한 항목, 필드 순서 고정):

    boxmg-hierarchy 1
    param nu1 2
    param nu2 1
    param interp operator_induced
    param residual_correction 1
    level <l> grid <N_x> <N_y> pattern <five_point|nine_point>
    A <l> <i> <j> <방향> <값>
    P <l> <I> <J> <방향> <값>

레벨 l은 0이 최조대입니다. 값은 repr 형식이라 비트 단위로 복원됩니다.
0인 계수와 가중치는 기록하지 않습니다.
"""
import logging
from typing import Dict, List, Optional, TextIO, Tuple

import numpy as np

from app.domain.model.grid_schema import GlobalGrid, LocalExtent
from app.domain.model.stencil_schema import InterpField, InterpMode, StencilField, StencilPattern
from app.foundation.errors import ConfigError
from app.foundation.grid.partition import coarsen_dims
from app.foundation.stencil.compass import INTERP_NAMES, STENCIL_NAMES

logger = logging.getLogger(__name__)

MAGIC = "boxmg-hierarchy 1"

_STENCIL_INDEX = {name: k for k, name in enumerate(STENCIL_NAMES)}
_INTERP_INDEX = {name: k for k, name in enumerate(INTERP_NAMES)}


def write_hierarchy(levels: List[Tuple[GlobalGrid, StencilField, Optional[InterpField]]],
                    params: Dict[str, str], out: TextIO) -> int:
    """
    계층을 텍스트로 기록합니다.

    Args:
        levels: 조대 → 세밀 순 (격자, 연산자, 보간) 목록
        params: nu1, nu2, interp, residual_correction
        out: 출력 스트림

    Returns:
        int: 기록한 줄 수
    """
    lines = [MAGIC]
    for key in ("nu1", "nu2", "interp", "residual_correction"):
        lines.append(f"param {key} {params[key]}")
    for l, (grid, A, P) in enumerate(levels):
        lines.append(f"level {l} grid {' '.join(map(str, grid.dims))} pattern {A.pattern.value}")
        coef = A.coefficients
        for i, j, k in zip(*np.nonzero(coef)):
            lines.append(f"A {l} {i} {j} {STENCIL_NAMES[k]} {float(coef[i, j, k])!r}")
        if P is not None:
            w = P.weights
            for i, j, k in zip(*np.nonzero(w)):
                lines.append(f"P {l} {i} {j} {INTERP_NAMES[k]} {float(w[i, j, k])!r}")
    out.write("\n".join(lines) + "\n")
    return len(lines)


def read_hierarchy(src: TextIO):
    """
    write_hierarchy 형식을 읽습니다.

    Returns:
        tuple: (params dict, 조대 → 세밀 순 (격자, 연산자, 보간) 목록)

    Raises:
        ConfigError: 형식 오류
    """
    header = src.readline().strip()
    if header != MAGIC:
        raise ConfigError(f"계층 파일 헤더가 올바르지 않습니다: {header!r}")
    params: Dict[str, str] = {}
    grids: List[GlobalGrid] = []
    patterns: List[StencilPattern] = []
    coefs: List[np.ndarray] = []
    weights: List[np.ndarray] = []
    for lineno, raw in enumerate(src, start=2):
        parts = raw.split()
        if not parts:
            continue
        try:
            tag = parts[0]
            if tag == "param":
                params[parts[1]] = parts[2]
            elif tag == "level":
                l = int(parts[1])
                if l != len(grids):
                    raise ConfigError(f"{lineno}행: 레벨 번호가 순서에 맞지 않습니다: {l}")
                dims = tuple(int(v) for v in parts[3:-2])
                pattern = StencilPattern(parts[-1])
                grids.append(GlobalGrid(dims=dims))
                patterns.append(pattern)
                coefs.append(np.zeros(dims + (pattern.points,)))
                weights.append(np.zeros(coarsen_dims(dims) + (8,)) if l > 0 else None)
            elif tag == "A":
                l, i, j = int(parts[1]), int(parts[2]), int(parts[3])
                coefs[l][i, j, _STENCIL_INDEX[parts[4]]] = float(parts[5])
            elif tag == "P":
                l, i, j = int(parts[1]), int(parts[2]), int(parts[3])
                weights[l][i, j, _INTERP_INDEX[parts[4]]] = float(parts[5])
            else:
                raise ConfigError(f"{lineno}행: 알 수 없는 항목입니다: {tag}")
        except (IndexError, KeyError, ValueError, TypeError) as e:
            raise ConfigError(f"{lineno}행: 해석할 수 없습니다: {raw.strip()!r}") from e

    mode = InterpMode(params.get("interp", InterpMode.OPERATOR_INDUCED.value))
    levels = []
    for l, grid in enumerate(grids):
        A = StencilField(pattern=patterns[l], coefficients=coefs[l],
                         extent=LocalExtent(dims=grid.dims, offset=(0,) * grid.ndim))
        P = None
        if l > 0:
            P = InterpField(weights=weights[l],
                            coarse_extent=LocalExtent(dims=grids[l - 1].dims, offset=(0,) * grid.ndim),
                            fine_dims=grid.dims, mode=mode)
        levels.append((grid, A, P))
    logger.info("계층 파일 로드: 레벨 %d개", len(levels))
    return params, levels
