"""
계획/비용/수렴 보고서를 JSON, CSV, 표 형식으로 출력하고 경로 파일을 읽는 리포지토리 모듈
"""
import io
import json
import logging
import os
import re
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from app.foundation.errors import ConfigError

logger = logging.getLogger(__name__)

_DIMS = re.compile(r"^\d+(?:[x×]\d+){1,2}$")
_ARROW = re.compile(r"\s*(?:->|→)\s*")


def parse_dims(text: str) -> Tuple[int, ...]:
    """'64x32' 또는 '64×32' → (64, 32)"""
    token = text.strip()
    if not _DIMS.match(token):
        raise ConfigError(f"격자 크기 형식이 올바르지 않습니다: {text!r}")
    return tuple(int(v) for v in re.split(r"[x×]", token))


def parse_paths_text(text: str, source: str = "<string>") -> List[Tuple[str, List[Tuple[int, ...]]]]:
    """
    경로 파일을 파싱합니다. 한 줄에 하나의 경로이며 선택적으로 '이름:' 접두어를 둡니다.

        1: 64x32 -> 64x16 -> 1x1

    Returns:
        List[Tuple[str, List[Tuple[int, ...]]]]: (경로 이름, 프로세서 격자 목록)
    """
    paths = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        label = str(len(paths))
        if ":" in line:
            label, line = (part.strip() for part in line.split(":", 1))
        try:
            procs = [parse_dims(tok) for tok in _ARROW.split(line) if tok]
        except ConfigError as e:
            raise ConfigError(f"{source}:{lineno}: {e}") from e
        if not procs:
            raise ConfigError(f"{source}:{lineno}: 빈 경로입니다.")
        paths.append((label, procs))
    if not paths:
        raise ConfigError(f"{source}: 경로가 없습니다.")
    return paths


def load_paths(path: str) -> List[Tuple[str, List[Tuple[int, ...]]]]:
    if not os.path.exists(path):
        raise ConfigError(f"경로 파일을 찾을 수 없습니다: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return parse_paths_text(f.read(), source=path)


def to_json(doc: Dict[str, Any]) -> str:
    """삽입 순서를 유지한 JSON (고정 키 순서)"""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def to_csv(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    df = pd.DataFrame(list(rows), columns=columns)
    buf = io.StringIO()
    df.to_csv(buf, index=False, float_format="%.17g", lineterminator="\n")
    return buf.getvalue()


def to_table(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None, title: str = "") -> str:
    df = pd.DataFrame(list(rows), columns=columns)
    body = df.to_string(index=False) if len(df) else "(empty)"
    return (f"{title}\n" if title else "") + body + "\n"


def emit(text: str, out: Optional[str] = None) -> None:
    """out이 있으면 파일로, 없으면 표준 출력으로 씁니다."""
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info("결과 저장: %s", out)
    else:
        sys.stdout.write(text)
