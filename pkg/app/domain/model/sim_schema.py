"""
논리 랭크 시뮬레이션의 통신 이벤트, 이벤트 로그, 조정(reconcile) 보고서 스키마
"""
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from app.domain.model.perf_schema import RedistMode, Traffic

__all__ = ["CommKind", "CommEvent", "EventLog", "Mismatch", "ReconcileReport", "RedistMode"]


class CommKind(str, Enum):
    EXCHANGE = "exchange"
    GATHER = "gather"
    ALLGATHER = "allgather"
    SCATTER = "scatter"


class CommEvent(BaseModel):
    """논리 메시지 한 건 (depth는 세밀 격자 0부터 센 레벨 인덱스)"""
    level: int
    kind: CommKind
    source: Tuple[int, ...]
    dest: Tuple[int, ...]
    bytes: int = Field(..., ge=0)
    phase: str = ""


class EventLog(BaseModel):
    """
    레벨·종류별 메시지/바이트 카운터와 시간순 이벤트 목록
    """
    events: List[CommEvent] = Field(default_factory=list)
    counters: Dict[Tuple[int, CommKind], Traffic] = Field(default_factory=dict)

    def record(self, level: int, kind: CommKind, source, dest, nbytes: int, phase: str = "") -> None:
        self.events.append(CommEvent(level=level, kind=kind, source=tuple(source),
                                     dest=tuple(dest), bytes=nbytes, phase=phase))
        key = (level, kind)
        self.counters[key] = self.counters.get(key, Traffic()) + Traffic(messages=1, bytes=nbytes)

    def traffic(self, level: int, kind: CommKind) -> Traffic:
        return self.counters.get((level, kind), Traffic())

    def rank_traffic(self, level: int, kind: CommKind) -> Dict[Tuple[int, ...], Traffic]:
        """레벨·종류별로 보낸 랭크마다 모은 통신량"""
        out: Dict[Tuple[int, ...], Traffic] = {}
        for e in self.events:
            if e.level == level and e.kind == kind:
                out[e.source] = out.get(e.source, Traffic()) + Traffic(messages=1, bytes=e.bytes)
        return out

    def levels(self) -> List[int]:
        return sorted({level for level, _ in self.counters})

    def total(self) -> Traffic:
        out = Traffic()
        for t in self.counters.values():
            out = out + t
        return out

    def is_consistent(self) -> bool:
        """카운터가 이벤트 목록의 합과 같은지 확인합니다."""
        recount: Dict[Tuple[int, CommKind], Traffic] = {}
        for e in self.events:
            key = (e.level, e.kind)
            recount[key] = recount.get(key, Traffic()) + Traffic(messages=1, bytes=e.bytes)
        return recount == self.counters

    def rows(self) -> List[dict]:
        """CSV 내보내기용 (level, kind, messages, bytes) 행"""
        return [
            {"level": level, "kind": kind.value, "messages": t.messages, "bytes": t.bytes}
            for (level, kind), t in sorted(self.counters.items(), key=lambda kv: (kv[0][0], kv[0][1].value))
        ]


class Mismatch(BaseModel):
    """rank가 있으면 그 랭크의 통신량이 모델 상한(expected)을 넘은 경우입니다."""
    level: int
    kind: CommKind
    expected: Traffic
    actual: Traffic
    rank: Optional[Tuple[int, ...]] = None


class ReconcileReport(BaseModel):
    """모델이 예측한 통신량과 이벤트 로그의 비교 결과"""
    mismatches: List[Mismatch] = Field(default_factory=list)
    checked: int = 0
    mode: Optional[RedistMode] = None

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def flagged_levels(self) -> List[int]:
        return sorted({m.level for m in self.mismatches})
