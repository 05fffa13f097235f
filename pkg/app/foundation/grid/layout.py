"""
레벨별 랭크 영역 배치 (세밀 격자 분할 → 조대화로 유도된 분할 → 재분배 블록 합집합)
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from app.domain.model.grid_schema import GlobalGrid, LocalExtent, ProcessorGrid
from app.foundation.grid.partition import (
    agglomerate_extent,
    block_members,
    coarsen_extent,
    partition,
)

Coord = Tuple[int, ...]


@dataclass(frozen=True)
class LevelLayout:
    """
    한 레벨의 태스크 배치.

    tasks는 이 레벨을 처리(또는 직접 풀이)하는 태스크의 영역이고,
    재분배가 일어난 레벨이면 restricted에 이전 프로세서 격자(incoming) 위의 제한 결과 영역이 담깁니다.
    """
    depth: int
    grid: GlobalGrid
    proc: ProcessorGrid
    tasks: Dict[Coord, LocalExtent]
    incoming: Optional[ProcessorGrid] = None
    restricted: Optional[Dict[Coord, LocalExtent]] = None

    @property
    def redistributed(self) -> bool:
        return self.incoming is not None

    def widest(self) -> Tuple[int, ...]:
        """태스크 영역의 차원별 최대 폭"""
        ndim = len(self.grid.dims)
        return tuple(max(e.dims[d] for e in self.tasks.values()) for d in range(ndim))

    def members(self, coord: Coord) -> List[Coord]:
        """재분배 레벨에서 조대 태스크 coord에 모이는 이전 랭크 좌표 (첫 원소가 루트)"""
        return block_members(self.incoming, self.proc, coord)


def build_layouts(grids: Sequence[GlobalGrid], procs: Sequence[ProcessorGrid]) -> List[LevelLayout]:
    """
    Args:
        grids: 세밀 → 조대 순 격자 목록
        procs: 레벨별 프로세서 격자 (grids와 같은 길이)

    Returns:
        List[LevelLayout]: 세밀 → 조대 순 레벨 배치

    Raises:
        ValueError: 블록 구성원이 없는 조대 랭크가 있거나 합집합이 직사각형이 아닌 경우
    """
    if len(grids) != len(procs):
        raise ValueError("격자 수와 프로세서 격자 수가 다릅니다.")
    tasks = {c: partition(grids[0], procs[0], c) for c in procs[0].coords()}
    layouts = [LevelLayout(depth=0, grid=grids[0], proc=procs[0], tasks=tasks)]
    for d in range(1, len(grids)):
        prev = layouts[-1]
        induced = {c: coarsen_extent(e) for c, e in prev.tasks.items()}
        if procs[d] == prev.proc:
            layouts.append(LevelLayout(depth=d, grid=grids[d], proc=procs[d], tasks=induced))
            continue
        merged = {}
        for c in procs[d].coords():
            members = block_members(prev.proc, procs[d], c)
            if not members:
                raise ValueError(f"조대 랭크 {c}에 대응하는 {prev.proc} 랭크가 없습니다.")
            merged[c] = agglomerate_extent([induced[m] for m in members])
        layouts.append(LevelLayout(depth=d, grid=grids[d], proc=procs[d], tasks=merged,
                                   incoming=prev.proc, restricted=induced))
    return layouts


def has_interior_gap(tasks: Dict[Coord, LocalExtent], proc: ProcessorGrid) -> bool:
    """빈 영역 뒤에 비어 있지 않은 영역이 오는 차원이 있는지 (할로 이웃이 끊기는 배치)"""
    for axis, p in enumerate(proc.dims):
        widths = [0] * p
        for c, e in tasks.items():
            widths[c[axis]] = max(widths[c[axis]], e.dims[axis])
        seen_empty = False
        for w in widths:
            if w == 0:
                seen_empty = True
            elif seen_empty:
                return True
    return False
