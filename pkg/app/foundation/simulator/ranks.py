"""
논리 랭크(태스크)와 폭 1 할로 교환

각 태스크는 할로를 포함한 패딩 배열(x, r)과 내부 크기의 우변 b, 로컬 스텐실 조각을 가집니다.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from app.domain.model.grid_schema import LocalExtent
from app.domain.model.sim_schema import CommKind, EventLog
from app.foundation.perf_model import WORD_BYTES
from app.foundation.stencil import color_map

Coord = Tuple[int, ...]


def window(ext: LocalExtent, halo: int = 0) -> Tuple[slice, ...]:
    """전역 배열에서 영역(과 할로)을 잘라내는 슬라이스. halo > 0 이면 패딩 배열 기준입니다."""
    return tuple(slice(o, o + n + 2 * halo) for o, n in zip(ext.offset, ext.dims))


@dataclass
class LogicalRank:
    coord: Coord
    extent: LocalExtent
    coef: np.ndarray
    b: np.ndarray
    x: np.ndarray = field(default=None)
    r: np.ndarray = field(default=None)
    colors: Optional[np.ndarray] = None

    @classmethod
    def create(cls, coord: Coord, extent: LocalExtent, coefficients: np.ndarray,
               n_colors: int, b: Optional[np.ndarray] = None) -> "LogicalRank":
        padded = tuple(n + 2 for n in extent.dims)
        return cls(
            coord=coord,
            extent=extent,
            coef=coefficients[window(extent)],
            b=np.zeros(extent.dims) if b is None else b,
            x=np.zeros(padded),
            r=np.zeros(padded),
            colors=color_map(extent.offset, extent.dims, n_colors),
        )

    @property
    def lo(self) -> Tuple[int, ...]:
        return self.extent.offset

    @property
    def is_empty(self) -> bool:
        return self.extent.is_empty


def _send_slab(arr: np.ndarray, axis: int, side: int) -> np.ndarray:
    """side 방향 이웃에게 보낼 경계 내부 줄 (앞 차원은 할로 포함)"""
    if axis == 0:
        return arr[-2 if side > 0 else 1, 1:-1]
    return arr[:, -2 if side > 0 else 1]


def _recv_view(arr: np.ndarray, axis: int, side: int):
    if axis == 0:
        return (-1 if side > 0 else 0, slice(1, -1))
    return (slice(None), -1 if side > 0 else 0)


def halo_exchange(tasks: Dict[Coord, LogicalRank], proc_dims: Tuple[int, ...], field_name: str,
                  log: EventLog, level: int, order: Iterable[Coord], phase: str = "") -> None:
    """
    차원 순서(x 다음 y)로 할로를 채웁니다. y 단계는 x 할로까지 보내므로 모서리 값도 전달됩니다.
    빈 영역의 태스크는 교환에 참여하지 않습니다.
    """
    order = list(order)
    for axis, p in enumerate(proc_dims):
        for coord in order:
            dest = tasks[coord]
            if dest.is_empty:
                continue
            for side in (-1, 1):
                nb = coord[axis] + side
                if not 0 <= nb < p:
                    continue
                src = tasks[coord[:axis] + (nb,) + coord[axis + 1:]]
                if src.is_empty:
                    continue
                slab = _send_slab(getattr(src, field_name), axis, -side)
                target = getattr(dest, field_name)
                target[_recv_view(target, axis, side)] = slab
                # 실제로 보낸 값의 수
                log.record(level, CommKind.EXCHANGE, src.coord, coord, slab.size * WORD_BYTES, phase)
