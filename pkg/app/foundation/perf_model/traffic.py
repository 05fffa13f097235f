"""
실제 랭크 타일링에서 모델 통신 항이 의미하는 정확한 메시지/바이트 수

교환은 포스탈 모델과 같이 이웃 면마다 메시지 하나, 면의 격자점 수만큼의 값입니다.
차원 순서 교환에서는 뒤 차원 메시지가 앞 차원 할로의 모서리 값을 함께 싣습니다.
"""
from math import prod
from typing import Dict, Sequence, Tuple

from app.domain.model.grid_schema import LocalExtent
from app.domain.model.perf_schema import RedistMode, Traffic
from app.foundation.perf_model.postal import WORD_BYTES

Coord = Tuple[int, ...]


def carried_values(dims: Sequence[int], axis: int) -> int:
    """
    axis 방향 메시지 하나가 면 외에 더 싣는 앞 차원 할로 값의 수.
    2차원에서는 x 메시지 0개, y 메시지 2개입니다.
    """
    with_halo = prod(n + 2 if e < axis else n for e, n in enumerate(dims) if e != axis)
    face = prod(n for e, n in enumerate(dims) if e != axis)
    return with_halo - face


def exchange_traffic(extents: Dict[Coord, LocalExtent], proc_dims: Sequence[int]) -> Traffic:
    """
    할로 교환 1회의 메시지/바이트 수. 빈 영역을 가진 랭크는 교환에 참여하지 않습니다.
    """
    messages = 0
    values = 0
    for coord, ext in extents.items():
        if ext.is_empty:
            continue
        for axis, p in enumerate(proc_dims):
            face = ext.size // ext.dims[axis]
            for step in (-1, 1):
                nb = coord[axis] + step
                if not 0 <= nb < p:
                    continue
                other = coord[:axis] + (nb,) + coord[axis + 1:]
                if extents[other].is_empty:
                    continue
                messages += 1
                values += face + carried_values(ext.dims, axis)
    return Traffic(messages=messages, bytes=values * WORD_BYTES)


def gather_traffic(members: Sequence[LocalExtent], mode: RedistMode) -> Traffic:
    """
    블록 gather(NonRedundant, 루트는 첫 원소) 또는 allgather(Redundant)의 통신량
    """
    if len(members) <= 1:
        return Traffic()
    senders = [e for e in members[1:] if not e.is_empty]
    if mode is RedistMode.NON_REDUNDANT:
        return Traffic(messages=len(senders), bytes=sum(e.size for e in senders) * WORD_BYTES)
    # allgather: 비어 있지 않은 각 구성원의 값이 나머지 모든 구성원에게 전달됨
    owners = [e for e in members if not e.is_empty]
    fan_out = len(members) - 1
    return Traffic(
        messages=len(owners) * fan_out,
        bytes=sum(e.size for e in owners) * fan_out * WORD_BYTES,
    )


def scatter_traffic(members: Sequence[LocalExtent], mode: RedistMode) -> Traffic:
    """
    NonRedundant scatter: gather 메시지마다 하나씩, 하위 영역과 폭 1 할로 링을 함께 보냄
    """
    if mode is RedistMode.REDUNDANT or len(members) <= 1:
        return Traffic()
    senders = [e for e in members[1:] if not e.is_empty]
    return Traffic(
        messages=len(senders),
        bytes=sum(prod(n + 2 for n in e.dims) for e in senders) * WORD_BYTES,
    )
