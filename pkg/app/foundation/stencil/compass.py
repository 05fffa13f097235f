"""
스텐실 계수와 보간 가중치의 방위(compass) 순서 정의

계수 배열의 마지막 축은 (C, W, E, S, N, SW, SE, NW, NE) 순서입니다.
보간 가중치 배열의 마지막 축은 (nw, n, ne, w, e, sw, s, se) 순서입니다.
축 0은 x(dim 0), 축 1은 y(dim 1)이며 W는 x-1, S는 y-1 방향입니다.
"""

C, W, E, S, N, SW, SE, NW, NE = range(9)

STENCIL_NAMES = ("C", "W", "E", "S", "N", "SW", "SE", "NW", "NE")

# 스텐실 방향별 (dx, dy) 오프셋
STENCIL_OFFSETS = {
    C: (0, 0),
    W: (-1, 0),
    E: (1, 0),
    S: (0, -1),
    N: (0, 1),
    SW: (-1, -1),
    SE: (1, -1),
    NW: (-1, 1),
    NE: (1, 1),
}
OFFSET_TO_STENCIL = {v: k for k, v in STENCIL_OFFSETS.items()}

# 보간 가중치 인덱스: 조대점 (I, J)에서 세밀점 (2I+dx, 2J+dy)로 가는 가중치
P_NW, P_N, P_NE, P_W, P_E, P_SW, P_S, P_SE = range(8)

INTERP_NAMES = ("nw", "n", "ne", "w", "e", "sw", "s", "se")

INTERP_OFFSETS = {
    P_NW: (-1, 1),
    P_N: (0, 1),
    P_NE: (1, 1),
    P_W: (-1, 0),
    P_E: (1, 0),
    P_SW: (-1, -1),
    P_S: (0, -1),
    P_SE: (1, -1),
}

FIVE_POINT_SIZE = 5
NINE_POINT_SIZE = 9
