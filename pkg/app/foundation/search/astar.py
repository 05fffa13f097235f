"""
상태 공간 최소 비용 경로 탐색 (A*와 전수 DFS)

목표 상태는 종단 비용(goal_cost)을 가지며, 목표 상태가 생성될 때 f = g + goal_cost로
우선순위 큐에 들어갑니다. 닫힌 목록은 두지 않고 더 싼 경로가 발견되면 상태를 다시 엽니다.
"""
import heapq
import math
from dataclasses import dataclass
from typing import Dict, Generic, Hashable, Iterable, List, Optional, Protocol, Tuple, TypeVar

S = TypeVar("S", bound=Hashable)


class SearchProblem(Protocol[S]):
    def start(self) -> S: ...

    def successors(self, s: S) -> Iterable[Tuple[S, float]]: ...

    def heuristic(self, s: S) -> float: ...

    def is_goal(self, s: S) -> bool: ...

    def goal_cost(self, s: S) -> float: ...

    def order_key(self, s: S) -> tuple: ...


@dataclass
class SearchResult(Generic[S]):
    cost: float
    path: List[S]
    edge_costs: List[float]
    expanded: int = 0
    generated: int = 0


def _trace(parent: Dict, edge: Dict, s) -> Tuple[List, List[float]]:
    path, costs = [s], []
    while s in parent:
        costs.append(edge[s])
        s = parent[s]
        path.append(s)
    return path[::-1], costs[::-1]


def astar(problem: SearchProblem[S]) -> SearchResult[S]:
    """
    A* 탐색

    Args:
        problem: 탐색 문제 정의

    Returns:
        SearchResult: 최소 f 목표까지의 경로, 전이 비용, 확장/생성 노드 수

    Raises:
        ValueError: 목표 상태에 도달할 수 없는 경우
    """
    s0 = problem.start()
    running: Dict[S, float] = {s0: 0.0}
    parent: Dict[S, S] = {}
    edge: Dict[S, float] = {}
    counter = 0

    def push(heap, g: float, s: S) -> None:
        nonlocal counter
        if problem.is_goal(s):
            f = g + problem.goal_cost(s)
        else:
            f = g + problem.heuristic(s)
        heapq.heappush(heap, (f, problem.order_key(s), counter, g, s))
        counter += 1

    heap: list = []
    push(heap, 0.0, s0)
    expanded = 0
    generated = 1

    while heap:
        f, _, _, g, s = heapq.heappop(heap)
        if g > running.get(s, math.inf):
            # 더 싼 경로로 이미 다시 열린 상태
            continue
        expanded += 1
        if problem.is_goal(s):
            path, costs = _trace(parent, edge, s)
            return SearchResult(cost=f, path=path, edge_costs=costs + [problem.goal_cost(s)],
                                expanded=expanded, generated=generated)
        for nxt, w in problem.successors(s):
            g2 = g + w
            if g2 < running.get(nxt, math.inf):
                running[nxt] = g2
                parent[nxt] = s
                edge[nxt] = w
                push(heap, g2, nxt)
                generated += 1

    raise ValueError("목표 상태에 도달할 수 없습니다.")


def brute_force(problem: SearchProblem[S]) -> SearchResult[S]:
    """
    모든 경로를 깊이 우선으로 탐색하여 전역 최적 경로를 찾습니다.
    expanded는 탐색 트리에서 방문한 노드 수입니다.
    """
    best: Optional[Tuple[float, List[S], List[float]]] = None
    visited = 0

    def visit(s: S, g: float, path: List[S], costs: List[float]) -> None:
        nonlocal best, visited
        visited += 1
        if problem.is_goal(s):
            last = problem.goal_cost(s)
            total = g + last
            if best is None or total < best[0]:
                best = (total, list(path), costs + [last])
            return
        succ = sorted(problem.successors(s), key=lambda item: problem.order_key(item[0]))
        for nxt, w in succ:
            path.append(nxt)
            visit(nxt, g + w, path, costs + [w])
            path.pop()

    s0 = problem.start()
    visit(s0, 0.0, [s0], [])
    if best is None:
        raise ValueError("목표 상태에 도달할 수 없습니다.")
    return SearchResult(cost=best[0], path=best[1], edge_costs=best[2],
                        expanded=visited, generated=visited)
