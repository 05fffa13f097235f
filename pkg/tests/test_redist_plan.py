import os

import numpy as np
import pytest

from app.domain.model.grid_schema import GlobalGrid, ProcessorGrid
from app.domain.model.perf_schema import MachineParams, RedistMode
from app.domain.model.redist_schema import HeuristicKind, TriggerThreshold
from app.domain.repository.report_repository import load_paths
from app.domain.service.bench_service import wide_instance
from app.domain.service.redist_plan_service import (
    RedistSearchSpace,
    enumerate_coarse_grids,
    redist_plan_service,
    redistribution_trigger,
)
from app.foundation.errors import PlanError

BLUE_WATERS = MachineParams(alpha=0.65e-6, beta=5.65e-9, gamma=0.44e-9)
LATENCY_BOUND = MachineParams(alpha=2.0e-5, beta=1.0e-9, gamma=0.44e-9)
BANDWIDTH_BOUND = MachineParams(alpha=1.0e-7, beta=4.0e-8, gamma=0.44e-9)
MACHINES = {"blue_waters": BLUE_WATERS, "latency_bound": LATENCY_BOUND, "bandwidth_bound": BANDWIDTH_BOUND}
FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def reference_space(mode=RedistMode.NON_REDUNDANT):
    return RedistSearchSpace(GlobalGrid(dims=(568 * 64, 71 * 32)), ProcessorGrid(dims=(64, 32)),
                             BLUE_WATERS, mode=mode)


def best_remaining(space, s, memo=None):
    memo = {} if memo is None else memo
    if s.key not in memo:
        if space.is_goal(s):
            memo[s.key] = space.goal_cost(s)
        else:
            memo[s.key] = min(w + best_remaining(space, nxt, memo) for nxt, w in space.successors(s))
    return memo[s.key]


def test_enumeration_on_16x8_matches_reference_listing():
    found = enumerate_coarse_grids(ProcessorGrid(dims=(16, 8)), GlobalGrid(dims=(1136, 71)))
    assert [p.dims for p in found] == [(1, 1), (2, 1), (4, 1), (8, 1), (16, 1), (16, 2), (16, 4)]


def test_enumeration_rows_at_transition():
    space = RedistSearchSpace(GlobalGrid(dims=(9088, 568)), ProcessorGrid(dims=(16, 8)), BLUE_WATERS,
                              threshold=TriggerThreshold(min_extent=10))
    start = space.start()
    assert space.grids[space.transition_depth(start)].dims == (1136, 71)
    rows = redist_plan_service.enumeration_rows(space)
    assert [(r["proc"], r["local"]) for r in rows] == [
        ("1×1", "1136×71"), ("2×1", "568×71"), ("4×1", "284×71"), ("8×1", "142×71"),
        ("16×1", "71×71"), ("16×2", "71×36"), ("16×4", "71×18"),
    ]


def test_enumeration_ties_prefer_lower_dimension():
    found = enumerate_coarse_grids(ProcessorGrid(dims=(2, 2)), GlobalGrid(dims=(8, 8)))
    assert [p.dims for p in found] == [(1, 1), (2, 1)]
    assert enumerate_coarse_grids(ProcessorGrid(dims=(1, 1)), GlobalGrid(dims=(8, 8))) == []


@pytest.mark.parametrize("proc", [(64, 32), (16, 8), (8, 8, 4), (1, 32)])
def test_enumeration_length_and_monotonicity(proc):
    p = ProcessorGrid(dims=proc)
    found = enumerate_coarse_grids(p, GlobalGrid(dims=(1000,) * len(proc)))
    assert len(found) == int(np.log2(p.total))
    totals = [q.total for q in found]
    assert totals == sorted(totals) and len(set(totals)) == len(totals)
    assert all(all(a <= b for a, b in zip(q.dims, proc)) for q in found)


def test_trigger_thresholds():
    t = TriggerThreshold()
    assert not redistribution_trigger((568, 71), t)
    assert redistribution_trigger((2, 8), t)
    assert not redistribution_trigger((4, 4), t)
    assert redistribution_trigger((5, 3), t)


def test_single_rank_needs_no_search():
    space = RedistSearchSpace(GlobalGrid(dims=(65, 65)), ProcessorGrid(dims=(1, 1)), BLUE_WATERS)
    path, stats = redist_plan_service.search_astar(space)
    assert path.proc_sequence == [(1, 1)]
    assert path.total == space.goal_cost(space.start())
    assert stats.expanded_nodes == 1


def test_dimension_mismatch_is_a_plan_error():
    with pytest.raises(PlanError):
        RedistSearchSpace(GlobalGrid(dims=(65, 65)), ProcessorGrid(dims=(2, 2, 2)), BLUE_WATERS)


@pytest.mark.parametrize("h", range(13))
def test_wide_instance_tree_size(h):
    proc, grid = wide_instance(h)
    space = RedistSearchSpace(grid, proc, BLUE_WATERS)
    _, stats = redist_plan_service.search_brute(space)
    assert stats.expanded_nodes == 2 ** h


def random_space(seed, machine=None, max_exp=4):
    rng = np.random.default_rng(seed)
    grid = GlobalGrid(dims=(int(rng.integers(20, 600)), int(rng.integers(20, 600))))
    proc = ProcessorGrid(dims=(int(2 ** rng.integers(0, max_exp + 1)), int(2 ** rng.integers(0, max_exp + 1))))
    machine = machine or MachineParams(alpha=float(10 ** rng.uniform(-8, -4)), beta=float(10 ** rng.uniform(-11, -7)),
                            gamma=float(10 ** rng.uniform(-11, -8)))
    mode = RedistMode.REDUNDANT if seed % 2 else RedistMode.NON_REDUNDANT
    return RedistSearchSpace(grid, proc, machine, mode=mode)


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("machine", sorted(MACHINES))
def test_astar_matches_exhaustive_search(machine, seed):
    space = random_space(seed, MACHINES[machine], max_exp=5)
    a_path, a_stats = redist_plan_service.search_astar(space)
    b_path, b_stats = redist_plan_service.search_brute(space)
    assert a_path.total == b_path.total
    assert a_stats.expanded_nodes <= b_stats.expanded_nodes
    assert a_path.states[-1].is_goal
    assert a_path.total == pytest.approx(sum(a_path.transition_costs), rel=1e-12)


@pytest.mark.parametrize("machine", sorted(MACHINES))
@pytest.mark.parametrize("proc, grid", [((32, 32), (513, 513)), ((1024, 1), (4097, 33))])
def test_astar_matches_exhaustive_search_on_1024_ranks(machine, proc, grid):
    space = RedistSearchSpace(GlobalGrid(dims=grid), ProcessorGrid(dims=proc), MACHINES[machine])
    a_path, _ = redist_plan_service.search_astar(space)
    b_path, _ = redist_plan_service.search_brute(space)
    assert a_path.total == b_path.total


@pytest.mark.parametrize("seed", range(15))
def test_heuristic_never_overestimates(seed):
    space = random_space(seed)
    pending = [space.start()]
    seen = set()
    memo = {}
    while pending:
        s = pending.pop()
        if s.key in seen:
            continue
        seen.add(s.key)
        assert space.heuristic(s) <= best_remaining(space, s, memo) * (1 + 1e-12)
        pending.extend(nxt for nxt, _ in space.successors(s))


def test_heuristic_is_exact_at_goal_without_communication():
    space = RedistSearchSpace(GlobalGrid(dims=(300, 200)), ProcessorGrid(dims=(8, 4)),
                              BLUE_WATERS.computation_only())
    goal = space.state(ProcessorGrid(dims=(1, 1)), 3)
    assert space.heuristic(goal) == space.goal_cost(goal)


def test_weighted_heuristic_still_reaches_goal():
    space = reference_space()
    weighted = RedistSearchSpace(space.grids[0], space.proc, BLUE_WATERS, heuristic=HeuristicKind.WEIGHTED)
    w_path, _ = redist_plan_service.search_astar(weighted)
    best, _ = redist_plan_service.search_astar(space)
    assert w_path.states[-1].is_goal
    assert w_path.total >= best.total * (1 - 1e-12)


def test_path_cost_prefix_and_evaluation_agree_with_search():
    space = reference_space()
    path, _ = redist_plan_service.search_astar(space)
    again = redist_plan_service.evaluate_path(space, path.proc_sequence)
    assert again.is_valid
    assert again.total == pytest.approx(path.total, rel=1e-12)
    g = redist_plan_service.path_cost_g(space, path.states)
    assert g + space.goal_cost(path.states[-1]) == pytest.approx(path.total, rel=1e-12)
    assert redist_plan_service.heuristic_h(space, space.start()) <= path.total


def test_reference_path_ranking():
    space = reference_space()
    paths = load_paths(os.path.join(FIXTURES, "paths", "reference_paths.txt"))
    totals = {label: redist_plan_service.evaluate_path(space, procs) for label, procs in paths}
    cheapest = min(totals, key=lambda k: totals[k].total)
    dearest = max(totals, key=lambda k: totals[k].total)
    assert cheapest == "1"
    assert dearest == "0"
    assert [k for k, p in totals.items() if not p.is_valid] == ["3"]
    best, _ = redist_plan_service.search_astar(space)
    assert best.total <= totals["1"].total * (1 + 1e-12)


def test_incomplete_path_gets_final_agglomeration():
    space = reference_space()
    path = redist_plan_service.evaluate_path(space, [(64, 32), (64, 4), (8, 1), (4, 1)])
    assert path.proc_sequence[-1] == (1, 1)
    assert len(path.transition_costs) == len(path.states)
    assert path.is_valid


def test_structurally_invalid_paths():
    space = reference_space()
    with pytest.raises(PlanError):
        redist_plan_service.evaluate_path(space, [(32, 32), (1, 1)])
    with pytest.raises(PlanError):
        redist_plan_service.evaluate_path(space, [(64, 32), (64, 64), (1, 1)])
    with pytest.raises(PlanError):
        redist_plan_service.evaluate_path(space, [(64, 32), (64, 16), (64, 16), (1, 1)])


def test_parse_path_accepts_both_arrows():
    assert redist_plan_service.parse_path("64x32 -> 16×1 → 1x1") == [(64, 32), (16, 1), (1, 1)]


def test_run_procs_cover_every_level():
    space = reference_space()
    path, _ = redist_plan_service.search_astar(space)
    procs = redist_plan_service.run_procs(space, path)
    assert len(procs) == len(space.grids)
    assert procs[0] == space.proc
    assert procs[-1].total == 1
    assert all(a.total >= b.total for a, b in zip(procs, procs[1:]))


@pytest.mark.parametrize("n", [257, 100])
@pytest.mark.parametrize("mode", [RedistMode.NON_REDUNDANT, RedistMode.REDUNDANT])
def test_optimal_path_keeps_every_tile_populated(n, mode):
    space = RedistSearchSpace(GlobalGrid(dims=(n, n)), ProcessorGrid(dims=(8, 8)), BLUE_WATERS, mode=mode)
    path, _ = redist_plan_service.search_astar(space)
    for s, nxt in zip(path.states, path.states[1:]):
        k = space.transition_depth(s)
        assert nxt.depth == k
        assert space.admits(s.proc, nxt.proc, k)
        assert space.tiles_survive(s.proc, k)
    assert redist_plan_service.evaluate_path(space, path.proc_sequence).is_valid


def test_transition_that_empties_tiles_is_flagged():
    space = RedistSearchSpace(GlobalGrid(dims=(257, 257)), ProcessorGrid(dims=(8, 8)), BLUE_WATERS)
    path = redist_plan_service.evaluate_path(space, [(8, 8), (8, 4), (4, 4), (4, 2), (1, 1)])
    assert not path.is_valid
    assert any(issue.startswith("4×4 → 4×2") for issue in path.issues)


def test_candidates_divide_the_current_grid():
    space = RedistSearchSpace(GlobalGrid(dims=(257, 257)), ProcessorGrid(dims=(8, 8)), BLUE_WATERS)
    for p in space.candidates(space.start()):
        assert all(f % c == 0 for f, c in zip((8, 8), p.dims))


def test_start_tiling_survives_until_its_transition():
    space = RedistSearchSpace(GlobalGrid(dims=(100, 100)), ProcessorGrid(dims=(8, 8)), BLUE_WATERS)
    assert space.transition_depth(space.start()) == 3
    assert space.tiles_survive(space.proc, 3)
    assert not space.tiles_survive(space.proc, 4)
