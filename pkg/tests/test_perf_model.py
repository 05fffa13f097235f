from math import prod

import numpy as np
import pytest

from app.domain.model.grid_schema import GlobalGrid, LocalExtent, ProcBlock, ProcessorGrid
from app.domain.model.perf_schema import LevelShape, MachineParams, RedistMode, Traffic
from app.domain.model.sim_schema import CommKind, EventLog
from app.domain.service.perf_model_service import perf_model_service
from app.foundation.grid import build_grid_sequence, build_layouts
from app.foundation.perf_model import (
    carried_values,
    ceil_log2,
    exchange_traffic,
    gather_traffic,
    scatter_traffic,
    t_agglomerate,
    t_cgsolve,
    t_exchange,
    t_gather,
    t_interp,
    t_residual,
    t_restrict,
    t_smooth,
)
from app.foundation.simulator import LogicalRank, halo_exchange

BLUE_WATERS = MachineParams(alpha=0.65e-6, beta=5.65e-9, gamma=0.44e-9)
FLOPS_ONLY = MachineParams(alpha=0.0, beta=0.0, gamma=1.0)


def shape(local, ns=9, colors=4, nu1=2, nu2=1, global_dims=None, proc=None):
    return LevelShape(local_dims=local, global_dims=global_dims or local, proc_dims=proc or (1,) * len(local),
                      stencil_points=ns, colors=colors, nu1=nu1, nu2=nu2)


def block(p, n):
    return ProcBlock(ranks_per_dim=(p,), block_size=p, local_points=n)


def test_ceil_log2():
    assert [ceil_log2(n) for n in (1, 2, 3, 4, 5, 2048)] == [0, 1, 2, 2, 3, 11]


def test_exchange_formula():
    m = MachineParams(alpha=1.0, beta=0.5, gamma=0.0)
    assert t_exchange((4, 4), m) == 2 * 2 * 1.0 + 2 * 8 * 8 * 0.5


def test_smooth_without_sweeps_is_free():
    assert t_smooth(shape((568, 71), nu1=0, nu2=0), BLUE_WATERS) == 0.0


def test_smooth_compute_term_by_hand():
    m = BLUE_WATERS.computation_only()
    assert t_smooth(shape((568, 71)), m) == pytest.approx(2 * 9 * 40328 * 3 * 0.44e-9, rel=1e-15)


def test_smooth_is_linear_in_colors():
    two = t_smooth(shape((30, 20), colors=2), BLUE_WATERS)
    three = t_smooth(shape((30, 20), colors=3), BLUE_WATERS)
    assert three - two == pytest.approx(3 * t_exchange((30, 20), BLUE_WATERS), rel=1e-12)


def test_residual_and_restrict_compute_terms():
    s = shape((4, 4))
    assert t_residual(s, FLOPS_ONLY) == 288
    assert t_restrict(s, FLOPS_ONLY) == 288
    comm = MachineParams(alpha=1.0, beta=1.0, gamma=0.0)
    assert t_residual(s, comm) == t_exchange((4, 4), comm)
    assert t_restrict(s, comm) == 0.0
    assert t_restrict(s, BLUE_WATERS) < t_residual(s, BLUE_WATERS)


def test_interp_flop_counts():
    assert t_interp(shape((9, 9)), shape((5, 5)), FLOPS_ONLY) == 641
    assert t_interp(shape((9, 9, 9), ns=27), shape((5, 5, 5), ns=27), FLOPS_ONLY) == 8759
    zero = MachineParams(alpha=0.0, beta=0.0, gamma=0.0)
    assert t_interp(shape((9, 9)), shape((5, 5)), zero) == 0.0


def test_gather_by_hand():
    m = BLUE_WATERS
    assert t_gather(block(1, 500), m) == 0.0
    assert t_gather(block(2, 1278), m) == pytest.approx(m.alpha + 1278 * 0.5 * 8 * m.beta, rel=1e-15)
    latency_free = MachineParams(alpha=0.0, beta=m.beta, gamma=m.gamma)
    assert t_gather(block(4, 100), latency_free) == pytest.approx(100 * 0.75 * 8 * m.beta, rel=1e-15)


def test_agglomerate_modes():
    b = block(2048, 36352 * 2272)
    assert t_agglomerate(None, BLUE_WATERS, RedistMode.NON_REDUNDANT) == 0.0
    red = t_agglomerate(b, BLUE_WATERS, RedistMode.REDUNDANT)
    non = t_agglomerate(b, BLUE_WATERS, RedistMode.NON_REDUNDANT)
    assert non == 2 * red
    each_way = 11 * BLUE_WATERS.alpha + b.local_points * (2047 / 2048) * 8 * BLUE_WATERS.beta
    assert red == pytest.approx(each_way, rel=1e-15)


def test_cgsolve():
    assert t_cgsolve(GlobalGrid(dims=(3, 3)), None, FLOPS_ONLY) == 81
    free = MachineParams(alpha=0.0, beta=0.0, gamma=0.0)
    assert t_cgsolve(GlobalGrid(dims=(3, 3)), None, free) == 0.0
    assert t_cgsolve(GlobalGrid(dims=(71, 71)), None, BLUE_WATERS) == pytest.approx(1.118e-2, rel=1e-3)


def test_vcycle_single_level_is_cgsolve_only():
    shapes = perf_model_service.level_shapes_for_path([ProcessorGrid(dims=(1, 1))], [GlobalGrid(dims=(3, 3))])
    cost = perf_model_service.t_vcycle(shapes, BLUE_WATERS)
    assert cost.total == cost.cgsolve == 81 * BLUE_WATERS.gamma
    assert cost.smooth == cost.residual == cost.restrict == cost.interp == cost.agglomerate == 0.0


def _exchange(n, m):
    return 2 * len(n) * m.alpha + 2 * sum(n) * 8 * m.beta


def _tile_widths(fine_dims, origin, procs, depth):
    """origin 분할을 procs로 묶은 타일의 경계를 depth번 조대화한 뒤의 차원별 최대 폭"""
    out = []
    for n, p0, p in zip(fine_dims, origin, procs):
        base, rem = divmod(n, p0)
        starts = [c * base + min(c, rem) for c in range(p0 + 1)]
        group = p0 // p
        edges = [-(-starts[c * group] // 2 ** depth) for c in range(p + 1)]
        out.append(max(b - a for a, b in zip(edges, edges[1:])))
    return tuple(out)


def _straight_line_total(grids, procs, m, mode, nu1, nu2):
    """포스탈 모델 식을 그대로 옮긴 독립 계산"""
    sums = {k: 0 for k in ("smooth", "residual", "restrict", "interp", "agglomerate", "cgsolve")}
    last = len(grids) - 1
    fine, origin = grids[0].dims, procs[0].dims
    for d, (g, p) in enumerate(zip(grids, procs)):
        n = _tile_widths(fine, origin, p.dims, d)
        ns, nc = (5, 2) if d == 0 else (9, 4)
        agg = 0.0
        if d > 0 and procs[d - 1] != p:
            pb = prod(f // c for f, c in zip(procs[d - 1].dims, p.dims))
            nb = prod(n)
            gather = ceil_log2(pb) * m.alpha + nb * ((pb - 1) / pb) * 8 * m.beta
            agg = gather + (0.0 if mode is RedistMode.REDUNDANT else gather)
        if d == last:
            sums["cgsolve"] = sums["cgsolve"] + (agg + g.size ** 2 * m.gamma)
            continue
        sweeps = nu1 + nu2
        sums["smooth"] = sums["smooth"] + (2 * ns * prod(n) * sweeps * m.gamma + nc * sweeps * _exchange(n, m))
        sums["residual"] = sums["residual"] + (2 * ns * prod(n) * m.gamma + _exchange(n, m))
        sums["restrict"] = sums["restrict"] + 2 * ns * prod(n) * m.gamma
        nco = _tile_widths(fine, origin, p.dims, d + 1)
        sums["interp"] = sums["interp"] + ((prod(n) + 20 * prod(nco) + 6 * sum(nco)) * m.gamma + _exchange(n, m))
        sums["agglomerate"] = sums["agglomerate"] + agg
    return (sums["smooth"] + sums["residual"] + sums["restrict"]
            + sums["interp"] + sums["agglomerate"] + sums["cgsolve"])


@pytest.mark.parametrize("seed", range(100))
def test_vcycle_total_matches_straight_line_evaluation(seed):
    rng = np.random.default_rng(seed)
    fine = GlobalGrid(dims=(int(rng.integers(5, 400)), int(rng.integers(5, 400))))
    grids = build_grid_sequence(fine)
    p = [int(2 ** rng.integers(0, 6)), int(2 ** rng.integers(0, 6))]
    procs = []
    for d in range(len(grids)):
        if d == len(grids) - 1:
            p = [1, 1]
        elif d > 0 and rng.random() < 0.4:
            axis = int(rng.integers(0, 2))
            p[axis] = max(1, p[axis] // 2)
        procs.append(ProcessorGrid(dims=tuple(p)))
    m = MachineParams(alpha=float(rng.uniform(0, 1e-5)), beta=float(rng.uniform(0, 1e-8)),
                      gamma=float(rng.uniform(1e-10, 1e-9)))
    mode = RedistMode.REDUNDANT if seed % 2 else RedistMode.NON_REDUNDANT
    shapes = perf_model_service.level_shapes_for_path(procs, grids)
    cost = perf_model_service.t_vcycle(shapes, m, mode)
    assert cost.total == _straight_line_total(grids, procs, m, mode, 2, 1)
    parts = cost.smooth + cost.residual + cost.restrict + cost.interp + cost.agglomerate + cost.cgsolve
    assert cost.total == parts
    layouts = build_layouts(grids, procs)
    assert [s.local_dims for s in shapes] == [lay.widest() for lay in layouts]


def test_machine_file_defaults_to_blue_waters(monkeypatch):
    monkeypatch.delenv("REDIST_MACHINE_FILE", raising=False)
    assert perf_model_service.load_machine() == BLUE_WATERS


def ext(dims, offset):
    return LocalExtent(dims=dims, offset=offset)


def test_carried_values_count_earlier_halos():
    assert carried_values((4, 3), 0) == 0
    assert carried_values((4, 3), 1) == 2
    assert carried_values((4, 3, 2), 2) == 6 * 5 - 4 * 3


def test_exchange_traffic_skips_empty_neighbours():
    tiles = {(0, 0): ext((3, 4), (0, 0)), (1, 0): ext((3, 4), (3, 0)), (2, 0): ext((0, 4), (6, 0))}
    t = exchange_traffic(tiles, (3, 1))
    assert t.messages == 2
    assert t.bytes == 2 * 4 * 8


def quadrants():
    return {(i, j): ext((3, 2), (3 * i, 2 * j)) for i in range(2) for j in range(2)}


def test_exchange_traffic_by_hand():
    # 랭크마다 x 메시지 2개 값, y 메시지 3 + 모서리 2개 값
    t = exchange_traffic(quadrants(), (2, 2))
    assert t == Traffic(messages=8, bytes=(4 * 2 + 4 * 5) * 8)


def test_exchange_traffic_matches_logged_halo_exchange():
    coefficients = np.zeros((6, 4, 9))
    tasks = {c: LogicalRank.create(c, e, coefficients, 2) for c, e in quadrants().items()}
    log = EventLog()
    halo_exchange(tasks, (2, 2), "x", log, 0, sorted(tasks))
    assert log.traffic(0, CommKind.EXCHANGE) == exchange_traffic(quadrants(), (2, 2))


def test_rank_exchange_traffic_follows_t_exchange():
    s = shape((30, 20), colors=2)
    t = perf_model_service.rank_exchange_traffic(s)
    exchanges = 2 * 3 + 2
    assert t == Traffic(messages=exchanges * 4, bytes=exchanges * 2 * 50 * 8)
    comm = MachineParams(alpha=1.0, beta=1.0, gamma=0.0)
    assert exchanges * t_exchange((30, 20), comm) == t.messages + t.bytes


def test_rank_exchange_bounds_add_corner_values():
    grids = build_grid_sequence(GlobalGrid(dims=(33, 33)))
    procs = [ProcessorGrid(dims=(4, 4))] * (len(grids) - 1) + [ProcessorGrid(dims=(1, 1))]
    layouts = build_layouts(grids, procs)
    bounds = perf_model_service.rank_exchange_bounds(layouts)
    assert sorted(bounds) == list(range(len(grids) - 1))
    # 33 = 9 + 8 + 8 + 8 → 최대 폭 9, 모서리 값은 교환마다 y 메시지 2개 × 2
    assert bounds[0] == Traffic(messages=8 * 4, bytes=8 * (2 * 18 + 4) * 8)


def test_gather_and_scatter_traffic():
    members = [ext((2, 2), (0, 0)), ext((2, 2), (2, 0)), ext((0, 2), (4, 0))]
    non = gather_traffic(members, RedistMode.NON_REDUNDANT)
    assert (non.messages, non.bytes) == (1, 4 * 8)
    red = gather_traffic(members, RedistMode.REDUNDANT)
    assert (red.messages, red.bytes) == (4, 8 * 2 * 8)
    sc = scatter_traffic(members, RedistMode.NON_REDUNDANT)
    assert (sc.messages, sc.bytes) == (1, 16 * 8)
    assert scatter_traffic(members, RedistMode.REDUNDANT) == Traffic()
    assert gather_traffic(members[:1], RedistMode.NON_REDUNDANT) == Traffic()


def test_vcycle_traffic_counts_exchanges_and_gathers():
    grids = build_grid_sequence(GlobalGrid(dims=(33, 33)))
    procs = [ProcessorGrid(dims=(4, 4))] * (len(grids) - 1) + [ProcessorGrid(dims=(1, 1))]
    shapes = perf_model_service.level_shapes_for_path(procs, grids)
    cost = perf_model_service.t_vcycle(shapes, BLUE_WATERS, RedistMode.REDUNDANT)
    exchanges = [s.colors * 3 + 2 for s in shapes[:-1]]
    assert cost.messages == sum(4 * k for k in exchanges) + ceil_log2(16)
