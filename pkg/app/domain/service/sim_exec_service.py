"""
논리 프로세서 격자 위에서 재분배 V-사이클을 실행하는 시뮬레이션 서비스

각 레벨의 태스크는 자신의 영역과 폭 1 할로만으로 계산합니다. 스무딩은 색마다 x를 교환하고,
잔차는 한 번 교환하며, 제한은 통신 없이, 보간 뒤에는 x를 한 번 교환합니다.
재분배 레벨에서는 블록 루트로 gather(또는 allgather) 후 조대 태스크가 사이클을 이어가고
결과는 할로 링과 함께 scatter 됩니다.
"""
import io
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import cho_solve

from app.domain.model.grid_schema import ProcessorGrid
from app.domain.model.perf_schema import RedistMode, Traffic
from app.domain.model.sim_schema import CommKind, EventLog, Mismatch, ReconcileReport
from app.domain.model.stencil_schema import GridFunction, MGHierarchy
from app.domain.service.perf_model_service import perf_model_service
from app.foundation.errors import ReconciliationError, SimulationError
from app.foundation.grid import LevelLayout, build_layouts, has_interior_gap
from app.foundation.perf_model import WORD_BYTES
from app.foundation.simulator import LogicalRank, halo_exchange, window
from app.foundation.stencil import interp_correct_patch, pad_weights, relax_color, residual_patch, restrict_patch

logger = logging.getLogger(__name__)

Coord = Tuple[int, ...]
Tasks = Dict[Coord, LogicalRank]


class _Run:
    """한 번의 재분배 V-사이클 실행 문맥"""

    def __init__(self, h: MGHierarchy, layouts: List[LevelLayout], mode: RedistMode,
                 log: EventLog, rng: Optional[np.random.Generator]):
        self.h = h
        self.layouts = layouts
        self.mode = mode
        self.log = log
        self.rng = rng
        L = h.num_levels
        # 세밀 → 조대 인덱스 d 의 연산자와 (d+1 → d) 보간 가중치
        self.ops = [h.levels[L - 1 - d].A for d in range(L)]
        self.weights = [h.levels[L - 1 - d].P.weights if d < L - 1 else None for d in range(L)]
        self.padded_weights = [pad_weights(w) if w is not None else None for w in self.weights]

    def order(self, tasks: Tasks) -> List[Coord]:
        coords = sorted(tasks)
        if self.rng is None:
            return coords
        return [coords[i] for i in self.rng.permutation(len(coords))]

    def make_tasks(self, d: int, extents, rhs: Optional[Dict[Coord, np.ndarray]] = None) -> Tasks:
        A = self.ops[d]
        return {
            c: LogicalRank.create(c, e, A.coefficients, A.pattern.colors, None if rhs is None else rhs[c])
            for c, e in extents.items()
        }

    def exchange(self, d: int, tasks: Tasks, field_name: str, phase: str) -> None:
        halo_exchange(tasks, self.layouts[d].proc.dims, field_name, self.log, d, self.order(tasks), phase)

    def smooth(self, d: int, tasks: Tasks, sweeps: int, phase: str) -> None:
        n_colors = self.ops[d].pattern.colors
        for _ in range(sweeps):
            for color in range(n_colors):
                for c in self.order(tasks):
                    t = tasks[c]
                    relax_color(t.coef, t.x, t.b, t.colors, color)
                self.exchange(d, tasks, "x", phase)

    def restrict(self, d: int, t: LogicalRank, coarse_ext) -> np.ndarray:
        w = self.weights[d][window(coarse_ext)]
        return restrict_patch(w, t.r, t.lo, coarse_ext.offset)

    def cycle(self, d: int, tasks: Tasks) -> None:
        if d == len(self.layouts) - 1:
            self.coarse_solve(tasks)
            return
        h = self.h
        self.smooth(d, tasks, h.nu1, "pre")
        for c in self.order(tasks):
            t = tasks[c]
            t.r[1:-1, 1:-1] = residual_patch(t.coef, t.x, t.b)
        self.exchange(d, tasks, "r", "residual")

        nxt = self.layouts[d + 1]
        if nxt.redistributed:
            coarse_x = self.redistributed_correction(d, tasks, nxt)
        else:
            rhs = {c: self.restrict(d, tasks[c], nxt.tasks[c]) for c in self.order(tasks)}
            coarse = self.make_tasks(d + 1, nxt.tasks, rhs)
            self.cycle(d + 1, coarse)
            coarse_x = {c: (coarse[c].x, nxt.tasks[c]) for c in tasks}

        wp = self.padded_weights[d]
        for c in self.order(tasks):
            t = tasks[c]
            xcp, ce = coarse_x[c]
            interp_correct_patch(t.x, t.r[1:-1, 1:-1], t.coef[..., 0], wp[window(ce, 1)], xcp,
                                 t.lo, ce.offset, h.residual_correction)
        self.exchange(d, tasks, "x", "interp")
        self.smooth(d, tasks, h.nu2, "post")

    def coarse_solve(self, tasks: Tasks) -> None:
        if len(tasks) != 1:
            raise SimulationError("최조대 레벨은 하나의 태스크에서 풀어야 합니다.")
        (t,) = tasks.values()
        t.x[1:-1, 1:-1] = cho_solve(self.h.coarse_factor, t.b.ravel()).reshape(t.b.shape)

    def redistributed_correction(self, d: int, tasks: Tasks, nxt: LevelLayout):
        """제한 → 블록 gather → 조대 태스크 사이클 → scatter 후 태스크별 조대 보정 (패딩 배열, 영역)"""
        restricted = {c: self.restrict(d, tasks[c], nxt.restricted[c]) for c in self.order(tasks)}
        blocks = {cc: nxt.members(cc) for cc in nxt.proc.coords()}
        rhs = gather_rhs(nxt, blocks, restricted, self.mode, self.log)
        coarse = self.make_tasks(d + 1, nxt.tasks, rhs)
        self.cycle(d + 1, coarse)
        return scatter_sol(nxt, blocks, coarse, self.mode, self.log)


def gather_rhs(layout: LevelLayout, blocks: Dict[Coord, List[Coord]], restricted: Dict[Coord, np.ndarray],
               mode: RedistMode, log: EventLog) -> Dict[Coord, np.ndarray]:
    """
    블록마다 구성원의 제한된 우변을 조대 태스크 영역으로 모읍니다.
    NonRedundant는 루트(가장 낮은 좌표)로 gather, Redundant는 모든 구성원으로 allgather 합니다.

    Raises:
        SimulationError: 구성원 영역이 조대 태스크 영역을 정확히 덮지 않는 경우
    """
    out = {}
    for cc, members in blocks.items():
        union = layout.tasks[cc]
        b = np.zeros(union.dims)
        covered = 0
        root = members[0]
        for m in members:
            ext = layout.restricted[m]
            if ext.is_empty:
                continue
            rel = tuple(slice(o - uo, o - uo + n) for o, uo, n in zip(ext.offset, union.offset, ext.dims))
            try:
                b[rel] = restricted[m]
            except ValueError as e:
                raise SimulationError(f"블록 {cc}의 구성원 {m} 영역이 조대 영역과 맞지 않습니다.") from e
            covered += ext.size
            nbytes = ext.size * WORD_BYTES
            if mode is RedistMode.NON_REDUNDANT:
                if m != root:
                    log.record(layout.depth, CommKind.GATHER, m, root, nbytes, "gather_rhs")
            else:
                for other in members:
                    if other != m:
                        log.record(layout.depth, CommKind.ALLGATHER, m, other, nbytes, "gather_rhs")
        if covered != union.size:
            raise SimulationError(f"블록 {cc}의 구성원 영역이 조대 영역 {union.dims}를 덮지 않습니다.")
        out[cc] = b
    return out


def scatter_sol(layout: LevelLayout, blocks: Dict[Coord, List[Coord]], coarse: Tasks,
                mode: RedistMode, log: EventLog) -> Dict[Coord, tuple]:
    """
    조대 태스크의 해를 구성원별 하위 영역과 폭 1 할로 링으로 나눕니다.
    Redundant는 모든 구성원이 같은 조대 태스크 복사본을 가지므로 이벤트가 없습니다.
    """
    out = {}
    for cc, members in blocks.items():
        union = layout.tasks[cc]
        root = members[0]
        xp = coarse[cc].x
        for m in members:
            ext = layout.restricted[m]
            rel = tuple(slice(o - uo, o - uo + n + 2) for o, uo, n in zip(ext.offset, union.offset, ext.dims))
            piece = xp[rel].copy()
            if mode is RedistMode.NON_REDUNDANT and m != root and not ext.is_empty:
                log.record(layout.depth, CommKind.SCATTER, root, m, piece.size * WORD_BYTES, "scatter_sol")
            out[m] = (piece, ext)
    return out


class SimExecService:

    def layouts(self, h: MGHierarchy, procs: Sequence[ProcessorGrid]) -> List[LevelLayout]:
        """
        계층과 레벨별 프로세서 격자로 태스크 배치를 만들고 시뮬레이션 가능 여부를 확인합니다.

        Raises:
            SimulationError: 블록 합집합이 직사각형이 아니거나 처리 레벨에 끊긴 할로 이웃이 있는 경우
        """
        grids = h.grids
        if len(procs) != len(grids):
            raise SimulationError(f"레벨 수 {len(grids)}와 프로세서 격자 수 {len(procs)}가 다릅니다.")
        if procs[-1].total != 1:
            raise SimulationError("최조대 레벨의 프로세서 격자는 1×1이어야 합니다.")
        try:
            layouts = build_layouts(grids, procs)
        except ValueError as e:
            raise SimulationError(str(e)) from e
        for lay in layouts[:-1]:
            if has_interior_gap(lay.tasks, lay.proc):
                raise SimulationError(f"레벨 {lay.depth} ({lay.grid}, {lay.proc})에 빈 영역이 끼어 있습니다.")
            nxt = layouts[lay.depth + 1]
            coarse = nxt.restricted if nxt.redistributed else nxt.tasks
            for c, e in lay.tasks.items():
                if not e.is_empty and coarse[c].is_empty:
                    raise SimulationError(f"레벨 {lay.depth} 랭크 {c}의 영역 {e.dims}가 조대화 후 비어 보간 이웃을 잃습니다.")
        return layouts

    def vcycle_redist(self, h: MGHierarchy, procs: Sequence[ProcessorGrid], x: GridFunction,
                      b: GridFunction, mode: RedistMode = RedistMode.NON_REDUNDANT,
                      log: Optional[EventLog] = None, seed: Optional[int] = None,
                      layouts: Optional[List[LevelLayout]] = None) -> Tuple[GridFunction, EventLog]:
        """
        재분배 V-사이클 한 번. seed가 주어지면 태스크 실행 순서를 섞습니다.

        Returns:
            Tuple[GridFunction, EventLog]: 갱신된 해와 (누적) 이벤트 로그
        """
        layouts = layouts or self.layouts(h, procs)
        log = log if log is not None else EventLog()
        rng = np.random.default_rng(seed) if seed is not None else None
        run = _Run(h, layouts, mode, log, rng)

        fine = layouts[0]
        rhs = {c: b.values[window(e)].copy() for c, e in fine.tasks.items()}
        tasks = run.make_tasks(0, fine.tasks, rhs)
        xp_global = np.pad(x.values, 1)
        for c, t in tasks.items():
            t.x[...] = xp_global[window(t.extent, 1)]

        run.cycle(0, tasks)

        out = np.zeros_like(x.values)
        for t in tasks.values():
            out[window(t.extent)] = t.x[1:-1, 1:-1]
        return GridFunction(values=out, extent=x.extent), log

    def simulate(self, h: MGHierarchy, procs: Sequence[ProcessorGrid], b: GridFunction, cycles: int,
                 mode: RedistMode = RedistMode.NON_REDUNDANT,
                 seed: Optional[int] = None) -> Tuple[GridFunction, EventLog, ReconcileReport]:
        """
        재분배 V-사이클을 cycles번 반복하고 이벤트 로그를 모델 통신량과 조정합니다.

        Raises:
            SimulationError: 배치가 시뮬레이션 불가능한 경우
            ReconciliationError: 이벤트 로그가 모델과 다른 경우
        """
        layouts = self.layouts(h, procs)
        log = EventLog()
        x = GridFunction.zeros(b.values.shape)
        for k in range(cycles):
            x, log = self.vcycle_redist(h, procs, x, b, mode, log,
                                        None if seed is None else seed + k, layouts)
        report = self.reconcile(log, layouts, mode, h.nu1, h.nu2, cycles)
        logger.info("시뮬레이션 완료: 사이클 %d, 이벤트 %d개, 조정 항목 %d개 (불일치 %d)",
                    cycles, len(log.events), report.checked, len(report.mismatches))
        self.require_reconciled(report)
        return x, log, report

    def reconcile(self, log: EventLog, layouts: Sequence[LevelLayout], mode: RedistMode,
                  nu1: int = 2, nu2: int = 1, cycles: int = 1) -> ReconcileReport:
        """
        이벤트 로그의 레벨·종류별 메시지/바이트 수를 성능 모델이 의미하는 값과 비교하고,
        랭크별 교환량이 t_vcycle의 랭크당 교환 통신량(모서리 값 포함)을 넘지 않는지 확인합니다.
        """
        expected = perf_model_service.implied_traffic(layouts, mode, nu1, nu2)
        report = ReconcileReport(mode=mode)
        keys = sorted(set(expected) | set(log.counters), key=lambda k: (k[0], k[1].value))
        for level, kind in keys:
            want = expected.get((level, kind), Traffic()).scaled(cycles)
            got = log.traffic(level, kind)
            report.checked += 1
            if want != got:
                report.mismatches.append(Mismatch(level=level, kind=kind, expected=want, actual=got))
                logger.warning("통신량 불일치: 레벨 %d %s 예상 %d/%dB 실제 %d/%dB",
                               level, kind.value, want.messages, want.bytes, got.messages, got.bytes)
        for level, bound in perf_model_service.rank_exchange_bounds(layouts, nu1, nu2).items():
            limit = bound.scaled(cycles)
            for rank, got in sorted(log.rank_traffic(level, CommKind.EXCHANGE).items()):
                report.checked += 1
                if got.messages > limit.messages or got.bytes > limit.bytes:
                    report.mismatches.append(Mismatch(level=level, kind=CommKind.EXCHANGE, expected=limit,
                                                      actual=got, rank=rank))
                    logger.warning("랭크 %s 레벨 %d 교환량 %d/%dB가 모델 상한 %d/%dB를 넘습니다",
                                   rank, level, got.messages, got.bytes, limit.messages, limit.bytes)
        if not log.is_consistent():
            raise ReconciliationError("이벤트 로그 카운터가 이벤트 목록의 합과 다릅니다.", report)
        return report

    def require_reconciled(self, report: ReconcileReport) -> None:
        if not report.ok:
            raise ReconciliationError(
                f"모델과 이벤트 로그가 레벨 {report.flagged_levels()}에서 일치하지 않습니다.", report)

    def export_event_log_csv(self, log: EventLog) -> str:
        df = pd.DataFrame(log.rows(), columns=["level", "kind", "messages", "bytes"])
        buf = io.StringIO()
        df.to_csv(buf, index=False, lineterminator="\n")
        return buf.getvalue()


sim_exec_service = SimExecService()
