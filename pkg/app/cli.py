"""
재분배 플래너 명령행 도구

    python -m app.cli plan --proc 16x8 --grid 9088x568 --format table
    python -m app.cli paths fixtures/paths/reference_paths.txt --proc 64x32 --local 568x71
    python -m app.cli solve --grid 129x129 --cycles 10 --simulate --proc 4x4
    python -m app.cli search-bench --sweep wide --max-exp 8 --format csv

표준 출력에는 요청한 JSON/CSV/표만 쓰고 로그는 표준 에러로 보냅니다.
종료 코드: 0 성공, 1 설정/경로 오류, 2 수치 오류, 3 조정 실패
"""
import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, Optional, Sequence

from pydantic import ValidationError

from app.domain.controller.plan_controller import PATH_COLUMNS, STATE_COLUMNS, plan_controller
from app.domain.controller.solve_controller import solve_controller
from app.domain.model.config_schema import OutputFormat, RunConfig
from app.domain.repository.report_repository import (
    emit,
    load_paths,
    parse_dims,
    parse_paths_text,
    to_csv,
    to_json,
    to_table,
)
from app.domain.service.bench_service import BENCH_COLUMNS
from app.foundation import settings
from app.foundation.errors import ConfigError, exit_code

logger = logging.getLogger(__name__)

# --compensated: 셀 비율 16:1과 r = 16 (가장 미세한 스텐실이 등방성이 됨)
COMPENSATED_RATIO = 16.0

# 플래그 이름 → RunConfig 필드
_FIELDS = [
    "grid", "local", "proc", "machine", "nu1", "nu2", "cycles", "mode", "trigger_extent",
    "trigger_points", "coarse_max", "interp", "seed", "r", "aspect", "heuristic", "sweep",
    "max_exp", "format", "out",
]


def _dims(text: str):
    try:
        return parse_dims(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_dims, help="전역 격자 크기 (예: 9088x568)")
    common.add_argument("--local", type=_dims, help="랭크당 로컬 크기 (약한 스케일링, 전역 = local × proc)")
    common.add_argument("--proc", type=_dims, help="프로세서 격자 (예: 16x8)")
    common.add_argument("--machine", help="머신 파라미터 파일 (alpha_s, beta_s_per_byte, gamma_s_per_flop)")
    common.add_argument("--mode", choices=["redundant", "non_redundant"])
    common.add_argument("--cycles", type=int)
    common.add_argument("--nu1", type=int)
    common.add_argument("--nu2", type=int)
    common.add_argument("--interp", choices=["operator_induced", "bilinear"])
    common.add_argument("--trigger-extent", dest="trigger_extent", type=int)
    common.add_argument("--trigger-points", dest="trigger_points", type=int)
    common.add_argument("--coarse-max", dest="coarse_max", type=int)
    common.add_argument("--heuristic", choices=["admissible", "weighted"])
    common.add_argument("--r", type=float, help="비등방성 비율 r (기본 1, 등방성)")
    common.add_argument("--aspect", type=float, help="셀 비율 h_y / h_x (기본: 단위 정사각형)")
    common.add_argument("--compensated", action="store_true",
                        help="보상 비등방성 문제 (r = 16, 셀 비율 16:1). --r/--aspect가 우선")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=[f.value for f in OutputFormat])
    common.add_argument("--out", help="결과 파일 (없으면 표준 출력)")
    common.add_argument("--config", help="JSON 설정 파일 (플래그보다 우선)")
    common.add_argument("-v", "--verbose", action="store_true", help="DEBUG 로그 출력")

    parser = argparse.ArgumentParser(prog="redist", description="Coarse-grid redistribution planner")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("plan", parents=[common], help="재분배 후보 열거와 최적 경로 탐색")
    paths = sub.add_parser("paths", parents=[common], help="경로 파일의 모델 비용 비교")
    paths.add_argument("paths_file", help="한 줄에 하나의 경로 ('1: 64x32 -> 64x16 -> 1x1')")
    solve = sub.add_parser("solve", parents=[common], help="V-사이클 풀이 (선택적 논리 랭크 시뮬레이션)")
    solve.add_argument("--simulate", action="store_true", default=None)
    solve.add_argument("--plan", help="시뮬레이션 경로 (예: '4x4 -> 2x1 -> 1x1')")
    solve.add_argument("--shuffle-ranks", dest="shuffle_ranks", action="store_true", default=None)
    solve.add_argument("--no-residual-correction", dest="residual_correction",
                       action="store_false", default=None)
    bench = sub.add_parser("search-bench", parents=[common], help="랭크 수에 따른 탐색 비용")
    bench.add_argument("--sweep", choices=["wide", "weak", "strong"])
    bench.add_argument("--max-exp", dest="max_exp", type=int)
    bench.add_argument("--no-brute", dest="brute", action="store_false", default=None)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """
    플래그 값 위에 --config JSON을 덮어써 RunConfig를 만듭니다.

    Raises:
        ConfigError: 파일을 읽을 수 없거나 검증에 실패한 경우
    """
    values: Dict[str, Any] = {}
    for name in _FIELDS + ["simulate", "shuffle_ranks", "residual_correction", "brute"]:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if getattr(args, "compensated", False):
        values.setdefault("r", COMPENSATED_RATIO)
        values.setdefault("aspect", COMPENSATED_RATIO)
    if getattr(args, "plan", None):
        values["plan"] = parse_paths_text(args.plan, source="--plan")[0][1]
    if args.command == "search-bench" and "grid" not in values and "local" not in values:
        values["grid"] = (3200, 3200)
    if args.config:
        if not os.path.exists(args.config):
            raise ConfigError(f"설정 파일을 찾을 수 없습니다: {args.config}")
        try:
            with open(args.config, "r", encoding="utf-8") as f:
                overlay = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"설정 파일 JSON 오류 ({args.config}): {e}") from e
        if "grid" in overlay or "local" in overlay:
            values.pop("grid", None)
            values.pop("local", None)
        values.update(overlay)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"잘못된 설정: {e}") from e


def render_plan(doc: Dict[str, Any], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return to_json(doc)
    if fmt is OutputFormat.CSV:
        return to_csv(doc["states"], STATE_COLUMNS)
    head = f"{doc['proc']} on {doc['grid']} ({doc['mode']})\n"
    if doc["message"]:
        head += doc["message"] + "\n"
    text = head + to_table(doc["enumeration"], ["proc", "local"],
                           title=f"redistribution candidates at {doc['transition_grid']}")
    text += f"path: {doc['path']}\ntotal: {doc['total']:.6e} s\n"
    return text + to_table(doc["states"], STATE_COLUMNS)


def render_paths(doc: Dict[str, Any], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return to_json(doc)
    if fmt is OutputFormat.CSV:
        return to_csv(doc["paths"], PATH_COLUMNS)
    return to_table(doc["paths"], PATH_COLUMNS, title=f"{doc['proc']} on {doc['grid']} ({doc['mode']})")


def render_solve(doc: Dict[str, Any], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return to_json(doc)
    rows = [
        {"cycle": k, "residual_norm": n, "factor": doc["factors"][k - 1] if k else None}
        for k, n in enumerate(doc["residual_norms"])
    ]
    if fmt is OutputFormat.CSV:
        return to_csv(rows, ["cycle", "residual_norm", "factor"])
    text = to_table(rows, ["cycle", "residual_norm", "factor"],
                    title=f"{doc['grid']}, {doc['levels']} levels, V({doc['nu1']},{doc['nu2']})")
    sim = doc.get("simulation")
    if sim:
        text += (f"simulated: {' → '.join(sim['procs'])} ({sim['mode']}), "
                 f"max rel diff {sim['max_rel_diff']:.3e}, {sim['messages']} messages, "
                 f"{sim['bytes']} bytes, reconciled {sim['reconciled']}\n")
    return text


def render_bench(doc: Dict[str, Any], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return to_json(doc)
    if fmt is OutputFormat.CSV:
        return to_csv(doc["rows"], BENCH_COLUMNS)
    return to_table(doc["rows"], BENCH_COLUMNS, title=f"search bench ({doc['sweep']})")


def cmd_plan(config: RunConfig) -> int:
    emit(render_plan(plan_controller.plan(config), config.format), config.out)
    return 0


def cmd_paths(config: RunConfig, paths_file: str) -> int:
    doc = plan_controller.evaluate_paths(config, load_paths(paths_file))
    emit(render_paths(doc, config.format), config.out)
    if not doc["all_valid"]:
        logger.error("열거 관계를 벗어난 경로가 있습니다: %s",
                     [r["label"] for r in doc["paths"] if not r["valid"]])
        return 1
    return 0


def cmd_solve(config: RunConfig) -> int:
    emit(render_solve(solve_controller.solve(config), config.format), config.out)
    return 0


def cmd_search_bench(config: RunConfig) -> int:
    emit(render_bench(plan_controller.search_bench(config), config.format), config.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else settings.log_level(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        config = load_config(args)
        if args.command == "plan":
            return cmd_plan(config)
        if args.command == "paths":
            return cmd_paths(config, args.paths_file)
        if args.command == "solve":
            return cmd_solve(config)
        return cmd_search_bench(config)
    except Exception as e:
        code = exit_code(e)
        if code == 1 and not isinstance(e, ValueError):
            logger.exception("예상하지 못한 오류")
        else:
            logger.error("%s", e)
        return code


if __name__ == "__main__":
    sys.exit(main())
