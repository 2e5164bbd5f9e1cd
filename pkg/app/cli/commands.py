"""命令行入口：polarize | density | check-identity | grid | mc | toric-data。

退出码：0 成功；1 恒等式不匹配；2 输入错误或极化向量非一般；3 墙点（--strict，或 mc 的窗口不正则）。
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from fractions import Fraction
import logging
import math
from pathlib import Path
import sys
from typing import Sequence, TextIO

from app.config import APP_NAME, GRID_BOUNDS, GRID_STEP, GRID_WORKERS, MC_HALFWIDTH, MC_SAMPLES, MC_SEED
from app.models import ProblemSpec
from app.services import gls, grid_service, mcoracle, spec_service, toric, validators
from app.services.conemeasure import DensityValue
from app.services.polyvol import HPolytope
from app.services.ratlinalg import IntegerMatrix, RationalVector, format_fraction
from app.services.torusrep import FixedPointDatum, NonGenericPolarizationError, polarize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_BAD_INPUT = 2
EXIT_WALL = 3

WALL_TOKEN = "WALL"


@dataclass(frozen=True, slots=True)
class RuntimeConfig:
    """命令默认参数（来自 .env，可被命令行覆盖）。"""

    grid_step: Fraction
    grid_bounds: tuple[Fraction, Fraction]
    grid_workers: int
    mc_samples: int
    mc_seed: int
    mc_halfwidth: Fraction


def load_runtime_config() -> RuntimeConfig:
    """从全局配置读取默认参数。"""

    return RuntimeConfig(
        grid_step=GRID_STEP,
        grid_bounds=GRID_BOUNDS,
        grid_workers=max(GRID_WORKERS, 1),
        mc_samples=max(MC_SAMPLES, 1),
        mc_seed=MC_SEED,
        mc_halfwidth=MC_HALFWIDTH,
    )


@dataclass(frozen=True, slots=True)
class Problem:
    """一次命令实际作用的数据（子环面限制之后）。"""

    spec: ProblemSpec
    data: list[FixedPointDatum]
    eta: tuple[int, ...]
    polytope: HPolytope | None
    unimodular: bool
    subtorus: IntegerMatrix | None

    @property
    def dim(self) -> int:
        return len(self.eta)


class CommandError(Exception):
    """携带退出码的命令失败。"""

    def __init__(self, message: str, code: int = EXIT_BAD_INPUT) -> None:
        super().__init__(message)
        self.code = code


def _fraction(text: str) -> Fraction:
    error = validators.validate_rational_text(text)
    if error:
        raise argparse.ArgumentTypeError(error)
    return Fraction(text)


def _int_list(text: str) -> list[int]:
    try:
        return validators.parse_int_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _rational_list(text: str) -> list[Fraction]:
    try:
        return validators.parse_rational_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _bounds(text: str) -> list[tuple[Fraction, Fraction]]:
    """"lo,hi" 作用于所有坐标轴；"lo1,hi1;lo2,hi2" 逐轴给出。"""

    result: list[tuple[Fraction, Fraction]] = []
    for part in text.split(";"):
        values = _rational_list(part)
        if len(values) != 2:
            raise argparse.ArgumentTypeError(f"区间需写成 lo,hi: {part!r}")
        result.append((values[0], values[1]))
    return result


def build_parser(config: RuntimeConfig) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", default="-", help="问题文件路径，默认读取标准输入")
    common.add_argument("--eta", type=_int_list, default=None, help="极化向量，例如 1,2")
    common.add_argument(
        "--subtorus",
        type=_int_list,
        action="append",
        default=None,
        help="子环面包含映射的一列（可重复），例如 1,2",
    )
    common.add_argument("--strict", action="store_true", help="墙点返回退出码 3")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-step", type=_fraction, default=config.grid_step)
    grid.add_argument("--bounds", type=_bounds, default=[config.grid_bounds])
    grid.add_argument("--workers", type=int, default=config.grid_workers)
    grid.add_argument("--flip-sign", type=int, default=None, help="调试：翻转第 k 个单项的符号（从 0 开始）")

    parser = argparse.ArgumentParser(prog=APP_NAME, description="Duistermaat-Heckman 测度的 GLS 分解计算")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("polarize", parents=[common], help="输出各不动点的极化权重")
    density = sub.add_parser("density", parents=[common], help="单点精确密度")
    density.add_argument("--point", type=_rational_list, required=True, help="查询点，例如 1/4,1/4（负值写成 --point=-1,5）")
    sub.add_parser("check-identity", parents=[common, grid], help="网格上核对 GLS 恒等式")
    grid_cmd = sub.add_parser("grid", parents=[common, grid], help="输出密度网格 CSV")
    grid_cmd.add_argument("--output", default=None, help="CSV 输出路径，默认标准输出")
    grid_cmd.add_argument("--group-eta", type=_int_list, default=None, help="按非一般极化向量分组输出")
    mc = sub.add_parser("mc", parents=[common], help="Monte-Carlo 对照")
    mc.add_argument("--point", type=_rational_list, required=True)
    mc.add_argument("--samples", type=int, default=config.mc_samples)
    mc.add_argument("--seed", type=int, default=config.mc_seed)
    mc.add_argument("--halfwidth", type=_fraction, default=config.mc_halfwidth)
    sub.add_parser("toric-data", parents=[common], help="输出多面体的顶点不动点数据")
    return parser


# ---------- 数据准备 ----------


def _subtorus_eta(spec: ProblemSpec, iota: IntegerMatrix, *, from_file: bool) -> list[int]:
    """子环面上的极化向量：文件同时给出 subtorus 与 subtorus_eta 时直接使用，否则取 ιᵀη。"""

    if from_file and spec.subtorus_eta is not None:
        return list(spec.subtorus_eta)
    return [int(item) for item in iota.transpose().apply(spec.eta)]


def load_problem(args: argparse.Namespace, stdin: TextIO) -> Problem:
    spec = spec_service.read_problem_spec(args.spec, stdin=stdin)
    data, delzant = spec_service.resolve_fixed_points(spec)
    iota = spec_service.subtorus_of(spec)
    if args.subtorus:
        iota = IntegerMatrix.from_columns(args.subtorus, rows=spec.torus_dim)
    eta = list(spec.eta)
    if iota is not None:
        data = toric.restrict_data(data, iota)
        eta = _subtorus_eta(spec, iota, from_file=not args.subtorus)
    if args.eta is not None:
        eta = list(args.eta)
    if len(eta) != (iota.cols if iota is not None else spec.torus_dim):
        raise CommandError(f"极化向量维数 {len(eta)} 与作用环面维数不一致")
    return Problem(
        spec=spec,
        data=data,
        eta=tuple(eta),
        polytope=delzant.polytope if delzant else None,
        unimodular=delzant.unimodular if delzant else True,
        subtorus=iota,
    )


def _assemble(problem: Problem, flip_sign: int | None = None) -> gls.DHMeasure:
    measure = gls.assemble(problem.data, problem.eta)
    if flip_sign is not None:
        measure = gls.flip_summand_sign(measure, flip_sign)
    return measure


def _grid(args: argparse.Namespace, dim: int) -> grid_service.GridSpec:
    bounds = list(args.bounds)
    if len(bounds) == 1:
        bounds = bounds * dim
    if len(bounds) != dim:
        raise CommandError(f"区间个数 {len(bounds)} 与维数 {dim} 不一致")
    return grid_service.GridSpec(step=args.grid_step, bounds=tuple(bounds))


def _format_vector(values: Sequence[object]) -> str:
    return "(" + ",".join(format_fraction(Fraction(str(item))) for item in values) + ")"


# ---------- 命令 ----------


def cmd_polarize(args: argparse.Namespace, problem: Problem, out: TextIO) -> int:
    """逐个不动点输出极化列、翻转次数与符号。"""

    polarized = [polarize(datum.weights, problem.eta) for datum in problem.data]
    lines: list[str] = []
    for index, (datum, result) in enumerate(zip(problem.data, polarized)):
        columns = " ".join(_format_vector(column) for column in result.columns.columns())
        sign = "+" if result.sign > 0 else "-"
        lines.append(
            f"[{index}] moment={_format_vector(datum.moment_value)} columns={columns} "
            f"flips={result.flip_count} sign={sign}\n"
        )
    out.writelines(lines)
    return EXIT_OK


def cmd_density(args: argparse.Namespace, problem: Problem, out: TextIO) -> int:
    point = tuple(args.point)
    if len(point) != problem.dim:
        raise CommandError(f"查询点维数 {len(point)} 与作用环面维数 {problem.dim} 不一致")
    value = gls.eval_density(_assemble(problem), point)
    if not value.regular:
        out.write(f"{WALL_TOKEN}\n")
        return EXIT_WALL if args.strict else EXIT_OK
    out.write(f"{format_fraction(value.value)}\n")
    return EXIT_OK


def cmd_check_identity(args: argparse.Namespace, problem: Problem, out: TextIO) -> int:
    """多面体输入：GLS 与满环面（或子环面）真值逐点精确比较。"""

    polytope = problem.polytope
    if polytope is None:
        raise CommandError("check-identity 需要 polytope 输入")
    if problem.subtorus is None and not problem.unimodular:
        raise CommandError("非幺模多面体只能做子环面核对（请给出 --subtorus）")
    measure = _assemble(problem, args.flip_sign)
    iota = problem.subtorus

    def evaluator(point: RationalVector) -> DensityValue:
        return gls.eval_density(measure, point)

    def oracle(point: RationalVector) -> DensityValue:
        if iota is None:
            return toric.oracle_density_full(polytope, point)
        return toric.oracle_density_subtorus(polytope, iota, point)

    points = list(grid_service.grid_points(_grid(args, problem.dim)))
    report = grid_service.check_identity(evaluator, oracle, points, workers=args.workers)
    out.write(f"checked={report.checked} skipped={report.skipped} mismatches={report.mismatches}\n")
    for point, actual, expected in report.samples:
        out.write(
            f"mismatch at {_format_vector(point)}: gls={format_fraction(actual)} oracle={format_fraction(expected)}\n"
        )
    return EXIT_OK if report.ok else EXIT_MISMATCH


def _group_path(output: str, index: int) -> Path:
    path = Path(output)
    return path.with_name(f"{path.stem}.group{index}{path.suffix or '.csv'}")


def cmd_grid(args: argparse.Namespace, problem: Problem, out: TextIO) -> int:
    """输出 CSV；--group-eta 时每个分量组一个文件。"""

    measure = _assemble(problem, args.flip_sign)
    points = list(grid_service.grid_points(_grid(args, problem.dim)))
    if args.group_eta is None:
        values = grid_service.sweep(lambda p: gls.eval_density(measure, p), points, workers=args.workers)
        text = grid_service.render_csv(points, values, problem.dim)
        if args.output:
            Path(args.output).write_bytes(text.encode("utf-8"))
        else:
            out.write(text)
        return EXIT_OK

    if not args.output:
        raise CommandError("分组输出需要 --output")
    if len(args.group_eta) != problem.dim:
        raise CommandError(f"--group-eta 维数 {len(args.group_eta)} 与作用环面维数 {problem.dim} 不一致")
    groups = gls.group_by_eta(measure, problem.data, args.group_eta)
    for index, (group, grouped) in enumerate(zip(groups, gls.grouped_measures(measure, groups))):
        values = grid_service.sweep(lambda p, m=grouped: gls.eval_density(m, p), points, workers=args.workers)
        path = _group_path(args.output, index)
        path.write_bytes(grid_service.render_csv(points, values, problem.dim).encode("utf-8"))
        members = ",".join(str(item) for item in group.members)
        out.write(f"group {index} label={format_fraction(group.label)} members={members} file={path}\n")
    return EXIT_OK


def cmd_mc(args: argparse.Namespace, problem: Problem, out: TextIO) -> int:
    """精确值与 Monte-Carlo 估计（各单项带符号相加，标准误按独立估计合成）。"""

    point = tuple(args.point)
    if len(point) != problem.dim:
        raise CommandError(f"查询点维数 {len(point)} 与作用环面维数 {problem.dim} 不一致")
    measure = _assemble(problem)
    exact = gls.eval_density(measure, point)
    if not exact.regular:
        out.write(f"{WALL_TOKEN}\n")
        return EXIT_WALL
    estimate = 0.0
    variance = 0.0
    try:
        for index, summand in enumerate(measure.summands):
            result = mcoracle.estimate_density(summand, point, args.halfwidth, args.samples, args.seed + index)
            estimate += summand.sign * result.mean
            variance += result.stderr**2
    except mcoracle.WindowNotRegularError as exc:
        raise CommandError(str(exc), EXIT_WALL) from exc
    stderr = math.sqrt(variance)
    gap = abs(float(exact.value) - estimate)
    if stderr > 0:
        ratio = gap / stderr
    else:
        ratio = 0.0 if gap == 0 else math.inf
    out.write(f"exact={format_fraction(exact.value)}\n")
    out.write(f"estimate={estimate:.6f}\n")
    out.write(f"stderr={stderr:.6f}\n")
    out.write(f"ratio={ratio:.3f}\n")
    return EXIT_OK


def cmd_toric_data(args: argparse.Namespace, problem: Problem, out: TextIO) -> int:
    """把多面体转成不动点形式的问题文件。"""

    if problem.polytope is None:
        raise CommandError("toric-data 需要 polytope 输入")
    spec = spec_service.problem_from_data(problem.data, list(problem.eta), problem.dim)
    out.write(spec_service.dump_problem_spec(spec))
    return EXIT_OK


COMMANDS = {
    "polarize": cmd_polarize,
    "density": cmd_density,
    "check-identity": cmd_check_identity,
    "grid": cmd_grid,
    "mc": cmd_mc,
    "toric-data": cmd_toric_data,
}


def main(
    argv: Sequence[str] | None = None,
    *,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """解析参数并执行子命令，返回退出码。"""

    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser(load_runtime_config())
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_BAD_INPUT

    try:
        problem = load_problem(args, stdin)
        return COMMANDS[args.command](args, problem, stdout)
    except CommandError as exc:
        stderr.write(f"error: {exc}\n")
        return exc.code
    except gls.AssemblyError as exc:
        if isinstance(exc.cause, NonGenericPolarizationError):
            stderr.write(f"error: 非一般的极化向量，被零化的权重 {list(exc.cause.weight)}（第 {exc.index} 个不动点）\n")
        else:
            stderr.write(f"error: {exc}\n")
        return EXIT_BAD_INPUT
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_BAD_INPUT
