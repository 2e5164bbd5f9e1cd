"""有理网格、并行扫描、恒等式核对与 CSV 输出。"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass
from fractions import Fraction
from io import StringIO
from itertools import product
import logging
from typing import Callable, Iterator, Sequence

from app.services.conemeasure import DensityValue
from app.services.ratlinalg import RationalVector, format_fraction

logger = logging.getLogger(__name__)

Evaluator = Callable[[RationalVector], DensityValue]

MISMATCH_SAMPLE_LIMIT = 10


@dataclass(frozen=True, slots=True)
class GridSpec:
    """每个坐标轴取 lo, lo+step, ... ≤ hi。"""

    step: Fraction
    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError("网格步长必须为正")

    @classmethod
    def uniform(cls, step: Fraction, lower: Fraction, upper: Fraction, dim: int) -> GridSpec:
        return cls(step=step, bounds=tuple((lower, upper) for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.bounds)


@dataclass(frozen=True, slots=True)
class IdentityReport:
    """恒等式扫描计数。"""

    checked: int
    skipped: int
    mismatches: int
    samples: tuple[tuple[RationalVector, Fraction, Fraction], ...] = ()

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def axis_values(lower: Fraction, upper: Fraction, step: Fraction) -> list[Fraction]:
    values: list[Fraction] = []
    current = lower
    while current <= upper:
        values.append(current)
        current += step
    return values


def grid_points(grid: GridSpec) -> Iterator[RationalVector]:
    """按字典序（第一个坐标变化最慢）生成网格点。"""

    axes = [axis_values(lower, upper, grid.step) for lower, upper in grid.bounds]
    for point in product(*axes):
        yield tuple(point)


def _evaluate_chunk(evaluator: Evaluator, chunk: Sequence[RationalVector]) -> list[DensityValue]:
    return [evaluator(point) for point in chunk]


def sweep(evaluator: Evaluator, points: Sequence[RationalVector], *, workers: int = 1) -> list[DensityValue]:
    """逐点求值，结果按输入顺序返回；workers > 1 时按块分发到线程池。"""

    if workers <= 1 or len(points) < 2:
        return _evaluate_chunk(evaluator, points)
    chunk_size = max(len(points) // (workers * 4), 1)
    chunks = [points[i : i + chunk_size] for i in range(0, len(points), chunk_size)]
    results: list[DensityValue] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(lambda chunk: _evaluate_chunk(evaluator, chunk), chunks):
            results.extend(part)
    return results


def check_identity(
    evaluator: Evaluator,
    oracle: Evaluator,
    points: Sequence[RationalVector],
    *,
    workers: int = 1,
) -> IdentityReport:
    """在双方都正则的点上做精确比较。"""

    def compare(point: RationalVector) -> tuple[DensityValue, DensityValue]:
        return evaluator(point), oracle(point)

    pairs: list[tuple[DensityValue, DensityValue]]
    if workers <= 1:
        pairs = [compare(point) for point in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(compare, points, chunksize=max(len(points) // (workers * 4), 1)))

    checked = skipped = mismatches = 0
    samples: list[tuple[RationalVector, Fraction, Fraction]] = []
    for point, (actual, expected) in zip(points, pairs):
        if not (actual.regular and expected.regular):
            skipped += 1
            continue
        checked += 1
        if actual.value != expected.value:
            mismatches += 1
            if len(samples) < MISMATCH_SAMPLE_LIMIT:
                samples.append((point, actual.value, expected.value))
    if points and skipped * 2 > len(points):
        logger.warning("超过一半的网格点落在墙上: skipped=%d total=%d", skipped, len(points))
    logger.info("恒等式扫描完成: checked=%d skipped=%d mismatches=%d", checked, skipped, mismatches)
    return IdentityReport(checked=checked, skipped=skipped, mismatches=mismatches, samples=tuple(samples))


def render_csv(points: Sequence[RationalVector], values: Sequence[DensityValue], dim: int) -> str:
    """表头 x1,...,xd,density,regular；墙点 density 为空、regular 为 0；换行固定为 LF。"""

    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([*(f"x{i + 1}" for i in range(dim)), "density", "regular"])
    for point, value in zip(points, values):
        coordinates = [format_fraction(item) for item in point]
        if value.regular:
            writer.writerow([*coordinates, format_fraction(value.value), 1])
        else:
            writer.writerow([*coordinates, "", 0])
    return buffer.getvalue()
