"""独立对照：Monte-Carlo 推出密度估计与一维截断幂递推。

浮点运算只出现在 Monte-Carlo 估计中；随机数使用 numpy 的 Philox 计数器生成器，
固定 seed 时结果逐位可复现。递推对照只依赖 ratlinalg，不经过 conemeasure 的纤维体积路径。
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
import logging
import math
from typing import Sequence

import numpy as np

from app.config import MC_CHUNK_SIZE, MC_SHARDS
from app.services.conemeasure import ConeMeasure
from app.services.ratlinalg import (
    IntegerMatrix,
    Number,
    RationalVector,
    cofactor_normal,
    determinant,
    dot,
    rank_of,
    solve_rational,
    sub,
    vector,
)

logger = logging.getLogger(__name__)

MAX_ORACLE_DIM = 2
MAX_ORACLE_COLUMNS = 4


class WindowNotRegularError(ValueError):
    """估计窗口与锥测度的墙相交。"""


class OracleScopeError(ValueError):
    """超出截断幂递推的适用范围。"""


@dataclass(frozen=True, slots=True)
class MCEstimate:
    """|density| 在窗口上的平均值估计。"""

    mean: float
    stderr: float
    samples: int
    window: tuple[tuple[float, float], ...]
    hits: int


def _window_corners(b: RationalVector, halfwidth: Fraction) -> list[RationalVector]:
    return [tuple(center + sign * halfwidth for center, sign in zip(b, signs)) for signs in product((-1, 1), repeat=len(b))]


def _ensure_window_regular(c: ConeMeasure, corners: Sequence[RationalVector]) -> None:
    """窗口为凸集：若某个墙的法向量在角点上取值变号或为零则窗口与该墙相交。"""

    for normal in c.wall_normals:
        values = [dot(normal, sub(corner, c.base)) for corner in corners]
        if min(values) <= 0 <= max(values):
            raise WindowNotRegularError(f"窗口不正则: 与法向量 {list(normal)} 的墙相交")


def _sampling_bound(c: ConeMeasure, corners: Sequence[RationalVector]) -> Fraction:
    """窗口上方所有纤维都落在 [0, B]^m 内的 B。"""

    reach = max(dot(sub(corner, c.base), c.eta) for corner in corners)
    smallest = min(dot(column, c.eta) for column in c.columns.columns())
    return reach / smallest


def _count_hits(
    generator: np.random.Generator,
    count: int,
    bound: float,
    columns: np.ndarray,
    base: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
) -> int:
    hits = 0
    remaining = count
    while remaining > 0:
        size = min(remaining, MC_CHUNK_SIZE)
        samples = generator.random((size, columns.shape[1])) * bound
        images = samples @ columns.T + base
        inside = np.all((images > lower) & (images < upper), axis=1)
        hits += int(np.count_nonzero(inside))
        remaining -= size
    return hits


def estimate_density(
    c: ConeMeasure,
    b: Sequence[Number],
    window_halfwidth: float | Fraction,
    samples: int,
    seed: int,
    *,
    shards: int = MC_SHARDS,
) -> MCEstimate:
    """在 [0,B]^m 中均匀采样，统计像点落入 b 附近窗口的比例。"""

    if samples <= 0:
        raise ValueError("采样数必须为正")
    halfwidth = Fraction(window_halfwidth)
    if halfwidth <= 0:
        raise ValueError("窗口半宽必须为正")
    point = vector(b)
    corners = _window_corners(point, halfwidth)
    _ensure_window_regular(c, corners)

    window = tuple((float(x - halfwidth), float(x + halfwidth)) for x in point)
    bound = _sampling_bound(c, corners)
    if bound <= 0:
        return MCEstimate(mean=0.0, stderr=0.0, samples=samples, window=window, hits=0)

    columns = np.array(c.columns.entries, dtype=np.float64)
    base = np.array([float(x) for x in c.base])
    lower = np.array([low for low, _ in window])
    upper = np.array([high for _, high in window])
    shard_count = max(min(shards, samples), 1)
    children = np.random.SeedSequence(seed).spawn(shard_count)
    per_shard, remainder = divmod(samples, shard_count)
    hits = 0
    for index, child in enumerate(children):
        generator = np.random.Generator(np.random.Philox(child))
        count = per_shard + (1 if index < remainder else 0)
        hits += _count_hits(generator, count, float(bound), columns, base, lower, upper)

    scale = float(bound) ** c.weight_count / float(2 * halfwidth) ** c.torus_dim
    ratio = hits / samples
    mean = ratio * scale
    stderr = scale * math.sqrt(ratio * (1.0 - ratio) / samples)
    logger.debug("Monte-Carlo 估计: 命中=%d 样本=%d 采样界=%s 均值=%.6f 标准误=%.6f", hits, samples, bound, mean, stderr)
    return MCEstimate(mean=mean, stderr=stderr, samples=samples, window=window, hits=hits)


# ---------- 截断幂递推 ----------


@lru_cache(maxsize=None)
def _open_rule_weights(degree: int) -> tuple[Fraction, ...]:
    """节点 (j+1)/(degree+2) 上对 [0,1] 积分精确到 degree 次多项式的权重。"""

    nodes = [Fraction(j + 1, degree + 2) for j in range(degree + 1)]
    rows = [[node**power for node in nodes] for power in range(degree + 1)]
    rhs = [Fraction(1, power + 1) for power in range(degree + 1)]
    weights = solve_rational(rows, rhs, degree + 1)
    if weights is None:
        raise ArithmeticError("积分权重方程无解")
    return weights


def _line_normals(columns: Sequence[tuple[int, ...]], dim: int) -> list[RationalVector]:
    if dim == 1:
        return [(Fraction(1),)]
    normals: list[RationalVector] = []
    for subset in combinations(columns, dim - 1):
        if rank_of(list(subset)) == dim - 1:
            normals.append(cofactor_normal(list(subset), dim))
    return normals


def _truncated_power(columns: list[tuple[int, ...]], y: RationalVector) -> Fraction:
    dim = len(y)
    if len(columns) == dim:
        det = determinant([[column[i] for column in columns] for i in range(dim)])
        coefficients = solve_rational([[column[i] for column in columns] for i in range(dim)], y, dim)
        if coefficients is None or any(item <= 0 for item in coefficients):
            return Fraction(0)
        return 1 / abs(det)

    removable = [j for j in range(len(columns)) if rank_of(columns[:j] + columns[j + 1 :]) == dim]
    if not removable:
        raise OracleScopeError("没有可移除的列")
    j = removable[-1]
    direction = columns[j]
    rest = columns[:j] + columns[j + 1 :]

    breakpoints = {Fraction(0)}
    for normal in _line_normals(rest, dim):
        speed = dot(normal, direction)
        if speed != 0:
            t = dot(normal, y) / speed
            if t > 0:
                breakpoints.add(t)
    ordered = sorted(breakpoints)
    degree = len(rest) - dim
    weights = _open_rule_weights(degree)
    nodes = [Fraction(k + 1, degree + 2) for k in range(degree + 1)]
    total = Fraction(0)
    # 最后一个断点之后被积函数恒为 0
    for start, stop in zip(ordered, ordered[1:]):
        length = stop - start
        for node, weight in zip(nodes, weights):
            t = start + length * node
            shifted = tuple(value - t * step for value, step in zip(y, direction))
            total += weight * length * _truncated_power(rest, shifted)
    return total


def truncated_power_1d_recurrence(columns: IntegerMatrix, b: Sequence[Number]) -> Fraction:
    """T_A(b) = ∫_0^∞ T_{A\\α}(b - tα) dt，基础情形 m == d 时为开锥示性函数除以 |det|。"""

    dim = columns.rows
    if dim > MAX_ORACLE_DIM or columns.cols > MAX_ORACLE_COLUMNS:
        raise OracleScopeError(f"超出递推范围: d={dim}, m={columns.cols}（要求 d ≤ 2, m ≤ 4）")
    point = vector(b)
    if len(point) != dim:
        raise ValueError(f"查询点维数 {len(point)} 与列维数 {dim} 不一致")
    column_list = list(columns.columns())
    if not column_list or rank_of(column_list) != dim:
        raise OracleScopeError("列不满秩")
    return _truncated_power(column_list, point)
