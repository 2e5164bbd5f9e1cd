"""GLS 单项：正卦限 Lebesgue 测度经极化权重矩阵推出的带符号锥测度。

密度按纤维的核格规范体积除以像格指数计算，因此在正则点处是精确有理数。
墙（由 d-1 个列张成的超平面经平移后的并）上不给出密度值。
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
import logging
from typing import Sequence

from app.services import polyvol
from app.services.ratlinalg import (
    IntegerMatrix,
    Number,
    RationalVector,
    cofactor_normal,
    determinant,
    dot,
    image_lattice_index,
    inverse,
    kernel_lattice_basis,
    primitive_integer_vector,
    rank,
    rank_of,
    solve_particular,
    sub,
    vector,
)
from app.services.torusrep import FixedPointDatum, PolarizingVector, normalize_eta, polarize

logger = logging.getLogger(__name__)


class ImproperMomentMapError(ValueError):
    """极化列秩不足：η 分量不可能是逆紧的。"""


@dataclass(frozen=True, slots=True)
class DensityValue:
    """密度值；regular 为 False 时 value 不具约束力。"""

    value: Fraction
    regular: bool = True

    @classmethod
    def wall(cls) -> DensityValue:
        return cls(value=Fraction(0), regular=False)


def _wall_normals(columns: IntegerMatrix) -> tuple[tuple[int, ...], ...]:
    """所有秩 d-1 的列子集张成的超平面的本原法向量（去重，忽略符号）。"""

    d = columns.rows
    if d == 1:
        return ((1,),)
    found: set[tuple[int, ...]] = set()
    column_list = columns.columns()
    for subset in combinations(range(len(column_list)), d - 1):
        chosen = [column_list[i] for i in subset]
        if rank_of(chosen) != d - 1:
            continue
        normal = primitive_integer_vector(cofactor_normal(chosen, d))
        leading = next(item for item in normal if item != 0)
        if leading < 0:
            normal = tuple(-item for item in normal)
        found.add(normal)
    return tuple(sorted(found))


def _basis_columns(columns: IntegerMatrix) -> tuple[int, ...]:
    """选出第一组字典序的 d 个线性无关列。"""

    column_list = columns.columns()
    for subset in combinations(range(len(column_list)), columns.rows):
        if determinant([column_list[i] for i in subset]) != 0:
            return subset
    raise ImproperMomentMapError("极化列不满秩，矩映射模型不是逆紧的")


@dataclass(frozen=True, slots=True)
class ConeMeasure:
    """base + cone(columns) 上的带符号推出测度。"""

    base: RationalVector
    columns: IntegerMatrix
    sign: int
    norm_index: int
    eta: PolarizingVector
    wall_normals: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    kernel: IntegerMatrix = field(repr=False, compare=False)
    basis_indices: tuple[int, ...] = field(repr=False, compare=False)
    basis_inverse: tuple[tuple[Fraction, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def build(
        cls,
        base: Sequence[Number],
        columns: IntegerMatrix,
        sign: int,
        eta: Sequence[int],
    ) -> ConeMeasure:
        eta = normalize_eta(eta)
        base = vector(base)
        if sign not in (1, -1):
            raise ValueError(f"符号只能是 ±1: {sign}")
        if columns.rows != len(base) or len(eta) != len(base):
            raise ValueError("基点、列与极化向量的维数不一致")
        for column in columns.columns():
            if dot(column, eta) <= 0:
                raise ValueError(f"列 {list(column)} 没有被 η={list(eta)} 极化")
        if rank(columns) != columns.rows:
            raise ImproperMomentMapError(f"矩映射模型不是逆紧的: 列秩 {rank(columns)} < {columns.rows}")
        indices = _basis_columns(columns)
        square = [[columns.entries[i][j] for j in indices] for i in range(columns.rows)]
        return cls(
            base=base,
            columns=columns,
            sign=sign,
            norm_index=image_lattice_index(columns),
            eta=eta,
            wall_normals=_wall_normals(columns),
            kernel=kernel_lattice_basis(columns),
            basis_indices=indices,
            basis_inverse=tuple(tuple(row) for row in inverse(square)),
        )

    @property
    def torus_dim(self) -> int:
        return self.columns.rows

    @property
    def weight_count(self) -> int:
        return self.columns.cols

    def with_sign(self, sign: int) -> ConeMeasure:
        return replace(self, sign=sign)

    def _particular(self, offset: RationalVector) -> RationalVector:
        """用缓存的基逆矩阵求 columns·x = offset 的特解（非基变量取 0）。"""

        coefficients = [dot(row, offset) for row in self.basis_inverse]
        solution = [Fraction(0)] * self.weight_count
        for index, value in zip(self.basis_indices, coefficients):
            solution[index] = value
        return tuple(solution)


def make_cone_measure(datum: FixedPointDatum, eta: Sequence[int]) -> ConeMeasure:
    """由不动点数据和极化向量构造锥测度。"""

    polarized = polarize(datum.weights, eta)
    if rank(polarized.columns) != datum.torus_dim:
        raise ImproperMomentMapError(
            f"矩映射模型不是逆紧的: 极化列秩 {rank(polarized.columns)} < {datum.torus_dim}"
        )
    return ConeMeasure.build(datum.moment_value, polarized.columns, polarized.sign, eta)


def is_wall(c: ConeMeasure, b: Sequence[Number]) -> bool:
    """b - base 是否落在某个秩 d-1 列子集张成的超平面上（真实墙的保守超集）。"""

    offset = sub(b, c.base)
    return any(dot(normal, offset) == 0 for normal in c.wall_normals)


def in_support(c: ConeMeasure, b: Sequence[Number]) -> bool:
    """b - base 是否属于列生成的闭锥（按线性无关列子集枚举）。"""

    offset = sub(b, c.base)
    if all(item == 0 for item in offset):
        return True
    column_list = c.columns.columns()
    for size in range(1, c.torus_dim + 1):
        for subset in combinations(range(len(column_list)), size):
            chosen = [column_list[i] for i in subset]
            if rank_of(chosen) != size:
                continue
            solution = solve_particular(IntegerMatrix.from_columns(chosen, rows=c.torus_dim), offset)
            if solution is not None and all(item >= 0 for item in solution):
                return True
    return False


def fiber_volume(c: ConeMeasure, offset: RationalVector) -> Fraction:
    """{x ∈ R^m_+ : columns·x = offset} 在核格规范下的 (m-d) 维体积。"""

    particular = c._particular(offset)
    if c.weight_count == c.torus_dim:
        return Fraction(1) if all(item > 0 for item in particular) else Fraction(0)
    fiber = polyvol.HPolytope(normals=c.kernel, offsets=particular)
    return polyvol.volume(fiber)


def density(c: ConeMeasure, b: Sequence[Number]) -> DensityValue:
    """正则点处的精确密度 sign·fiber_vol / norm_index；墙上返回 regular=False。"""

    point = vector(b)
    if len(point) != c.torus_dim:
        raise ValueError(f"查询点维数 {len(point)} 与环面维数 {c.torus_dim} 不一致")
    if is_wall(c, point):
        return DensityValue.wall()
    offset = sub(point, c.base)
    if dot(offset, c.eta) <= 0:
        return DensityValue(value=Fraction(0))
    volume = fiber_volume(c, offset)
    return DensityValue(value=c.sign * volume / c.norm_index)
