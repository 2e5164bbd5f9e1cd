"""环面表示数据：权重、极化向量、极化运算与不动点数据。"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from app.services.ratlinalg import IntegerMatrix, Number, RationalVector, add, dot, rank, scale, vector

Weight = tuple[int, ...]
PolarizingVector = tuple[int, ...]


class NonGenericPolarizationError(ValueError):
    """极化向量与某个权重配对为零。"""

    def __init__(self, weight: Weight, eta: PolarizingVector) -> None:
        self.weight = weight
        self.eta = eta
        super().__init__(f"非一般的极化向量 eta={list(eta)}: 权重 {list(weight)} 的配对为 0")


class NegativeSquaredNormError(ValueError):
    """模长平方不能为负。"""


def normalize_weight(values: Iterable[int]) -> Weight:
    return tuple(int(item) for item in values)


def normalize_eta(values: Iterable[int]) -> PolarizingVector:
    """校验极化向量非零。"""

    eta = tuple(int(item) for item in values)
    if not eta:
        raise ValueError("极化向量不能为空")
    if all(item == 0 for item in eta):
        raise ValueError("极化向量不能为零向量")
    return eta


def pairing(values: Sequence[Number], eta: Sequence[int]) -> Fraction:
    """⟨ξ, η⟩。"""

    return dot(values, eta)


@dataclass(frozen=True, slots=True)
class FixedPointDatum:
    """孤立不动点：矩映射取值与迷向权重（每对 ±α 取一个代表，可重复）。"""

    moment_value: RationalVector
    weights: tuple[Weight, ...]

    def __post_init__(self) -> None:
        dim = len(self.moment_value)
        if dim == 0:
            raise ValueError("环面维数必须为正")
        for weight in self.weights:
            if len(weight) != dim:
                raise ValueError(f"权重 {list(weight)} 的维数与矩映射取值维数 {dim} 不一致")
            if all(item == 0 for item in weight):
                raise ValueError("孤立不动点的迷向权重不能为零")

    @classmethod
    def build(cls, moment_value: Iterable[Number | str], weights: Iterable[Iterable[int]]) -> FixedPointDatum:
        return cls(moment_value=vector(moment_value), weights=tuple(normalize_weight(w) for w in weights))

    @property
    def torus_dim(self) -> int:
        return len(self.moment_value)


@dataclass(frozen=True, slots=True)
class NonIsolatedFixedPoint:
    """限制到子环面后某个权重变为零：不动点集变大。"""

    weight_index: int
    weight: Weight


@dataclass(frozen=True, slots=True)
class PolarizedWeights:
    """极化权重（按列）与翻转次数。"""

    columns: IntegerMatrix
    flip_count: int

    @property
    def sign(self) -> int:
        return -1 if self.flip_count % 2 else 1


def polarize(weights: Sequence[Weight], eta: Sequence[int]) -> PolarizedWeights:
    """选取 α 或 -α 使 ⟨α^η, η⟩ > 0。"""

    eta = normalize_eta(eta)
    columns: list[Weight] = []
    flips = 0
    for weight in weights:
        if len(weight) != len(eta):
            raise ValueError(f"权重 {list(weight)} 与极化向量维数不一致")
        value = sum(a * b for a, b in zip(weight, eta))
        if value == 0:
            raise NonGenericPolarizationError(tuple(weight), eta)
        if value < 0:
            columns.append(tuple(-item for item in weight))
            flips += 1
        else:
            columns.append(tuple(weight))
    return PolarizedWeights(columns=IntegerMatrix.from_columns(columns, rows=len(eta)), flip_count=flips)


def linear_moment_value(
    a: Sequence[Number],
    polarized: PolarizedWeights,
    squared_norms: Sequence[Number],
) -> RationalVector:
    """线性模型 Φ(v) = a + Σ‖v_i‖² α_i^η 在给定模长平方处的取值。"""

    columns = polarized.columns.columns()
    if len(squared_norms) != len(columns):
        raise ValueError(f"模长个数 {len(squared_norms)} 与列数 {len(columns)} 不一致")
    result = vector(a)
    for norm, column in zip(squared_norms, columns):
        norm = Fraction(norm)
        if norm < 0:
            raise NegativeSquaredNormError(f"模长平方不能为负: {norm}")
        result = add(result, scale(norm, column))
    return result


def restrict_to_subtorus(
    datum: FixedPointDatum,
    inclusion: IntegerMatrix,
) -> FixedPointDatum | NonIsolatedFixedPoint:
    """沿子环面 ι 限制：取值与权重都左乘 ιᵀ。"""

    if inclusion.rows != datum.torus_dim:
        raise ValueError(f"包含映射行数 {inclusion.rows} 与环面维数 {datum.torus_dim} 不一致")
    if rank(inclusion) != inclusion.cols:
        raise ValueError("子环面包含映射必须列满秩")
    transpose = inclusion.transpose()
    restricted: list[Weight] = []
    for index, weight in enumerate(datum.weights):
        image = tuple(int(item) for item in transpose.apply(weight))
        if all(item == 0 for item in image):
            return NonIsolatedFixedPoint(weight_index=index, weight=weight)
        restricted.append(image)
    return FixedPointDatum(moment_value=transpose.apply(datum.moment_value), weights=tuple(restricted))
