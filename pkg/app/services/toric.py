"""环面（toric）对照：由矩多面体生成不动点数据，并给出独立的真值密度。"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import logging
import random
from typing import Sequence

from app.services import polyvol
from app.services.conemeasure import DensityValue
from app.services.polyvol import HPolytope
from app.services.ratlinalg import (
    DegenerateWeightSystemError,
    IntegerMatrix,
    Number,
    RationalVector,
    affine_dimension,
    determinant,
    inverse,
    primitive_integer_vector,
    rank,
    vector,
)
from app.services.torusrep import FixedPointDatum, NonIsolatedFixedPoint, restrict_to_subtorus

logger = logging.getLogger(__name__)


class NonSimplePolytopeError(ValueError):
    """某个顶点落在多于 dim 个面上。"""

    def __init__(self, vertex: RationalVector, facet_count: int) -> None:
        self.vertex = vertex
        self.facet_count = facet_count
        super().__init__(f"非单纯多面体: 顶点 {[str(v) for v in vertex]} 位于 {facet_count} 个面上")


class NonIsolatedRestrictionError(ValueError):
    """子环面限制后某个不动点不再孤立。"""

    def __init__(self, index: int, marker: NonIsolatedFixedPoint) -> None:
        self.index = index
        self.marker = marker
        super().__init__(f"第 {index} 个不动点的权重 {list(marker.weight)} 在子环面上限制为 0")


@dataclass(frozen=True, slots=True)
class DelzantData:
    """多面体与其顶点不动点数据；unimodular 记录每个顶点锥是否幺模。"""

    polytope: HPolytope
    vertex_data: tuple[FixedPointDatum, ...]
    unimodular: bool


def _facet_constraints(p: HPolytope, points: Sequence[RationalVector]) -> list[int]:
    """真正定义面的约束下标（按顶点集合去重）。"""

    dim = p.ambient_dim
    seen: set[frozenset[int]] = set()
    facets: list[int] = []
    for j in range(p.normals.rows):
        members = frozenset(i for i, point in enumerate(points) if p.slacks(point)[j] == 0)
        if members in seen:
            continue
        if affine_dimension([points[i] for i in sorted(members)]) == dim - 1:
            seen.add(members)
            facets.append(j)
    return facets


def vertex_data(p: HPolytope) -> DelzantData:
    """每个顶点：权重为出发棱的本原整方向，矩映射取值为顶点坐标。"""

    dim = p.ambient_dim
    points = polyvol.vertices(p).vertices
    if affine_dimension(points) < dim:
        raise ValueError("多面体不是全维的")
    facets = _facet_constraints(p, points)
    data: list[FixedPointDatum] = []
    unimodular = True
    for point in points:
        slacks = p.slacks(point)
        tight = [j for j in facets if slacks[j] == 0]
        if len(tight) != dim:
            raise NonSimplePolytopeError(point, len(tight))
        normals = [p.normals.entries[j] for j in tight]
        # 顶点锥的棱方向是法向量矩阵逆的各列
        edges_inverse = inverse(normals)
        weights = tuple(
            primitive_integer_vector([edges_inverse[i][k] for i in range(dim)]) for k in range(dim)
        )
        if abs(determinant(weights)) != 1:
            unimodular = False
        data.append(FixedPointDatum(moment_value=point, weights=weights))
    if not unimodular:
        logger.warning("多面体的顶点锥不全是幺模的（轨形情形）")
    return DelzantData(polytope=p, vertex_data=tuple(data), unimodular=unimodular)


def oracle_density_full(p: HPolytope, b: Sequence[Number]) -> DensityValue:
    """满环面作用的 DH 测度是 Δ 上的 Lebesgue 测度。"""

    position = polyvol.contains(p, vector(b))
    if position == "boundary":
        return DensityValue.wall()
    return DensityValue(value=Fraction(1 if position == "inside" else 0))


def oracle_density_subtorus(p: HPolytope, iota: IntegerMatrix, y: Sequence[Number]) -> DensityValue:
    """Δ 上 Lebesgue 测度沿 ιᵀ 的推出密度；纤维非空但低维时不正则。"""

    if rank(iota) != iota.cols:
        raise DegenerateWeightSystemError(f"退化的子环面: 秩 {rank(iota)} < {iota.cols}")
    proj = iota.transpose()
    fiber = polyvol.fiber_polytope(p, proj, vector(y))
    if fiber is None:
        return DensityValue(value=Fraction(0))
    if fiber.ambient_dim > 0:
        points = polyvol.vertices(fiber).vertices
        if points and affine_dimension(points) < fiber.ambient_dim:
            return DensityValue.wall()
    elif any(value == 0 for value in fiber.offsets):
        return DensityValue.wall()
    return DensityValue(value=polyvol.volume(fiber))


def restrict_data(data: Sequence[FixedPointDatum], iota: IntegerMatrix) -> list[FixedPointDatum]:
    """把全部顶点数据限制到子环面。"""

    restricted: list[FixedPointDatum] = []
    for index, datum in enumerate(data):
        result = restrict_to_subtorus(datum, iota)
        if isinstance(result, NonIsolatedFixedPoint):
            raise NonIsolatedRestrictionError(index, result)
        restricted.append(result)
    return restricted


def moment_polytope_volume(p: HPolytope) -> Fraction:
    """满环面 DH 测度的总质量。"""

    return polyvol.volume(p)


def _shear(p: HPolytope, k: int) -> HPolytope:
    """用幺模剪切 x ↦ (x1 + k·x2, x2) 变换多面体；法向量右乘逆矩阵。"""

    rows = [(a, b - k * a) for a, b in p.normals.entries]
    return HPolytope(normals=IntegerMatrix.from_rows(rows, cols=2), offsets=p.offsets)


def random_delzant_polygon(rng: random.Random) -> HPolytope:
    """随机幺模单纯多边形：长方形、直角梯形或幺模三角形，再做平移与剪切。"""

    kind = rng.choice(("rectangle", "trapezoid", "triangle"))
    if kind == "rectangle":
        width, height = rng.randint(1, 4), rng.randint(1, 4)
        polygon = polyvol.box((0, 0), (width, height))
    elif kind == "trapezoid":
        height = rng.randint(1, 3)
        width = height + rng.randint(1, 3)
        polygon = HPolytope.build([[1, 0], [0, 1], [0, -1], [-1, -1]], [0, 0, height, width], ambient_dim=2)
    else:
        size = rng.randint(1, 4)
        polygon = HPolytope.build([[1, 0], [0, 1], [-1, -1]], [0, 0, size], ambient_dim=2)
    polygon = _shear(polygon, rng.randint(-2, 2))
    return polygon.translate((rng.randint(-3, 3), rng.randint(-3, 3)))
