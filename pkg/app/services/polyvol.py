"""精确凸多面体引擎：成员判定、顶点枚举、格规范体积与仿射切片。"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
import logging
from typing import Iterable, Literal, Sequence

from app.services.ratlinalg import (
    DegenerateWeightSystemError,
    IntegerMatrix,
    Number,
    RationalVector,
    affine_dimension,
    cofactor_normal,
    determinant,
    kernel_lattice_basis,
    matmul,
    rank,
    rank_of,
    solve_particular,
    solve_rational,
    sub,
    vector,
)

logger = logging.getLogger(__name__)

Position = Literal["inside", "boundary", "outside"]


class UnboundedPolytopeError(ValueError):
    """多面体无界（回收锥非零）。"""


@dataclass(frozen=True, slots=True)
class HPolytope:
    """H 表示：{x : A_j·x ≥ -offset_j}，A_j 为内法向量。"""

    normals: IntegerMatrix
    offsets: RationalVector

    def __post_init__(self) -> None:
        if len(self.offsets) != self.normals.rows:
            raise ValueError(f"偏移个数 {len(self.offsets)} 与约束个数 {self.normals.rows} 不一致")

    @classmethod
    def build(cls, normals: Iterable[Iterable[int]], offsets: Iterable[Number | str], ambient_dim: int) -> HPolytope:
        return cls(normals=IntegerMatrix.from_rows(normals, cols=ambient_dim), offsets=vector(offsets))

    @property
    def ambient_dim(self) -> int:
        return self.normals.cols

    def slacks(self, x: Sequence[Number]) -> RationalVector:
        """各约束的松弛量 A_j·x + offset_j。"""

        if len(x) != self.ambient_dim:
            raise ValueError(f"点的维数 {len(x)} 与多面体维数 {self.ambient_dim} 不一致")
        return tuple(value + offset for value, offset in zip(self.normals.apply(x), self.offsets))

    def translate(self, shift: Sequence[Number]) -> HPolytope:
        """平移 P + shift。"""

        moved = self.normals.apply(shift)
        return HPolytope(normals=self.normals, offsets=tuple(o - m for o, m in zip(self.offsets, moved)))

    def dilate(self, factor: Number) -> HPolytope:
        """伸缩 λP（λ > 0）。"""

        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("伸缩因子必须为正")
        return HPolytope(normals=self.normals, offsets=tuple(factor * o for o in self.offsets))

    def with_constraint(self, normal: Sequence[int], offset: Number) -> HPolytope:
        rows = [*self.normals.entries, tuple(int(item) for item in normal)]
        return HPolytope(
            normals=IntegerMatrix.from_rows(rows, cols=self.ambient_dim),
            offsets=(*self.offsets, Fraction(offset)),
        )


@dataclass(frozen=True, slots=True)
class VPolytope:
    """V 表示（顶点无冗余，按字典序排列）。"""

    vertices: tuple[RationalVector, ...]
    ambient_dim: int


def box(lower: Sequence[Number], upper: Sequence[Number]) -> HPolytope:
    """轴对齐长方体 Π[lower_i, upper_i]。"""

    dim = len(lower)
    normals: list[list[int]] = []
    offsets: list[Fraction] = []
    for i in range(dim):
        unit = [1 if j == i else 0 for j in range(dim)]
        normals.append(unit)
        offsets.append(-Fraction(lower[i]))
        normals.append([-item for item in unit])
        offsets.append(Fraction(upper[i]))
    return HPolytope(normals=IntegerMatrix.from_rows(normals, cols=dim), offsets=tuple(offsets))


def standard_simplex(dim: int) -> HPolytope:
    """{x ≥ 0, Σx ≤ 1}。"""

    normals = [[1 if j == i else 0 for j in range(dim)] for i in range(dim)]
    normals.append([-1] * dim)
    return HPolytope(
        normals=IntegerMatrix.from_rows(normals, cols=dim),
        offsets=tuple([Fraction(0)] * dim + [Fraction(1)]),
    )


def contains(p: HPolytope, x: Sequence[Number]) -> Position:
    """精确判定点在内部 / 边界 / 外部。"""

    slacks = p.slacks(x)
    if any(value < 0 for value in slacks):
        return "outside"
    if any(value == 0 for value in slacks):
        return "boundary"
    return "inside"


def _ensure_bounded(p: HPolytope) -> None:
    """回收锥 {y : A·y ≥ 0} 必须为 {0}。"""

    dim = p.ambient_dim
    rows = p.normals.entries
    if rank(p.normals) < dim:
        raise UnboundedPolytopeError("无界多面体: 约束法向量不满秩")
    for subset in combinations(range(len(rows)), dim - 1):
        chosen = [rows[i] for i in subset]
        if rank_of(chosen) != dim - 1:
            continue
        direction = cofactor_normal(chosen, dim)
        for candidate in (direction, tuple(-item for item in direction)):
            if all(sum(a * b for a, b in zip(row, candidate)) >= 0 for row in rows):
                raise UnboundedPolytopeError(f"无界多面体: 回收方向 {[str(v) for v in candidate]}")


def vertices(p: HPolytope) -> VPolytope:
    """基本可行解枚举：取 dim 个约束求交点并做可行性过滤。"""

    _ensure_bounded(p)
    dim = p.ambient_dim
    rows = p.normals.entries
    found: set[RationalVector] = set()
    for subset in combinations(range(len(rows)), dim):
        chosen = [rows[i] for i in subset]
        if determinant(chosen) == 0:
            continue
        point = solve_rational(chosen, [-p.offsets[i] for i in subset], dim)
        if point is None:
            continue
        if all(value >= 0 for value in p.slacks(point)):
            found.add(point)
    return VPolytope(vertices=tuple(sorted(found)), ambient_dim=dim)


def _tight_sets(p: HPolytope, points: Sequence[RationalVector]) -> list[frozenset[int]]:
    return [frozenset(j for j, value in enumerate(p.slacks(point)) if value == 0) for point in points]


def _triangulate_face(
    members: frozenset[int],
    face_dim: int,
    points: Sequence[RationalVector],
    tight: Sequence[frozenset[int]],
    n_constraints: int,
) -> list[tuple[int, ...]]:
    """对面（顶点编号集合）做从最小编号顶点出发的扇形三角剖分。"""

    if len(members) == face_dim + 1:
        return [tuple(sorted(members))]
    apex = min(members)
    facets: set[frozenset[int]] = set()
    for j in range(n_constraints):
        facet = frozenset(v for v in members if j in tight[v])
        if apex in facet or len(facet) < face_dim:
            continue
        if affine_dimension([points[v] for v in sorted(facet)]) == face_dim - 1:
            facets.add(facet)
    simplices: list[tuple[int, ...]] = []
    for facet in sorted(facets, key=sorted):
        for simplex in _triangulate_face(facet, face_dim - 1, points, tight, n_constraints):
            simplices.append((apex, *simplex))
    return simplices


def triangulate(p: HPolytope) -> list[tuple[RationalVector, ...]]:
    """全维多面体的三角剖分（单纯形顶点列表）；低维或空集返回空列表。"""

    points = vertices(p).vertices
    dim = p.ambient_dim
    if affine_dimension(points) < dim:
        return []
    tight = _tight_sets(p, points)
    members = frozenset(range(len(points)))
    simplices = _triangulate_face(members, dim, points, tight, p.normals.rows)
    return [tuple(points[v] for v in simplex) for simplex in simplices]


def simplex_volume(corners: Sequence[Sequence[Number]]) -> Fraction:
    """|det(v_i - v_0)| / dim!。"""

    origin = corners[0]
    dim = len(origin)
    return abs(determinant([sub(corner, origin) for corner in corners[1:]])) / factorial(dim)


def volume(p: HPolytope) -> Fraction:
    """环境整数格下的 Lebesgue 体积；低维多面体体积为 0。"""

    if p.ambient_dim == 0:
        return Fraction(1) if all(value >= 0 for value in p.offsets) else Fraction(0)
    return sum((simplex_volume(simplex) for simplex in triangulate(p)), Fraction(0))


def fiber_polytope(p: HPolytope, proj: IntegerMatrix, value: Sequence[Number]) -> HPolytope | None:
    """把纤维 {x ∈ p : proj·x = value} 用核格基参数化为 u 空间中的多面体。"""

    if proj.cols != p.ambient_dim:
        raise ValueError(f"投影列数 {proj.cols} 与多面体维数 {p.ambient_dim} 不一致")
    if rank(proj) != proj.rows:
        raise DegenerateWeightSystemError(f"退化的投影: 秩 {rank(proj)} < {proj.rows}")
    base = solve_particular(proj, value)
    if base is None:
        return None
    kernel = kernel_lattice_basis(proj)
    if kernel.cols == 0:
        normals = IntegerMatrix(entries=tuple(() for _ in range(p.normals.rows)), cols=0)
    else:
        normals = matmul(p.normals, kernel)
    return HPolytope(normals=normals, offsets=p.slacks(base))


def slice_fiber_volume(p: HPolytope, proj: IntegerMatrix, value: Sequence[Number]) -> Fraction:
    """纤维在 ker(proj) ∩ Z^dim 格规范下的体积；空纤维为 0。"""

    fiber = fiber_polytope(p, proj, value)
    if fiber is None:
        return Fraction(0)
    result = volume(fiber)
    logger.debug("切片: 取值=%s 体积=%s", [str(v) for v in value], result)
    return result
