"""GLS 分解 DH(M) = Σ_F DH(NF) 的组装与逐点求值。"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import logging
from typing import Iterable, Sequence

from app.services.conemeasure import ConeMeasure, DensityValue, density, in_support, is_wall, make_cone_measure
from app.services.ratlinalg import Number, RationalVector, dot, vector
from app.services.torusrep import FixedPointDatum, PolarizingVector, normalize_eta, pairing

logger = logging.getLogger(__name__)


class AssemblyError(ValueError):
    """某个不动点无法构造锥测度。"""

    def __init__(self, index: int, cause: ValueError) -> None:
        self.index = index
        self.cause = cause
        super().__init__(f"第 {index} 个不动点: {cause}")


@dataclass(frozen=True, slots=True)
class DHMeasure:
    """锥测度的有限带符号和（可为空，即零测度）。"""

    summands: tuple[ConeMeasure, ...]
    torus_dim: int
    eta: PolarizingVector

    def __post_init__(self) -> None:
        for summand in self.summands:
            if summand.torus_dim != self.torus_dim:
                raise ValueError(f"锥测度维数 {summand.torus_dim} 与 DH 测度维数 {self.torus_dim} 不一致")


@dataclass(frozen=True, slots=True)
class ComponentGroup:
    """按 ⟨Φ(p), η'⟩ 相等分组的分量。"""

    label: Fraction
    members: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class SupportEntry:
    index: int
    in_support: bool
    pairing_ok: bool
    wall: bool


@dataclass(frozen=True, slots=True)
class ComparisonReport:
    """两个分解在共同正则点上的逐点比较结果。"""

    checked: int
    skipped: int
    mismatches: tuple[RationalVector, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def assemble(data: Sequence[FixedPointDatum], eta: Sequence[int]) -> DHMeasure:
    """每个不动点一个锥测度，保持顺序。"""

    eta = normalize_eta(eta)
    summands: list[ConeMeasure] = []
    for index, datum in enumerate(data):
        if datum.torus_dim != len(eta):
            raise AssemblyError(index, ValueError(f"不动点维数 {datum.torus_dim} 与 η 维数 {len(eta)} 不一致"))
        try:
            summands.append(make_cone_measure(datum, eta))
        except ValueError as exc:
            raise AssemblyError(index, exc) from exc
    logger.info("已组装 %d 个单项: eta=%s", len(summands), list(eta))
    return DHMeasure(summands=tuple(summands), torus_dim=len(eta), eta=eta)


def eval_density(m: DHMeasure, b: Sequence[Number]) -> DensityValue:
    """逐点求和；任一单项报告墙点则整体不正则。"""

    point = vector(b)
    if len(point) != m.torus_dim:
        raise ValueError(f"查询点维数 {len(point)} 与 DH 测度维数 {m.torus_dim} 不一致")
    total = Fraction(0)
    for summand in m.summands:
        value = density(summand, point)
        if not value.regular:
            return DensityValue.wall()
        total += value.value
    return DensityValue(value=total)


def reduced_volume(m: DHMeasure, a: Sequence[Number]) -> DensityValue:
    """正则值 a 处约化空间的体积（Liouville 类），等于 DH 密度。"""

    return eval_density(m, a)


def group_by_eta(
    m: DHMeasure,
    data: Sequence[FixedPointDatum],
    eta_nongeneric: Sequence[int],
) -> list[ComponentGroup]:
    """按 ⟨Φ(p), η'⟩ 划分单项下标，标签升序。"""

    if len(data) != len(m.summands):
        raise ValueError(f"不动点个数 {len(data)} 与单项个数 {len(m.summands)} 不一致")
    eta = normalize_eta(eta_nongeneric)
    buckets: dict[Fraction, list[int]] = {}
    for index, datum in enumerate(data):
        buckets.setdefault(pairing(datum.moment_value, eta), []).append(index)
    return [ComponentGroup(label=label, members=tuple(buckets[label])) for label in sorted(buckets)]


def grouped_measures(m: DHMeasure, groups: Iterable[ComponentGroup]) -> list[DHMeasure]:
    """每个分组对应的 DH(NF)。"""

    return [
        DHMeasure(summands=tuple(m.summands[i] for i in group.members), torus_dim=m.torus_dim, eta=m.eta)
        for group in groups
    ]


def support_report(m: DHMeasure, b: Sequence[Number]) -> list[SupportEntry]:
    """逐项报告支撑成员关系与必要条件 ⟨base, η⟩ < ⟨b, η⟩。"""

    point = vector(b)
    level = dot(point, m.eta)
    return [
        SupportEntry(
            index=index,
            in_support=in_support(summand, point),
            pairing_ok=dot(summand.base, m.eta) < level,
            wall=is_wall(summand, point),
        )
        for index, summand in enumerate(m.summands)
    ]


def flip_summand_sign(m: DHMeasure, index: int) -> DHMeasure:
    """调试用：翻转第 index 个单项的符号。"""

    if not 0 <= index < len(m.summands):
        raise ValueError(f"单项下标越界: {index}")
    summands = list(m.summands)
    summands[index] = summands[index].with_sign(-summands[index].sign)
    return DHMeasure(summands=tuple(summands), torus_dim=m.torus_dim, eta=m.eta)


def compare_decompositions(
    first: DHMeasure,
    second: DHMeasure,
    points: Iterable[Sequence[Number]],
) -> ComparisonReport:
    """在两个分解都正则的点上逐点比较（η 无关性）。"""

    checked = 0
    skipped = 0
    mismatches: list[RationalVector] = []
    for raw in points:
        point = vector(raw)
        left = eval_density(first, point)
        right = eval_density(second, point)
        if not (left.regular and right.regular):
            skipped += 1
            continue
        checked += 1
        if left.value != right.value:
            mismatches.append(point)
    return ComparisonReport(checked=checked, skipped=skipped, mismatches=tuple(mismatches))
