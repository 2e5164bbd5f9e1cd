"""问题文件的读写与到服务层数据的转换。"""

from __future__ import annotations

import json
import logging
from pathlib import Path
import sys
from typing import TextIO

from pydantic import ValidationError

from app.models import FixedPointEntry, ProblemSpec
from app.services.polyvol import HPolytope
from app.services.ratlinalg import IntegerMatrix, format_fraction
from app.services.toric import DelzantData, vertex_data
from app.services.torusrep import FixedPointDatum

logger = logging.getLogger(__name__)


class ProblemSpecError(ValueError):
    """问题文件无法解析或不合法。"""


def load_problem_spec(text: str) -> ProblemSpec:
    """解析 JSON 文本并校验。"""

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSpecError(f"问题文件不是合法 JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ProblemSpecError("问题文件顶层必须是对象")
    try:
        return ProblemSpec.model_validate(payload)
    except ValidationError as exc:
        raise ProblemSpecError(f"问题文件不合法: {exc}") from exc


def read_problem_spec(path: str, *, stdin: TextIO | None = None) -> ProblemSpec:
    """从文件读取；path 为 "-" 时读标准输入。"""

    if path == "-":
        return load_problem_spec((stdin or sys.stdin).read())
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemSpecError(f"无法读取问题文件 {path}: {exc}") from exc
    return load_problem_spec(text)


def dump_problem_spec(spec: ProblemSpec) -> str:
    """稳定输出（缩进 2，省略空字段，末尾换行）。"""

    return spec.model_dump_json(indent=2, exclude_none=True) + "\n"


def fixed_point_data(spec: ProblemSpec) -> list[FixedPointDatum]:
    return [FixedPointDatum.build(entry.point, entry.weights) for entry in spec.fixed_points or []]


def polytope_of(spec: ProblemSpec) -> HPolytope | None:
    if spec.polytope is None:
        return None
    return HPolytope.build(spec.polytope.normals, spec.polytope.offsets, ambient_dim=spec.torus_dim)


def subtorus_of(spec: ProblemSpec) -> IntegerMatrix | None:
    """subtorus 文件字段按列给出 ι（dim×k）。"""

    if spec.subtorus is None:
        return None
    return IntegerMatrix.from_columns(spec.subtorus, rows=spec.torus_dim)


def resolve_fixed_points(spec: ProblemSpec) -> tuple[list[FixedPointDatum], DelzantData | None]:
    """多面体输入时先生成顶点数据。"""

    polytope = polytope_of(spec)
    if polytope is None:
        return fixed_point_data(spec), None
    toric = vertex_data(polytope)
    logger.info("多面体顶点数据: 顶点数=%d 幺模=%s", len(toric.vertex_data), toric.unimodular)
    return list(toric.vertex_data), toric


def problem_from_data(data: list[FixedPointDatum], eta: list[int], torus_dim: int) -> ProblemSpec:
    """把不动点数据写回问题文件模型。"""

    return ProblemSpec(
        torus_dim=torus_dim,
        fixed_points=[
            FixedPointEntry(
                point=[format_fraction(item) for item in datum.moment_value],
                weights=[list(weight) for weight in datum.weights],
            )
            for datum in data
        ],
        eta=list(eta),
    )
