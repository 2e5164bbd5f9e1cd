"""问题文件字段的统一校验工具。"""

from __future__ import annotations

from fractions import Fraction
import re

RATIONAL_PATTERN = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def normalize_rational_text(value: str) -> str:
    """标准化有理数文本为最简 "p/q"（分母为 1 时只保留 p）。"""

    text = str(value or "").strip()
    parsed = Fraction(text)
    if parsed.denominator == 1:
        return str(parsed.numerator)
    return f"{parsed.numerator}/{parsed.denominator}"


def validate_rational_text(value: str) -> str:
    """校验有理数文本，不合法时返回错误信息。"""

    text = str(value or "").strip()
    if not RATIONAL_PATTERN.fullmatch(text):
        return f"有理数需写成 \"p/q\" 或整数文本: {text!r}"
    if "/" in text and int(text.split("/", 1)[1]) == 0:
        return f"分母不能为 0: {text!r}"
    return ""


def validate_dimension(values: list[object], expected: int, label: str) -> str:
    """校验向量长度。"""

    if len(values) == expected:
        return ""
    return f"{label} 的长度为 {len(values)}，应为 {expected}"


def validate_nonzero(values: list[int], label: str) -> str:
    if any(item != 0 for item in values):
        return ""
    return f"{label} 不能为零向量"


def parse_int_list(value: str) -> list[int]:
    """解析 "1,2" 形式的整数列表。"""

    parts = [item.strip() for item in str(value or "").split(",") if item.strip()]
    if not parts:
        raise ValueError("整数列表不能为空")
    try:
        return [int(item) for item in parts]
    except ValueError as exc:
        raise ValueError(f"非法的整数列表: {value!r}") from exc


def parse_rational_list(value: str) -> list[Fraction]:
    """解析 "1/4,1/4" 形式的有理数列表。"""

    parts = [item.strip() for item in str(value or "").split(",") if item.strip()]
    if not parts:
        raise ValueError("有理数列表不能为空")
    result: list[Fraction] = []
    for item in parts:
        error = validate_rational_text(item)
        if error:
            raise ValueError(error)
        result.append(Fraction(item))
    return result
