"""运行配置（通过 .env 覆盖）。"""

from __future__ import annotations

from fractions import Fraction
import os
from pathlib import Path

from dotenv import load_dotenv

# 优先加载项目根目录下的 .env
BASE_DIR = Path(__file__).resolve().parents[1]
load_dotenv(BASE_DIR / ".env")


def _to_int(value: str | None, default: int, *, minimum: int = 0) -> int:
    """安全解析整数环境变量。"""

    try:
        parsed = int(str(value).strip())
    except (TypeError, ValueError):
        return default
    return parsed if parsed >= minimum else default


def _to_fraction(value: str | None, default: Fraction, *, positive: bool = False) -> Fraction:
    """安全解析 "p/q" 形式的有理数环境变量。"""

    if value is None:
        return default
    try:
        parsed = Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        return default
    if positive and parsed <= 0:
        return default
    return parsed


def _to_bounds(value: str | None, default: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    """解析 "lo,hi" 形式的区间。"""

    if value is None:
        return default
    parts = [item.strip() for item in str(value).split(",")]
    if len(parts) != 2:
        return default
    try:
        return Fraction(parts[0]), Fraction(parts[1])
    except (ValueError, ZeroDivisionError):
        return default


APP_NAME = os.getenv("APP_NAME", "pydhmeasure")
LOG_LEVEL = os.getenv("DH_LOG_LEVEL", "WARNING").strip().upper() or "WARNING"

GRID_STEP = _to_fraction(os.getenv("DH_GRID_STEP"), Fraction(1, 17), positive=True)
GRID_BOUNDS = _to_bounds(os.getenv("DH_GRID_BOUNDS"), (Fraction(-1), Fraction(2)))
GRID_WORKERS = _to_int(os.getenv("DH_GRID_WORKERS"), 1, minimum=1)

MC_SAMPLES = _to_int(os.getenv("DH_MC_SAMPLES"), 1_000_000, minimum=1)
MC_SEED = _to_int(os.getenv("DH_MC_SEED"), 42, minimum=0)
MC_HALFWIDTH = _to_fraction(os.getenv("DH_MC_HALFWIDTH"), Fraction(1, 8), positive=True)
MC_SHARDS = _to_int(os.getenv("DH_MC_SHARDS"), 8, minimum=1)
MC_CHUNK_SIZE = _to_int(os.getenv("DH_MC_CHUNK_SIZE"), 1 << 16, minimum=1024)
