"""测试公共 fixture。"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Callable

import pytest


ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from app.services.polyvol import HPolytope, box  # noqa: E402
from app.services.torusrep import FixedPointDatum  # noqa: E402


CP2_NORMALS = [[1, 0], [0, 1], [-1, -1]]
CP2_OFFSETS = ["0", "0", "1"]


@pytest.fixture
def cp2_polytope() -> HPolytope:
    """三角形 {x ≥ 0, y ≥ 0, x + y ≤ 1}。"""

    return HPolytope.build(CP2_NORMALS, CP2_OFFSETS, ambient_dim=2)


@pytest.fixture
def cp2_data() -> list[FixedPointDatum]:
    """CP² 的三个不动点 v1=(0,0), v2=(1,0), v3=(0,1)。"""

    return [
        FixedPointDatum.build(["0", "0"], [[1, 0], [0, 1]]),
        FixedPointDatum.build(["1", "0"], [[-1, 0], [-1, 1]]),
        FixedPointDatum.build(["0", "1"], [[0, -1], [1, -1]]),
    ]


@pytest.fixture
def square_polytope() -> HPolytope:
    return box((0, 0), (1, 1))


@pytest.fixture
def write_spec(tmp_path: Path) -> Callable[[dict[str, object]], Path]:
    """把问题文件写到临时目录并返回路径。"""

    def _write(payload: dict[str, object], name: str = "problem.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def cp2_polytope_payload() -> dict[str, object]:
    return {
        "torus_dim": 2,
        "polytope": {"normals": CP2_NORMALS, "offsets": CP2_OFFSETS},
        "eta": [1, 2],
    }


@pytest.fixture
def cp2_fixed_point_payload() -> dict[str, object]:
    return {
        "torus_dim": 2,
        "fixed_points": [
            {"point": ["0", "0"], "weights": [[1, 0], [0, 1]]},
            {"point": ["1", "0"], "weights": [[-1, 0], [-1, 1]]},
            {"point": ["0", "1"], "weights": [[0, -1], [1, -1]]},
        ],
        "eta": [1, 2],
    }
