from __future__ import annotations

from fractions import Fraction
import io
import json
from pathlib import Path

import pytest

from app.models import ProblemSpec
from app.services import spec_service
from app.services.polyvol import HPolytope
from app.services.spec_service import ProblemSpecError


@pytest.mark.unit
def test_load_fixed_point_spec_normalizes_rationals(cp2_fixed_point_payload: dict[str, object]) -> None:
    payload = dict(cp2_fixed_point_payload)
    payload["fixed_points"] = [{"point": ["2/4", "-0"], "weights": [[1, 0], [0, 1]]}]

    spec = spec_service.load_problem_spec(json.dumps(payload))

    assert spec.fixed_points is not None
    assert spec.fixed_points[0].point == ["1/2", "0"]
    data = spec_service.fixed_point_data(spec)
    assert data[0].moment_value == (Fraction(1, 2), Fraction(0))


@pytest.mark.unit
def test_dump_then_load_is_identity(cp2_fixed_point_payload: dict[str, object], cp2_polytope_payload: dict[str, object]) -> None:
    for payload in (cp2_fixed_point_payload, cp2_polytope_payload):
        spec = ProblemSpec.model_validate(payload)
        text = spec_service.dump_problem_spec(spec)

        assert text.endswith("\n")
        assert spec_service.load_problem_spec(text) == spec


@pytest.mark.unit
@pytest.mark.parametrize(
    "payload",
    [
        {"torus_dim": 2, "eta": [1, 2]},
        {"torus_dim": 2, "eta": [0, 0], "fixed_points": []},
        {"torus_dim": 2, "eta": [1], "fixed_points": []},
        {"torus_dim": 2, "eta": [1, 2], "fixed_points": [{"point": ["0.5", "0"], "weights": []}]},
        {"torus_dim": 2, "eta": [1, 2], "fixed_points": [{"point": ["0", "0"], "weights": [[0, 0]]}]},
        {"torus_dim": 2, "eta": [1, 2], "fixed_points": [], "unknown": 1},
        {"torus_dim": 2, "eta": [1, 2], "polytope": {"normals": [[1, 0]], "offsets": ["0", "1"]}},
        {"torus_dim": 2, "eta": [1, 2], "fixed_points": [], "subtorus_eta": [1]},
        {"torus_dim": 2, "eta": [1, 2], "fixed_points": [], "subtorus": [[1, 2]], "subtorus_eta": [0]},
    ],
)
def test_invalid_specs_are_rejected(payload: dict[str, object]) -> None:
    with pytest.raises(ProblemSpecError):
        spec_service.load_problem_spec(json.dumps(payload))


@pytest.mark.unit
def test_non_json_is_rejected() -> None:
    with pytest.raises(ProblemSpecError):
        spec_service.load_problem_spec("torus_dim: 2")
    with pytest.raises(ProblemSpecError):
        spec_service.load_problem_spec("[1, 2]")


@pytest.mark.unit
def test_read_problem_spec_from_stdin_and_file(
    cp2_polytope_payload: dict[str, object],
    write_spec,
) -> None:
    text = json.dumps(cp2_polytope_payload)
    path: Path = write_spec(cp2_polytope_payload)

    assert spec_service.read_problem_spec("-", stdin=io.StringIO(text)) == spec_service.read_problem_spec(str(path))
    with pytest.raises(ProblemSpecError):
        spec_service.read_problem_spec(str(path.with_name("missing.json")))


@pytest.mark.unit
def test_resolve_polytope_builds_vertex_data(cp2_polytope_payload: dict[str, object], cp2_polytope: HPolytope) -> None:
    spec = ProblemSpec.model_validate(cp2_polytope_payload)

    data, delzant = spec_service.resolve_fixed_points(spec)

    assert delzant is not None
    assert delzant.polytope == cp2_polytope
    assert len(data) == 3


@pytest.mark.unit
def test_subtorus_columns_become_inclusion_matrix(cp2_polytope_payload: dict[str, object]) -> None:
    payload = dict(cp2_polytope_payload, subtorus=[[1, 2]])
    spec = ProblemSpec.model_validate(payload)

    iota = spec_service.subtorus_of(spec)

    assert iota is not None
    assert (iota.rows, iota.cols) == (2, 1)
    assert iota.column(0) == (1, 2)


@pytest.mark.unit
def test_problem_from_data_round_trips(cp2_fixed_point_payload: dict[str, object]) -> None:
    spec = ProblemSpec.model_validate(cp2_fixed_point_payload)
    data = spec_service.fixed_point_data(spec)

    rebuilt = spec_service.problem_from_data(data, [1, 2], 2)

    assert rebuilt == spec


@pytest.mark.unit
def test_polytope_of_reads_h_representation(cp2_polytope_payload: dict[str, object], cp2_polytope: HPolytope) -> None:
    spec = ProblemSpec.model_validate(cp2_polytope_payload)

    assert spec_service.polytope_of(spec) == cp2_polytope
    assert spec_service.polytope_of(ProblemSpec.model_validate({"torus_dim": 2, "fixed_points": [], "eta": [1, 2]})) is None
