from __future__ import annotations

from fractions import Fraction
import random

import pytest

from app.services import gls, grid_service, polyvol, toric
from app.services.conemeasure import DensityValue
from app.services.polyvol import HPolytope
from app.services.ratlinalg import IntegerMatrix, RationalVector, dot
from app.services.toric import NonIsolatedRestrictionError, NonSimplePolytopeError
from app.services.torusrep import FixedPointDatum

ETA_CANDIDATES = [(1, 2), (3, 1), (2, -5), (1, 7), (-3, 2), (5, 3), (1, -4)]


def _generic_etas(data: list[FixedPointDatum], count: int) -> list[tuple[int, int]]:
    result = [
        eta
        for eta in ETA_CANDIDATES
        if all(dot(weight, eta) != 0 for datum in data for weight in datum.weights)
    ]
    return result[:count]


def _sweep_grid(p: HPolytope) -> list[RationalVector]:
    points = polyvol.vertices(p).vertices
    lower = [min(point[i] for point in points) - 1 + Fraction(1, 7) for i in range(2)]
    upper = [max(point[i] for point in points) + 1 for i in range(2)]
    grid = grid_service.GridSpec(step=Fraction(1, 3), bounds=tuple(zip(lower, upper)))
    return list(grid_service.grid_points(grid))


@pytest.mark.unit
def test_vertex_data_of_triangle(cp2_polytope: HPolytope) -> None:
    data = toric.vertex_data(cp2_polytope)

    assert data.unimodular
    assert [datum.moment_value for datum in data.vertex_data] == [(0, 0), (0, 1), (1, 0)]
    assert [set(datum.weights) for datum in data.vertex_data] == [
        {(1, 0), (0, 1)},
        {(1, -1), (0, -1)},
        {(-1, 1), (-1, 0)},
    ]


@pytest.mark.unit
def test_vertex_data_marks_non_unimodular_triangle() -> None:
    triangle = HPolytope.build([[1, 0], [0, 1], [-1, -2]], [0, 0, 2], ambient_dim=2)

    assert not toric.vertex_data(triangle).unimodular


@pytest.mark.unit
def test_square_pyramid_is_not_simple() -> None:
    pyramid = HPolytope.build(
        [[0, 0, 1], [1, 0, -1], [-1, 0, -1], [0, 1, -1], [0, -1, -1]],
        [0, 0, 2, 0, 2],
        ambient_dim=3,
    )

    with pytest.raises(NonSimplePolytopeError) as exc_info:
        toric.vertex_data(pyramid)

    assert exc_info.value.vertex == (1, 1, 1)
    assert exc_info.value.facet_count == 4


@pytest.mark.unit
def test_redundant_constraint_keeps_polytope_simple(cp2_polytope: HPolytope) -> None:
    padded = cp2_polytope.with_constraint((1, 1), 0)

    data = toric.vertex_data(padded)

    assert len(data.vertex_data) == 3
    assert data.unimodular


@pytest.mark.unit
def test_full_oracle_marks_boundary_as_wall(cp2_polytope: HPolytope) -> None:
    assert toric.oracle_density_full(cp2_polytope, (Fraction(1, 4), Fraction(1, 4))) == DensityValue(Fraction(1))
    assert toric.oracle_density_full(cp2_polytope, (2, 2)) == DensityValue(Fraction(0))
    assert not toric.oracle_density_full(cp2_polytope, (Fraction(1, 2), Fraction(1, 2))).regular


@pytest.mark.unit
def test_cp2_identity_on_fine_grid(cp2_polytope: HPolytope) -> None:
    data = toric.vertex_data(cp2_polytope)
    measure = gls.assemble(data.vertex_data, (1, 2))
    points = list(grid_service.grid_points(grid_service.GridSpec.uniform(Fraction(1, 17), Fraction(-1), Fraction(2), 2)))

    report = grid_service.check_identity(
        lambda b: gls.eval_density(measure, b),
        lambda b: toric.oracle_density_full(cp2_polytope, b),
        points,
    )

    assert report.mismatches == 0
    assert report.checked > 2000


@pytest.mark.unit
@pytest.mark.slow
def test_random_delzant_polygons_satisfy_identity() -> None:
    """随机幺模多边形 × 两个一般极化向量，网格上零误差。"""

    rng = random.Random(20)
    for _ in range(20):
        polygon = toric.random_delzant_polygon(rng)
        data = toric.vertex_data(polygon)
        assert data.unimodular
        points = _sweep_grid(polygon)
        etas = _generic_etas(list(data.vertex_data), 2)
        assert len(etas) == 2
        for eta in etas:
            measure = gls.assemble(data.vertex_data, eta)
            report = grid_service.check_identity(
                lambda b, m=measure: gls.eval_density(m, b),
                lambda b, p=polygon: toric.oracle_density_full(p, b),
                points,
            )
            assert report.mismatches == 0
            assert report.checked > 0


@pytest.mark.unit
def test_circle_restriction_matches_slices(cp2_polytope: HPolytope, cp2_data: list[FixedPointDatum]) -> None:
    iota = IntegerMatrix.from_columns([(1, 2)], rows=2)
    restricted = toric.restrict_data(cp2_data, iota)
    measure = gls.assemble(restricted, (1,))

    assert [datum.moment_value for datum in restricted] == [(0,), (1,), (2,)]
    assert [summand.sign for summand in measure.summands] == [1, -1, 1]

    rng = random.Random(100)
    checked = 0
    while checked < 100:
        y = (Fraction(rng.randint(-29, 87), 29),)
        value = gls.eval_density(measure, y)
        expected = toric.oracle_density_subtorus(cp2_polytope, iota, y)
        if not (value.regular and expected.regular):
            continue
        assert value.value == expected.value
        assert value.value == polyvol.slice_fiber_volume(cp2_polytope, iota.transpose(), y)
        if 0 < y[0] < 1:
            assert value.value == y[0] / 2
        elif 1 < y[0] < 2:
            assert value.value == 1 - y[0] / 2
        else:
            assert value.value == 0
        checked += 1


@pytest.mark.unit
def test_subtorus_oracle_on_vertex_value_is_wall(cp2_polytope: HPolytope) -> None:
    iota = IntegerMatrix.from_columns([(1, 2)], rows=2)

    assert not toric.oracle_density_subtorus(cp2_polytope, iota, (0,)).regular
    assert toric.oracle_density_subtorus(cp2_polytope, iota, (5,)).value == 0


@pytest.mark.unit
def test_restrict_data_reports_non_isolated_index(cp2_data: list[FixedPointDatum]) -> None:
    iota = IntegerMatrix.from_columns([(1, 1)], rows=2)

    with pytest.raises(NonIsolatedRestrictionError) as exc_info:
        toric.restrict_data(cp2_data, iota)

    assert exc_info.value.index == 1


@pytest.mark.unit
def test_total_mass_is_polytope_volume(cp2_polytope: HPolytope, square_polytope: HPolytope) -> None:
    assert toric.moment_polytope_volume(cp2_polytope) == Fraction(1, 2)
    assert toric.moment_polytope_volume(square_polytope) == 1


@pytest.mark.unit
def test_random_polygons_are_reproducible() -> None:
    first = [toric.random_delzant_polygon(random.Random(5)) for _ in range(3)]
    second = [toric.random_delzant_polygon(random.Random(5)) for _ in range(3)]

    assert first == second
