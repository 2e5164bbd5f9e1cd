from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
import random

import pytest
from sympy import Matrix

from app.services.ratlinalg import (
    DegenerateWeightSystemError,
    IntegerMatrix,
    affine_dimension,
    cofactor_normal,
    determinant,
    dot,
    format_fraction,
    image_lattice_index,
    inverse,
    kernel_lattice_basis,
    matmul,
    primitive_integer_vector,
    rank,
    smith_invariants,
    solve_particular,
    to_fraction,
    vector,
)


def _random_matrix(rng: random.Random, rows: int, cols: int) -> IntegerMatrix:
    return IntegerMatrix.from_rows(([rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)), cols=cols)


@pytest.mark.unit
def test_to_fraction_accepts_text_and_rejects_bool() -> None:
    assert to_fraction("3/6") == Fraction(1, 2)
    assert to_fraction(" -2 ") == Fraction(-2)
    assert vector(["1/4", 2, Fraction(1, 3)]) == (Fraction(1, 4), Fraction(2), Fraction(1, 3))
    with pytest.raises(ValueError):
        to_fraction(True)
    with pytest.raises(ValueError):
        to_fraction("1/0")


@pytest.mark.unit
def test_format_fraction_prints_integer_without_denominator() -> None:
    assert format_fraction(Fraction(4, 2)) == "2"
    assert format_fraction(Fraction(-3, 6)) == "-1/2"


@pytest.mark.unit
def test_integer_matrix_from_columns_and_transpose() -> None:
    m = IntegerMatrix.from_columns([(1, 0), (1, 2), (0, 3)], rows=2)

    assert m.entries == ((1, 1, 0), (0, 2, 3))
    assert m.column(1) == (1, 2)
    assert m.transpose().entries == ((1, 0), (1, 2), (0, 3))
    assert m.select_columns([2, 0]).columns() == ((0, 3), (1, 0))
    assert m.apply([1, 1, 1]) == (Fraction(2), Fraction(5))


@pytest.mark.unit
def test_integer_matrix_rejects_non_integer_entries() -> None:
    with pytest.raises(ValueError):
        IntegerMatrix(entries=((1, Fraction(1, 2)),), cols=2)  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        IntegerMatrix.from_columns([(1, 2), (3,)], rows=2)


@pytest.mark.unit
def test_rank_and_determinant_match_sympy() -> None:
    rng = random.Random(7)
    for _ in range(60):
        rows, cols = rng.randint(1, 4), rng.randint(1, 5)
        m = _random_matrix(rng, rows, cols)
        assert rank(m) == m.to_sympy().rank()
        if rows == cols:
            assert determinant(m.entries) == Fraction(int(m.to_sympy().det()))


@pytest.mark.unit
def test_inverse_times_matrix_is_identity() -> None:
    rows = [[2, 1], [1, 3]]
    inv = inverse(rows)

    product = [[sum(Fraction(rows[i][k]) * inv[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert product == [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        inverse([[1, 2], [2, 4]])


@pytest.mark.unit
def test_cofactor_normal_is_orthogonal_to_rows() -> None:
    rows = [[1, 2, 3], [0, 1, -1]]
    normal = cofactor_normal(rows, 3)

    assert all(dot(row, normal) == 0 for row in rows)
    assert any(item != 0 for item in normal)


@pytest.mark.unit
def test_primitive_integer_vector_clears_denominators_and_gcd() -> None:
    assert primitive_integer_vector([Fraction(2, 3), Fraction(4, 3)]) == (1, 2)
    assert primitive_integer_vector([-6, 9]) == (-2, 3)
    with pytest.raises(ValueError):
        primitive_integer_vector([0, 0])


@pytest.mark.unit
def test_solve_particular_returns_none_outside_column_space() -> None:
    a = IntegerMatrix.from_rows([[1, 2], [2, 4]])

    solution = solve_particular(a, [3, 6])
    assert solution is not None
    assert a.apply(solution) == (Fraction(3), Fraction(6))
    assert solve_particular(a, [1, 1]) is None


@pytest.mark.unit
def test_affine_dimension_of_point_sets() -> None:
    assert affine_dimension([]) == -1
    assert affine_dimension([(0, 0)]) == 0
    assert affine_dimension([(0, 0), (1, 1), (2, 2)]) == 1
    assert affine_dimension([(0, 0), (1, 0), (0, 1)]) == 2


@pytest.mark.unit
def test_kernel_lattice_basis_is_saturated() -> None:
    rng = random.Random(11)
    for _ in range(40):
        rows, cols = rng.randint(1, 3), rng.randint(2, 5)
        a = _random_matrix(rng, rows, cols)
        kernel = kernel_lattice_basis(a)

        assert kernel.rows == cols
        assert kernel.cols == cols - rank(a)
        if kernel.cols == 0:
            continue
        product = matmul(a, kernel)
        assert all(item == 0 for row in product.entries for item in row)
        # 饱和格基：转置的非零不变因子全为 1
        assert set(smith_invariants(kernel.transpose())) == {1}


@pytest.mark.unit
def test_kernel_of_single_row() -> None:
    kernel = kernel_lattice_basis(IntegerMatrix.from_rows([[1, 2]]))

    assert kernel.cols == 1
    assert primitive_integer_vector(kernel.column(0)) in {(-2, 1), (2, -1)}


@pytest.mark.unit
@pytest.mark.parametrize(
    ("rows", "expected"),
    [
        ([[1, 2]], 1),
        ([[2, 4]], 2),
        ([[2, 0], [0, 2]], 4),
        ([[1, 1], [0, 2]], 2),
        ([[1, 0, 1], [0, 1, 1]], 1),
        ([[1, 1], [1, -1]], 2),
    ],
)
def test_image_lattice_index(rows: list[list[int]], expected: int) -> None:
    assert image_lattice_index(IntegerMatrix.from_rows(rows)) == expected


@pytest.mark.unit
def test_image_lattice_index_matches_gcd_of_maximal_minors() -> None:
    rng = random.Random(3)
    for _ in range(30):
        a = _random_matrix(rng, 2, 3)
        if rank(a) < 2:
            with pytest.raises(DegenerateWeightSystemError):
                image_lattice_index(a)
            continue
        sym = a.to_sympy()
        minors = [int(Matrix.hstack(sym[:, i], sym[:, j]).det()) for i in range(3) for j in range(i + 1, 3)]
        assert image_lattice_index(a) == reduce(gcd, (abs(x) for x in minors))
