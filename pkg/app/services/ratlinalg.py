"""精确有理数 / 整数线性代数基础层。"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp

RationalVector = tuple[Fraction, ...]
Number = int | Fraction


class DegenerateWeightSystemError(ValueError):
    """权重矩阵秩不足，无法作为满射使用。"""


def to_fraction(value: Number | str) -> Fraction:
    """把整数 / 分数 / "p/q" 文本统一转换为 Fraction。"""

    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("布尔值不是合法的有理数")
    if isinstance(value, int):
        return Fraction(value)
    text = str(value).strip()
    if not text:
        raise ValueError("有理数文本不能为空")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"非法的有理数: {text!r}") from exc


def vector(values: Iterable[Number | str]) -> RationalVector:
    """构造有理向量。"""

    return tuple(to_fraction(item) for item in values)


def format_fraction(value: Fraction) -> str:
    """输出 "p/q"（整数时只输出 p）。"""

    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def dot(left: Sequence[Number], right: Sequence[Number]) -> Fraction:
    if len(left) != len(right):
        raise ValueError(f"维数不一致: {len(left)} != {len(right)}")
    return sum((Fraction(a) * b for a, b in zip(left, right)), Fraction(0))


def add(left: Sequence[Number], right: Sequence[Number]) -> RationalVector:
    if len(left) != len(right):
        raise ValueError(f"维数不一致: {len(left)} != {len(right)}")
    return tuple(Fraction(a) + b for a, b in zip(left, right))


def sub(left: Sequence[Number], right: Sequence[Number]) -> RationalVector:
    if len(left) != len(right):
        raise ValueError(f"维数不一致: {len(left)} != {len(right)}")
    return tuple(Fraction(a) - b for a, b in zip(left, right))


def scale(factor: Number, values: Sequence[Number]) -> RationalVector:
    return tuple(Fraction(factor) * item for item in values)


@dataclass(frozen=True, slots=True)
class IntegerMatrix:
    """按行存储的整数矩阵（cols 显式保存，允许 0 列）。"""

    entries: tuple[tuple[int, ...], ...]
    cols: int

    def __post_init__(self) -> None:
        if self.cols < 0:
            raise ValueError("列数不能为负")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError(f"行长度 {len(row)} 与列数 {self.cols} 不一致")
            for item in row:
                if isinstance(item, bool) or not isinstance(item, int):
                    raise ValueError(f"矩阵元素必须是整数: {item!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntegerMatrix:
        normalized = tuple(tuple(int(item) for item in row) for row in rows)
        if cols is None:
            if not normalized:
                raise ValueError("空矩阵需要显式给出列数")
            cols = len(normalized[0])
        return cls(entries=normalized, cols=cols)

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[int]], rows: int) -> IntegerMatrix:
        normalized = [tuple(int(item) for item in column) for column in columns]
        for column in normalized:
            if len(column) != rows:
                raise ValueError(f"列长度 {len(column)} 与行数 {rows} 不一致")
        entries = tuple(tuple(column[i] for column in normalized) for i in range(rows))
        return cls(entries=entries, cols=len(normalized))

    @classmethod
    def identity(cls, size: int) -> IntegerMatrix:
        return cls.from_rows(([1 if i == j else 0 for j in range(size)] for i in range(size)), cols=size)

    @property
    def rows(self) -> int:
        return len(self.entries)

    def column(self, index: int) -> tuple[int, ...]:
        return tuple(row[index] for row in self.entries)

    def columns(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.column(j) for j in range(self.cols))

    def transpose(self) -> IntegerMatrix:
        return IntegerMatrix.from_rows(self.columns(), cols=self.rows)

    def select_columns(self, indices: Sequence[int]) -> IntegerMatrix:
        return IntegerMatrix.from_columns((self.column(j) for j in indices), rows=self.rows)

    def apply(self, values: Sequence[Number]) -> RationalVector:
        """计算 A·x。"""

        if len(values) != self.cols:
            raise ValueError(f"向量维数 {len(values)} 与列数 {self.cols} 不一致")
        return tuple(dot(row, values) for row in self.entries)

    def to_sympy(self) -> Matrix:
        return Matrix(self.rows, self.cols, [item for row in self.entries for item in row])


def matmul(left: IntegerMatrix, right: IntegerMatrix) -> IntegerMatrix:
    if left.cols != right.rows:
        raise ValueError(f"矩阵维数不匹配: {left.rows}x{left.cols} · {right.rows}x{right.cols}")
    right_columns = right.columns()
    return IntegerMatrix.from_rows(
        ([sum(a * b for a, b in zip(row, column)) for column in right_columns] for row in left.entries),
        cols=right.cols,
    )


# ---------- 有理消元 ----------


def _reduced_row_echelon(rows: Sequence[Sequence[Number]], n_cols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Gauss-Jordan 消元，返回简化行阶梯形与主元列。"""

    matrix = [[Fraction(item) for item in row] for row in rows]
    pivots: list[int] = []
    lead = 0
    for col in range(n_cols):
        if lead >= len(matrix):
            break
        pivot = next((i for i in range(lead, len(matrix)) if matrix[i][col] != 0), None)
        if pivot is None:
            continue
        matrix[lead], matrix[pivot] = matrix[pivot], matrix[lead]
        pivot_value = matrix[lead][col]
        matrix[lead] = [item / pivot_value for item in matrix[lead]]
        for i, row in enumerate(matrix):
            factor = row[col]
            if i != lead and factor != 0:
                matrix[i] = [a - factor * b for a, b in zip(row, matrix[lead])]
        pivots.append(col)
        lead += 1
    return matrix, pivots


def rank_of(rows: Sequence[Sequence[Number]]) -> int:
    """任意有理矩阵（按行给出）的秩。"""

    if not rows:
        return 0
    _, pivots = _reduced_row_echelon(rows, len(rows[0]))
    return len(pivots)


def rank(m: IntegerMatrix) -> int:
    """有理数域上的秩。"""

    if m.rows == 0 or m.cols == 0:
        return 0
    return rank_of(m.entries)


def affine_dimension(points: Sequence[Sequence[Number]]) -> int:
    """点集仿射包的维数（空集记为 -1）。"""

    if not points:
        return -1
    origin = points[0]
    return rank_of([sub(point, origin) for point in points[1:]])


def determinant(rows: Sequence[Sequence[Number]]) -> Fraction:
    """方阵行列式（分数消元）。"""

    matrix = [[Fraction(item) for item in row] for row in rows]
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise ValueError("行列式只对方阵有定义")
    det = Fraction(1)
    for col in range(size):
        pivot = next((i for i in range(col, size) if matrix[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
            det = -det
        pivot_value = matrix[col][col]
        det *= pivot_value
        for i in range(col + 1, size):
            factor = matrix[i][col] / pivot_value
            if factor != 0:
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[col])]
    return det


def cofactor_normal(rows: Sequence[Sequence[Number]], dim: int) -> RationalVector:
    """(dim-1) 个向量的广义叉积：与每一行正交，行线性无关时非零。"""

    if len(rows) != dim - 1:
        raise ValueError(f"需要 {dim - 1} 个向量，实际 {len(rows)} 个")
    normal: list[Fraction] = []
    for i in range(dim):
        minor = [[row[j] for j in range(dim) if j != i] for row in rows]
        value = determinant(minor)
        normal.append(value if i % 2 == 0 else -value)
    return tuple(normal)


def primitive_integer_vector(values: Sequence[Number]) -> tuple[int, ...]:
    """同方向的本原整向量。"""

    fractions = [Fraction(item) for item in values]
    if all(item == 0 for item in fractions):
        raise ValueError("零向量没有本原代表")
    common = reduce(lcm, (item.denominator for item in fractions), 1)
    integers = [int(item * common) for item in fractions]
    divisor = reduce(gcd, (abs(item) for item in integers), 0)
    return tuple(item // divisor for item in integers)


def solve_rational(rows: Sequence[Sequence[Number]], rhs: Sequence[Number], n_cols: int) -> RationalVector | None:
    """求 A·x = b 的一个特解（自由变量取 0），无解返回 None。"""

    if len(rows) != len(rhs):
        raise ValueError(f"方程个数 {len(rows)} 与右端维数 {len(rhs)} 不一致")
    augmented = [[*row, value] for row, value in zip(rows, rhs)]
    reduced, pivots = _reduced_row_echelon(augmented, n_cols + 1)
    if pivots and pivots[-1] == n_cols:
        return None
    solution = [Fraction(0)] * n_cols
    for row, col in zip(reduced, pivots):
        solution[col] = row[n_cols]
    return tuple(solution)


def solve_particular(a: IntegerMatrix, b: Sequence[Number]) -> RationalVector | None:
    """返回满足 A·x = b 的某个 x；b 不在列空间时返回 None。"""

    if len(b) != a.rows:
        raise ValueError(f"右端维数 {len(b)} 与行数 {a.rows} 不一致")
    if a.cols == 0:
        return () if all(Fraction(item) == 0 for item in b) else None
    return solve_rational(a.entries, b, a.cols)


def inverse(rows: Sequence[Sequence[Number]]) -> list[list[Fraction]]:
    """可逆方阵的有理逆矩阵。"""

    size = len(rows)
    augmented = [[*row, *(1 if i == j else 0 for j in range(size))] for i, row in enumerate(rows)]
    reduced, pivots = _reduced_row_echelon(augmented, 2 * size)
    if pivots[:size] != list(range(size)) or len(pivots) < size:
        raise ValueError("矩阵不可逆")
    return [row[size:] for row in reduced]


# ---------- 整数格（Smith 标准形） ----------


def kernel_lattice_basis(a: IntegerMatrix) -> IntegerMatrix:
    """ker(A) ∩ Z^m 的格基（按列），由 Smith 分解的右变换矩阵给出。"""

    if a.cols == 0:
        return IntegerMatrix(entries=(), cols=0)
    snf, _left, right = smith_normal_decomp(a.to_sympy(), domain=ZZ)
    kernel_columns: list[tuple[int, ...]] = []
    for j in range(a.cols):
        diagonal = snf[j, j] if j < a.rows else 0
        if diagonal == 0:
            kernel_columns.append(tuple(int(right[i, j]) for i in range(a.cols)))
    basis = IntegerMatrix.from_columns(kernel_columns, rows=a.cols)
    if len(kernel_columns) != a.cols - rank(a):
        raise ArithmeticError("Smith 分解给出的核维数与秩不一致")
    return basis


def smith_invariants(a: IntegerMatrix) -> tuple[int, ...]:
    """非零 Smith 不变因子。"""

    if a.rows == 0 or a.cols == 0:
        return ()
    factors = invariant_factors(a.to_sympy(), domain=ZZ)
    return tuple(abs(int(item)) for item in factors if int(item) != 0)


def image_lattice_index(a: IntegerMatrix) -> int:
    """指数 [Z^d : A(Z^m)]，要求 A 行满秩。"""

    if rank(a) != a.rows:
        raise DegenerateWeightSystemError(f"退化的权重系统: 秩 {rank(a)} < {a.rows}")
    index = 1
    for factor in smith_invariants(a):
        index *= factor
    return index
