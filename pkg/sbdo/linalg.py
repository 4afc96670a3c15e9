"""
精确线性代数

基于 sympy.Matrix 的有理数线性代数，统一 Fraction <-> sympy.Rational 的转换。
"""

from fractions import Fraction
from typing import List, Optional, Sequence

import sympy

from .errors import NotInSpanError

RationalMatrix = List[List[Fraction]]


def to_rational(value: Fraction) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def to_fraction(value: sympy.Expr) -> Fraction:
    value = sympy.sympify(value)
    if not isinstance(value, sympy.Rational):
        raise ValueError(f"not a rational number: {value}")
    return Fraction(int(value.p), int(value.q))


def to_sympy(matrix: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix([[to_rational(v) for v in row] for row in matrix])


def from_sympy(matrix: sympy.Matrix) -> RationalMatrix:
    return [[to_fraction(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]


def identity(n: int) -> RationalMatrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)] for i in range(len(a))]


def matvec(a: RationalMatrix, v: Sequence) -> list:
    """矩阵乘向量；向量元素可以是 Fraction 或 MPoly"""
    out = []
    for row in a:
        acc = None
        for coeff, x in zip(row, v):
            if not coeff:
                continue
            term = x * coeff
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else 0 * v[0])
    return out


def lincomb(a: RationalMatrix, b: RationalMatrix, ca: Fraction, cb: Fraction) -> RationalMatrix:
    return [[ca * x + cb * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def nullspace_dim(matrix: RationalMatrix) -> int:
    if not matrix:
        return 0
    return len(to_sympy(matrix).nullspace())


def rank(matrix: RationalMatrix) -> int:
    if not matrix:
        return 0
    return to_sympy(matrix).rank()


def inverse(matrix: RationalMatrix) -> RationalMatrix:
    return from_sympy(to_sympy(matrix).inv())


def row_basis(rows: RationalMatrix) -> RationalMatrix:
    """行空间的规范基 (简化行阶梯形的非零行)"""
    if not rows:
        return []
    reduced, pivots = to_sympy(rows).rref()
    return [[to_fraction(reduced[i, j]) for j in range(reduced.cols)] for i in range(len(pivots))]


def solve(matrix: RationalMatrix, rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """解 matrix · x = rhs；无解返回 None，多解取自由变量为 0 的解"""
    a = to_sympy(matrix)
    b = sympy.Matrix([to_rational(v) for v in rhs])
    augmented = a.row_join(b)
    reduced, pivots = augmented.rref()
    if a.cols in pivots:
        return None
    solution = [Fraction(0)] * a.cols
    for row, col in enumerate(pivots):
        solution[col] = to_fraction(reduced[row, a.cols])
    return solution


def solve_or_raise(matrix: RationalMatrix, rhs: Sequence[Fraction], what: str) -> List[Fraction]:
    solution = solve(matrix, rhs)
    if solution is None:
        raise NotInSpanError(f"{what} is not in the span")
    return solution
