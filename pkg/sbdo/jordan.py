"""
单实 Jordan 代数实例

提供后续模块需要的全部结构常数：
- 乘法结构常数表、迹、行列式、伴随 x^#
- Fischer 度量权重 w_j 与迹形式缩放 kappa: (x|y) = τ(x, αy) = kappa · Σ w_j x_j y_j
- Jordan 标架、主子式 Δ_k、Peirce 分解

坐标约定：
- R:       x
- Sym(m):  先对角元 a_11..a_mm，再上三角 a_ij (i<j)，权重 1 / 2
- R^{p,q}: 自旋因子 (x1, x')，det = x1^2 + ... + x_p^2 - x_{p+1}^2 - ... - x_n^2
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from . import linalg
from .errors import FrameError, SingularElementError, UnknownAlgebraError
from .poly import MPoly, VariableArena, arena, random_rational

Vector = Tuple[Fraction, ...]


@dataclass
class PeirceData:
    """Peirce 分解的维数"""
    blocks: Dict[Tuple[int, int], int]
    d: int
    e: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "blocks": {f"V{i + 1}{j + 1}": dim for (i, j), dim in sorted(self.blocks.items())},
            "d": self.d,
            "e": self.e,
        }


class JordanAlgebra(ABC):
    """单实 Jordan 代数

    子类只需给出乘法、行列式与标架，其余结构由结构常数表导出。
    """

    family: str = ""

    def __init__(
        self,
        name: str,
        n: int,
        r: int,
        r_plus: int,
        d: int,
        e: int,
        weights: Sequence[int],
        trace_scale: int,
        cartan_signs: Sequence[int],
        euclidean: bool,
    ):
        self.name = name
        self.n = n
        self.r = r
        self.r_plus = r_plus
        self.d = d
        self.e = e
        self.weights: Vector = tuple(Fraction(w) for w in weights)
        self.trace_scale = Fraction(trace_scale)
        self.cartan_signs: Tuple[int, ...] = tuple(cartan_signs)
        self.euclidean = euclidean
        self.arena: VariableArena = arena(n)
        self._table = self._build_table()
        self._det: Optional[MPoly] = None
        self._adjoint: Optional[List[MPoly]] = None
        self._minors: Optional[List[MPoly]] = None
        logger.debug(f"JordanAlgebra {name} ready (n={n}, r={r}, d={d}, e={e})")

    # ========== 子类接口 ==========

    @abstractmethod
    def _product(self, x: Vector, y: Vector) -> Vector:
        """基向量上的乘法 (用于建立结构常数表)"""

    @abstractmethod
    def _determinant(self, xs: List[MPoly]) -> MPoly:
        """以坐标多项式表示的行列式"""

    @abstractmethod
    def frame(self) -> List[Vector]:
        """Jordan 标架 c_1..c_{r+}"""

    # ========== 结构常数 ==========

    def _basis(self, i: int) -> Vector:
        return tuple(Fraction(int(j == i)) for j in range(self.n))

    def _build_table(self) -> List[List[Vector]]:
        return [[self._product(self._basis(i), self._basis(j)) for j in range(self.n)] for i in range(self.n)]

    @property
    def structure_constants(self) -> List[List[Vector]]:
        return self._table

    def product(self, x: Sequence, y: Sequence) -> list:
        """x∘y，向量元素可以是 Fraction 或 MPoly"""
        if len(x) != self.n or len(y) != self.n:
            raise ValueError(f"dimension mismatch: expected {self.n}, got {len(x)} and {len(y)}")
        out: List[Any] = [None] * self.n
        for i in range(self.n):
            if _is_zero(x[i]):
                continue
            for j in range(self.n):
                if _is_zero(y[j]):
                    continue
                xy = x[i] * y[j]
                for k, c in enumerate(self._table[i][j]):
                    if c:
                        term = xy * c
                        out[k] = term if out[k] is None else out[k] + term
        zero = _zero_like(x[0])
        return [zero if v is None else v for v in out]

    def unit(self) -> Vector:
        return self.unit_element()

    def frame_sum(self) -> Vector:
        total = [Fraction(0)] * self.n
        for c in self.frame():
            total = [a + b for a, b in zip(total, c)]
        return tuple(total)

    def multiplication_matrix(self, a: Sequence[Fraction]) -> linalg.RationalMatrix:
        """L(a) 的矩阵，列对应基向量"""
        cols = [self.product(list(a), list(self._basis(i))) for i in range(self.n)]
        return [[Fraction(cols[i][k]) for i in range(self.n)] for k in range(self.n)]

    def quadratic_representation(self, a: Sequence[Fraction]) -> linalg.RationalMatrix:
        """P(a) = 2 L(a)^2 - L(a^2)"""
        la = self.multiplication_matrix(a)
        la2 = self.multiplication_matrix(self.product(list(a), list(a)))
        return linalg.lincomb(linalg.matmul(la, la), la2, Fraction(2), Fraction(-1))

    # ========== 多项式 ==========

    def coordinates(self, group: str = "x") -> List[MPoly]:
        return self.arena.gens(group)

    def trace_vector(self) -> Vector:
        """线性函数 tr 的系数"""
        return tuple(self.trace_of_basis(i) for i in range(self.n))

    def trace_of_basis(self, i: int) -> Fraction:
        # 单代数上 tr(a) = (r/n) · tr L(a)
        la = self.multiplication_matrix(self._basis(i))
        return sum((la[k][k] for k in range(self.n)), Fraction(0)) * self.r / self.n

    def trace_poly(self, group: str = "x") -> MPoly:
        return MPoly.linear(self.arena, group, self.trace_vector())

    def det_poly(self, group: str = "x") -> MPoly:
        if self._det is None:
            self._det = self._determinant(self.coordinates("x"))
        if group == "x":
            return self._det
        return self._det.rename({"x": group})

    def trace_form(self) -> linalg.RationalMatrix:
        """τ(e_i, e_j) = tr(e_i∘e_j)"""
        tr = self.trace_vector()
        return [
            [sum((t * c for t, c in zip(tr, self._table[i][j])), Fraction(0)) for j in range(self.n)]
            for i in range(self.n)
        ]

    def cartan(self, x: Sequence) -> list:
        """Cartan 对合 α"""
        return [v * s for v, s in zip(x, self.cartan_signs)]

    def cartan_poly(self, p: MPoly, group: str = "x") -> MPoly:
        """p∘α"""
        flips = {
            self.arena.names[self.arena.slot(group, j)]: -self.arena.gens(group)[j]
            for j, s in enumerate(self.cartan_signs)
            if s < 0
        }
        return p.substitute(flips) if flips else p

    def adjoint(self, group: str = "x") -> List[MPoly]:
        """x^# = det(x) x^{-1}，由最小多项式 (Cayley-Hamilton) 给出"""
        if self._adjoint is None:
            xs = self.coordinates("x")
            unit = [MPoly.constant(self.arena, v) for v in self.unit()]
            tr = self.trace_poly("x")
            if self.r == 1:
                adj = unit
            elif self.r == 2:
                adj = [tr * u - xv for u, xv in zip(unit, xs)]
            elif self.r == 3:
                x2 = self.product(xs, xs)
                tr2 = MPoly.linear(self.arena, "x", self.trace_vector()).substitute(
                    {self.arena.names[self.arena.slot("x", j)]: x2[j] for j in range(self.n)}
                )
                a2 = (tr * tr - tr2) * Fraction(1, 2)
                adj = [x2j - tr * xj + a2 * u for x2j, xj, u in zip(x2, xs, unit)]
            else:
                raise NotImplementedError(f"adjoint for rank {self.r}")
            self._adjoint = adj
        if group == "x":
            return self._adjoint
        return [p.rename({"x": group}) for p in self._adjoint]

    def minors(self) -> List[MPoly]:
        """主子式 Δ_k(x) = det(P(e'_k) x + e - e'_k)，k = 1..r+"""
        if self._minors is None:
            xs = self.coordinates("x")
            frame = self.frame()
            result = []
            partial = [Fraction(0)] * self.n
            for c in frame:
                partial = [a + b for a, b in zip(partial, c)]
                image = linalg.matvec(self.quadratic_representation(partial), xs)
                shift = [u - p for u, p in zip(self.unit(), partial)]
                vec = [img + s for img, s in zip(image, shift)]
                result.append(self.substitute_vector(self.det_poly("x"), vec))
            self._minors = result
        return self._minors

    def substitute_vector(self, p: MPoly, vec: Sequence, group: str = "x") -> MPoly:
        """p(vec)，vec 元素为 MPoly 或有理数"""
        return p.substitute({self.arena.names[self.arena.slot(group, j)]: v for j, v in enumerate(vec)})

    # ========== 有理点运算 ==========

    def det_value(self, x: Sequence[Fraction]) -> Fraction:
        return self.det_poly("x").evaluate(self.point(x)).value

    def point(self, x: Sequence[Fraction], group: str = "x") -> Dict[str, Fraction]:
        return {self.arena.names[self.arena.slot(group, j)]: Fraction(v) for j, v in enumerate(x)}

    def inverse(self, x: Sequence[Fraction]) -> Vector:
        det = self.det_value(x)
        if not det:
            raise SingularElementError(f"{self.name}: element {tuple(map(str, x))} is not invertible")
        point = self.point(x)
        return tuple(p.evaluate(point).value / det for p in self.adjoint("x"))

    def random_point(self, rng: np.random.Generator, invertible: bool = True) -> Vector:
        while True:
            x = tuple(random_rational(rng) for _ in range(self.n))
            if not invertible or self.det_value(x):
                return x

    # ========== 结构检查 ==========

    def check_frame(self) -> None:
        frame = self.frame()
        for i, c in enumerate(frame):
            if tuple(self.product(list(c), list(c))) != tuple(c):
                raise FrameError(f"{self.name}: c{i + 1} is not idempotent")
            for j in range(i + 1, len(frame)):
                if any(self.product(list(c), list(frame[j]))):
                    raise FrameError(f"{self.name}: c{i + 1}∘c{j + 1} != 0")
        if self.frame_sum() != self.unit_element():
            raise FrameError(f"{self.name}: frame does not sum to the unit")

    @abstractmethod
    def unit_element(self) -> Vector:
        """单位元 (独立于标架给出)"""

    def peirce_data(self) -> PeirceData:
        """L(c_k) 的联合特征空间维数"""
        self.check_frame()
        frame = self.frame()
        ident = linalg.identity(self.n)
        mats = [self.multiplication_matrix(c) for c in frame]
        blocks: Dict[Tuple[int, int], int] = {}
        for i, li in enumerate(mats):
            blocks[(i, i)] = linalg.nullspace_dim(linalg.lincomb(li, ident, Fraction(1), Fraction(-1)))
        for i, j in combinations(range(len(frame)), 2):
            half_i = linalg.lincomb(mats[i], ident, Fraction(1), Fraction(-1, 2))
            half_j = linalg.lincomb(mats[j], ident, Fraction(1), Fraction(-1, 2))
            blocks[(i, j)] = linalg.nullspace_dim(half_i + half_j)
        off = {dim for (i, j), dim in blocks.items() if i != j}
        diag = {dim for (i, j), dim in blocks.items() if i == j}
        d = off.pop() if len(off) == 1 else (0 if not off else -1)
        e = diag.pop() - 1 if len(diag) == 1 else -1
        return PeirceData(blocks=blocks, d=d, e=e)

    def dimension_formula(self) -> int:
        """r+(e+1) + (d/2) r+(r+-1)"""
        rp = self.r_plus
        return rp * (self.e + 1) + self.d * rp * (rp - 1) // 2

    def gram_is_scaled_metric(self) -> bool:
        """τ(x, αy) = kappa · diag(w)"""
        tau = self.trace_form()
        for i in range(self.n):
            for j in range(self.n):
                expected = self.trace_scale * self.weights[i] if i == j else Fraction(0)
                if tau[i][j] * self.cartan_signs[j] != expected:
                    return False
        return True

    def hua_check(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Optional[bool]:
        """det(-x^{-1} + y^{-1}) = det(x)^{-1} det(x-y) det(y)^{-1}；奇异输入返回 None"""
        diff = tuple(a - b for a, b in zip(x, y))
        dx, dy, dxy = self.det_value(x), self.det_value(y), self.det_value(diff)
        if not (dx and dy and dxy):
            return None
        xi, yi = self.inverse(x), self.inverse(y)
        lhs = self.det_value(tuple(-a + b for a, b in zip(xi, yi)))
        return lhs == dxy / (dx * dy)

    def jordan_identity_holds(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> bool:
        """x^2∘(x∘y) = x∘(x^2∘y)"""
        x2 = self.product(list(x), list(x))
        lhs = self.product(x2, self.product(list(x), list(y)))
        rhs = self.product(list(x), self.product(x2, list(y)))
        return list(lhs) == list(rhs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "r": self.r,
            "r_plus": self.r_plus,
            "d": self.d,
            "e": self.e,
            "weights": [str(w) for w in self.weights],
            "trace_scale": str(self.trace_scale),
            "cartan_signs": list(self.cartan_signs),
            "euclidean": self.euclidean,
            "det": self.det_poly().to_string(),
            "trace": self.trace_poly().to_string(),
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


def _is_zero(v: Any) -> bool:
    if isinstance(v, MPoly):
        return v.is_zero()
    return not v


def _zero_like(v: Any) -> Any:
    if isinstance(v, MPoly):
        return MPoly.zero(v.arena)
    return Fraction(0)


# ========== 具体实例 ==========


class RealLine(JordanAlgebra):
    """V = R，秩 1"""

    family = "R"

    def __init__(self) -> None:
        # r=1 时 Peirce 常数 d 不出现在维数公式中，按 R = Sym(1,R) 取 d=1
        super().__init__(
            name="R", n=1, r=1, r_plus=1, d=1, e=0,
            weights=(1,), trace_scale=1, cartan_signs=(1,), euclidean=True,
        )

    def _product(self, x: Vector, y: Vector) -> Vector:
        return (x[0] * y[0],)

    def _determinant(self, xs: List[MPoly]) -> MPoly:
        return xs[0]

    def frame(self) -> List[Vector]:
        return [(Fraction(1),)]

    def unit_element(self) -> Vector:
        return (Fraction(1),)

    def peirce_data(self) -> PeirceData:
        self.check_frame()
        # 秩 1 没有非对角块
        base = super().peirce_data()
        return PeirceData(blocks=base.blocks, d=self.d, e=base.e)


class SpinFactor(JordanAlgebra):
    """V = R^{p,q}，自旋因子实现

    (a, u)∘(b, v) = (ab + B(u, v), av + bu)，B(u, v) = -Σ_{j>=2} ε_j u_j v_j，
    det = Σ ε_j x_j^2 (ε_j = +1 当 j <= p)。p = 1 时为欧氏自旋因子。
    """

    family = "Rpq"

    def __init__(self, p: int, q: int, name: Optional[str] = None):
        if p < 1 or q < 1:
            raise UnknownAlgebraError(f"R^{{p,q}} needs p >= 1 and q >= 1, got ({p},{q})")
        n = p + q
        self.p = p
        self.q = q
        self.signs = tuple([1] * p + [-1] * q)
        cartan = tuple([1] + [-1] * (p - 1) + [1] * q)
        super().__init__(
            name=name or f"Rpq:{p},{q}", n=n, r=2, r_plus=2, d=n - 2, e=0,
            weights=(1,) * n, trace_scale=2, cartan_signs=cartan, euclidean=(p == 1),
        )

    def _bilinear(self, u: Sequence, v: Sequence) -> Any:
        total = Fraction(0)
        for j in range(1, self.n):
            total = total - self.signs[j] * u[j] * v[j]
        return total

    def _product(self, x: Vector, y: Vector) -> Vector:
        head = x[0] * y[0] + self._bilinear(x, y)
        return (head,) + tuple(x[0] * y[j] + y[0] * x[j] for j in range(1, self.n))

    def _determinant(self, xs: List[MPoly]) -> MPoly:
        total = MPoly.zero(self.arena)
        for s, xj in zip(self.signs, xs):
            total = total + xj * xj * s
        return total

    def frame(self) -> List[Vector]:
        half = Fraction(1, 2)
        c1 = tuple([half] + [Fraction(0)] * (self.n - 2) + [half])
        c2 = tuple([half] + [Fraction(0)] * (self.n - 2) + [-half])
        return [c1, c2]

    def unit_element(self) -> Vector:
        return tuple([Fraction(1)] + [Fraction(0)] * (self.n - 1))

    def quadratic_form(self, group: str = "x") -> MPoly:
        """P(x)，即 det"""
        return self.det_poly(group)

    def bilinear_form(self, left: str = "x", right: str = "y") -> MPoly:
        """P(x, y) = Σ ε_j x_j y_j"""
        xs = self.arena.gens(left)
        ys = self.arena.gens(right)
        total = MPoly.zero(self.arena)
        for s, a, b in zip(self.signs, xs, ys):
            total = total + a * b * s
        return total


class SymmetricMatrices(JordanAlgebra):
    """V = Sym(m, R)，x∘y = (xy + yx)/2"""

    family = "Sym"

    def __init__(self, m: int):
        if m not in (2, 3):
            raise UnknownAlgebraError(f"Sym({m}, R) is not in the catalog")
        self.m = m
        self.pairs: List[Tuple[int, int]] = [(i, i) for i in range(m)] + list(combinations(range(m), 2))
        n = len(self.pairs)
        weights = [1 if i == j else 2 for i, j in self.pairs]
        super().__init__(
            name=f"Sym{m}", n=n, r=m, r_plus=m, d=1, e=0,
            weights=weights, trace_scale=1, cartan_signs=(1,) * n, euclidean=True,
        )

    def _matrix(self, x: Sequence) -> List[List[Any]]:
        mat: List[List[Any]] = [[None] * self.m for _ in range(self.m)]
        for (i, j), v in zip(self.pairs, x):
            mat[i][j] = v
            mat[j][i] = v
        return mat

    def _product(self, x: Vector, y: Vector) -> Vector:
        a, b = self._matrix(x), self._matrix(y)
        m = self.m
        out = []
        for i, j in self.pairs:
            ab = sum((a[i][k] * b[k][j] for k in range(m)), Fraction(0))
            ba = sum((b[i][k] * a[k][j] for k in range(m)), Fraction(0))
            out.append((ab + ba) / 2)
        return tuple(out)

    def _determinant(self, xs: List[MPoly]) -> MPoly:
        return _cofactor_det(self._matrix(xs))

    def frame(self) -> List[Vector]:
        frame = []
        for i in range(self.m):
            frame.append(tuple(Fraction(int(p == (i, i))) for p in self.pairs))
        return frame

    def unit_element(self) -> Vector:
        return tuple(Fraction(int(i == j)) for i, j in self.pairs)


def _cofactor_det(mat: List[List[MPoly]]) -> MPoly:
    size = len(mat)
    if size == 1:
        return mat[0][0]
    total = None
    for j in range(size):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _cofactor_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


# ========== 目录 ==========

CATALOG: Tuple[str, ...] = (
    "R",
    "Rpq:1,1",
    "Rpq:2,1",
    "Rpq:2,2",
    "Rpq:3,1",
    "Sym2",
    "Sym3",
    "spin:3",
    "spin:4",
    "spin:5",
)


@lru_cache(maxsize=None)
def get_algebra(algebra_id: str) -> JordanAlgebra:
    """按字符串 id 取代数实例 ("R", "Sym2", "Sym3", "Rpq:2,1", "spin:5")"""
    key = algebra_id.strip()
    try:
        if key == "R":
            return RealLine()
        if key in ("Sym2", "Sym3"):
            return SymmetricMatrices(int(key[-1]))
        if key.startswith("Rpq:"):
            p, q = (int(v) for v in key[4:].split(","))
            if p + q > 4:
                raise UnknownAlgebraError(f"{key}: only p+q <= 4 is in the catalog")
            return SpinFactor(p, q)
        if key.startswith("spin:"):
            n = int(key[5:])
            if not 2 <= n <= 5:
                raise UnknownAlgebraError(f"{key}: spin factors need 2 <= n <= 5")
            return SpinFactor(1, n - 1, name=key)
    except ValueError as e:
        raise UnknownAlgebraError(f"cannot parse algebra id {algebra_id!r}: {e}") from None
    raise UnknownAlgebraError(f"unknown algebra id {algebra_id!r}")
