"""
Fischer 演算

(p, q)_F = ∂(p) q (0)，其中 ∂(x_j) = ∂/∂x_j / w_j。
单项式两两正交：(x^a, x^b)_F = a! w^{-a} δ_ab。

R(p) 取 p 全部偏导数张成的空间，按次数分级；对偶基由 Gram 矩阵精确求解，
全程有理数，不做正交归一化。
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from . import linalg
from .errors import NotInSpanError
from .jordan import JordanAlgebra
from .poly import Exponent, MPoly, VariableArena
from .weyl import WeylOp


def fischer_pair(p: MPoly, q: MPoly, weights: Optional[Sequence[Fraction]] = None) -> MPoly:
    """(p, q)_F；参数出现在系数中时结果是参数多项式"""
    arena = p.arena
    w = _weights(arena, weights)
    x_slots = list(arena.group_slots("x"))
    qc = q.collect(["x"])
    total = MPoly.zero(arena)
    for mono, cp in p.collect(["x"]).items():
        cq = qc.get(mono)
        if cq is None:
            continue
        scale = Fraction(1)
        for j, slot in enumerate(x_slots):
            e = mono[slot]
            if e:
                scale *= Fraction(factorial(e)) / w[j] ** e
        total = total + cp * cq * scale
    return total


def apply_derivative(p: MPoly, f: MPoly, weights: Optional[Sequence[Fraction]] = None) -> MPoly:
    """∂(p) f"""
    return WeylOp.from_derivative_poly(p, "x", "x", weights).apply(f)


def _weights(arena: VariableArena, weights: Optional[Sequence[Fraction]]) -> List[Fraction]:
    if weights is None:
        return [Fraction(1)] * arena.n
    return [Fraction(v) for v in weights]


@dataclass
class DualBasisPair:
    """按次数分级的基与 Fischer 对偶基：(basis_i, dual_j)_F = δ_ij"""

    source: MPoly
    weights: Tuple[Fraction, ...]
    basis: Dict[int, List[MPoly]] = field(default_factory=dict)
    dual: Dict[int, List[MPoly]] = field(default_factory=dict)

    @property
    def arena(self) -> VariableArena:
        return self.source.arena

    def dims(self) -> List[int]:
        top = max(self.basis, default=-1)
        return [len(self.basis.get(k, [])) for k in range(top + 1)]

    def pairs(self) -> List[Tuple[int, MPoly, MPoly]]:
        """(次数, p_i, p̃_i)"""
        return [(k, b, d) for k in sorted(self.basis) for b, d in zip(self.basis[k], self.dual[k])]

    def coordinates(self, q: MPoly) -> Dict[int, List[Fraction]]:
        """q 在基下的坐标；不在 R(p) 中时抛 NotInSpanError"""
        result: Dict[int, List[Fraction]] = {}
        for degree, part in q.homogeneous_components(["x"]).items():
            basis = self.basis.get(degree)
            if not basis:
                raise NotInSpanError(f"degree {degree} component of {q.to_string()} is outside R(p)")
            keys = sorted({k for b in basis for k, _ in b.items()} | {k for k, _ in part.items()})
            matrix = [[b.coefficient(k) for b in basis] for k in keys]
            rhs = [part.coefficient(k) for k in keys]
            result[degree] = linalg.solve_or_raise(matrix, rhs, f"{part.to_string()}")
        return result

    def contains(self, q: MPoly) -> bool:
        try:
            self.coordinates(q)
        except NotInSpanError:
            return False
        return True

    def to_dict(self) -> Dict[str, object]:
        return {
            "source": self.source.to_string(),
            "dims": self.dims(),
            "basis": {str(k): [b.to_string() for b in v] for k, v in sorted(self.basis.items())},
            "dual": {str(k): [d.to_string() for d in v] for k, v in sorted(self.dual.items())},
        }


def _span_basis(polys: List[MPoly], arena: VariableArena) -> List[MPoly]:
    """有理张成空间的规范基 (简化行阶梯形)"""
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return []
    keys: List[Exponent] = sorted({k for p in polys for k, _ in p.items()}, reverse=True)
    rows = [[p.coefficient(k) for k in keys] for p in polys]
    basis = []
    for row in linalg.row_basis(rows):
        basis.append(MPoly(arena, {k: c for k, c in zip(keys, row) if c}))
    return basis


def translate_span(p: MPoly, weights: Optional[Sequence[Fraction]] = None) -> DualBasisPair:
    """R(p)：p 的全部偏导数张成的空间，附 Fischer 对偶基"""
    arena = p.arena
    if not p.is_homogeneous(["x"]):
        raise ValueError(f"translate_span expects a homogeneous polynomial, got {p.to_string()}")
    w = tuple(_weights(arena, weights))
    x_slots = list(arena.group_slots("x"))
    top = p.degree(["x"])
    pair = DualBasisPair(source=p, weights=w)
    level = [p]
    for order in range(top + 1):
        degree = top - order
        basis = _span_basis(level, arena)
        if basis:
            gram = [[fischer_pair(a, b, w).value for b in basis] for a in basis]
            if linalg.rank(gram) != len(basis):
                raise AssertionError(f"singular Fischer Gram matrix in degree {degree}")
            inv = linalg.inverse(gram)
            dual = []
            for j in range(len(basis)):
                acc = MPoly.zero(arena)
                for k, b in enumerate(basis):
                    if inv[k][j]:
                        acc = acc + b * inv[k][j]
                dual.append(acc)
            pair.basis[degree] = basis
            pair.dual[degree] = dual
        # 下一层：对当前基求全部一阶偏导
        level = [b.diff(slot) for b in basis for slot in x_slots]
    logger.debug(f"R({p.to_string()}) dims={pair.dims()}")
    return pair


@lru_cache(maxsize=None)
def w_module(algebra: JordanAlgebra) -> DualBasisPair:
    """W = R(det)"""
    return translate_span(algebra.det_poly("x"), algebra.weights)


def taylor_expand(p: MPoly, pair: Optional[DualBasisPair] = None) -> List[Tuple[MPoly, MPoly]]:
    """p(x+y) = Σ p_i(x) p̆_i(y)，p̆_i = (∂(p̃_i) p)(y)"""
    pair = pair or translate_span(p)
    out = []
    for _, b, d in pair.pairs():
        breve = apply_derivative(d, p, pair.weights).rename({"x": "y"})
        if not breve.is_zero():
            out.append((b, breve))
    return out


def difference_expansion(algebra: JordanAlgebra) -> List[Tuple[int, MPoly, MPoly]]:
    """det(x-y) = Σ_k (-1)^{r-k} Σ_i p_{k,i}(x) p̆_{k,i}(y)，返回 (k, p_{k,i}, p̆_{k,i})"""
    det = algebra.det_poly("x")
    pair = w_module(algebra)
    out = []
    for k, b, d in pair.pairs():
        breve = apply_derivative(d, det, pair.weights).rename({"x": "y"})
        if not breve.is_zero():
            out.append((k, b, breve))
    return out


def reconstruct_difference(algebra: JordanAlgebra) -> MPoly:
    total = MPoly.zero(algebra.arena)
    for k, b, breve in difference_expansion(algebra):
        sign = -1 if (algebra.r - k) % 2 else 1
        total = total + b * breve * sign
    return total


def leibniz_expand(p: MPoly, f: MPoly, g: MPoly, pair: Optional[DualBasisPair] = None) -> MPoly:
    """∂(p)(fg) = Σ ∂(p_i) f · ∂(p̆_i) g"""
    pair = pair or translate_span(p)
    w = pair.weights
    total = MPoly.zero(p.arena)
    for _, b, d in pair.pairs():
        breve = apply_derivative(d, p, w)
        if breve.is_zero():
            continue
        left = apply_derivative(b, f, w)
        if left.is_zero():
            continue
        total = total + left * apply_derivative(breve, g, w)
    return total


def graded_orthogonality_defects(pair: DualBasisPair) -> List[Tuple[int, int]]:
    """不同次数的基元之间非零的 Fischer 配对"""
    defects = []
    degrees = sorted(pair.basis)
    for i, k in enumerate(degrees):
        for l in degrees[i + 1:]:
            for a in pair.basis[k]:
                for b in pair.basis[l]:
                    if not fischer_pair(a, b, pair.weights).is_zero():
                        defects.append((k, l))
    return defects


def biorthogonal(pair: DualBasisPair) -> bool:
    for k in pair.basis:
        for i, b in enumerate(pair.basis[k]):
            for j, d in enumerate(pair.dual[k]):
                if fischer_pair(b, d, pair.weights) != Fraction(int(i == j)):
                    return False
    return True


def minors_in_w(algebra: JordanAlgebra) -> List[bool]:
    """Δ_k ∈ W_k"""
    pair = w_module(algebra)
    result = []
    for k, minor in enumerate(algebra.minors(), start=1):
        component = pair.basis.get(k, [])
        result.append(bool(component) and minor.is_homogeneous(["x"]) and pair.contains(minor))
    return result


