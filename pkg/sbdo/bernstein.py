"""
Bernstein-Sato 恒等式

对 p ∈ W_k：
    p(∂) det^{λ+1} = kappa^k Π_{j=1}^{k} (λ + 1 + (d/2)(j-1)) · (p∘α)♯ · det^λ
其中 p♯(x) = p(x^{-1}) det(x)。欧氏情形 α = id、kappa = 1，即通常的形式；
非欧氏坐标下 Cartan 对合 α 与迹缩放 kappa 显式出现。
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from .config import Config
from .errors import IdentityError, NotInSpanError
from .fischer import apply_derivative, difference_expansion, w_module
from .jordan import JordanAlgebra
from .poly import MPoly, parameter
from .weyl import TwistSlot, TwistedElement, WeylOp, apply_twisted, lift



def _degree_in_w(algebra: JordanAlgebra, p: MPoly) -> int:
    if not p.is_homogeneous(["x"]) or p.is_zero():
        raise NotInSpanError(f"{p.to_string()} is not a nonzero homogeneous polynomial")
    pair = w_module(algebra)
    if not pair.contains(p):
        raise NotInSpanError(f"{p.to_string()} is not in W for {algebra.name}")
    return p.degree(["x"])


def sharp(algebra: JordanAlgebra, p: MPoly, check_membership: bool = True) -> MPoly:
    """p♯ = p(x^{-1}) det(x) = p(x^#) / det^{k-1}"""
    k = _degree_in_w(algebra, p) if check_membership else p.degree(["x"])
    det = algebra.det_poly("x")
    if k == 0:
        return det * p.constant_term()
    adj = algebra.adjoint("x")
    names = algebra.arena.names
    composed = p.substitute({names[slot]: adj[j] for j, slot in enumerate(algebra.arena.group_slots("x"))})
    if k == 1:
        return composed
    return composed.exact_divide(det ** (k - 1))


def verify_sharp(algebra: JordanAlgebra, p: MPoly, result: MPoly, rng: np.random.Generator,
                 points: Optional[int] = None) -> bool:
    """在随机可逆有理点上比较 p(x^{-1}) det(x)；points 缺省取 Config().symbolic.sharp_samples"""
    points = Config().symbolic.sharp_samples if points is None else points
    for _ in range(points):
        x = algebra.random_point(rng)
        inv = algebra.inverse(x)
        lhs = p.evaluate(algebra.point(inv)).value * algebra.det_value(x)
        if lhs != result.evaluate(algebra.point(x)).value:
            return False
    return True


def bernstein_factors(algebra: JordanAlgebra, k: int, par: str = "lam") -> List[MPoly]:
    """线性因子 λ + 1 + (d/2)(j-1)，j = 1..k"""
    lam = parameter(algebra.arena, par)
    return [lam + (1 + Fraction(algebra.d, 2) * (j - 1)) for j in range(1, k + 1)]


def bernstein_b(algebra: JordanAlgebra, k: int, par: str = "lam") -> MPoly:
    """b_k(λ) = kappa^k Π_{j=1}^{k} (λ + 1 + (d/2)(j-1))"""
    result = MPoly.constant(algebra.arena, algebra.trace_scale ** k)
    for f in bernstein_factors(algebra, k, par):
        result = result * f
    return result


@dataclass
class BSCertificate:
    """一个 W_k 元素的 Bernstein-Sato 恒等式证书"""

    p: MPoly
    k: int
    sharp: MPoly
    twisted_sharp: MPoly
    factors: List[MPoly]
    scale: Fraction
    holds: bool
    literal_holds: bool
    proportionality: Optional[Fraction] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p.to_string(),
            "k": self.k,
            "sharp": self.sharp.to_string(),
            "twisted_sharp": self.twisted_sharp.to_string(),
            "factors": [f.to_string() for f in self.factors],
            "scale": str(self.scale),
            "holds": self.holds,
            "literal_holds": self.literal_holds,
            "proportionality": None if self.proportionality is None else str(self.proportionality),
        }


def det_slot(algebra: JordanAlgebra, group: str, par: str) -> TwistSlot:
    return TwistSlot(group=group, det=algebra.det_poly(group), exponent=parameter(algebra.arena, par))


def _proportionality(a: MPoly, b: MPoly) -> Optional[Fraction]:
    """a = c·b 时返回 c"""
    if b.is_zero():
        return None
    key, coeff = b.leading_term()
    c = a.coefficient(key) / coeff
    return c if a == b * c else None


def bs_apply(algebra: JordanAlgebra, p: MPoly) -> BSCertificate:
    """用带 det 幂的表达式逐项验证 p(∂) det^{λ+1}"""
    k = _degree_in_w(algebra, p)
    arena = algebra.arena
    slot = det_slot(algebra, "x", "lam")
    op = WeylOp.from_derivative_poly(p, "x", "x", algebra.weights)
    result = apply_twisted(op, lift([slot], MPoly.constant(arena, 1), (1,)))

    plain = sharp(algebra, p, check_membership=False)
    twisted = sharp(algebra, algebra.cartan_poly(p), check_membership=False)
    factors = bernstein_factors(algebra, k)
    scale = algebra.trace_scale ** k
    b = bernstein_b(algebra, k)
    holds = result == TwistedElement([slot], (0,), b * twisted)
    literal = result == TwistedElement([slot], (0,), b * plain)
    derivative = apply_derivative(p, algebra.det_poly("x"), algebra.weights)
    cert = BSCertificate(
        p=p,
        k=k,
        sharp=plain,
        twisted_sharp=twisted,
        factors=factors,
        scale=scale,
        holds=holds,
        literal_holds=literal,
        proportionality=_proportionality(derivative, twisted),
    )
    if not holds:
        raise IdentityError(
            f"Bernstein-Sato identity fails for {p.to_string()} on {algebra.name}",
            detail={"result": result.to_string(), "expected_sharp": twisted.to_string()},
        )
    return cert


def bs_all(algebra: JordanAlgebra) -> List[BSCertificate]:
    """W 的每个基元素"""
    pair = w_module(algebra)
    certs = [bs_apply(algebra, b) for _, b, _ in pair.pairs()]
    failed_literal = [c.p.to_string() for c in certs if not c.literal_holds]
    if failed_literal:
        logger.info(f"{algebra.name}: untwisted Bernstein-Sato form fails for {len(failed_literal)} basis elements")
    return certs


def double_sharp_scalar(algebra: JordanAlgebra, p: MPoly) -> Optional[Fraction]:
    """(p♯)♯ = c·p，返回 c"""
    once = sharp(algebra, p)
    twice = sharp(algebra, once)
    return _proportionality(twice, p)


def zeta_bernstein_roots(algebra: JordanAlgebra) -> List[Fraction]:
    """det(∂) det^{s+1} 的因子 Π_{k=0}^{r-1} (s + 1 + k d/2) 的根"""
    return sorted(-(1 + Fraction(k * algebra.d, 2)) for k in range(algebra.r))


def bs_roots(algebra: JordanAlgebra) -> List[Fraction]:
    """bs_apply(det) 因子的根"""
    cert = bs_apply(algebra, algebra.det_poly("x"))
    return sorted(-f.constant_term() for f in cert.factors)


# ========== c_{s,t} ==========


@lru_cache(maxsize=None)
def c_poly(algebra: JordanAlgebra, s: str = "s", t: str = "t") -> MPoly:
    """det(∂x - ∂y) det(x)^{s+1} det(y)^{t+1} = c_{s,t}(x, y) det(x)^s det(y)^t

    c_{s,t} = Σ_k (-1)^{r-k} b_k(s) b_{r-k}(t) Σ_i (p_{k,i}∘α)♯(x) (p̆_{k,i}∘α)♯(y)
    """
    r = algebra.r
    total = MPoly.zero(algebra.arena)
    for k, b, breve in difference_expansion(algebra):
        breve_x = breve.rename({"y": "x"})
        left = sharp(algebra, algebra.cartan_poly(b), check_membership=False)
        right = sharp(algebra, algebra.cartan_poly(breve_x), check_membership=False).rename({"x": "y"})
        sign = -1 if (r - k) % 2 else 1
        total = total + bernstein_b(algebra, k, s) * bernstein_b(algebra, r - k, t) * left * right * sign
    return total


def difference_operator(algebra: JordanAlgebra) -> WeylOp:
    """det(∂x - ∂y)"""
    arena = algebra.arena
    xs, ys = arena.gens("x"), arena.gens("y")
    shifted = algebra.substitute_vector(algebra.det_poly("x"), [a - b for a, b in zip(xs, ys)])
    return WeylOp.from_symbol(shifted, {"x": "x", "y": "y"}, algebra.weights)


def verify_c_poly(algebra: JordanAlgebra, s: str = "s", t: str = "t") -> bool:
    """直接展开 det(∂x - ∂y) 作用于 det(x)^{s+1} det(y)^{t+1}"""
    slots = [det_slot(algebra, "x", s), det_slot(algebra, "y", t)]
    one = MPoly.constant(algebra.arena, 1)
    result = apply_twisted(difference_operator(algebra), lift(slots, one, (1, 1)))
    return result == TwistedElement(slots, (0, 0), c_poly(algebra, s, t))


def swap_xy(p: MPoly, pairs: Tuple[Tuple[str, str], ...] = (("s", "t"),)) -> MPoly:
    """(x, s) <-> (y, t)"""
    swapped = p.rename({"x": "y", "y": "x"})
    arena = p.arena
    assignment = {}
    for a, b in pairs:
        assignment[a] = parameter(arena, b)
        assignment[b] = parameter(arena, a)
    return swapped.substitute(assignment)
