"""
源算子

- D_{s,t}: det(∂ξ - ∂ζ)[det(ξ)^s det(ζ)^t f] = det(ξ)^{s-1} det(ζ)^{t-1} D_{s,t} f
- F_{λ,μ} = Ψ^{-1}(D_{s,t})，s = λ - n/r + 1，t = μ - n/r + 1
- F^{(k)} = F_{λ+k-1,μ+k-1} ∘ ... ∘ F_{λ,μ}，B^{(k)} = res∘F^{(k)}
- 符号多项式 c^{(k)}_{λ,μ} 及其递推，符号定理 b^{(k)} = c^{(k)}_{λ-n/r, μ-n/r}
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from .bernstein import c_poly, det_slot, difference_operator, sharp
from .config import Config
from .errors import IdentityError, NotDivisibleError, UnsupportedAlgebraError
from .fischer import apply_derivative, difference_expansion, w_module
from .jordan import JordanAlgebra, SpinFactor
from .poly import MPoly, monomials, parameter
from .weyl import (
    BiDiffOp,
    TwistedElement,
    WeylOp,
    apply_twisted,
    bidiff_symbol,
    derivative_key,
    fourier_conjugate,
    full_symbol,
    lift,
    restrict,
    symbol_convention_constant,
    symbol_sharp,
)


def _shifted_b(algebra: JordanAlgebra, k: int, par: str) -> MPoly:
    """kappa^k Π_{l=1}^{k} (P + (d/2)(l-1))"""
    p = parameter(algebra.arena, par)
    result = MPoly.constant(algebra.arena, algebra.trace_scale ** k)
    for l in range(1, k + 1):
        result = result * (p + Fraction(algebra.d, 2) * (l - 1))
    return result


def twist_operator(algebra: JordanAlgebra, q: MPoly, group: str, par: str) -> WeylOp:
    """q(∂)∘det^P = det^{P-1}∘T_P(q)，q ∈ W 为 x 组多项式

    T_P(q) = Σ_j b_{deg p_j}(P-1) (p_j∘α)♯ · [∂(p̃_j) q](∂)
    """
    pair = w_module(algebra)
    total = WeylOp.zero(algebra.arena)
    for deg, b, dual in pair.pairs():
        dq = apply_derivative(dual, q, pair.weights)
        if dq.is_zero():
            continue
        coeff = _shifted_b(algebra, deg, par) * sharp(algebra, algebra.cartan_poly(b), False).rename({"x": group})
        total = total + WeylOp.from_derivative_poly(dq, "x", group, pair.weights).scale(coeff)
    return total


@lru_cache(maxsize=None)
def build_D(algebra: JordanAlgebra) -> WeylOp:
    """D_{s,t}：在 (ξ, ζ) 中，参数 s, t 保持符号"""
    if algebra.family not in ("R", "Sym", "Rpq"):
        raise UnsupportedAlgebraError(f"build_D is not available for {algebra.name}")
    r = algebra.r
    total = WeylOp.zero(algebra.arena)
    cache: Dict[Tuple[MPoly, str], WeylOp] = {}

    def twist(q: MPoly, group: str, par: str) -> WeylOp:
        key = (q, group)
        if key not in cache:
            cache[key] = twist_operator(algebra, q, group, par)
        return cache[key]

    for k, b, breve in difference_expansion(algebra):
        left = twist(b, "xi", "s")
        right = twist(breve.rename({"y": "x"}), "zeta", "t")
        term = left.compose(right)
        total = total + (term if (r - k) % 2 == 0 else -term)
    logger.debug(f"D_{{s,t}} for {algebra.name}: {len(total)} terms")
    return total


def difference_operator_xi(algebra: JordanAlgebra) -> WeylOp:
    """det(∂ξ - ∂ζ)"""
    return difference_operator(algebra).rename({"x": "xi", "y": "zeta"})


def _check_monomial(algebra: JordanAlgebra, op_lhs: WeylOp, d: WeylOp, f: MPoly) -> Optional[str]:
    slots = [det_slot(algebra, "xi", "s"), det_slot(algebra, "zeta", "t")]
    lhs = apply_twisted(op_lhs, lift(slots, f))
    rhs = TwistedElement(slots, (-1, -1), d.apply(f))
    if lhs == rhs:
        return None
    return f.to_string()


def verify_D(algebra: JordanAlgebra, degree: Optional[int] = None, workers: int = 1) -> int:
    """对次数 <= degree 的全部单项式检查 D 的定义恒等式；返回检查的单项式个数

    degree 缺省取 Config().symbolic.degree_cap。
    """
    degree = Config().symbolic.degree_cap if degree is None else degree
    d = build_D(algebra)
    op = difference_operator_xi(algebra)
    basis = monomials(algebra.arena, ["xi", "zeta"], degree)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="sbdo_verify_D_") as pool:
            failures = list(pool.map(lambda f: _check_monomial(algebra, op, d, f), basis))
    else:
        failures = [_check_monomial(algebra, op, d, f) for f in basis]
    bad = [f for f in failures if f is not None]
    if bad:
        raise IdentityError(
            f"D_{{s,t}} identity fails on {algebra.name} for monomial {bad[0]}",
            detail={"failures": bad[:10], "checked": len(basis)},
        )
    logger.info(f"D_{{s,t}} identity verified on {len(basis)} monomials of degree <= {degree} for {algebra.name}")
    return len(basis)


def parameter_shift(algebra: JordanAlgebra) -> Fraction:
    """n/r - 1，即 s = λ - (n/r - 1)"""
    return Fraction(algebra.n, algebra.r) - 1


@lru_cache(maxsize=None)
def build_F(algebra: JordanAlgebra) -> WeylOp:
    """F_{λ,μ} = Ψ^{-1}(D_{s,t})|_{s=λ-n/r+1, t=μ-n/r+1}"""
    arena = algebra.arena
    shift = parameter_shift(algebra)
    d = build_D(algebra).substitute({
        "s": parameter(arena, "lam") - shift,
        "t": parameter(arena, "mu") - shift,
    })
    return fourier_conjugate(d, "inverse", algebra.weights)


def shift_weights(op: Any, j: int) -> Any:
    """(λ, μ) -> (λ + j, μ + j)"""
    if not j:
        return op
    arena = op.arena
    return op.substitute({"lam": parameter(arena, "lam") + j, "mu": parameter(arena, "mu") + j})


def shift_poly(p: MPoly, j: int) -> MPoly:
    if not j:
        return p
    arena = p.arena
    return p.substitute({"lam": parameter(arena, "lam") + j, "mu": parameter(arena, "mu") + j})


@lru_cache(maxsize=None)
def iterate_F(algebra: JordanAlgebra, k: int) -> WeylOp:
    """F^{(k)}_{λ,μ}"""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k == 0:
        return WeylOp.identity(algebra.arena)
    previous = iterate_F(algebra, k - 1)
    return shift_weights(build_F(algebra), k - 1).compose(previous)


@dataclass
class RCOperator:
    """广义 Rankin-Cohen 算子 B^{(k)} = res∘F^{(k)}"""

    algebra: str
    k: int
    B: BiDiffOp
    symbol: MPoly
    constant_coefficient: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algebra": self.algebra,
            "k": self.k,
            "terms": self.B.to_dict(),
            "symbol": self.symbol.to_string(),
            "constant_coefficient": self.constant_coefficient,
        }


@lru_cache(maxsize=None)
def build_B(algebra: JordanAlgebra, k: int) -> RCOperator:
    b = restrict(iterate_F(algebra, k))
    symbol = bidiff_symbol(b, algebra.weights)
    constant = b.is_constant_coefficient()
    if not constant:
        logger.warning(f"B^({k}) on {algebra.name} has non-constant coefficients")
    return RCOperator(algebra=algebra.name, k=k, B=b, symbol=symbol, constant_coefficient=constant)


def specialize(obj: Any, lam: Optional[Fraction] = None, mu: Optional[Fraction] = None) -> Any:
    assignment: Dict[str, Any] = {}
    if lam is not None:
        assignment["lam"] = Fraction(lam)
    if mu is not None:
        assignment["mu"] = Fraction(mu)
    return obj.substitute(assignment) if assignment else obj


# ========== 符号多项式 ==========


@lru_cache(maxsize=None)
def symbol_ck(algebra: JordanAlgebra, k: int) -> MPoly:
    """c^{(k)}_{λ,μ}(ξ, ζ)，由 c^{(k)}_{λ,μ} = D_{λ+1,μ+1}(c^{(k-1)}_{λ+1,μ+1}) 递推"""
    arena = algebra.arena
    if k == 0:
        return MPoly.constant(arena, 1)
    previous = shift_poly(symbol_ck(algebra, k - 1), 1)
    d = build_D(algebra).substitute({
        "s": parameter(arena, "lam") + 1,
        "t": parameter(arena, "mu") + 1,
    })
    return d.apply(previous)


def symbol_ck_direct(algebra: JordanAlgebra, k: int) -> MPoly:
    """det(∂ξ - ∂ζ)^k [det(ξ)^{λ+k} det(ζ)^{μ+k}] 直接展开，不用递推"""
    slots = [det_slot(algebra, "xi", "lam"), det_slot(algebra, "zeta", "mu")]
    element = lift(slots, MPoly.constant(algebra.arena, 1), (k, k))
    op = difference_operator_xi(algebra)
    for j in range(k):
        element = apply_twisted(op, element)
        try:
            element = element.to_offsets((k - j - 1, k - j - 1))
        except NotDivisibleError:
            raise IdentityError(f"det(∂ξ-∂ζ) step {j + 1} does not lower the det powers by one") from None
    return element.q


def swap_symbol(p: MPoly) -> MPoly:
    """(ξ, λ) <-> (ζ, μ)"""
    arena = p.arena
    return p.rename({"xi": "zeta", "zeta": "xi"}).substitute({
        "lam": parameter(arena, "mu"),
        "mu": parameter(arena, "lam"),
    })


def symbol_of_F(algebra: JordanAlgebra) -> MPoly:
    return full_symbol(build_F(algebra), algebra.weights)


def symbol_recurrence_residual(algebra: JordanAlgebra, k: int) -> MPoly:
    """symbol(B^{(k)}_{λ,μ}) - symbol(B^{(k-1)}_{λ+1,μ+1}) # φ(F_{λ,μ})"""
    previous = shift_poly(build_B(algebra, k - 1).symbol, 1)
    composed = symbol_sharp(previous, symbol_of_F(algebra), algebra.weights)
    return build_B(algebra, k).symbol - composed


@dataclass
class SymbolCheck:
    algebra: str
    k: int
    scalar: Optional[Fraction]
    residual: MPoly
    expected_scalar: Optional[Fraction] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.scalar is None or not self.residual.is_zero():
            return False
        return self.expected_scalar is None or self.scalar == self.expected_scalar

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algebra": self.algebra,
            "k": self.k,
            "scalar": None if self.scalar is None else str(self.scalar),
            "expected_scalar": None if self.expected_scalar is None else str(self.expected_scalar),
            "residual": self.residual.to_string(),
            "passed": self.passed,
            **self.detail,
        }


def _ratio(a: MPoly, b: MPoly) -> Optional[Fraction]:
    if b.is_zero():
        return None
    key, coeff = b.leading_term()
    return a.coefficient(key) / coeff


def symbol_theorem_check(
    algebra: JordanAlgebra,
    k: int,
    lam: Optional[Fraction] = None,
    mu: Optional[Fraction] = None,
) -> SymbolCheck:
    """bidiff_symbol(B^{(k)}) = scalar · c^{(k)}_{λ-n/r, μ-n/r}"""
    arena = algebra.arena
    shift = Fraction(algebra.n, algebra.r)
    lhs = specialize(build_B(algebra, k).symbol, lam, mu)
    rhs = symbol_ck(algebra, k).substitute({
        "lam": parameter(arena, "lam") - shift,
        "mu": parameter(arena, "mu") - shift,
    })
    rhs = specialize(rhs, lam, mu)
    scalar = _ratio(lhs, rhs)
    residual = lhs - rhs * scalar if scalar is not None else lhs
    check = SymbolCheck(
        algebra=algebra.name, k=k, scalar=scalar, residual=residual,
        expected_scalar=expected_symbol_scalar(algebra, k),
    )
    if not check.passed:
        raise IdentityError(
            f"symbol theorem fails for {algebra.name}, k={k}",
            detail=check.to_dict(),
        )
    return check


def expected_symbol_scalar(algebra: JordanAlgebra, k: int) -> Optional[Fraction]:
    """R^{p,q} 上符号常数 = (F 的全局常数)^k · i^{rk}；其它代数没有显式公式可比，返回 None"""
    if algebra.family != "Rpq":
        return None
    f_scalar = compare_spin_formulas(algebra).F_scalar
    convention = symbol_convention_constant(algebra.r * k)
    if f_scalar is None or convention.imag != 0:
        return None
    return f_scalar ** k * Fraction(int(convention.real))


# ========== 与显式公式比较 ==========


def _spin(algebra: JordanAlgebra) -> SpinFactor:
    if not isinstance(algebra, SpinFactor):
        raise UnsupportedAlgebraError(f"explicit R^{{p,q}} formulas need a spin factor, got {algebra.name}")
    return algebra


def _euler_difference(algebra: SpinFactor, left: str, right: str, derivative: str) -> WeylOp:
    """Σ_j (left_j - right_j) ∂_{derivative_j}"""
    arena = algebra.arena
    total = WeylOp.zero(arena)
    for a, b, slot in zip(arena.gens(left), arena.gens(right), arena.group_slots(derivative)):
        total = total + WeylOp.partial(arena, arena.names[slot]).scale(a - b)
    return total


def spin_D_formula(algebra: JordanAlgebra) -> WeylOp:
    """P(ξ)P(ζ)P(∂ξ-∂ζ) + 4sP(ζ)Σξ_j(∂ξ_j-∂ζ_j) + 4tP(ξ)Σζ_j(∂ζ_j-∂ξ_j)
    + 2t(2t-2+n)P(ξ) - 8stP(ξ,ζ) + 2s(2s-2+n)P(ζ)"""
    a = _spin(algebra)
    arena = a.arena
    n = a.n
    s, t = parameter(arena, "s"), parameter(arena, "t")
    p_xi, p_zeta = a.det_poly("xi"), a.det_poly("zeta")
    euler_xi = WeylOp.zero(arena)
    euler_zeta = WeylOp.zero(arena)
    for j, (xi, zeta) in enumerate(zip(arena.gens("xi"), arena.gens("zeta"))):
        d_xi = WeylOp.partial(arena, f"xi{j + 1}")
        d_zeta = WeylOp.partial(arena, f"zeta{j + 1}")
        euler_xi = euler_xi + (d_xi - d_zeta).scale(xi)
        euler_zeta = euler_zeta + (d_zeta - d_xi).scale(zeta)
    zero_order = (
        t * (t * 2 - 2 + n) * 2 * p_xi
        - s * t * 8 * a.bilinear_form("xi", "zeta")
        + s * (s * 2 - 2 + n) * 2 * p_zeta
    )
    return (
        difference_operator_xi(a).scale(p_xi * p_zeta)
        + euler_xi.scale(s * 4 * p_zeta)
        + euler_zeta.scale(t * 4 * p_xi)
        + WeylOp.multiplication(zero_order)
    )


def _spin_weight_factors(algebra: SpinFactor) -> Tuple[MPoly, MPoly]:
    arena = algebra.arena
    half = Fraction(algebra.n, 2) - 1
    return -parameter(arena, "lam") + half, -parameter(arena, "mu") + half


def spin_F_formula(algebra: JordanAlgebra) -> WeylOp:
    """-P(x-y)P(∂x)P(∂y) + 4(-λ+n/2-1)Σ(x_j-y_j)∂x_j P(∂y) + 4(-μ+n/2-1)Σ(y_j-x_j)∂y_j P(∂x)
    + 4λ(-λ+n/2-1)P(∂y) + 4μ(-μ+n/2-1)P(∂x) + 8(-λ+n/2-1)(-μ+n/2-1)P(∂x,∂y)"""
    a = _spin(algebra)
    arena = a.arena
    lam, mu = parameter(arena, "lam"), parameter(arena, "mu")
    fl, fm = _spin_weight_factors(a)
    p_dx = WeylOp.from_derivative_poly(a.det_poly("x"), "x", "x")
    p_dy = WeylOp.from_derivative_poly(a.det_poly("y"), "y", "y")
    p_dxdy = WeylOp.from_symbol(a.bilinear_form("x", "y"), {"x": "x", "y": "y"})
    p_diff = a.substitute_vector(a.det_poly("x"), [u - v for u, v in zip(arena.gens("x"), arena.gens("y"))])
    return (
        p_dx.compose(p_dy).scale(-p_diff)
        + _euler_difference(a, "x", "y", "x").compose(p_dy).scale(fl * 4)
        # μ 项对 y 求导，与 λ 项在 x↔y 下对称
        + _euler_difference(a, "y", "x", "y").compose(p_dx).scale(fm * 4)
        + p_dy.scale(lam * fl * 4)
        + p_dx.scale(mu * fm * 4)
        + p_dxdy.scale(fl * fm * 8)
    )


def spin_B1_formula(algebra: JordanAlgebra) -> BiDiffOp:
    """4 res{μ(-μ+n/2-1)P(∂x) + λ(-λ+n/2-1)P(∂y) + 2(-λ+n/2-1)(-μ+n/2-1)P(∂x,∂y)}"""
    a = _spin(algebra)
    arena = a.arena
    lam, mu = parameter(arena, "lam"), parameter(arena, "mu")
    fl, fm = _spin_weight_factors(a)
    p_dx = WeylOp.from_derivative_poly(a.det_poly("x"), "x", "x")
    p_dy = WeylOp.from_derivative_poly(a.det_poly("y"), "y", "y")
    p_dxdy = WeylOp.from_symbol(a.bilinear_form("x", "y"), {"x": "x", "y": "y"})
    inner = p_dx.scale(mu * fm) + p_dy.scale(lam * fl) + p_dxdy.scale(fl * fm * 2)
    return restrict(inner.scale(4))


def global_scalar(ours: Any, theirs: Any) -> Optional[Fraction]:
    """ours = c · theirs 时返回 c (逐项比较)"""
    ours_terms = dict(ours.items())
    theirs_terms = dict(theirs.items())
    if set(ours_terms) != set(theirs_terms) or not theirs_terms:
        return None
    key = min(theirs_terms)
    ratio = _ratio(ours_terms[key], theirs_terms[key])
    if ratio is None:
        return None
    for k, c in theirs_terms.items():
        if ours_terms[k] != c * ratio:
            return None
    return ratio


@dataclass
class SpinComparison:
    algebra: str
    D_matches: bool
    F_scalar: Optional[Fraction]
    B1_scalar: Optional[Fraction]
    printed_F_restricts_to_B1: bool

    @property
    def passed(self) -> bool:
        return (
            self.D_matches
            and self.F_scalar is not None
            and self.B1_scalar == self.F_scalar
            and self.printed_F_restricts_to_B1
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algebra": self.algebra,
            "D_matches": self.D_matches,
            "F_scalar": None if self.F_scalar is None else str(self.F_scalar),
            "B1_scalar": None if self.B1_scalar is None else str(self.B1_scalar),
            "printed_F_restricts_to_B1": self.printed_F_restricts_to_B1,
            "passed": self.passed,
        }


def compare_spin_formulas(algebra: JordanAlgebra) -> SpinComparison:
    """D 逐项相等；F 与 B^{(1)} 相差同一个全局常数"""
    a = _spin(algebra)
    result = SpinComparison(
        algebra=a.name,
        D_matches=build_D(a) == spin_D_formula(a),
        F_scalar=global_scalar(build_F(a), spin_F_formula(a)),
        B1_scalar=global_scalar(build_B(a, 1).B, spin_B1_formula(a)),
        printed_F_restricts_to_B1=restrict(spin_F_formula(a)) == spin_B1_formula(a),
    )
    if not result.passed:
        raise IdentityError(f"explicit R^{{p,q}} formulas disagree on {a.name}", detail=result.to_dict())
    logger.info(f"{a.name}: F = {result.F_scalar} · F_explicit")
    return result


# ========== 经典 Rankin-Cohen ==========


def classical_rc(algebra: JordanAlgebra, k: int, l: int, m: int) -> BiDiffOp:
    """Σ_{r+s=k} (-1)^r C(l+k-1, s) C(m+k-1, r) ∂x^r ∂y^s"""
    if algebra.n != 1:
        raise UnsupportedAlgebraError("the classical bracket lives on R")
    arena = algebra.arena
    terms = {}
    for r in range(k + 1):
        s = k - r
        coeff = (-1) ** r * comb(l + k - 1, s) * comb(m + k - 1, r)
        key = tuple(a + b for a, b in zip(derivative_key(arena, "x", (r,)), derivative_key(arena, "y", (s,))))
        terms[key] = MPoly.constant(arena, coeff)
    return BiDiffOp(arena, terms)


def classical_ratio(algebra: JordanAlgebra, k: int, l: int, m: int) -> Optional[Fraction]:
    ours = specialize(build_B(algebra, k).B, Fraction(l), Fraction(m))
    return global_scalar(ours, classical_rc(algebra, k, l, m))


def classical_recovery(algebra: JordanAlgebra, k: int, weights: Sequence[int] = (1, 2, 3, 4)) -> Fraction:
    """所有整数权重 (l, m) 的比值相同；返回该常数"""
    ratios = {classical_ratio(algebra, k, l, m) for l in weights for m in weights}
    if len(ratios) != 1 or None in ratios:
        raise IdentityError(f"classical Rankin-Cohen comparison fails for k={k}", detail={"ratios": [str(r) for r in ratios]})
    ratio = ratios.pop()
    logger.debug(f"B^({k}) = {ratio} · RC_{k} (expected {factorial(k)})")
    return ratio


def d_on_one_residual(algebra: JordanAlgebra) -> MPoly:
    """D_{s,t}(1) - c_{s-1,t-1}(ξ, ζ)"""
    arena = algebra.arena
    c = c_poly(algebra).rename({"x": "xi", "y": "zeta"}).substitute({
        "s": parameter(arena, "s") - 1,
        "t": parameter(arena, "t") - 1,
    })
    return build_D(algebra).apply(MPoly.constant(arena, 1)) - c
