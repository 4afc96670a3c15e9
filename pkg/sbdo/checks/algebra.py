"""
代数层校验：poly / jordan / weyl / fischer
"""

from fractions import Fraction
from typing import Any, Dict

from ..bernstein import double_sharp_scalar
from ..fischer import (
    apply_derivative,
    biorthogonal,
    fischer_pair,
    graded_orthogonality_defects,
    leibniz_expand,
    minors_in_w,
    reconstruct_difference,
    taylor_expand,
    translate_span,
    w_module,
)
from ..jordan import CATALOG, get_algebra
from ..poly import MPoly, arena, random_poly
from ..weyl import FOURIER_FORWARD, WeylOp, fourier_conjugate
from .base import CheckContext, register_check, require

HUA_POINTS = 20
RANDOM_TRIALS = 5

# Fischer 与 W 的计算对 Sym3 较慢
FISCHER_ALGEBRAS = ("R", "Rpq:1,1", "Rpq:2,1", "Rpq:2,2", "Sym2", "Sym3")


# ========== poly ==========


@register_check("poly.ring_axioms", "poly", "associativity, distributivity and exact division")
def check_ring_axioms(ctx: CheckContext) -> Dict[str, Any]:
    rng = ctx.rng
    ar = arena(3)
    for _ in range(RANDOM_TRIALS):
        p, q, r = (random_poly(ar, rng, ("x", "y"), max_degree=3) for _ in range(3))
        require((p * q) * r == p * (q * r), "multiplication is not associative", p=p.to_string())
        require(p * (q + r) == p * q + p * r, "multiplication does not distribute", p=p.to_string())
        if not q.is_zero():
            require((p * q).exact_divide(q) == p, "exact division does not invert multiplication",
                    p=p.to_string(), q=q.to_string())
    return {"trials": RANDOM_TRIALS}


@register_check("poly.leibniz", "poly", "product rule and commuting partial derivatives")
def check_poly_leibniz(ctx: CheckContext) -> Dict[str, Any]:
    rng = ctx.rng
    ar = arena(2)
    for _ in range(RANDOM_TRIALS):
        p = random_poly(ar, rng, ("x", "xi"), max_degree=4)
        q = random_poly(ar, rng, ("x", "xi"), max_degree=4)
        require((p * q).diff("x1") == p.diff("x1") * q + p * q.diff("x1"), "product rule fails")
        require(p.diff("x1").diff("xi2") == p.diff("xi2").diff("x1"), "partial derivatives do not commute")
    return {"trials": RANDOM_TRIALS}


@register_check("poly.substitute_evaluate", "poly", "substitution followed by evaluation")
def check_substitute_evaluate(ctx: CheckContext) -> Dict[str, Any]:
    rng = ctx.rng
    ar = arena(2)
    x1, x2 = ar.gens("x")
    for _ in range(RANDOM_TRIALS):
        p = random_poly(ar, rng, ("x",), max_degree=3)
        composed = p.substitute({"x1": x1 + x2, "x2": x1 * x2})
        point = {"x1": Fraction(2, 3), "x2": Fraction(-5, 7)}
        direct = p.evaluate({"x1": Fraction(2, 3) - Fraction(5, 7), "x2": Fraction(-10, 21)})
        require(composed.evaluate(point) == direct, "substitute and evaluate disagree", p=p.to_string())
    return {"trials": RANDOM_TRIALS}


# ========== jordan ==========


def _register_jordan(algebra_id: str) -> None:
    @register_check(f"jordan.structure.{algebra_id}", "jordan", f"frame, Peirce constants and trace form of {algebra_id}")
    def check_structure(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        algebra.check_frame()
        peirce = algebra.peirce_data()
        require(algebra.dimension_formula() == algebra.n, "dimension formula does not give n",
                n=algebra.n, formula=algebra.dimension_formula())
        if algebra.r > 1:
            require(peirce.d == algebra.d, "Peirce constant d differs from the catalog", peirce=peirce.to_dict())
        require(algebra.gram_is_scaled_metric(), "trace form is not kappa times the Fischer metric")
        return {"algebra": algebra.to_dict(), "peirce": peirce.to_dict()}

    @register_check(f"jordan.identities.{algebra_id}", "jordan", f"Jordan identity and Hua identity on {algebra_id}")
    def check_identities(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        rng = ctx.rng
        checked = 0
        while checked < HUA_POINTS:
            x = algebra.random_point(rng)
            y = algebra.random_point(rng)
            require(algebra.jordan_identity_holds(x, y), "Jordan identity fails",
                    x=[str(v) for v in x], y=[str(v) for v in y])
            hua = algebra.hua_check(x, y)
            if hua is None:
                continue
            require(hua, "Hua identity fails", x=[str(v) for v in x], y=[str(v) for v in y])
            checked += 1
        # x^# = det(x) x^{-1}
        x = algebra.random_point(rng)
        inv = algebra.inverse(x)
        require(tuple(algebra.product(list(x), list(inv))) == algebra.unit_element(), "x∘x^{-1} is not the unit")
        return {"hua_points": checked}


for _algebra_id in CATALOG:
    _register_jordan(_algebra_id)


# ========== weyl ==========


def _random_op(ar: Any, rng: Any) -> WeylOp:
    """系数在 x 中、导数来自 ξ 的随机算子"""
    return WeylOp.from_symbol(random_poly(ar, rng, ("x", "xi"), max_degree=3, n_terms=4), {"xi": "x"})


@register_check("weyl.canonical_commutation", "weyl", "[∂_j, x_k] = δ_jk")
def check_canonical_commutation(ctx: CheckContext) -> Dict[str, Any]:
    ar = arena(3)
    one = WeylOp.identity(ar)
    for j, xj in enumerate(ar.gens("x")):
        for k, xk in enumerate(ar.gens("x")):
            bracket = WeylOp.partial(ar, f"x{j + 1}").commutator(WeylOp.multiplication(xk))
            expected = one if j == k else WeylOp.zero(ar)
            require(bracket == expected, f"[∂x{j + 1}, x{k + 1}] is wrong", got=bracket.to_string())
    return {"n": 3}


@register_check("weyl.compose_apply", "weyl", "(A∘B) f = A(B f) and associativity of composition")
def check_compose_apply(ctx: CheckContext) -> Dict[str, Any]:
    rng = ctx.rng
    ar = arena(2)
    for _ in range(RANDOM_TRIALS):
        a, b, c = _random_op(ar, rng), _random_op(ar, rng), _random_op(ar, rng)
        f = random_poly(ar, rng, ("x",), max_degree=5)
        require(a.compose(b).apply(f) == a.apply(b.apply(f)), "composition disagrees with application",
                a=a.to_string(), b=b.to_string())
        require(a.compose(b).compose(c) == a.compose(b.compose(c)), "composition is not associative")
    return {"trials": RANDOM_TRIALS}


@register_check("weyl.fourier_anti_homomorphism", "weyl", "Ψ(A∘B) = Ψ(B)∘Ψ(A) and Ψ^{-1}Ψ = id")
def check_fourier(ctx: CheckContext) -> Dict[str, Any]:
    rng = ctx.rng
    ar = arena(2)
    weights = (Fraction(1), Fraction(2))
    for _ in range(RANDOM_TRIALS):
        a, b = _random_op(ar, rng), _random_op(ar, rng)
        psi_ab = fourier_conjugate(a.compose(b), "forward", weights)
        swapped = fourier_conjugate(b, "forward", weights).compose(fourier_conjugate(a, "forward", weights))
        require(psi_ab == swapped, "Ψ is not an anti-homomorphism", a=a.to_string(), b=b.to_string())
        back = fourier_conjugate(fourier_conjugate(a, "forward", weights), "inverse", weights)
        require(back == a, "Ψ^{-1}∘Ψ is not the identity", a=a.to_string())
    return {"trials": RANDOM_TRIALS, "groups": FOURIER_FORWARD}


# ========== fischer ==========


@register_check("fischer.adjunction", "fischer", "(x_j p, q)_F = (p, ∂_j q)_F / w_j")
def check_adjunction(ctx: CheckContext) -> Dict[str, Any]:
    rng = ctx.rng
    algebra = get_algebra("Sym2")
    ar = algebra.arena
    w = algebra.weights
    origin = algebra.point((Fraction(0),) * algebra.n)
    for _ in range(RANDOM_TRIALS):
        p = random_poly(ar, rng, ("x",), max_degree=3)
        q = random_poly(ar, rng, ("x",), max_degree=4)
        for j, xj in enumerate(ar.gens("x")):
            lhs = fischer_pair(xj * p, q, w)
            rhs = fischer_pair(p, q.diff(f"x{j + 1}"), w) * (1 / w[j])
            require(lhs == rhs, "multiplication is not adjoint to the weighted derivative",
                    j=j + 1, p=p.to_string(), q=q.to_string())
        require(fischer_pair(p, q, w) == fischer_pair(q, p, w), "Fischer pairing is not symmetric")
        require(fischer_pair(p, q, w) == apply_derivative(p, q, w).evaluate(origin), "(p, q)_F != ∂(p)q(0)")
    return {"trials": RANDOM_TRIALS}


def _register_fischer(algebra_id: str) -> None:
    @register_check(f"fischer.w_module.{algebra_id}", "fischer", f"dual basis of W = R(det) on {algebra_id}",
                    slow=algebra_id == "Sym3")
    def check_w_module(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        pair = w_module(algebra)
        require(biorthogonal(pair), "dual basis is not biorthogonal")
        require(not graded_orthogonality_defects(pair), "W is not graded-orthogonal")
        require(reconstruct_difference(algebra) == algebra.substitute_vector(
            algebra.det_poly("x"), [a - b for a, b in zip(algebra.arena.gens("x"), algebra.arena.gens("y"))]),
            "det(x-y) expansion does not reconstruct det(x-y)")
        minors = minors_in_w(algebra)
        require(all(minors), "principal minors are not in W", minors=minors)
        if algebra.euclidean:
            # 欧氏情形 ♯ 是 W 上的对合
            for _, b, _ in pair.pairs():
                require(double_sharp_scalar(algebra, b) == 1, "sharp is not an involution on W", p=b.to_string())
        return {"dims": pair.dims()}


for _algebra_id in FISCHER_ALGEBRAS:
    _register_fischer(_algebra_id)


@register_check("fischer.taylor_leibniz", "fischer", "Taylor expansion and Leibniz rule through R(p)")
def check_taylor_leibniz(ctx: CheckContext) -> Dict[str, Any]:
    rng = ctx.rng
    algebra = get_algebra("Rpq:2,1")
    ar = algebra.arena
    p = algebra.det_poly("x") * ar.gens("x")[0]
    pair = translate_span(p, algebra.weights)
    shifted = algebra.substitute_vector(p, [a + b for a, b in zip(ar.gens("x"), ar.gens("y"))])
    total = MPoly.zero(ar)
    for b, breve in taylor_expand(p, pair):
        total = total + b * breve
    require(total == shifted, "p(x+y) differs from its Taylor expansion", p=p.to_string())
    for _ in range(RANDOM_TRIALS):
        f = random_poly(ar, rng, ("x",), max_degree=3)
        g = random_poly(ar, rng, ("x",), max_degree=3)
        lhs = apply_derivative(p, f * g, algebra.weights)
        require(leibniz_expand(p, f, g, pair) == lhs, "Leibniz rule through R(p) fails",
                f=f.to_string(), g=g.to_string())
    return {"p": p.to_string(), "dims": pair.dims()}
