"""
算子层校验：bernstein / source / symbols / covariance
"""

from math import factorial
from typing import Any, Dict, List

from ..bernstein import bs_all, bs_roots, c_poly, swap_xy, verify_c_poly, verify_sharp, zeta_bernstein_roots
from ..covariance import (
    Generator,
    bracket_table,
    check_intertwine_B,
    check_intertwine_F,
    check_multiplication_operator,
    check_res_equivariance,
    generators,
)
from ..jordan import get_algebra
from ..source import (
    build_B,
    classical_recovery,
    compare_spin_formulas,
    d_on_one_residual,
    symbol_ck,
    symbol_ck_direct,
    symbol_recurrence_residual,
    symbol_theorem_check,
    verify_D,
)
from .base import CheckContext, register_check, require

SOURCE_ALGEBRAS = ("R", "Rpq:1,1", "Rpq:2,1", "Rpq:2,2", "Sym2", "Sym3")
SYMBOL_ALGEBRAS = ("R", "Rpq:1,1", "Rpq:2,1")
COVARIANCE_ALGEBRAS = ("R", "Rpq:1,1", "Rpq:2,1", "Rpq:2,2")
SPIN_ALGEBRAS = ("Rpq:1,1", "Rpq:2,1", "Rpq:2,2", "spin:3")
HEAVY = {"Sym3", "Rpq:2,2"}


def _register_bernstein(algebra_id: str) -> None:
    @register_check(f"bernstein.identity.{algebra_id}", "bernstein",
                    f"p(∂) det^(λ+1) for every basis element of W on {algebra_id}", slow=algebra_id == "Sym3")
    def check_identity(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        certs = bs_all(algebra)
        require(bs_roots(algebra) == zeta_bernstein_roots(algebra), "Bernstein roots of det are wrong",
                roots=[str(v) for v in bs_roots(algebra)])
        rng = ctx.rng
        samples = ctx.config.symbolic.sharp_samples
        for cert in certs:
            require(verify_sharp(algebra, cert.p, cert.sharp, rng, samples), "p♯ disagrees with p(x^{-1}) det(x)",
                    p=cert.p.to_string())
        return {
            "certificates": len(certs),
            "untwisted_failures": [c.p.to_string() for c in certs if not c.literal_holds],
            "roots": [str(v) for v in bs_roots(algebra)],
        }

    @register_check(f"bernstein.c_poly.{algebra_id}", "bernstein",
                    f"det(∂x-∂y) det(x)^(s+1) det(y)^(t+1) on {algebra_id}", slow=algebra_id in HEAVY)
    def check_c(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        require(verify_c_poly(algebra), "closed form of c_{s,t} disagrees with direct expansion")
        c = c_poly(algebra)
        sign = -1 if algebra.r % 2 else 1
        require(swap_xy(c) == c * sign, "c_{s,t} has the wrong symmetry under (x,s) <-> (y,t)")
        return {"terms": len(c)}


for _algebra_id in SOURCE_ALGEBRAS:
    _register_bernstein(_algebra_id)


# ========== source ==========


def _register_source(algebra_id: str) -> None:
    @register_check(f"source.D.{algebra_id}", "source",
                    f"defining identity of D_(s,t) on monomials of bounded degree on {algebra_id}",
                    slow=algebra_id in HEAVY)
    def check_D(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        checked = verify_D(algebra, ctx.config.symbolic.degree_cap)
        residual = d_on_one_residual(algebra)
        require(residual.is_zero(), "D_(s,t)(1) != c_(s-1,t-1)", residual=residual.to_string())
        return {"monomials": checked, "degree": ctx.config.symbolic.degree_cap}


for _algebra_id in SOURCE_ALGEBRAS:
    _register_source(_algebra_id)


def _register_spin(algebra_id: str) -> None:
    @register_check(f"source.spin_formulas.{algebra_id}", "source",
                    f"explicit D, F and B^(1) formulas on {algebra_id}", slow=algebra_id in HEAVY)
    def check_spin(ctx: CheckContext) -> Dict[str, Any]:
        return compare_spin_formulas(get_algebra(algebra_id)).to_dict()


for _algebra_id in SPIN_ALGEBRAS:
    _register_spin(_algebra_id)


def _register_classical(k: int) -> None:
    @register_check(f"source.classical_rc.k{k}", "source", f"B^({k}) on R is k! times the Rankin-Cohen bracket")
    def check_classical(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra("R")
        ratio = classical_recovery(algebra, k)
        require(ratio == factorial(k), f"B^({k}) is {ratio} times RC_{k}", expected=factorial(k))
        return {"k": k, "ratio": str(ratio), "constant_coefficient": build_B(algebra, k).constant_coefficient}


for _k in (1, 2, 3):
    _register_classical(_k)


# ========== symbols ==========


def _register_symbols(algebra_id: str, k: int) -> None:
    @register_check(f"symbols.theorem.{algebra_id}.k{k}", "symbols",
                    f"symbol of B^({k}) is proportional to c^({k}) shifted by n/r on {algebra_id}")
    def check_theorem(ctx: CheckContext) -> Dict[str, Any]:
        return symbol_theorem_check(get_algebra(algebra_id), k).to_dict()

    @register_check(f"symbols.recursion.{algebra_id}.k{k}", "symbols",
                    f"c^({k}) by recursion equals direct expansion, and the #-product recursion on {algebra_id}")
    def check_recursion(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        require(symbol_ck(algebra, k) == symbol_ck_direct(algebra, k), "recursive and direct c^(k) disagree")
        residual = symbol_recurrence_residual(algebra, k)
        require(residual.is_zero(), "symbol of B^(k) does not satisfy the #-product recursion",
                residual=residual.to_string())
        return {"terms": len(symbol_ck(algebra, k))}


for _algebra_id in SYMBOL_ALGEBRAS:
    for _k in (1, 2):
        _register_symbols(_algebra_id, _k)


# ========== covariance ==========


def _validated_generators(algebra: Any, ctx: CheckContext) -> List[Generator]:
    cfg = ctx.config.covariance
    return generators(algebra, validate=True, seed=ctx.seed, points=cfg.generator_samples,
                      tolerance=cfg.oracle_tolerance, dps=cfg.oracle_dps)


def _register_covariance(algebra_id: str) -> None:
    heavy = algebra_id in HEAVY

    @register_check(f"covariance.generators.{algebra_id}", "covariance",
                    f"conformal generators against group-path oracles and their brackets on {algebra_id}")
    def check_generators(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        gens = _validated_generators(algebra, ctx)
        table = bracket_table(algebra, gens)
        return {"generators": [g.name for g in gens], "brackets": len(table)}

    @register_check(f"covariance.F.{algebra_id}", "covariance",
                    f"F intertwines the tensor actions on {algebra_id}", slow=heavy)
    def check_F(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        gens = generators(algebra, validate=False)
        check_res_equivariance(algebra, gens)
        check_multiplication_operator(algebra, gens)
        return check_intertwine_F(algebra, gens).to_dict()

    for k in (1, 2):
        _register_covariance_B(algebra_id, k, heavy)


def _register_covariance_B(algebra_id: str, k: int, heavy: bool) -> None:
    @register_check(f"covariance.B{k}.{algebra_id}", "covariance",
                    f"B^({k}) is covariant on {algebra_id}", slow=heavy)
    def check_B(ctx: CheckContext) -> Dict[str, Any]:
        algebra = get_algebra(algebra_id)
        return check_intertwine_B(algebra, k, generators(algebra, validate=False)).to_dict()


for _algebra_id in COVARIANCE_ALGEBRAS:
    _register_covariance(_algebra_id)


@register_check("covariance.generators.Sym2", "covariance",
                "translations, structure rotations, dilation and special generators on Sym2")
def check_sym_generators(ctx: CheckContext) -> Dict[str, Any]:
    algebra = get_algebra("Sym2")
    gens = _validated_generators(algebra, ctx)
    rotations = [g for g in gens if g.path.kind == "congruence"]
    require(len(rotations) == algebra.m * (algebra.m - 1) // 2, "structure rotations are missing",
            generators=[g.name for g in gens])
    require(all(g.multiplier.is_zero() for g in rotations), "structure rotations must have multiplier 0")
    report = check_res_equivariance(algebra, gens)
    return {"generators": [g.name for g in gens], "res": report.passed}
