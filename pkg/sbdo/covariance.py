"""
共形李代数的无穷小作用与对称破缺算子的协变性校验

密度权 λ 的作用：dπ_λ(X) = -X - λ m_X，m_X = (r / 2n) div X。
生成元：
- 平移     ∂_j
- 伪旋转   ε_j x_j ∂_k - ε_k x_k ∂_j   (保持 det = P)
- 结构旋转 (Ax + xAᵀ)·∂，A ∈ so(m)    (Sym(m,R)，保持 det)
- 伸缩     Σ x_j ∂_j
- 特殊共形 K_w = (P(x) w)·∂，P(x) 为 Jordan 二次表示

每个生成元都对应一条有理群路径 h_t，用 mpmath 数值求导
c(h_t, x)^{-λ/2} f(h_t x) 在 t = 0 的导数校验其公式。
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from loguru import logger

from . import linalg
from .errors import IdentityError, OracleMismatchError, UnsupportedAlgebraError
from .config import Config
from .jordan import JordanAlgebra, SpinFactor, SymmetricMatrices
from .poly import MPoly, parameter, random_poly
from .source import build_F, iterate_F
from .weyl import WeylOp, restrict



@dataclass
class GroupPath:
    """t ↦ h_t，h_0 = id；kind ∈ identity | translation | dilation | rotation | congruence | special"""

    kind: str
    vector: Tuple[Fraction, ...] = ()
    matrix: Tuple[Tuple[Fraction, ...], ...] = ()


@dataclass
class Generator:
    name: str
    vectorfield: WeylOp
    multiplier: MPoly
    path: GroupPath
    components: Tuple[MPoly, ...] = field(default=(), repr=False)

    def dpi(self, weight: Any, group: str = "x") -> WeylOp:
        """dπ_weight(X) = -X - weight·m_X，作用在指定变量组"""
        field_op = self.vectorfield if group == "x" else self.vectorfield.rename({"x": group})
        m = self.multiplier if group == "x" else self.multiplier.rename({"x": group})
        return -field_op - WeylOp.multiplication(m * weight)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "vectorfield": self.vectorfield.to_string(),
            "multiplier": self.multiplier.to_string(),
        }


def _vector_field(arena: Any, components: Sequence[MPoly]) -> WeylOp:
    total = WeylOp.zero(arena)
    for comp, name in zip(components, [arena.names[s] for s in arena.group_slots("x")]):
        if not comp.is_zero():
            total = total + WeylOp.partial(arena, name).scale(comp)
    return total


def _divergence(arena: Any, components: Sequence[MPoly]) -> MPoly:
    total = MPoly.zero(arena)
    for comp, slot in zip(components, arena.group_slots("x")):
        total = total + comp.diff(slot)
    return total


def _signs(algebra: JordanAlgebra) -> Tuple[int, ...]:
    if isinstance(algebra, SpinFactor):
        return algebra.signs
    return (1,) * algebra.n


def _make(algebra: JordanAlgebra, name: str, components: List[MPoly], path: GroupPath) -> Generator:
    arena = algebra.arena
    m = _divergence(arena, components) * Fraction(algebra.r, 2 * algebra.n)
    return Generator(name=name, vectorfield=_vector_field(arena, components), multiplier=m,
                     path=path, components=tuple(components))


def generators(
    algebra: JordanAlgebra,
    validate: bool = True,
    seed: int = 0,
    points: Optional[int] = None,
    tolerance: Optional[float] = None,
    dps: Optional[int] = None,
) -> List[Generator]:
    """共形李代数的生成元

    R 与 R^{p,q} 给出完整的 (n+1)(n+2)/2 个；Sym 给平移、结构旋转、伸缩与特殊共形。
    oracle 参数缺省取 Config().covariance。
    """
    if algebra.family not in ("R", "Rpq", "Sym"):
        raise UnsupportedAlgebraError(f"no conformal generators for {algebra.name}")
    arena = algebra.arena
    n = algebra.n
    xs = arena.gens("x")
    zero = MPoly.zero(arena)
    one = MPoly.constant(arena, 1)
    gens: List[Generator] = []

    for j in range(n):
        comps = [one if i == j else zero for i in range(n)]
        w = tuple(Fraction(int(i == j)) for i in range(n))
        gens.append(_make(algebra, f"translation_{j + 1}", comps, GroupPath("translation", vector=w)))

    if isinstance(algebra, SymmetricMatrices):
        gens.extend(_structure_rotations(algebra))
    else:
        eps = _signs(algebra)
        for j in range(n):
            for k in range(j + 1, n):
                comps = [zero] * n
                comps[k] = xs[j] * eps[j]
                comps[j] = -xs[k] * eps[k]
                a = [[Fraction(0)] * n for _ in range(n)]
                a[k][j] = Fraction(eps[j])
                a[j][k] = Fraction(-eps[k])
                path = GroupPath("rotation", matrix=tuple(tuple(row) for row in a))
                gens.append(_make(algebra, f"rotation_{j + 1}{k + 1}", comps, path))

    gens.append(_make(algebra, "dilation", list(xs), GroupPath("dilation")))

    for j in range(n):
        w = [Fraction(int(i == j)) for i in range(n)]
        comps = _quadratic_apply(algebra, w)
        gens.append(_make(algebra, f"special_{j + 1}", comps, GroupPath("special", vector=tuple(w))))

    if validate:
        rng = np.random.default_rng(seed)
        for g in gens:
            validate_generator(algebra, g, rng, points, tolerance, dps)
    logger.debug(f"{algebra.name}: {len(gens)} conformal generators")
    return gens


def _structure_rotations(algebra: SymmetricMatrices) -> List[Generator]:
    """A = E_ab - E_ba：X(x) = Ax + xAᵀ，路径 x ↦ g_t x g_tᵀ"""
    m = algebra.m
    mat = algebra._matrix(algebra.arena.gens("x"))
    gens = []
    for a in range(m):
        for b in range(a + 1, m):
            rot = [[Fraction(0)] * m for _ in range(m)]
            rot[a][b] = Fraction(1)
            rot[b][a] = Fraction(-1)
            comps = []
            for i, j in algebra.pairs:
                total = MPoly.zero(algebra.arena)
                for k in range(m):
                    if rot[i][k]:
                        total = total + mat[k][j] * rot[i][k]
                    if rot[j][k]:
                        total = total + mat[i][k] * rot[j][k]
                comps.append(total)
            path = GroupPath("congruence", matrix=tuple(tuple(row) for row in rot))
            gens.append(_make(algebra, f"rotation_{a + 1}{b + 1}", comps, path))
    return gens


def _quadratic_apply(algebra: JordanAlgebra, w: Sequence[Fraction]) -> List[MPoly]:
    """P(x) w = 2 x∘(x∘w) - x²∘w，x 为坐标多项式"""
    arena = algebra.arena
    xs = arena.gens("x")
    wv = [MPoly.constant(arena, v) for v in w]
    xw = algebra.product(xs, wv)
    x2 = algebra.product(xs, xs)
    left = algebra.product(xs, xw)
    right = algebra.product(x2, wv)
    return [a * 2 - b for a, b in zip(left, right)]


# ========== 数值 oracle ==========


def _mpf(c: Fraction) -> Any:
    return mpmath.mpf(c.numerator) / c.denominator


def _evaluate(p: MPoly, values: Sequence[Any], group: str = "x") -> Any:
    arena = p.arena
    return p.evaluate_numeric({arena.names[s]: v for s, v in zip(arena.group_slots(group), values)}, convert=_mpf)


def _numeric_det(algebra: JordanAlgebra, x: Sequence[Any]) -> Any:
    return _evaluate(algebra.det_poly("x"), x)


def _numeric_inverse(algebra: JordanAlgebra, x: Sequence[Any]) -> List[Any]:
    det = _numeric_det(algebra, x)
    return [_evaluate(p, x) / det for p in algebra.adjoint("x")]


def path_action(algebra: JordanAlgebra, path: GroupPath, x: Sequence[Any], t: Any) -> Tuple[List[Any], Any]:
    """(h_t x, c(h_t, x))"""
    r = algebra.r
    if path.kind == "identity":
        return list(x), mpmath.mpf(1)
    if path.kind == "translation":
        return [xi - t * _mpf(w) for xi, w in zip(x, path.vector)], mpmath.mpf(1)
    if path.kind == "dilation":
        return [(1 - t) * xi for xi in x], (1 - t) ** (-r)
    if path.kind == "rotation":
        n = algebra.n
        a = mpmath.matrix([[_mpf(v) for v in row] for row in path.matrix])
        ident = mpmath.eye(n)
        rhs = (ident - a * (t / 2)) * mpmath.matrix(list(x))
        y = mpmath.lu_solve(ident + a * (t / 2), rhs)
        return [y[i] for i in range(n)], mpmath.mpf(1)
    if path.kind == "congruence":
        m = algebra.m
        a = mpmath.matrix([[_mpf(v) for v in row] for row in path.matrix])
        ident = mpmath.eye(m)
        g = mpmath.inverse(ident + a * (t / 2)) * (ident - a * (t / 2))
        mat = mpmath.matrix(m, m)
        for (i, j), v in zip(algebra.pairs, x):
            mat[i, j] = v
            mat[j, i] = v
        image = g * mat * g.T
        return [image[i, j] for i, j in algebra.pairs], mpmath.mpf(1)
    if path.kind == "special":
        inv = _numeric_inverse(algebra, x)
        shifted = [v + t * _mpf(w) for v, w in zip(inv, path.vector)]
        image = _numeric_inverse(algebra, shifted)
        c = _numeric_det(algebra, [-v for v in shifted]) ** 2 * _numeric_det(algebra, x) ** 2
        return image, c
    raise ValueError(f"unknown path kind {path.kind!r}")


def oracle_finite_difference(
    algebra: JordanAlgebra,
    path: GroupPath,
    f: MPoly,
    point: Sequence[Fraction],
    lam: Fraction,
    dps: Optional[int] = None,
) -> Any:
    """d/dt c(h_t, x)^{-λ/2} f(h_t x) 在 t = 0"""
    dps = Config().covariance.oracle_dps if dps is None else dps
    with mpmath.workdps(dps):
        x = [_mpf(Fraction(v)) for v in point]
        lam_mp = _mpf(Fraction(lam))

        def value(t: Any) -> Any:
            image, c = path_action(algebra, path, x, t)
            return c ** (-lam_mp / 2) * _evaluate(f, image)

        return mpmath.diff(value, 0)


def validate_generator(
    algebra: JordanAlgebra,
    gen: Generator,
    rng: np.random.Generator,
    points: Optional[int] = None,
    tolerance: Optional[float] = None,
    dps: Optional[int] = None,
) -> None:
    """在随机点上比较 dπ_λ(X) f 与 oracle；缺省参数取 Config().covariance"""
    cfg = Config().covariance
    points = cfg.generator_samples if points is None else points
    tolerance = cfg.oracle_tolerance if tolerance is None else tolerance
    dps = cfg.oracle_dps if dps is None else dps
    arena = algebra.arena
    for _ in range(points):
        f = random_poly(arena, rng, ("x",), max_degree=3, n_terms=5)
        point = algebra.random_point(rng)
        lam = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        symbolic = gen.dpi(lam).apply(f).evaluate(algebra.point(point))
        expected = _mpf(symbolic.value)
        got = oracle_finite_difference(algebra, gen.path, f, point, lam, dps)
        scale = max(abs(expected), mpmath.mpf(1))
        if abs(got - expected) > tolerance * scale:
            raise OracleMismatchError(
                f"generator {gen.name} on {algebra.name} disagrees with the group-path oracle",
                detail={"point": [str(v) for v in point], "lambda": str(lam),
                        "symbolic": str(expected), "oracle": mpmath.nstr(got, 15)},
            )


# ========== 李括号 ==========


def _field_vector(gen_field: WeylOp) -> Dict[Tuple[Any, ...], Fraction]:
    """向量场 -> (导数指标, 系数单项式) -> 系数"""
    out: Dict[Tuple[Any, ...], Fraction] = {}
    for key, coeff in gen_field.items():
        for mono, c in coeff.items():
            out[(key, mono)] = c
    return out


def bracket_table(algebra: JordanAlgebra, gens: Optional[List[Generator]] = None) -> Dict[Tuple[str, str], Dict[str, Fraction]]:
    """[dπ(X), dπ(Y)] = dπ(Z)，Z = -[X, Y] 在生成元中的展开；返回结构常数"""
    if algebra.family == "Sym":
        raise UnsupportedAlgebraError("the Sym generator set is not closed under brackets")
    gens = gens or generators(algebra, validate=False)
    arena = algebra.arena
    lam = parameter(arena, "lam")
    basis = [_field_vector(g.vectorfield) for g in gens]
    keys = sorted({k for b in basis for k in b}, key=repr)
    known = set(keys)
    matrix = [[b.get(k, Fraction(0)) for b in basis] for k in keys]
    table: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    for i, a in enumerate(gens):
        for j in range(i + 1, len(gens)):
            b = gens[j]
            vf = a.vectorfield.commutator(b.vectorfield)
            target = _field_vector(-vf)
            unknown = [k for k in target if k not in known]
            if unknown:
                raise IdentityError(f"[{a.name}, {b.name}] leaves the generator span")
            coeffs = linalg.solve(matrix, [target.get(k, Fraction(0)) for k in keys])
            if coeffs is None:
                raise IdentityError(f"[{a.name}, {b.name}] leaves the generator span")
            z = WeylOp.zero(arena)
            for c, g in zip(coeffs, gens):
                if c:
                    z = z + g.dpi(lam).scale(c)
            lhs = a.dpi(lam).commutator(b.dpi(lam))
            if lhs != z:
                raise IdentityError(
                    f"bracket of {a.name} and {b.name} is not dπ of the bracket",
                    detail={"residual": (lhs - z).to_string()},
                )
            table[(a.name, b.name)] = {g.name: c for c, g in zip(coeffs, gens) if c}
    return table


# ========== 协变性 ==========


def tensor_action(gen: Generator, lam: Any, mu: Any) -> WeylOp:
    """dπ_λ(X) ⊗ 1 + 1 ⊗ dπ_μ(X)"""
    return gen.dpi(lam, "x") + gen.dpi(mu, "y")


def diagonal_action(algebra: JordanAlgebra, gen: Generator, weight: Any) -> WeylOp:
    """res 之后的单变量作用，写成 V×V 上的算子：-Σ a_j(x)(∂x_j + ∂y_j) - weight·m(x)"""
    arena = algebra.arena
    total = WeylOp.zero(arena)
    for comp, sx, sy in zip(gen.components, arena.group_slots("x"), arena.group_slots("y")):
        if comp.is_zero():
            continue
        total = total + (WeylOp.partial(arena, arena.names[sx]) + WeylOp.partial(arena, arena.names[sy])).scale(comp)
    return -total - WeylOp.multiplication(gen.multiplier * weight)


@dataclass
class CovarianceReport:
    algebra: str
    operator: str
    residuals: Dict[str, str]

    @property
    def passed(self) -> bool:
        return all(v == "0" for v in self.residuals.values())

    def to_dict(self) -> Dict[str, Any]:
        return {"algebra": self.algebra, "operator": self.operator, "passed": self.passed, "residuals": self.residuals}


def _raise_on_failure(report: CovarianceReport) -> CovarianceReport:
    if not report.passed:
        bad = {k: v for k, v in report.residuals.items() if v != "0"}
        raise IdentityError(f"{report.operator} is not covariant on {report.algebra}", detail=bad)
    return report


def check_intertwine_F(algebra: JordanAlgebra, gens: Optional[List[Generator]] = None) -> CovarianceReport:
    """F∘Σ_{λ,μ} - Σ_{λ+1,μ+1}∘F = 0"""
    gens = gens or generators(algebra)
    arena = algebra.arena
    lam, mu = parameter(arena, "lam"), parameter(arena, "mu")
    f = build_F(algebra)
    residuals = {}
    for g in gens:
        res = f.compose(tensor_action(g, lam, mu)) - tensor_action(g, lam + 1, mu + 1).compose(f)
        residuals[g.name] = res.to_string()
    return _raise_on_failure(CovarianceReport(algebra.name, "F", residuals))


def check_intertwine_B(algebra: JordanAlgebra, k: int, gens: Optional[List[Generator]] = None) -> CovarianceReport:
    """B^{(k)}∘Σ_{λ,μ} = dπ_{λ+μ+2k}(X)∘B^{(k)}"""
    gens = gens or generators(algebra)
    arena = algebra.arena
    lam, mu = parameter(arena, "lam"), parameter(arena, "mu")
    fk = iterate_F(algebra, k)
    residuals = {}
    for g in gens:
        left = restrict(fk.compose(tensor_action(g, lam, mu)))
        right = restrict(diagonal_action(algebra, g, lam + mu + 2 * k).compose(fk))
        residuals[g.name] = (left - right).to_string()
    return _raise_on_failure(CovarianceReport(algebra.name, f"B^({k})", residuals))


def check_res_equivariance(algebra: JordanAlgebra, gens: Optional[List[Generator]] = None) -> CovarianceReport:
    """res∘Σ_{λ,μ} = dπ_{λ+μ}(X)∘res"""
    gens = gens or generators(algebra)
    arena = algebra.arena
    lam, mu = parameter(arena, "lam"), parameter(arena, "mu")
    residuals = {}
    for g in gens:
        left = restrict(tensor_action(g, lam, mu))
        right = restrict(diagonal_action(algebra, g, lam + mu))
        residuals[g.name] = (left - right).to_string()
    return _raise_on_failure(CovarianceReport(algebra.name, "res", residuals))


def check_multiplication_operator(algebra: JordanAlgebra, gens: Optional[List[Generator]] = None) -> CovarianceReport:
    """M = det(x-y)：M∘Σ_{λ,μ} = Σ_{λ-1,μ-1}∘M"""
    gens = gens or generators(algebra)
    arena = algebra.arena
    lam, mu = parameter(arena, "lam"), parameter(arena, "mu")
    diff = algebra.substitute_vector(algebra.det_poly("x"), [a - b for a, b in zip(arena.gens("x"), arena.gens("y"))])
    m = WeylOp.multiplication(diff)
    residuals = {}
    for g in gens:
        res = m.compose(tensor_action(g, lam, mu)) - tensor_action(g, lam - 1, mu - 1).compose(m)
        residuals[g.name] = res.to_string()
    return _raise_on_failure(CovarianceReport(algebra.name, "M", residuals))
