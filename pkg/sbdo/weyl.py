"""
Weyl 代数与双微分算子

- WeylOp: 多项式系数的微分算子，正规序 Σ c_α(x) ∂^α (系数在左)
- TwistedElement: det_1^{P+a} det_2^{Q+b} · R 形式的表达式，对求导封闭
- BiDiffOp: res∘(V×V 上的算子)，作用后限制到对角 y = x
- Fourier 共轭与符号演算 (实约定 ∂x_j -> w_j ξ_j，i 的幂单独记录)
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import ArenaMismatchError
from .poly import GROUPS, Exponent, MPoly, VariableArena

DerivKey = Tuple[int, ...]

FOURIER_FORWARD = {"x": "xi", "y": "zeta"}
FOURIER_INVERSE = {"xi": "x", "zeta": "y"}


def _binomial_tuple(alpha: DerivKey, gamma: DerivKey) -> int:
    out = 1
    for a, g in zip(alpha, gamma):
        out *= comb(a, g)
    return out


def _sub_indices(alpha: DerivKey) -> Iterator[DerivKey]:
    """所有 gamma <= alpha (逐分量)"""
    active = [i for i, a in enumerate(alpha) if a]
    if not active:
        yield alpha
        return

    def rec(pos: int, current: List[int]) -> Iterator[DerivKey]:
        if pos == len(active):
            yield tuple(current)
            return
        i = active[pos]
        for g in range(alpha[i] + 1):
            current[i] = g
            yield from rec(pos + 1, current)
        current[i] = 0

    yield from rec(0, [0] * len(alpha))


class WeylOp:
    """多项式系数微分算子

    terms: 导数多重指标 (长度 4n，覆盖全部几何槽位) -> 系数 MPoly
    """

    __slots__ = ("arena", "_terms")

    def __init__(self, arena: VariableArena, terms: Optional[Mapping[DerivKey, MPoly]] = None):
        self.arena = arena
        clean: Dict[DerivKey, MPoly] = {}
        for key, coeff in (terms or {}).items():
            key = tuple(key)
            if len(key) != arena.n_geometric:
                raise ValueError(f"derivative index length {len(key)} != {arena.n_geometric}")
            if coeff.arena is not arena:
                raise ArenaMismatchError("coefficient belongs to another arena")
            total = clean.get(key)
            total = coeff if total is None else total + coeff
            if total.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = total
        self._terms = clean

    # ========== 构造 ==========

    @classmethod
    def zero(cls, arena: VariableArena) -> "WeylOp":
        return cls(arena)

    @classmethod
    def identity(cls, arena: VariableArena) -> "WeylOp":
        return cls.multiplication(MPoly.constant(arena, 1))

    @classmethod
    def multiplication(cls, p: MPoly) -> "WeylOp":
        """乘以多项式 p"""
        return cls(p.arena, {(0,) * p.arena.n_geometric: p})

    @classmethod
    def partial(cls, arena: VariableArena, name: str, order: int = 1) -> "WeylOp":
        slot = arena.index(name)
        if arena.is_parameter(slot):
            raise ValueError(f"cannot build a derivative in parameter {name!r}")
        key = [0] * arena.n_geometric
        key[slot] = order
        return cls(arena, {tuple(key): MPoly.constant(arena, 1)})

    @classmethod
    def from_derivative_poly(
        cls,
        p: MPoly,
        source: str = "x",
        target: Optional[str] = None,
        weights: Optional[Sequence[Fraction]] = None,
    ) -> "WeylOp":
        """p(∂)：把 p 中 source 组的变量 v_j 换成 ∂_{target_j} / w_j

        其余变量 (参数及其他组) 留在系数中。
        """
        return cls.from_symbol(p, {source: target or source}, weights)

    @classmethod
    def from_symbol(
        cls,
        p: MPoly,
        mapping: Mapping[str, str],
        weights: Optional[Sequence[Fraction]] = None,
    ) -> "WeylOp":
        """多组版本，如 {"x": "x", "y": "y"} 给出 p(∂x, ∂y)"""
        arena = p.arena
        n = arena.n
        w = [Fraction(1)] * n if weights is None else [Fraction(v) for v in weights]
        pairs = []
        for src, dst in mapping.items():
            pairs.extend(zip(arena.group_slots(src), arena.group_slots(dst), range(n)))
        terms: Dict[DerivKey, MPoly] = {}
        for mono, coeff in p.collect(list(mapping)).items():
            key = [0] * arena.n_geometric
            scale = Fraction(1)
            for s, d, j in pairs:
                e = mono[s]
                if e:
                    key[d] += e
                    scale /= w[j] ** e
            k = tuple(key)
            term = coeff * scale
            terms[k] = terms[k] + term if k in terms else term
        return cls(arena, terms)

    # ========== 查询 ==========

    def items(self) -> Iterator[Tuple[DerivKey, MPoly]]:
        return iter(self._terms.items())

    def terms(self) -> List[Tuple[DerivKey, MPoly]]:
        """按导数阶降序、再按指标排列"""
        return sorted(self._terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def coefficient(self, key: Sequence[int]) -> MPoly:
        return self._terms.get(tuple(key), MPoly.zero(self.arena))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def order(self, groups: Optional[Sequence[str]] = None) -> int:
        slots = self._slots(groups)
        return max((sum(k[i] for i in slots) for k in self._terms), default=0)

    def _slots(self, groups: Optional[Sequence[str]]) -> List[int]:
        if groups is None:
            return list(range(self.arena.n_geometric))
        return [i for g in groups for i in self.arena.group_slots(g)]

    def groups(self) -> Tuple[str, ...]:
        """算子实际涉及的变量组 (导数与系数)"""
        used = set()
        for key, coeff in self._terms.items():
            for i, e in enumerate(key):
                if e:
                    used.add(self.arena.group_of(i))
            for mono in coeff.split_parameters():
                for i, e in enumerate(mono[: self.arena.n_geometric]):
                    if e:
                        used.add(self.arena.group_of(i))
        return tuple(g for g in GROUPS if g in used)

    # ========== 线性运算 ==========

    def _check(self, other: "WeylOp") -> None:
        if other.arena is not self.arena:
            raise ArenaMismatchError(f"arena mismatch: n={self.arena.n} vs n={other.arena.n}")

    def __add__(self, other: "WeylOp") -> "WeylOp":
        if not isinstance(other, WeylOp):
            return NotImplemented
        self._check(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return WeylOp(self.arena, terms)

    def __neg__(self) -> "WeylOp":
        return WeylOp(self.arena, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "WeylOp") -> "WeylOp":
        if not isinstance(other, WeylOp):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: Any) -> "WeylOp":
        """左乘标量或多项式 (系数乘法)"""
        return WeylOp(self.arena, {k: c * factor for k, c in self._terms.items()})

    def __mul__(self, other: Any) -> "WeylOp":
        if isinstance(other, WeylOp):
            return self.compose(other)
        if isinstance(other, MPoly):
            return self.compose(WeylOp.multiplication(other))
        return self.scale(other)

    def __rmul__(self, other: Any) -> "WeylOp":
        if isinstance(other, MPoly):
            return WeylOp.multiplication(other).compose(self)
        return self.scale(other)

    def __matmul__(self, other: "WeylOp") -> "WeylOp":
        return self.compose(other)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, WeylOp):
            return NotImplemented
        return other.arena is self.arena and other._terms == self._terms

    def __hash__(self) -> int:
        return hash((self.arena.n, frozenset(self._terms.items())))

    # ========== 乘法 ==========

    def compose(self, other: "WeylOp") -> "WeylOp":
        """(A∘B)：a_α ∂^α b_β ∂^β = Σ_γ C(α,γ) a_α (∂^γ b_β) ∂^{α-γ+β}"""
        self._check(other)
        acc: Dict[DerivKey, MPoly] = {}
        derivative_cache: Dict[Tuple[DerivKey, DerivKey], MPoly] = {}
        for alpha, a in self._terms.items():
            for gamma in _sub_indices(alpha):
                binom = _binomial_tuple(alpha, gamma)
                rest = tuple(x - g for x, g in zip(alpha, gamma))
                for beta, b in other._terms.items():
                    cache_key = (gamma, beta)
                    db = derivative_cache.get(cache_key)
                    if db is None:
                        db = b.derivative(gamma + (0,) * (self.arena.size - self.arena.n_geometric))
                        derivative_cache[cache_key] = db
                    if db.is_zero():
                        continue
                    key = tuple(r + bb for r, bb in zip(rest, beta))
                    term = a * db * binom
                    acc[key] = acc[key] + term if key in acc else term
        return WeylOp(self.arena, acc)

    def commutator(self, other: "WeylOp") -> "WeylOp":
        return self.compose(other) - other.compose(self)

    def power(self, k: int) -> "WeylOp":
        result = WeylOp.identity(self.arena)
        for _ in range(k):
            result = self.compose(result)
        return result

    # ========== 作用 ==========

    def apply(self, f: MPoly) -> MPoly:
        """作用于多项式"""
        pad = (0,) * (self.arena.size - self.arena.n_geometric)
        total = MPoly.zero(self.arena)
        for alpha, c in self._terms.items():
            df = f.derivative(alpha + pad)
            if not df.is_zero():
                total = total + c * df
        return total

    def substitute(self, assignment: Mapping[str, Any]) -> "WeylOp":
        """系数中的代换 (典型用法：参数特化)"""
        return WeylOp(self.arena, {k: c.substitute(assignment) for k, c in self._terms.items()})

    def rename(self, mapping: Mapping[str, str]) -> "WeylOp":
        """按组重命名变量与导数"""
        perm: Dict[int, int] = {}
        for src, dst in mapping.items():
            for a, b in zip(self.arena.group_slots(src), self.arena.group_slots(dst)):
                perm[a] = b
        terms: Dict[DerivKey, MPoly] = {}
        for key, c in self._terms.items():
            new = [0] * self.arena.n_geometric
            for i, e in enumerate(key):
                if e:
                    new[perm.get(i, i)] += e
            k = tuple(new)
            rc = c.rename(mapping)
            terms[k] = terms[k] + rc if k in terms else rc
        return WeylOp(self.arena, terms)

    # ========== 输出 ==========

    def _key_groups(self) -> Tuple[str, ...]:
        used = self.groups()
        if any(g in used for g in ("xi", "zeta")) and not any(g in used for g in ("x", "y")):
            return ("xi", "zeta")
        return ("x", "y")

    def to_dict(self) -> List[Dict[str, Any]]:
        """JSON 形式：[{"dx": [...], "dy": [...], "coeff": "..."}]"""
        groups = self._key_groups()
        out = []
        for key, coeff in self.terms():
            entry: Dict[str, Any] = {}
            for g in groups:
                entry[f"d{g}"] = [key[i] for i in self.arena.group_slots(g)]
            entry["coeff"] = coeff.to_string()
            out.append(entry)
        return out

    def _derivative_text(self, key: DerivKey, latex: bool) -> str:
        parts = []
        for i, e in enumerate(key):
            if not e:
                continue
            name = self.arena.names[i]
            if latex:
                group = self.arena.group_of(i)
                j = i - self.arena.group_slots(group).start + 1
                sym = {"x": "x", "y": "y", "xi": "\\xi", "zeta": "\\zeta"}[group]
                base = f"\\partial_{{{sym}_{{{j}}}}}"
                parts.append(base if e == 1 else f"{base}^{{{e}}}")
            else:
                parts.append(f"d{name}" if e == 1 else f"d{name}^{e}")
        return (" " if latex else "*").join(parts)

    def _render(self, latex: bool) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for key, coeff in self.terms():
            text = coeff.to_latex() if latex else coeff.to_string()
            d = self._derivative_text(key, latex)
            if not d:
                chunks.append(f"({text})" if len(coeff) > 1 else text)
                continue
            if coeff == 1:
                chunks.append(d)
            elif coeff == -1:
                chunks.append(f"-{d}")
            else:
                chunks.append(f"({text}) {d}" if latex else f"({text})*{d}")
        return " + ".join(chunks).replace("+ -", "- ")

    def to_string(self) -> str:
        return self._render(latex=False)

    def to_latex(self) -> str:
        return self._render(latex=True)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"WeylOp({self.to_string()})"


# ========== 带 det 幂的表达式 ==========


@dataclass(frozen=True)
class TwistSlot:
    """一个 det 幂因子：det 多项式、所在变量组、符号指数参数"""
    group: str
    det: MPoly
    exponent: MPoly


class TwistedElement:
    """Π_i det_i^{P_i + a_i} · q

    每个 slot 的 det 只依赖各自的变量组；P_i 是参数 (如 s, t, lam, mu)。
    不自动约去 det 因子，比较时统一到公共偏移量。
    """

    __slots__ = ("slots", "offsets", "q")

    def __init__(self, slots: Sequence[TwistSlot], offsets: Sequence[int], q: MPoly):
        if len(slots) != len(offsets):
            raise ValueError("one offset per det slot is required")
        self.slots: Tuple[TwistSlot, ...] = tuple(slots)
        self.offsets: Tuple[int, ...] = tuple(offsets)
        self.q = q

    @property
    def arena(self) -> VariableArena:
        return self.q.arena

    def with_q(self, q: MPoly, offsets: Optional[Sequence[int]] = None) -> "TwistedElement":
        return TwistedElement(self.slots, self.offsets if offsets is None else offsets, q)

    def _slot_index(self, var_slot: int) -> Optional[int]:
        group = self.arena.group_of(var_slot)
        for i, s in enumerate(self.slots):
            if s.group == group:
                return i
        return None

    def differentiate(self, var_slot: int) -> "TwistedElement":
        """∂_v (det^{P+a} q) = det^{P+a-1} ((P+a) ∂_v det · q + det · ∂_v q)"""
        i = self._slot_index(var_slot)
        dq = self.q.diff(var_slot)
        if i is None:
            return self.with_q(dq)
        s = self.slots[i]
        a = self.offsets[i]
        ddet = s.det.diff(var_slot)
        q = (s.exponent + a) * ddet * self.q + s.det * dq
        offsets = list(self.offsets)
        offsets[i] = a - 1
        return TwistedElement(self.slots, offsets, q)

    def reoffset(self, offsets: Sequence[int]) -> "TwistedElement":
        """改写为较小偏移量 (q 乘以相应 det 幂)"""
        q = self.q
        for s, old, new in zip(self.slots, self.offsets, offsets):
            if new > old:
                raise ValueError(f"cannot raise offset from {old} to {new} without division")
            if new < old:
                q = q * s.det ** (old - new)
        return TwistedElement(self.slots, offsets, q)

    def to_offsets(self, offsets: Sequence[int]) -> "TwistedElement":
        """改写到指定偏移量；需要提高偏移量时做精确除法 (不整除抛 NotDivisibleError)"""
        q = self.q
        for s, old, new in zip(self.slots, self.offsets, offsets):
            if new < old:
                q = q * s.det ** (old - new)
            elif new > old and not q.is_zero():
                q = q.exact_divide(s.det ** (new - old))
        return TwistedElement(self.slots, offsets, q)

    def reduce(self) -> "TwistedElement":
        """显式约去 q 中可提出的 det 因子"""
        q = self.q
        offsets = list(self.offsets)
        if q.is_zero():
            return self
        for i, s in enumerate(self.slots):
            while s.det.divides(q):
                q = q.exact_divide(s.det)
                offsets[i] += 1
        return TwistedElement(self.slots, offsets, q)

    def __add__(self, other: "TwistedElement") -> "TwistedElement":
        if other.slots != self.slots:
            raise ValueError("twisted elements with different det slots")
        common = [min(a, b) for a, b in zip(self.offsets, other.offsets)]
        return TwistedElement(self.slots, common, self.reoffset(common).q + other.reoffset(common).q)

    def scale(self, factor: Any) -> "TwistedElement":
        return self.with_q(self.q * factor)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, TwistedElement):
            return NotImplemented
        if other.slots != self.slots:
            return False
        common = [min(a, b) for a, b in zip(self.offsets, other.offsets)]
        return self.reoffset(common).q == other.reoffset(common).q

    __hash__ = None  # type: ignore[assignment]

    def specialize(self, values: Mapping[str, int]) -> Optional[MPoly]:
        """参数取非负整数时展开成普通多项式；指数为负时返回 None"""
        q = self.q.evaluate(values) if values else self.q
        for s, a in zip(self.slots, self.offsets):
            exponent = s.exponent.evaluate(values)
            if not exponent.is_constant():
                raise ValueError("exponent parameter not fully specialized")
            e = exponent.constant_term() + a
            if e.denominator != 1 or e < 0:
                return None
            q = q * s.det ** int(e)
        return q

    def to_string(self) -> str:
        factors = []
        for s, a in zip(self.slots, self.offsets):
            exp = s.exponent.to_string()
            if a:
                exp = f"{exp}{a:+d}"
            factors.append(f"det({s.group})^({exp})")
        return " * ".join(factors + [f"({self.q.to_string()})"])

    def __repr__(self) -> str:
        return f"TwistedElement({self.to_string()})"


def lift(slots: Sequence[TwistSlot], f: MPoly, offsets: Optional[Sequence[int]] = None) -> TwistedElement:
    """f ↦ Π det_i^{P_i + a_i} f"""
    return TwistedElement(slots, offsets or (0,) * len(slots), f)


def apply_twisted(op: WeylOp, element: TwistedElement) -> TwistedElement:
    """算子作用于带 det 幂的表达式，结果偏移量统一到最小值"""
    arena = op.arena
    cache: Dict[DerivKey, TwistedElement] = {(0,) * arena.n_geometric: element}

    def derivative(alpha: DerivKey) -> TwistedElement:
        hit = cache.get(alpha)
        if hit is not None:
            return hit
        i = next(j for j, e in enumerate(alpha) if e)
        lower = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
        result = derivative(lower).differentiate(i)
        cache[alpha] = result
        return result

    pieces = [(derivative(alpha), coeff) for alpha, coeff in op.items()]
    if not pieces:
        return element.with_q(MPoly.zero(arena))
    common = [min(p.offsets[i] for p, _ in pieces) for i in range(len(element.slots))]
    total = MPoly.zero(arena)
    for piece, coeff in pieces:
        total = total + coeff * piece.reoffset(common).q
    return TwistedElement(element.slots, common, total)


# ========== Fourier 共轭 ==========


def fourier_conjugate(
    op: WeylOp,
    direction: str = "forward",
    weights: Optional[Sequence[Fraction]] = None,
) -> WeylOp:
    """形式 Fourier 共轭 Ψ

    forward:  c(x) ∂x^α  ↦  (wξ)^α c(∂ξ / w)    (x, y) -> (ξ, ζ)
    inverse:  c(ξ) ∂ξ^α  ↦  (wx)^α c(∂x / w)    (ξ, ζ) -> (x, y)

    Ψ 是反同态：Ψ(A∘B) = Ψ(B)∘Ψ(A)；两个方向互逆。正规序的项直接映成正规序的项。
    """
    if direction == "forward":
        mapping = FOURIER_FORWARD
    elif direction == "inverse":
        mapping = FOURIER_INVERSE
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    arena = op.arena
    n = arena.n
    w = [Fraction(1)] * n if weights is None else [Fraction(v) for v in weights]
    pad = (0,) * (arena.size - arena.n_geometric)
    pairs = []
    for src, dst in mapping.items():
        pairs.extend(zip(arena.group_slots(src), arena.group_slots(dst), range(n)))
    terms: Dict[DerivKey, MPoly] = {}
    for alpha, coeff in op.items():
        # 导数 -> 目标变量的乘法
        mult = [0] * arena.n_geometric
        scale = Fraction(1)
        for s, d, j in pairs:
            if alpha[s]:
                mult[d] = alpha[s]
                scale *= w[j] ** alpha[s]
        if any(alpha[i] for i in range(arena.n_geometric) if i not in {s for s, _, _ in pairs}):
            raise ValueError(f"operator differentiates outside the {direction} source groups")
        prefix = MPoly.monomial(arena, tuple(mult) + pad, scale)
        for mono, par in coeff.split_parameters().items():
            key = [0] * arena.n_geometric
            factor = Fraction(1)
            for s, d, j in pairs:
                if mono[s]:
                    key[d] = mono[s]
                    factor /= w[j] ** mono[s]
            if any(mono[i] for i in range(arena.n_geometric) if i not in {s for s, _, _ in pairs}):
                raise ValueError(f"coefficient depends on variables outside the {direction} source groups")
            k = tuple(key)
            term = prefix * par * factor
            terms[k] = terms[k] + term if k in terms else term
    return WeylOp(arena, terms)


# ========== 双微分算子 ==========


class BiDiffOp:
    """res∘(Σ b_{αβ}(x) ∂x^α ∂y^β)：作用于 V×V 上的函数后限制到 y = x

    系数只依赖 x (及参数)。
    """

    __slots__ = ("arena", "_terms")

    def __init__(self, arena: VariableArena, terms: Optional[Mapping[DerivKey, MPoly]] = None):
        self.arena = arena
        clean: Dict[DerivKey, MPoly] = {}
        for key, coeff in (terms or {}).items():
            key = tuple(key)
            if any(key[i] for i in range(arena.n_geometric) if arena.group_of(i) not in ("x", "y")):
                raise ValueError("bi-differential operators differentiate in x and y only")
            for mono in coeff.split_parameters():
                if any(mono[i] for i in range(arena.n_geometric) if arena.group_of(i) != "x"):
                    raise ValueError("bi-differential coefficients depend on x only")
            total = clean.get(key)
            total = coeff if total is None else total + coeff
            if total.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = total
        self._terms = clean

    @classmethod
    def res(cls, arena: VariableArena) -> "BiDiffOp":
        """限制映射 res，符号为 1"""
        return cls(arena, {(0,) * arena.n_geometric: MPoly.constant(arena, 1)})

    def items(self) -> Iterator[Tuple[DerivKey, MPoly]]:
        return iter(self._terms.items())

    def terms(self) -> List[Tuple[DerivKey, MPoly]]:
        return sorted(self._terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, key: Sequence[int]) -> MPoly:
        return self._terms.get(tuple(key), MPoly.zero(self.arena))

    def as_weyl(self) -> WeylOp:
        """去掉 res 后的 V×V 算子"""
        return WeylOp(self.arena, self._terms)

    def apply(self, f: MPoly) -> MPoly:
        return restrict_poly(self.as_weyl().apply(f))

    def __add__(self, other: "BiDiffOp") -> "BiDiffOp":
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return BiDiffOp(self.arena, terms)

    def __neg__(self) -> "BiDiffOp":
        return BiDiffOp(self.arena, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "BiDiffOp") -> "BiDiffOp":
        return self + (-other)

    def scale(self, factor: Any) -> "BiDiffOp":
        return BiDiffOp(self.arena, {k: c * factor for k, c in self._terms.items()})

    def substitute(self, assignment: Mapping[str, Any]) -> "BiDiffOp":
        return BiDiffOp(self.arena, {k: c.substitute(assignment) for k, c in self._terms.items()})

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, BiDiffOp):
            return NotImplemented
        return other.arena is self.arena and other._terms == self._terms

    __hash__ = None  # type: ignore[assignment]

    def is_constant_coefficient(self) -> bool:
        return all(c.is_parameter_only() for c in self._terms.values())

    def to_dict(self) -> List[Dict[str, Any]]:
        return WeylOp(self.arena, self._terms).to_dict()

    def to_string(self) -> str:
        return f"res∘({WeylOp(self.arena, self._terms).to_string()})"

    def to_latex(self) -> str:
        return f"\\operatorname{{res}}\\circ\\left({WeylOp(self.arena, self._terms).to_latex()}\\right)"

    def __repr__(self) -> str:
        return f"BiDiffOp({self.to_string()})"


def restrict_poly(p: MPoly) -> MPoly:
    """y -> x"""
    return p.rename({"y": "x"})


def restrict(op: WeylOp) -> BiDiffOp:
    """res∘op：系数在对角上取值"""
    return BiDiffOp(op.arena, {k: restrict_poly(c) for k, c in op.items()})


def sharp_compose(b: BiDiffOp, f: WeylOp) -> BiDiffOp:
    """B∘F：Σ b_{αβ}(x) · res∘(∂^{αβ}∘F)"""
    arena = b.arena
    total = BiDiffOp(arena)
    for key, coeff in b.items():
        inner = WeylOp(arena, {key: MPoly.constant(arena, 1)}).compose(f)
        total = total + restrict(inner).scale(coeff)
    return total


# ========== 符号 ==========


def _symbol_of_terms(
    arena: VariableArena,
    items: Iterator[Tuple[DerivKey, MPoly]],
    weights: Optional[Sequence[Fraction]],
) -> MPoly:
    n = arena.n
    w = [Fraction(1)] * n if weights is None else [Fraction(v) for v in weights]
    pad = (0,) * (arena.size - arena.n_geometric)
    pairs = list(zip(arena.group_slots("x"), arena.group_slots("xi"), range(n))) + list(
        zip(arena.group_slots("y"), arena.group_slots("zeta"), range(n))
    )
    total = MPoly.zero(arena)
    for key, coeff in items:
        mono = [0] * arena.n_geometric
        scale = Fraction(1)
        for s, d, j in pairs:
            if key[s]:
                mono[d] = key[s]
                scale *= w[j] ** key[s]
        total = total + coeff * MPoly.monomial(arena, tuple(mono) + pad, scale)
    return total


def bidiff_symbol(b: BiDiffOp, weights: Optional[Sequence[Fraction]] = None) -> MPoly:
    """B 的符号 b(x, ξ, ζ)

    实约定下 ∂x_j -> w_j ξ_j，∂y_j -> w_j ζ_j；i 的幂按阶数另计 (见 symbol_convention_constant)。
    """
    return _symbol_of_terms(b.arena, b.items(), weights)


def full_symbol(op: WeylOp, weights: Optional[Sequence[Fraction]] = None) -> MPoly:
    """V×V 上算子的全符号 φ(x, y, ξ, ζ)"""
    return _symbol_of_terms(op.arena, op.items(), weights)


def symbol_convention_constant(order: int) -> complex:
    """e^{i(x|ξ)} 约定下齐 order 阶部分相对实约定多出的常数 i^order"""
    return 1j ** order


def symbol_sharp(b: MPoly, phi: MPoly, weights: Optional[Sequence[Fraction]] = None) -> MPoly:
    """符号的 # 积

    b#φ = Σ_{α,β} 1/(α!β!) (w^{-1}∂ξ)^α (w^{-1}∂ζ)^β b · (∂x^α ∂y^β φ)|_{y=x}
    """
    arena = b.arena
    n = arena.n
    w = [Fraction(1)] * n if weights is None else [Fraction(v) for v in weights]
    pad = (0,) * (arena.size - arena.n_geometric)
    xi_slots = list(arena.group_slots("xi"))
    zeta_slots = list(arena.group_slots("zeta"))
    x_slots = list(arena.group_slots("x"))
    y_slots = list(arena.group_slots("y"))
    max_xi = b.degree(["xi"])
    max_zeta = b.degree(["zeta"])
    total = MPoly.zero(arena)
    for a_total in range(max_xi + 1):
        for alpha in _compositions(n, a_total):
            for b_total in range(max_zeta + 1):
                for beta in _compositions(n, b_total):
                    db = [0] * arena.n_geometric
                    dphi = [0] * arena.n_geometric
                    scale = Fraction(1)
                    for j in range(n):
                        db[xi_slots[j]] = alpha[j]
                        db[zeta_slots[j]] = beta[j]
                        dphi[x_slots[j]] = alpha[j]
                        dphi[y_slots[j]] = beta[j]
                        scale /= factorial(alpha[j]) * factorial(beta[j]) * w[j] ** (alpha[j] + beta[j])
                    left = b.derivative(tuple(db) + pad)
                    if left.is_zero():
                        continue
                    right = phi.derivative(tuple(dphi) + pad)
                    if right.is_zero():
                        continue
                    total = total + left * restrict_poly(right) * scale
    return total


def _compositions(n: int, total: int) -> Iterator[Tuple[int, ...]]:
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(n - 1, total - first):
            yield (first,) + rest


def derivative_key(arena: VariableArena, group: str, alpha: Sequence[int]) -> DerivKey:
    """组内多重指标 -> 全局导数指标"""
    key = [0] * arena.n_geometric
    for slot, a in zip(arena.group_slots(group), alpha):
        key[slot] = a
    return tuple(key)


def exponent_key(arena: VariableArena, group: str, alpha: Sequence[int]) -> Exponent:
    return derivative_key(arena, group, alpha) + (0,) * (arena.size - arena.n_geometric)
