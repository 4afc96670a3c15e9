"""
精确多元多项式

有理系数稀疏多项式：
- 几何变量分四组 x, y, xi, zeta，每组 n 个
- 符号参数 s, t, lam, mu 作为额外的可交换指数槽位
- 全程精确运算，不出现浮点数

多项式创建后不可变，可在多线程中共享。
"""

from fractions import Fraction
from functools import lru_cache
from operator import add
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    ArenaMismatchError,
    NotDivisibleError,
    ParameterDifferentiationError,
    UnknownVariableError,
)

GROUPS: Tuple[str, ...] = ("x", "y", "xi", "zeta")
PARAMS: Tuple[str, ...] = ("s", "t", "lam", "mu")

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]
Variable = Union[str, int]

_LATEX_NAMES = {
    "x": "x",
    "y": "y",
    "xi": "\\xi",
    "zeta": "\\zeta",
    "s": "s",
    "t": "t",
    "lam": "\\lambda",
    "mu": "\\mu",
}


class VariableArena:
    """变量表

    维数 n 时共 4n 个几何槽位 (x1..xn, y1..yn, xi1..xin, zeta1..zetan)，
    之后是参数槽位。
    """

    __slots__ = ("n", "names", "size", "n_geometric", "_index")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"dimension must be positive, got {n}")
        self.n = n
        names = [f"{group}{j}" for group in GROUPS for j in range(1, n + 1)]
        self.n_geometric = len(names)
        names.extend(PARAMS)
        self.names: Tuple[str, ...] = tuple(names)
        self.size = len(names)
        self._index = {name: i for i, name in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r} (n={self.n})") from None

    def slot(self, group: str, j: int) -> int:
        """组内第 j 个变量的槽位 (j 从 0 开始)"""
        if not 0 <= j < self.n:
            raise UnknownVariableError(f"index {j} out of range for group {group!r} (n={self.n})")
        return GROUPS.index(group) * self.n + j

    def group_slots(self, group: str) -> range:
        start = GROUPS.index(group) * self.n
        return range(start, start + self.n)

    def group_of(self, slot: int) -> Optional[str]:
        if slot >= self.n_geometric:
            return None
        return GROUPS[slot // self.n]

    def is_parameter(self, slot: int) -> bool:
        return slot >= self.n_geometric

    def zero(self) -> Exponent:
        return (0,) * self.size

    def var(self, name: str) -> "MPoly":
        return MPoly.var(self, name)

    def gens(self, group: str) -> List["MPoly"]:
        return [MPoly.var(self, self.names[i]) for i in self.group_slots(group)]

    def __repr__(self) -> str:
        return f"VariableArena(n={self.n})"


@lru_cache(maxsize=None)
def arena(n: int) -> VariableArena:
    """维数 n 的共享变量表"""
    return VariableArena(n)


def _order_key(key: Exponent) -> Tuple[int, Exponent]:
    # 分次字典序
    return (sum(key), key)


def _falling(e: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= e - i
    return out


def _add_into(acc: Dict[Exponent, Fraction], terms: Mapping[Exponent, Fraction], scale: Fraction = Fraction(1)) -> None:
    for k, c in terms.items():
        v = acc.get(k, 0) + c * scale
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


class MPoly:
    """稀疏多元多项式

    terms: 指数元组 -> 非零 Fraction 系数
    """

    __slots__ = ("arena", "_terms")

    def __init__(self, arena: VariableArena, terms: Optional[Mapping[Sequence[int], Scalar]] = None):
        self.arena = arena
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for key, coeff in terms.items():
                key = tuple(key)
                if len(key) != arena.size:
                    raise ValueError(f"exponent length {len(key)} != arena size {arena.size}")
                c = Fraction(coeff)
                if c:
                    clean[key] = clean.get(key, 0) + c
        self._terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def _raw(cls, arena: VariableArena, terms: Dict[Exponent, Fraction]) -> "MPoly":
        obj = cls.__new__(cls)
        obj.arena = arena
        obj._terms = terms
        return obj

    # ========== 构造 ==========

    @classmethod
    def zero(cls, arena: VariableArena) -> "MPoly":
        return cls._raw(arena, {})

    @classmethod
    def constant(cls, arena: VariableArena, value: Scalar) -> "MPoly":
        value = Fraction(value)
        if not value:
            return cls._raw(arena, {})
        return cls._raw(arena, {arena.zero(): value})

    @classmethod
    def var(cls, arena: VariableArena, name: str) -> "MPoly":
        key = [0] * arena.size
        key[arena.index(name)] = 1
        return cls._raw(arena, {tuple(key): Fraction(1)})

    @classmethod
    def monomial(cls, arena: VariableArena, key: Sequence[int], coeff: Scalar = 1) -> "MPoly":
        return cls(arena, {tuple(key): coeff})

    @classmethod
    def linear(cls, arena: VariableArena, group: str, vector: Sequence[Scalar]) -> "MPoly":
        """Σ v_j · group_j"""
        terms: Dict[Exponent, Fraction] = {}
        for j, v in enumerate(vector):
            v = Fraction(v)
            if v:
                key = [0] * arena.size
                key[arena.slot(group, j)] = 1
                terms[tuple(key)] = v
        return cls._raw(arena, terms)

    # ========== 基本属性 ==========

    def items(self) -> Iterator[Tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def terms(self) -> List[Tuple[Exponent, Fraction]]:
        """规范顺序 (分次字典序降序) 的项列表"""
        return sorted(self._terms.items(), key=lambda kv: _order_key(kv[0]), reverse=True)

    def coefficient(self, key: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(key), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        zero = self.arena.zero()
        return all(k == zero for k in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(self.arena.zero(), Fraction(0))

    @property
    def value(self) -> Fraction:
        """常数多项式的值"""
        if not self.is_constant():
            raise ValueError(f"polynomial is not constant: {self.to_string()}")
        return self.constant_term()

    def is_parameter_only(self) -> bool:
        ng = self.arena.n_geometric
        return all(not any(k[:ng]) for k in self._terms)

    def degree(self, groups: Optional[Iterable[str]] = None) -> int:
        """几何总次数 (指定组时只数这些组)；零多项式返回 -1"""
        if not self._terms:
            return -1
        slots = self._slots_of(groups)
        return max(sum(k[i] for i in slots) for k in self._terms)

    def _slots_of(self, groups: Optional[Iterable[str]]) -> List[int]:
        if groups is None:
            return list(range(self.arena.n_geometric))
        return [i for g in groups for i in self.arena.group_slots(g)]

    def variables(self) -> List[str]:
        used = set()
        for k in self._terms:
            used.update(i for i, e in enumerate(k) if e)
        return [self.arena.names[i] for i in sorted(used)]

    def leading_term(self) -> Tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        key = max(self._terms, key=_order_key)
        return key, self._terms[key]

    # ========== 环运算 ==========

    def _coerce(self, other: Any) -> Any:
        if isinstance(other, MPoly):
            if other.arena is not self.arena:
                raise ArenaMismatchError(
                    f"arena mismatch: n={self.arena.n} vs n={other.arena.n}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.constant(self.arena, other)
        return NotImplemented

    def __add__(self, other: Any) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        _add_into(terms, other._terms)
        return MPoly._raw(self.arena, terms)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly._raw(self.arena, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: Any) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        _add_into(terms, other._terms, Fraction(-1))
        return MPoly._raw(self.arena, terms)

    def __rsub__(self, other: Any) -> "MPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return MPoly.zero(self.arena)
            return MPoly._raw(self.arena, {k: c * other for k, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: Dict[Exponent, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = tuple(map(add, k1, k2))
                terms[k] = terms.get(k, 0) + c1 * c2
        return MPoly._raw(self.arena, {k: c for k, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, exponent: int) -> "MPoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {exponent!r}")
        result = MPoly.constant(self.arena, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, MPoly):
            return other.arena is self.arena and other._terms == self._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MPoly.constant(self.arena, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.arena.n, frozenset(self._terms.items())))

    # ========== 微分 ==========

    def _slot(self, var: Variable) -> int:
        if isinstance(var, int):
            if not 0 <= var < self.arena.size:
                raise UnknownVariableError(f"slot {var} out of range")
            return var
        return self.arena.index(var)

    def diff(self, var: Variable, order: int = 1) -> "MPoly":
        """对几何变量求偏导；参数不可求导"""
        slot = self._slot(var)
        if self.arena.is_parameter(slot):
            raise ParameterDifferentiationError(
                f"cannot differentiate with respect to parameter {self.arena.names[slot]!r}"
            )
        terms: Dict[Exponent, Fraction] = {}
        for k, c in self._terms.items():
            e = k[slot]
            if e < order:
                continue
            terms[k[:slot] + (e - order,) + k[slot + 1:]] = c * _falling(e, order)
        return MPoly._raw(self.arena, terms)

    def derivative(self, alpha: Sequence[int]) -> "MPoly":
        """多重指标 alpha 的偏导 ∂^alpha"""
        alpha = tuple(alpha)
        active = [(i, a) for i, a in enumerate(alpha) if a]
        if not active:
            return self
        for i, _ in active:
            if self.arena.is_parameter(i):
                raise ParameterDifferentiationError(
                    f"cannot differentiate with respect to parameter {self.arena.names[i]!r}"
                )
        terms: Dict[Exponent, Fraction] = {}
        for k, c in self._terms.items():
            coeff = c
            for i, a in active:
                if k[i] < a:
                    coeff = 0
                    break
                coeff *= _falling(k[i], a)
            if coeff:
                terms[tuple(e - a for e, a in zip(k, alpha))] = coeff
        return MPoly._raw(self.arena, terms)

    # ========== 代换 ==========

    def substitute(self, assignment: Mapping[Variable, Any]) -> "MPoly":
        """同时代换：变量 -> MPoly 或有理数"""
        if not assignment:
            return self
        subs: Dict[int, MPoly] = {}
        for var, value in assignment.items():
            coerced = self._coerce(value)
            if coerced is NotImplemented:
                raise TypeError(f"cannot substitute value of type {type(value).__name__}")
            subs[self._slot(var)] = coerced
        if all(v.is_constant() for v in subs.values()):
            return self._evaluate_constants({s: v.constant_term() for s, v in subs.items()})

        powers: Dict[Tuple[int, int], MPoly] = {}

        def power(slot: int, e: int) -> MPoly:
            cached = powers.get((slot, e))
            if cached is None:
                cached = subs[slot] ** e
                powers[(slot, e)] = cached
            return cached

        acc: Dict[Exponent, Fraction] = {}
        for k, c in self._terms.items():
            kept = tuple(0 if i in subs else e for i, e in enumerate(k))
            term = MPoly._raw(self.arena, {kept: c})
            for slot in subs:
                if k[slot]:
                    term = term * power(slot, k[slot])
            _add_into(acc, term._terms)
        return MPoly._raw(self.arena, acc)

    def _evaluate_constants(self, values: Mapping[int, Fraction]) -> "MPoly":
        acc: Dict[Exponent, Fraction] = {}
        for k, c in self._terms.items():
            coeff = c
            kept = list(k)
            for slot, v in values.items():
                e = k[slot]
                if e:
                    coeff *= v ** e
                    kept[slot] = 0
            if coeff:
                key = tuple(kept)
                v = acc.get(key, 0) + coeff
                if v:
                    acc[key] = v
                else:
                    acc.pop(key, None)
        return MPoly._raw(self.arena, acc)

    def evaluate(self, point: Mapping[Variable, Scalar]) -> "MPoly":
        """把部分变量代入有理数；全部代入后可用 .value 取值"""
        return self._evaluate_constants({self._slot(v): Fraction(x) for v, x in point.items()})

    def evaluate_numeric(self, values: Mapping[Variable, Any], convert: Callable[[Fraction], Any] = float) -> Any:
        """以任意数值类型求值 (float, complex, mpmath.mpf)；values 必须覆盖所有出现的变量"""
        slot_values = {self._slot(v): x for v, x in values.items()}
        total = convert(Fraction(0))
        for k, c in self._terms.items():
            term = convert(c)
            for i, e in enumerate(k):
                if e:
                    try:
                        term = term * slot_values[i] ** e
                    except KeyError:
                        raise UnknownVariableError(
                            f"no value supplied for {self.arena.names[i]!r}"
                        ) from None
            total = total + term
        return total

    def rename(self, mapping: Mapping[str, str]) -> "MPoly":
        """按组重命名，如 {"x": "xi"}；目标槽位已有指数时相加 (y -> x 即对角限制)"""
        perm: Dict[int, int] = {}
        for src, dst in mapping.items():
            for a, b in zip(self.arena.group_slots(src), self.arena.group_slots(dst)):
                perm[a] = b
        acc: Dict[Exponent, Fraction] = {}
        for k, c in self._terms.items():
            new = [0] * self.arena.size
            for i, e in enumerate(k):
                if e:
                    new[perm.get(i, i)] += e
            key = tuple(new)
            v = acc.get(key, 0) + c
            if v:
                acc[key] = v
            else:
                acc.pop(key, None)
        return MPoly._raw(self.arena, acc)

    # ========== 分解 ==========

    def homogeneous_components(self, groups: Optional[Iterable[str]] = None) -> Dict[int, "MPoly"]:
        slots = self._slots_of(groups)
        parts: Dict[int, Dict[Exponent, Fraction]] = {}
        for k, c in self._terms.items():
            parts.setdefault(sum(k[i] for i in slots), {})[k] = c
        return {deg: MPoly._raw(self.arena, t) for deg, t in sorted(parts.items())}

    def is_homogeneous(self, groups: Optional[Iterable[str]] = None) -> bool:
        return len(self.homogeneous_components(groups)) <= 1

    def collect(self, groups: Iterable[str]) -> Dict[Exponent, "MPoly"]:
        """按指定组的单项式归并：单项式 -> 其余变量的系数多项式"""
        slots = set(self._slots_of(groups))
        out: Dict[Exponent, Dict[Exponent, Fraction]] = {}
        for k, c in self._terms.items():
            mono = tuple(e if i in slots else 0 for i, e in enumerate(k))
            rest = tuple(0 if i in slots else e for i, e in enumerate(k))
            out.setdefault(mono, {})[rest] = c
        return {m: MPoly._raw(self.arena, t) for m, t in out.items()}

    def split_parameters(self) -> Dict[Exponent, "MPoly"]:
        """几何单项式 -> 参数系数多项式"""
        ng = self.arena.n_geometric
        out: Dict[Exponent, Dict[Exponent, Fraction]] = {}
        for k, c in self._terms.items():
            geo = k[:ng] + (0,) * (self.arena.size - ng)
            par = (0,) * ng + k[ng:]
            out.setdefault(geo, {})[par] = c
        return {m: MPoly._raw(self.arena, t) for m, t in out.items()}

    def exact_divide(self, divisor: "MPoly") -> "MPoly":
        """精确除法；不整除时抛 NotDivisibleError"""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_k, lead_c = divisor.leading_term()
        div_items = list(divisor._terms.items())
        remainder = dict(self._terms)
        quotient: Dict[Exponent, Fraction] = {}
        while remainder:
            k = max(remainder, key=_order_key)
            shift = tuple(a - b for a, b in zip(k, lead_k))
            if any(e < 0 for e in shift):
                raise NotDivisibleError(
                    f"{divisor.to_string()} does not divide {self.to_string()}"
                )
            q = remainder[k] / lead_c
            quotient[shift] = q
            for dk, dc in div_items:
                kk = tuple(map(add, shift, dk))
                v = remainder.get(kk, 0) - q * dc
                if v:
                    remainder[kk] = v
                else:
                    remainder.pop(kk, None)
        return MPoly._raw(self.arena, quotient)

    def divides(self, other: "MPoly") -> bool:
        try:
            other.exact_divide(self)
        except NotDivisibleError:
            return False
        return True

    # ========== 输出 ==========

    def _monomial_text(self, key: Exponent, latex: bool) -> str:
        factors = []
        for i, e in enumerate(key):
            if not e:
                continue
            name = self.arena.names[i]
            if latex:
                name = _latex_variable(name)
                factors.append(name if e == 1 else f"{name}^{{{e}}}")
            else:
                factors.append(name if e == 1 else f"{name}^{e}")
        return (" " if latex else "*").join(factors)

    def _render(self, latex: bool) -> str:
        if not self._terms:
            return "0"
        zero = self.arena.zero()
        parts: List[str] = []
        for idx, (k, c) in enumerate(self.terms()):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            mono = self._monomial_text(k, latex)
            if k == zero:
                body = _format_fraction(mag, latex)
            elif mag == 1:
                body = mono
            else:
                body = f"{_format_fraction(mag, latex)}{' ' if latex else '*'}{mono}"
            if idx == 0:
                parts.append(f"-{body}" if sign == "-" else body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def to_string(self) -> str:
        """确定性的文本形式 (JSON 输出使用)"""
        return self._render(latex=False)

    def to_latex(self) -> str:
        return self._render(latex=True)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"MPoly({self.to_string()})"


def _format_fraction(value: Fraction, latex: bool) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    if latex:
        return f"\\frac{{{value.numerator}}}{{{value.denominator}}}"
    return f"{value.numerator}/{value.denominator}"


def _latex_variable(name: str) -> str:
    for prefix in ("zeta", "xi", "x", "y"):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return f"{_LATEX_NAMES[prefix]}_{{{name[len(prefix):]}}}"
    return _LATEX_NAMES.get(name, name)


def parameter(arena: VariableArena, name: str) -> MPoly:
    if name not in PARAMS:
        raise UnknownVariableError(f"{name!r} is not a parameter")
    return MPoly.var(arena, name)


def random_poly(
    arena: VariableArena,
    rng: np.random.Generator,
    groups: Sequence[str] = ("x",),
    max_degree: int = 3,
    n_terms: int = 6,
    coeff_range: int = 9,
    variables: Optional[Sequence[str]] = None,
) -> MPoly:
    """随机整系数多项式 (测试与校验用)"""
    if variables is None:
        slots = [i for g in groups for i in arena.group_slots(g)]
    else:
        slots = [arena.index(v) for v in variables]
    terms: Dict[Exponent, Fraction] = {}
    for _ in range(n_terms):
        key = [0] * arena.size
        degree = int(rng.integers(0, max_degree + 1))
        for _ in range(degree):
            key[slots[int(rng.integers(0, len(slots)))]] += 1
        coeff = int(rng.integers(-coeff_range, coeff_range + 1))
        if coeff:
            k = tuple(key)
            terms[k] = terms.get(k, 0) + Fraction(coeff)
    return MPoly(arena, terms)


def random_rational(rng: np.random.Generator, bound: int = 7, denominator: int = 5) -> Fraction:
    """随机有理数，分子 [-bound*den, bound*den]，分母 [1, den]"""
    den = int(rng.integers(1, denominator + 1))
    num = int(rng.integers(-bound * den, bound * den + 1))
    return Fraction(num, den)


def monomials(arena: VariableArena, groups: Sequence[str], max_degree: int) -> List[MPoly]:
    """指定组中次数 <= max_degree 的全部单项式 (规范顺序)"""
    slots = [i for g in groups for i in arena.group_slots(g)]
    result: List[Exponent] = []

    def rec(pos: int, remaining: int, key: List[int]) -> None:
        if pos == len(slots):
            result.append(tuple(key))
            return
        for e in range(remaining + 1):
            key[slots[pos]] = e
            rec(pos + 1, remaining - e, key)
        key[slots[pos]] = 0

    rec(0, max_degree, [0] * arena.size)
    result.sort(key=_order_key)
    return [MPoly._raw(arena, {k: Fraction(1)}) for k in result]
