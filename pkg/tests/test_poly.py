"""
精确多项式测试
"""

from fractions import Fraction

import numpy as np
import pytest

from sbdo.errors import (
    ArenaMismatchError,
    NotDivisibleError,
    ParameterDifferentiationError,
    UnknownVariableError,
)
from sbdo.poly import MPoly, arena, monomials, parameter, random_poly


class TestVariableArena:
    """测试变量表"""

    def test_slots_and_names(self):
        ar = arena(2)
        assert ar.names[:8] == ("x1", "x2", "y1", "y2", "xi1", "xi2", "zeta1", "zeta2")
        assert ar.names[8:] == ("s", "t", "lam", "mu")
        assert ar.slot("xi", 1) == 5
        assert ar.group_of(6) == "zeta"
        assert ar.is_parameter(ar.index("lam"))

    def test_shared_instance(self):
        assert arena(3) is arena(3)

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariableError):
            arena(2).index("x3")
        with pytest.raises(ValueError):
            arena(0)


class TestArithmetic:
    """测试精确运算"""

    def test_rational_coefficients(self):
        ar = arena(1)
        x = ar.var("x1")
        p = x * Fraction(1, 3) + Fraction(2, 3)
        assert (p * 3).coefficient(ar.zero()) == 2
        assert (p - p).is_zero()
        assert str(MPoly.zero(ar)) == "0"

    def test_binomial_expansion(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        expanded = (x1 + x2) ** 3
        assert expanded == x1 ** 3 + x1 ** 2 * x2 * 3 + x1 * x2 ** 2 * 3 + x2 ** 3

    def test_exact_divide(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        assert (x1 * x1 - x2 * x2).exact_divide(x1 - x2) == x1 + x2
        with pytest.raises(NotDivisibleError):
            (x1 * x1 + x2).exact_divide(x1)

    def test_arena_mismatch(self):
        with pytest.raises(ArenaMismatchError):
            arena(1).var("x1") + arena(2).var("x1")

    def test_random_poly_reproducible(self):
        a = random_poly(arena(2), np.random.default_rng(7))
        b = random_poly(arena(2), np.random.default_rng(7))
        assert a == b


class TestCalculus:
    """测试求导与代换"""

    def test_diff(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        p = x1 ** 3 * x2
        assert p.diff("x1") == x1 ** 2 * x2 * 3
        assert p.diff("x1", 2) == x1 * x2 * 6
        assert p.diff("x2", 2).is_zero()

    def test_parameters_are_not_differentiable(self):
        ar = arena(1)
        s = parameter(ar, "s")
        with pytest.raises(ParameterDifferentiationError):
            (s * ar.var("x1")).diff("s")

    def test_substitute_polynomial(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        s = parameter(ar, "s")
        p = x1 * x1 * s
        assert p.substitute({"x1": x1 + x2}) == (x1 + x2) ** 2 * s
        assert p.substitute({"s": Fraction(1, 2)}) == x1 * x1 * Fraction(1, 2)

    def test_rename_groups(self):
        ar = arena(2)
        p = ar.var("x1") * ar.var("y2")
        assert p.rename({"x": "y", "y": "x"}) == ar.var("y1") * ar.var("x2")

    def test_homogeneous_components(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        p = x1 + x1 * x2 + 1
        parts = p.homogeneous_components(["x"])
        assert sorted(parts) == [0, 1, 2]
        assert not p.is_homogeneous(["x"])
        assert (x1 * x2).is_homogeneous(["x"])

    def test_monomials(self):
        # 2 个变量、次数 <= 2 的单项式共 6 个
        assert len(monomials(arena(2), ["x"], 2)) == 6
        assert len(monomials(arena(2), ["xi", "zeta"], 2)) == 15


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
