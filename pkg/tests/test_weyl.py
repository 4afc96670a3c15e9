"""
Weyl 代数与双微分算子测试
"""

from fractions import Fraction

import pytest

from sbdo.poly import MPoly, arena, parameter
from sbdo.weyl import (
    BiDiffOp,
    TwistSlot,
    WeylOp,
    apply_twisted,
    bidiff_symbol,
    derivative_key,
    fourier_conjugate,
    full_symbol,
    lift,
    restrict,
    sharp_compose,
    symbol_convention_constant,
    symbol_sharp,
)


class TestWeylOp:
    """测试算子代数"""

    def test_canonical_commutation(self):
        ar = arena(2)
        d1 = WeylOp.partial(ar, "x1")
        x1 = WeylOp.multiplication(ar.var("x1"))
        x2 = WeylOp.multiplication(ar.var("x2"))
        assert d1.commutator(x1) == WeylOp.identity(ar)
        assert d1.commutator(x2).is_zero()

    def test_apply(self):
        ar = arena(1)
        x = ar.var("x1")
        op = WeylOp.multiplication(x) @ WeylOp.partial(ar, "x1", 2)
        assert op.apply(x ** 3) == x ** 2 * 6
        assert op.order() == 2

    def test_compose_is_associative_on_polynomials(self):
        ar = arena(1)
        x = ar.var("x1")
        a = WeylOp.partial(ar, "x1") * x
        b = WeylOp.multiplication(x * x) + WeylOp.partial(ar, "x1")
        f = x ** 4 + x
        assert (a @ b).apply(f) == a.apply(b.apply(f))

    def test_weighted_derivative_poly(self):
        ar = arena(1)
        op = WeylOp.from_derivative_poly(ar.var("x1") ** 2, weights=[Fraction(2)])
        assert op.coefficient((2, 0, 0, 0)) == MPoly.constant(ar, Fraction(1, 4))

    def test_invalid_construction(self):
        ar = arena(1)
        with pytest.raises(ValueError):
            WeylOp(ar, {(1,): MPoly.constant(ar, 1)})
        with pytest.raises(ValueError):
            WeylOp.partial(ar, "s")

    def test_to_dict(self):
        ar = arena(1)
        entries = WeylOp.partial(ar, "x1").to_dict()
        assert len(entries) == 1
        assert entries[0]["dx"] == [1]
        assert entries[0]["dy"] == [0]


class TestFourier:
    """测试 Fourier 共轭"""

    def test_anti_homomorphism(self):
        ar = arena(1)
        d = WeylOp.partial(ar, "x1")
        x = WeylOp.multiplication(ar.var("x1"))
        lhs = fourier_conjugate(d @ x)
        rhs = fourier_conjugate(x) @ fourier_conjugate(d)
        assert lhs == rhs

    def test_round_trip_with_weights(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        op = WeylOp.multiplication(x1 * x2) @ WeylOp.partial(ar, "x2", 2)
        weights = [Fraction(1), Fraction(2)]
        forward = fourier_conjugate(op, "forward", weights)
        assert forward.groups() == ("xi",)
        assert fourier_conjugate(forward, "inverse", weights) == op

    def test_unknown_direction(self):
        ar = arena(1)
        with pytest.raises(ValueError):
            fourier_conjugate(WeylOp.identity(ar), "sideways")


class TestTwisted:
    """测试带 det 幂的表达式"""

    def test_power_rule(self):
        ar = arena(1)
        x = ar.var("x1")
        s = parameter(ar, "s")
        element = lift([TwistSlot("x", x, s)], MPoly.constant(ar, 1))
        result = apply_twisted(WeylOp.partial(ar, "x1"), element)
        assert result.offsets == (-1,)
        assert result.q == s

    def test_specialize(self):
        ar = arena(1)
        x = ar.var("x1")
        element = lift([TwistSlot("x", x, parameter(ar, "s"))], x + 1)
        assert element.specialize({"s": 2}) == x ** 3 + x ** 2
        lowered = element.with_q(element.q, offsets=(-3,))
        assert lowered.specialize({"s": 2}) is None

    def test_reduce_and_equality(self):
        ar = arena(1)
        x = ar.var("x1")
        slot = TwistSlot("x", x, parameter(ar, "s"))
        a = lift([slot], x * x)
        assert a.reduce().offsets == (2,)
        assert a.reduce() == a


class TestBiDiff:
    """测试双微分算子与符号"""

    def test_restrict_and_apply(self):
        ar = arena(1)
        x, y = ar.var("x1"), ar.var("y1")
        op = WeylOp.partial(ar, "x1") @ WeylOp.partial(ar, "y1")
        assert restrict(op).apply(x * y * y) == x * 2
        assert restrict(WeylOp.multiplication(y)).coefficient((0, 0, 0, 0)) == x

    def test_rejects_fourier_derivatives(self):
        ar = arena(1)
        with pytest.raises(ValueError):
            BiDiffOp(ar, {derivative_key(ar, "xi", (1,)): MPoly.constant(ar, 1)})

    def test_symbol_of_composition(self):
        ar = arena(1)
        b = BiDiffOp(ar, {derivative_key(ar, "x", (1,)): MPoly.constant(ar, 1)})
        f = WeylOp.multiplication(ar.var("x1"))
        composed = bidiff_symbol(sharp_compose(b, f))
        assert composed == symbol_sharp(bidiff_symbol(b), full_symbol(f))
        assert composed == ar.var("x1") * ar.var("xi1") + 1

    def test_res_symbol(self):
        ar = arena(2)
        assert bidiff_symbol(BiDiffOp.res(ar)) == MPoly.constant(ar, 1)
        assert symbol_convention_constant(2) == -1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
