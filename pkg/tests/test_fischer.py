"""
Fischer 演算测试
"""

from fractions import Fraction

import pytest

from sbdo.errors import NotInSpanError
from sbdo.fischer import (
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
from sbdo.jordan import get_algebra
from sbdo.poly import MPoly, arena


class TestFischerPair:
    """测试内积"""

    def test_monomials_orthogonal(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        assert fischer_pair(x1 ** 2, x1 ** 2).value == 2
        assert fischer_pair(x1 ** 2, x1 * x2).is_zero()

    def test_weighted(self):
        ar = arena(2)
        x1, _ = ar.gens("x")
        assert fischer_pair(x1 ** 2, x1 ** 2, [Fraction(2), Fraction(1)]).value == Fraction(1, 2)

    def test_adjunction_with_derivative(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        p, q = x1 * x2, x1 ** 2 * x2 + x2 ** 3
        origin = {"x1": 0, "x2": 0}
        assert fischer_pair(p, q).value == apply_derivative(p, q).evaluate(origin).value


class TestTranslateSpan:
    """测试 R(p) 与对偶基"""

    def test_dims(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        pair = translate_span(x1 * x2)
        assert pair.dims() == [1, 2, 1]
        assert biorthogonal(pair)
        assert graded_orthogonality_defects(pair) == []

    def test_rejects_inhomogeneous(self):
        ar = arena(1)
        with pytest.raises(ValueError):
            translate_span(ar.var("x1") ** 2 + 1)

    def test_not_in_span(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        pair = translate_span(x1 * x2)
        assert pair.contains(x1 + x2 * 3)
        assert not pair.contains(x1 ** 2)
        with pytest.raises(NotInSpanError):
            pair.coordinates(x1 ** 2)

    def test_taylor(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        y1, y2 = ar.gens("y")
        p = x1 ** 2 * x2
        expanded = sum((b * breve for b, breve in taylor_expand(p)), MPoly.zero(ar))
        assert expanded == p.substitute({"x1": x1 + y1, "x2": x2 + y2})

    def test_leibniz(self):
        ar = arena(2)
        x1, x2 = ar.gens("x")
        p = x1 ** 2 + x2 ** 2
        f, g = x1 ** 3 + x2, x1 * x2 ** 2
        assert leibniz_expand(p, f, g) == apply_derivative(p, f * g)


class TestWModule:
    """测试 W = R(det)"""

    @pytest.mark.parametrize("algebra_id,dims", [
        ("R", [1, 1]),
        ("Rpq:1,1", [1, 2, 1]),
        ("Sym2", [1, 3, 1]),
    ])
    def test_dims(self, algebra_id, dims):
        assert w_module(get_algebra(algebra_id)).dims() == dims

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:2,1", "Sym2"])
    def test_difference_expansion(self, algebra_id):
        algebra = get_algebra(algebra_id)
        ar = algebra.arena
        shifted = algebra.substitute_vector(
            algebra.det_poly("x"), [a - b for a, b in zip(ar.gens("x"), ar.gens("y"))]
        )
        assert reconstruct_difference(algebra) == shifted

    def test_minors(self):
        assert all(minors_in_w(get_algebra("Sym2")))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
