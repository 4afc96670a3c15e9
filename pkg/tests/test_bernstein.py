"""
Bernstein-Sato 恒等式与 c_{s,t} 测试
"""

from fractions import Fraction

import numpy as np
import pytest

from sbdo.bernstein import (
    bernstein_b,
    bs_all,
    bs_apply,
    bs_roots,
    c_poly,
    double_sharp_scalar,
    sharp,
    swap_xy,
    verify_c_poly,
    verify_sharp,
    zeta_bernstein_roots,
)
from sbdo.errors import NotInSpanError
from sbdo.jordan import get_algebra
from sbdo.poly import MPoly, parameter


class TestSharp:
    """测试 p♯"""

    def test_linear_on_line(self):
        algebra = get_algebra("R")
        assert sharp(algebra, algebra.arena.var("x1")) == MPoly.constant(algebra.arena, 1)

    def test_det_is_involutive(self):
        algebra = get_algebra("Sym2")
        assert double_sharp_scalar(algebra, algebra.det_poly("x")) == 1

    def test_agrees_with_inverse(self):
        algebra = get_algebra("Rpq:2,1")
        p = algebra.arena.var("x2")
        assert verify_sharp(algebra, p, sharp(algebra, p), np.random.default_rng(3), points=10)

    def test_outside_w(self):
        algebra = get_algebra("R")
        with pytest.raises(NotInSpanError):
            sharp(algebra, algebra.arena.var("x1") ** 2)


class TestIdentity:
    """测试 p(∂) det^{λ+1}"""

    @pytest.mark.parametrize("algebra_id,roots", [
        ("R", [Fraction(-1)]),
        ("Sym2", [Fraction(-3, 2), Fraction(-1)]),
        ("Rpq:2,1", [Fraction(-3, 2), Fraction(-1)]),
    ])
    def test_roots(self, algebra_id, roots):
        algebra = get_algebra(algebra_id)
        assert bs_roots(algebra) == roots
        assert zeta_bernstein_roots(algebra) == roots

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:1,1", "Rpq:2,1", "Sym2"])
    def test_all_basis_elements(self, algebra_id):
        certs = bs_all(get_algebra(algebra_id))
        assert certs and all(c.holds for c in certs)

    def test_euclidean_needs_no_twist(self):
        assert all(c.literal_holds for c in bs_all(get_algebra("Sym2")))

    def test_trace_scale(self):
        algebra = get_algebra("Rpq:1,1")
        lam = parameter(algebra.arena, "lam")
        assert bernstein_b(algebra, 1) == (lam + 1) * 2
        cert = bs_apply(algebra, algebra.det_poly("x"))
        assert cert.scale == 4

    @pytest.mark.slow
    def test_sym3_roots(self):
        assert bs_roots(get_algebra("Sym3")) == [Fraction(-2), Fraction(-3, 2), Fraction(-1)]


class TestCPoly:
    """测试 det(∂x-∂y) det(x)^{s+1} det(y)^{t+1}"""

    def test_line_closed_form(self):
        algebra = get_algebra("R")
        ar = algebra.arena
        s, t = parameter(ar, "s"), parameter(ar, "t")
        expected = (s + 1) * ar.var("y1") - (t + 1) * ar.var("x1")
        assert c_poly(algebra) == expected

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:1,1", "Sym2"])
    def test_direct_expansion(self, algebra_id):
        assert verify_c_poly(get_algebra(algebra_id))

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:2,1", "Sym2"])
    def test_swap_symmetry(self, algebra_id):
        algebra = get_algebra(algebra_id)
        c = c_poly(algebra)
        assert swap_xy(c) == c * (-1) ** algebra.r


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
