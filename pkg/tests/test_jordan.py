"""
Jordan 代数目录测试
"""

from fractions import Fraction

import numpy as np
import pytest

from sbdo.errors import SingularElementError, UnknownAlgebraError
from sbdo.jordan import CATALOG, SpinFactor, get_algebra


class TestCatalog:
    """测试代数目录"""

    @pytest.mark.parametrize("algebra_id,n,r,d", [
        ("R", 1, 1, 1),
        ("Rpq:1,1", 2, 2, 0),
        ("Rpq:2,1", 3, 2, 1),
        ("Rpq:2,2", 4, 2, 2),
        ("Sym2", 3, 2, 1),
        ("Sym3", 6, 3, 1),
        ("spin:5", 5, 2, 3),
    ])
    def test_structure_constants(self, algebra_id, n, r, d):
        algebra = get_algebra(algebra_id)
        assert (algebra.n, algebra.r, algebra.d) == (n, r, d)
        assert algebra.dimension_formula() == n

    def test_cached_instances(self):
        assert get_algebra("Sym2") is get_algebra("Sym2")

    @pytest.mark.parametrize("bad", ["Sym4", "Rpq:3,2", "Rpq:0,2", "spin:9", "Rpq:a,b", "E6"])
    def test_unknown_ids(self, bad):
        with pytest.raises(UnknownAlgebraError):
            get_algebra(bad)

    def test_euclidean_flags(self):
        assert get_algebra("Rpq:1,2").euclidean
        assert not get_algebra("Rpq:2,1").euclidean
        assert get_algebra("Sym3").euclidean


class TestDeterminant:
    """测试行列式、伴随与逆"""

    def test_spin_determinant(self):
        algebra = get_algebra("Rpq:2,1")
        x1, x2, x3 = algebra.arena.gens("x")
        assert algebra.det_poly() == x1 * x1 + x2 * x2 - x3 * x3

    def test_sym2_determinant(self):
        algebra = get_algebra("Sym2")
        a, c, b = algebra.arena.gens("x")  # (a11, a22, a12)
        assert algebra.det_poly() == a * c - b * b

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:1,1", "Rpq:2,2", "Sym2", "Sym3"])
    def test_inverse(self, algebra_id):
        algebra = get_algebra(algebra_id)
        x = algebra.random_point(np.random.default_rng(3))
        inv = algebra.inverse(x)
        assert tuple(algebra.product(list(x), list(inv))) == algebra.unit_element()

    def test_singular_inverse(self):
        algebra = get_algebra("Rpq:1,1")
        with pytest.raises(SingularElementError):
            algebra.inverse((Fraction(1), Fraction(1)))

    def test_cartan_involution(self):
        algebra = get_algebra("Rpq:2,1")
        x1, x2, x3 = algebra.arena.gens("x")
        # α 翻转 x2..xp
        assert algebra.cartan_poly(x1 * x2 * x3) == -(x1 * x2 * x3)
        assert algebra.cartan_poly(algebra.det_poly()) == algebra.det_poly()


class TestStructure:
    """测试标架、Peirce 分解与恒等式"""

    @pytest.mark.parametrize("algebra_id", CATALOG)
    def test_frame_and_peirce(self, algebra_id):
        algebra = get_algebra(algebra_id)
        algebra.check_frame()
        peirce = algebra.peirce_data()
        if algebra.r > 1:
            assert peirce.d == algebra.d
        assert algebra.gram_is_scaled_metric()

    @pytest.mark.parametrize("algebra_id", ["Rpq:2,1", "Sym2", "Sym3"])
    def test_hua_identity(self, algebra_id):
        algebra = get_algebra(algebra_id)
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 20:
            x, y = algebra.random_point(rng), algebra.random_point(rng)
            result = algebra.hua_check(x, y)
            if result is None:
                continue
            assert result
            assert algebra.jordan_identity_holds(x, y)
            checked += 1

    def test_minors_end_with_det(self):
        algebra = get_algebra("Sym3")
        minors = algebra.minors()
        assert len(minors) == 3
        assert minors[-1] == algebra.det_poly()
        assert [m.degree(["x"]) for m in minors] == [1, 2, 3]

    def test_spin_factor_requires_both_signs(self):
        with pytest.raises(UnknownAlgebraError):
            SpinFactor(2, 0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
