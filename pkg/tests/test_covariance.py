"""
共形生成元与协变性测试
"""

from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from sbdo.covariance import (
    GroupPath,
    bracket_table,
    check_intertwine_B,
    check_intertwine_F,
    check_multiplication_operator,
    check_res_equivariance,
    generators,
    oracle_finite_difference,
    path_action,
    validate_generator,
)
from sbdo.errors import OracleMismatchError, UnsupportedAlgebraError
from sbdo.jordan import get_algebra


class TestGenerators:
    """测试生成元与群路径 oracle"""

    @pytest.mark.parametrize("algebra_id,count", [
        ("R", 3),
        ("Rpq:1,1", 6),
        ("Rpq:2,1", 10),
        ("Sym2", 8),
    ])
    def test_counts(self, algebra_id, count):
        assert len(generators(get_algebra(algebra_id), validate=False)) == count

    def test_validated_on_line(self):
        names = [g.name for g in generators(get_algebra("R"), seed=5)]
        assert names == ["translation_1", "dilation", "special_1"]

    def test_validated_on_plane(self):
        assert len(generators(get_algebra("Rpq:1,1"), seed=1, points=2)) == 6

    def test_structure_rotations_on_sym(self):
        """Sym(2,R) 上的 X(x) = Ax + xAᵀ 经 oracle 验证，乘子为零"""
        gens = generators(get_algebra("Sym2"), seed=1, points=2)
        rotations = [g for g in gens if g.path.kind == "congruence"]
        assert [g.name for g in rotations] == ["rotation_12"]
        assert rotations[0].multiplier.is_zero()

    def test_congruence_path_is_checked(self):
        algebra = get_algebra("Sym2")
        rotation = next(g for g in generators(algebra, validate=False) if g.name == "rotation_12")
        broken = replace(rotation, path=GroupPath("dilation"))
        with pytest.raises(OracleMismatchError):
            validate_generator(algebra, broken, np.random.default_rng(0))

    def test_translation_oracle(self):
        algebra = get_algebra("R")
        f = algebra.arena.var("x1") ** 2
        path = GroupPath("translation", vector=(Fraction(1),))
        value = oracle_finite_difference(algebra, path, f, [Fraction(1)], Fraction(0))
        assert abs(value + 2) < 1e-20

    def test_wrong_path_is_caught(self):
        algebra = get_algebra("R")
        translation = generators(algebra, validate=False)[0]
        broken = replace(translation, path=GroupPath("dilation"))
        with pytest.raises(OracleMismatchError):
            validate_generator(algebra, broken, np.random.default_rng(0))

    def test_unknown_path(self):
        with pytest.raises(ValueError):
            path_action(get_algebra("R"), GroupPath("shear"), [1], 0)


class TestBrackets:
    """测试李括号"""

    def test_line_table(self):
        table = bracket_table(get_algebra("R"))
        assert table[("translation_1", "dilation")] == {"translation_1": Fraction(-1)}
        assert len(table) == 3

    def test_sym_not_closed(self):
        with pytest.raises(UnsupportedAlgebraError):
            bracket_table(get_algebra("Sym2"))


class TestCovariance:
    """测试 F、B^{(k)}、res 与乘法算子的协变性"""

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:1,1"])
    def test_F(self, algebra_id):
        algebra = get_algebra(algebra_id)
        assert check_intertwine_F(algebra, generators(algebra, validate=False)).passed

    @pytest.mark.parametrize("k", [1, 2])
    def test_B_on_line(self, k):
        algebra = get_algebra("R")
        report = check_intertwine_B(algebra, k, generators(algebra, validate=False))
        assert report.passed
        assert report.operator == f"B^({k})"

    @pytest.mark.parametrize("algebra_id", ["R", "Sym2"])
    def test_res(self, algebra_id):
        algebra = get_algebra(algebra_id)
        assert check_res_equivariance(algebra, generators(algebra, validate=False)).passed

    def test_multiplication(self):
        algebra = get_algebra("Rpq:1,1")
        assert check_multiplication_operator(algebra, generators(algebra, validate=False)).passed


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
