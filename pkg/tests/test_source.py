"""
源算子、广义 Rankin-Cohen 算子与符号测试
"""

from dataclasses import replace
from fractions import Fraction
from math import factorial

import pytest

from sbdo.errors import UnsupportedAlgebraError
from sbdo.jordan import get_algebra
from sbdo.poly import MPoly, parameter
from sbdo.source import (
    _euler_difference,
    build_B,
    build_D,
    build_F,
    classical_rc,
    classical_recovery,
    compare_spin_formulas,
    d_on_one_residual,
    expected_symbol_scalar,
    global_scalar,
    iterate_F,
    parameter_shift,
    specialize,
    spin_F_formula,
    symbol_ck,
    symbol_ck_direct,
    symbol_recurrence_residual,
    symbol_theorem_check,
    verify_D,
)
from sbdo.weyl import BiDiffOp, WeylOp


class TestSourceOperator:
    """测试 D_{s,t}"""

    def test_line_identity(self):
        algebra = get_algebra("R")
        assert verify_D(algebra, 3) == 10
        assert d_on_one_residual(algebra).is_zero()

    def test_sym2_on_one(self):
        assert d_on_one_residual(get_algebra("Sym2")).is_zero()

    def test_parameter_shift(self):
        assert parameter_shift(get_algebra("R")) == 0
        assert parameter_shift(get_algebra("Sym2")) == Fraction(1, 2)
        assert parameter_shift(get_algebra("Rpq:2,1")) == Fraction(1, 2)

    def test_spin_formulas(self):
        comparison = compare_spin_formulas(get_algebra("Rpq:1,1"))
        assert comparison.passed
        assert comparison.D_matches
        assert comparison.F_scalar == comparison.B1_scalar

    @pytest.mark.parametrize("algebra_id", ["Rpq:1,1", "Rpq:2,1"])
    def test_spin_F_mu_term_uses_y_derivative(self, algebra_id):
        """显式 F 的 μ 项取 ∂y_j 时与 F 成比例 (常数 -1)，换成 ∂x_j 则不成比例"""
        algebra = get_algebra(algebra_id)
        assert compare_spin_formulas(algebra).F_scalar == -1
        p_dx = WeylOp.from_derivative_poly(algebra.det_poly("x"), "x", "x")
        half = Fraction(algebra.n, 2) - 1
        fm = (-parameter(algebra.arena, "mu") + half) * 4
        swapped = (
            spin_F_formula(algebra)
            - _euler_difference(algebra, "y", "x", "y").compose(p_dx).scale(fm)
            + _euler_difference(algebra, "y", "x", "x").compose(p_dx).scale(fm)
        )
        assert global_scalar(build_F(algebra), swapped) is None

    def test_spin_formulas_need_spin_factor(self):
        with pytest.raises(UnsupportedAlgebraError):
            compare_spin_formulas(get_algebra("Sym2"))

    def test_spin_id_builds(self):
        assert not build_D(get_algebra("spin:3")).is_zero()


class TestRankinCohen:
    """测试 B^{(k)}"""

    def test_zero_order_is_restriction(self):
        algebra = get_algebra("R")
        assert build_B(algebra, 0).B == BiDiffOp.res(algebra.arena)
        with pytest.raises(ValueError):
            iterate_F(algebra, -1)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_classical_recovery(self, k):
        assert classical_recovery(get_algebra("R"), k) == factorial(k)

    def test_classical_needs_line(self):
        with pytest.raises(UnsupportedAlgebraError):
            classical_rc(get_algebra("Sym2"), 1, 1, 1)

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:1,1", "Rpq:2,1"])
    def test_constant_coefficients(self, algebra_id):
        assert build_B(get_algebra(algebra_id), 1).constant_coefficient

    def test_specialized_first_bracket(self):
        algebra = get_algebra("R")
        b = specialize(build_B(algebra, 1).B, Fraction(2), Fraction(3))
        assert len(b) == 2
        assert all(c.is_constant() for _, c in b.items())


class TestSymbols:
    """测试符号多项式"""

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:1,1"])
    @pytest.mark.parametrize("k", [1, 2])
    def test_recursion_matches_direct(self, algebra_id, k):
        algebra = get_algebra(algebra_id)
        assert symbol_ck(algebra, k) == symbol_ck_direct(algebra, k)
        assert symbol_recurrence_residual(algebra, k).is_zero()

    @pytest.mark.parametrize("algebra_id", ["R", "Rpq:2,1"])
    def test_symbol_theorem(self, algebra_id):
        check = symbol_theorem_check(get_algebra(algebra_id), 1)
        assert check.passed
        assert check.residual == MPoly.zero(check.residual.arena)

    @pytest.mark.parametrize("algebra_id", ["Rpq:1,1", "Rpq:2,1"])
    def test_symbol_theorem_second_order(self, algebra_id):
        """k = 2、λ,μ 保持符号：常数等于 F 常数平方乘约定常数"""
        algebra = get_algebra(algebra_id)
        check = symbol_theorem_check(algebra, 2)
        assert check.passed
        assert check.expected_scalar == expected_symbol_scalar(algebra, 2) == Fraction(1)
        assert check.scalar == check.expected_scalar

    def test_expected_scalar_only_on_spin(self):
        assert expected_symbol_scalar(get_algebra("R"), 1) is None
        assert expected_symbol_scalar(get_algebra("Rpq:1,1"), 1) == Fraction(1)

    def test_scalar_mismatch_fails(self):
        check = symbol_theorem_check(get_algebra("Rpq:1,1"), 1)
        wrong = replace(check, expected_scalar=Fraction(-1))
        assert not wrong.passed
        assert wrong.to_dict()["expected_scalar"] is not None

    def test_symbol_theorem_at_integer_weights(self):
        check = symbol_theorem_check(get_algebra("R"), 2, Fraction(3), Fraction(4))
        assert check.passed


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
