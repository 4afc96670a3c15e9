"""
局部函数方程与 zeta 积分测试
"""

import cmath

import numpy as np
import pytest

from sbdo.config import Config
from sbdo.errors import PoleError, UnknownCaseError, UnsupportedAlgebraError
from sbdo.jordan import get_algebra
from sbdo.zeta import (
    FS_FAST_RANK,
    FS_REPRESENTATIVES,
    CylinderGeometry,
    TestFunction,
    ZetaGeometry,
    euclidean_case,
    euclidean_case_id,
    even_odd,
    fe_case,
    fe_check,
    fe_matrix,
    fourier_eigen_residual,
    fs_identity_check,
    fs_rank_tolerance,
    fs_representatives,
    gamma_Omega,
    gamma_V,
    gelfand_shilov_check,
    orbit_check,
    resolve_case,
    zeta_geometry,
)

LINE_TOLERANCE = 1e-6

# 全部 Faraut-Satake 代表；高秩代表走慢测试
FS_PARAMS = [
    pytest.param(case_id, r, d, id=f"{case_id}-r{r}-d{d}",
                 marks=[pytest.mark.slow] if r > FS_FAST_RANK else [])
    for case_id, reps in FS_REPRESENTATIVES.items()
    for r, d in reps
]


class TestCases:
    """测试 case 选择与校验"""

    @pytest.mark.parametrize("r,d,case_id", [
        (2, 1, "eucl_b1"),
        (2, 3, "eucl_b3"),
        (2, 2, "eucl_a'"),
        (2, 4, "eucl_a"),
        (3, 1, "eucl_c3"),
        (1, 1, "eucl_c1"),
        (4, 1, "eucl_c0"),
        (3, 2, "eucl_a"),
    ])
    def test_euclidean_case_id(self, r, d, case_id):
        assert euclidean_case_id(r, d) == case_id

    def test_no_such_algebra(self):
        with pytest.raises(UnknownCaseError):
            euclidean_case_id(3, 3)

    def test_validation(self):
        with pytest.raises(UnknownCaseError):
            fe_case("eucl_zz", n=3, r=2, d=1)
        with pytest.raises(UnknownCaseError):
            euclidean_case(3, 1, "eucl_b1")
        with pytest.raises(UnknownCaseError):
            fe_case("Rpq", n=3, r=2, d=1, p=1, q=1)
        with pytest.raises(UnknownCaseError):
            fe_case("typeII_scalar", n=4, r=2, d=2, r_plus=2, epsilon=0)

    def test_resolve(self):
        assert resolve_case("Sym2").case_id == "eucl_b1"
        assert resolve_case("Rpq:1,1").kernel == "exp"
        assert resolve_case("spin:3").case_id == "eucl_b1"
        forced = resolve_case("eucl_c2@Sym2")
        assert forced.case_id == "eucl_c2"
        assert forced.algebra_id == "Sym2"

    def test_basis_and_size(self):
        assert euclidean_case(3, 1).basis == "eo"
        assert euclidean_case(2, 1).basis == "pm"
        assert fe_case("typeIIIIV_scalar", n=4, r=2, d=2, r_plus=1).size == 1


class TestGamma:
    """测试 gamma 因子与系数矩阵"""

    def test_poles_are_infinite(self):
        assert cmath.isinf(gamma_V(1, 1, 0, 0))
        assert cmath.isinf(gamma_Omega(1, 1, 0, -1))
        assert abs(gamma_Omega(1, 1, 0, 3) - 2) < 1e-12

    def test_matrix_shape(self):
        prefactor, matrix = fe_matrix(euclidean_case(2, 4), 0.3 + 0.1j)
        assert matrix.shape == (2, 2)
        assert np.all(np.isfinite(matrix)) and cmath.isfinite(prefactor)

    def test_coefficient_identity(self):
        assert fs_identity_check(euclidean_case(2, 1, "eucl_b1"))["holds"]
        assert fs_identity_check(euclidean_case(2, 2, "eucl_a'"))["holds"]

    @pytest.mark.parametrize("case_id,r,d", FS_PARAMS)
    def test_every_representative(self, case_id, r, d):
        """每个代表的系数恒等式都在其秩对应的容差内成立"""
        report = fs_identity_check(euclidean_case(r, d, case_id), seed=3)
        assert report["holds"], report
        assert report["tolerance"] == fs_rank_tolerance(Config().zeta.fs_tolerance, r)

    def test_representative_tiers(self):
        for case_id, reps in FS_REPRESENTATIVES.items():
            fast = fs_representatives(case_id)
            slow = fs_representatives(case_id, high_rank=True)
            assert sorted(fast + slow) == sorted(reps)
            assert all(r <= FS_FAST_RANK for r, _ in fast)
            assert all(r > FS_FAST_RANK for r, _ in slow)
        assert fs_representatives("eucl_c2", high_rank=True) == ((6, 1),)

    def test_rank_tolerance(self):
        assert fs_rank_tolerance(1e-12, 4) == 1e-12
        assert fs_rank_tolerance(1e-12, 6) == pytest.approx(216e-12)

    def test_defaults_follow_config(self, monkeypatch):
        """样本数与容差默认取自配置"""
        monkeypatch.setenv("SBDO_ZETA__FS_TOLERANCE", "1e-9")
        report = fs_identity_check(euclidean_case(2, 1, "eucl_b1"), samples=2)
        assert report["tolerance"] == 1e-9

    def test_displayed_form_differs(self):
        report = fs_identity_check(euclidean_case(2, 2, "eucl_a'"), displayed=True)
        assert not report["holds"]


class TestTestFunction:
    """测试 Hermite 试验函数"""

    def test_parse(self):
        f = TestFunction.parse("h0, h2")
        assert f.indices == (0, 2)
        assert f.label == "h0,h2"
        assert TestFunction.uniform(1, 3).indices == (1, 1, 1)
        with pytest.raises(ValueError):
            TestFunction.parse("hx")

    def test_eigenvalues(self):
        assert TestFunction((1, 1)).fourier_eigenvalue() == -1
        assert abs(TestFunction((0,)).fourier_eigenvalue("exp") - np.sqrt(2 * np.pi)) < 1e-12

    @pytest.mark.parametrize("kernel", ["2pi", "exp"])
    def test_fourier_eigenfunction(self, kernel):
        assert fourier_eigen_residual(2, kernel) < 1e-8


class TestZetaIntegrals:
    """测试数值 zeta 积分"""

    def test_orbits(self):
        assert orbit_check(TestFunction.parse("h2"), 0.7)["residual"] < LINE_TOLERANCE

    def test_even_odd_needs_rank_one(self):
        assert even_odd(3, 1, 1) == (2, 1)
        with pytest.raises(UnsupportedAlgebraError):
            even_odd(3, 1, 2)

    def test_gelfand_shilov(self):
        """求积的 Z_± 与球面符号积分的拆分一致"""
        report = gelfand_shilov_check(get_algebra("Rpq:1,1"), 0.4)
        assert report["residual"] < 1e-4
        # 光锥上两个符号区域体积相同，Z_- 消失
        assert abs(report["Z_minus"]["re"]) < 1e-4
        assert report["P_plus"]["re"] == pytest.approx(report["P_minus"]["re"])
        with pytest.raises(UnsupportedAlgebraError):
            gelfand_shilov_check(get_algebra("R"), 0.4)

    @pytest.mark.slow
    def test_gelfand_shilov_space(self):
        report = gelfand_shilov_check(get_algebra("Rpq:2,1"), 0.3)
        assert report["residual"] < 1e-3
        assert report["P_plus"]["re"] != pytest.approx(report["P_minus"]["re"])

    def test_abstract_geometry(self):
        with pytest.raises(TypeError):
            ZetaGeometry("V", 1, 1, (), 0, (), 1.0, ())
        with pytest.raises(ValueError):
            CylinderGeometry("V", 3, 2, (), 0, (), 1.0, ())

    def test_unsupported_geometry(self):
        with pytest.raises(UnsupportedAlgebraError):
            zeta_geometry(get_algebra("Rpq:2,2"))

    def test_line_functional_equation(self):
        result = fe_check(resolve_case("R"), TestFunction.parse("h0"), 0.7)
        assert result.residual < LINE_TOLERANCE

    def test_ladder_depth(self):
        result = fe_check(resolve_case("R"), TestFunction.parse("h0"), 0.3)
        assert result.ladder_depth == 2
        assert result.residual < LINE_TOLERANCE

    @pytest.mark.parametrize("case_text,label,s", [
        ("R", "h0", -1.0),
        ("R", "h0", -0.02),
        ("Rpq:1,1", "h0,h0", -1.98),
    ])
    def test_poles_refused(self, case_text, label, s):
        with pytest.raises(PoleError):
            fe_check(resolve_case(case_text), TestFunction.parse(label), s)

    def test_plane_functional_equation(self):
        result = fe_check(resolve_case("Rpq:1,1"), TestFunction.parse("h0,h0"), 0.4)
        assert result.residual < 1e-4


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
