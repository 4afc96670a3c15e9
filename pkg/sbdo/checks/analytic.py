"""
解析层校验：zeta 积分与局部函数方程
"""

from typing import Any, Dict, Tuple

import numpy as np

from ..errors import PoleError
from ..jordan import get_algebra
from ..zeta import (
    FS_REPRESENTATIVES,
    TestFunction,
    euclidean_case,
    fe_case,
    fe_check,
    fe_matrix,
    fourier_eigen_residual,
    fs_identity_check,
    fs_rank_tolerance,
    fs_representatives,
    gelfand_shilov_check,
    ladder_overlap_residual,
    orbit_check,
    resolve_case,
    zeta_geometry,
)
from .base import CheckContext, register_check, require

EIGEN_TOLERANCE = 1e-8
MATRIX_POINT = 0.3 + 0.1j

# (case 文本, 试验函数, 容差字段, 采样字段, slow)
FE_TARGETS: Tuple[Tuple[str, Tuple[str, ...], str, str, bool], ...] = (
    ("R", ("h0", "h2"), "line_tolerance", "line_points", False),
    ("Rpq:1,1", ("h0,h0", "h2,h1"), "plane_tolerance", "plane_points", False),
    ("Rpq:2,1", ("h0,h0,h0",), "space_tolerance", "space_points", True),
    ("eucl_c2@Sym2", ("h0,h0,h0",), "space_tolerance", "plane_points", True),
)


# ========== 系数恒等式 ==========


def _register_fs(case_id: str, high_rank: bool) -> None:
    reps = fs_representatives(case_id, high_rank)
    if not reps:
        return
    check_id = f"zeta.fs_identity.{case_id}" + (".high_rank" if high_rank else "")

    @register_check(check_id, "zeta", f"Faraut-Satake coefficients reproduce the {case_id} matrices"
                    + (" at rank > 4" if high_rank else ""), slow=high_rank)
    def check_fs(ctx: CheckContext) -> Dict[str, Any]:
        cfg = ctx.config.zeta
        reports = []
        for r, d in reps:
            case = euclidean_case(r, d, case_id)
            tolerance = fs_rank_tolerance(cfg.fs_tolerance, r)
            report = fs_identity_check(case, cfg.fs_samples, ctx.seed, tolerance=tolerance)
            require(report["holds"], f"{case_id} fails for r={r}, d={d}", report=report)
            report["displayed_residual"] = fs_identity_check(
                case, cfg.fs_samples, ctx.seed, displayed=True, tolerance=tolerance
            )["max_residual"]
            reports.append(report)
        return {"reports": reports}


for _case_id in FS_REPRESENTATIVES:
    _register_fs(_case_id, high_rank=False)
    _register_fs(_case_id, high_rank=True)


@register_check("zeta.matrices", "zeta", "every functional equation case yields a finite matrix of the right size")
def check_matrices(ctx: CheckContext) -> Dict[str, Any]:
    cases = [
        fe_case("typeII_scalar", n=4, r=2, d=2, r_plus=2, epsilon=1),
        fe_case("typeII_scalar", n=4, r=2, d=2, r_plus=2, epsilon=-1),
        fe_case("typeIIIIV_scalar", n=4, r=2, d=2, r_plus=1),
        resolve_case("Rpq:2,1"),
    ]
    cases.extend(euclidean_case(*FS_REPRESENTATIVES[c][0], c) for c in FS_REPRESENTATIVES)
    sizes = {}
    for case in cases:
        prefactor, matrix = fe_matrix(case, MATRIX_POINT)
        require(matrix.shape == (case.size, case.size), f"{case.case_id} matrix has shape {matrix.shape}")
        require(bool(np.all(np.isfinite(matrix))) and np.isfinite(prefactor), f"{case.case_id} is not finite at s={MATRIX_POINT}")
        sizes[case.case_id] = case.size
    return {"sizes": sizes}


# ========== 试验函数与轨道 ==========


@register_check("zeta.fourier_eigenfunctions", "zeta", "Hermite functions are Fourier eigenfunctions for both kernels")
def check_eigenfunctions(ctx: CheckContext) -> Dict[str, Any]:
    residuals = {}
    for kernel in ("2pi", "exp"):
        for k in range(4):
            residual = fourier_eigen_residual(k, kernel)
            require(residual < EIGEN_TOLERANCE, f"h{k} is not an eigenfunction for the {kernel} kernel", residual=residual)
            residuals[f"{kernel}.h{k}"] = residual
    return residuals


@register_check("zeta.orbits.R", "zeta", "Z_± on R against the two orbit integrals")
def check_orbits(ctx: CheckContext) -> Dict[str, Any]:
    cfg = ctx.config.zeta
    reports = []
    for label in ("h0", "h2", "h1"):
        for s in cfg.line_points:
            report = orbit_check(TestFunction.parse(label), s)
            require(report["residual"] < cfg.line_tolerance, f"orbit decomposition fails for {label} at s={s}", report=report)
            reports.append(report)
    return {"reports": reports}


def _register_gs(algebra_id: str, tolerance_field: str, points_field: str, slow: bool) -> None:
    @register_check(f"zeta.gelfand_shilov.{algebra_id}", "zeta",
                    f"quadrature Z_± against the P_+^s ± P_-^s split on {algebra_id}", slow=slow)
    def check_gs(ctx: CheckContext) -> Dict[str, Any]:
        cfg = ctx.config.zeta
        algebra = get_algebra(algebra_id)
        tolerance = getattr(cfg, tolerance_field)
        reports = []
        for s in getattr(cfg, points_field):
            report = gelfand_shilov_check(algebra, s)
            require(report["residual"] < tolerance, f"Z_± disagree with P_+ ± P_- at s={s}", report=report)
            reports.append(report)
        return {"reports": reports}


for _algebra_id, _tolerance, _points, _slow in (
    ("Rpq:1,1", "plane_tolerance", "plane_points", False),
    ("Rpq:2,1", "space_tolerance", "space_points", True),
):
    _register_gs(_algebra_id, _tolerance, _points, _slow)


# ========== 阶梯与函数方程 ==========


def _register_ladder(algebra_id: str, tolerance_field: str, slow: bool) -> None:
    @register_check(f"zeta.ladder.{algebra_id}", "zeta",
                    f"one Bernstein ladder step agrees with direct quadrature on {algebra_id}", slow=slow)
    def check_ladder(ctx: CheckContext) -> Dict[str, Any]:
        geometry = zeta_geometry(get_algebra(algebra_id))
        tolerance = getattr(ctx.config.zeta, tolerance_field)
        residuals = {}
        for eps in (1, -1):
            residual = ladder_overlap_residual(geometry, eps)
            require(residual < tolerance, f"ladder step fails for epsilon={eps:+d}", residual=residual)
            residuals[f"{eps:+d}"] = residual
        return residuals


_register_ladder("R", "line_tolerance", False)
_register_ladder("Rpq:1,1", "plane_tolerance", False)
_register_ladder("Rpq:2,1", "space_tolerance", True)
_register_ladder("Sym2", "space_tolerance", True)


def _register_fe(case_text: str, label: str, tolerance_field: str, points_field: str, slow: bool) -> None:
    @register_check(f"zeta.fe.{case_text}.{label}", "zeta",
                    f"local functional equation for {case_text} with f = {label}", slow=slow)
    def check_fe(ctx: CheckContext) -> Dict[str, Any]:
        case = resolve_case(case_text)
        f = TestFunction.parse(label)
        tolerance = getattr(ctx.config.zeta, tolerance_field)
        results = []
        for s in getattr(ctx.config.zeta, points_field):
            result = fe_check(case, f, s)
            require(result.residual < tolerance, f"functional equation fails at s={s}", result=result.to_dict())
            results.append(result.to_dict())
        return {"results": results}


for _case_text, _labels, _tol, _points, _slow in FE_TARGETS:
    for _label in _labels:
        _register_fe(_case_text, _label, _tol, _points, _slow)


@register_check("zeta.poles", "zeta", "arguments on the Bernstein poles are refused")
def check_poles(ctx: CheckContext) -> Dict[str, Any]:
    refused = []
    for case_text, label, s in (("R", "h0", -1.0), ("R", "h0", -0.02), ("Rpq:1,1", "h0,h0", -1.98)):
        try:
            fe_check(resolve_case(case_text), TestFunction.parse(label), s)
        except PoleError as e:
            refused.append(str(e))
            continue
        require(False, f"s={s} on {case_text} was not refused")
    return {"refused": refused}
