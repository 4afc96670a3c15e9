"""
校验系统

导入各 suite 模块以完成注册
"""

from .base import Check, CheckContext, CheckRegistry, CheckResult, CheckStatus, check_registry, register_check, require
from .runner import REPORT_SCHEMA, build_report, check_seed, run_checks, select_checks, summarize

# 注册全部 suite
from . import algebra, analytic, operators  # noqa: F401,E402

SUITES = ("poly", "jordan", "weyl", "fischer", "bernstein", "source", "symbols", "covariance", "zeta")

__all__ = [
    "Check",
    "CheckContext",
    "CheckRegistry",
    "CheckResult",
    "CheckStatus",
    "REPORT_SCHEMA",
    "SUITES",
    "build_report",
    "check_registry",
    "check_seed",
    "register_check",
    "require",
    "run_checks",
    "select_checks",
    "summarize",
]
