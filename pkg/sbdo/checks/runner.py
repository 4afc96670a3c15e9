"""
校验执行器

线程池并发执行；每个校验项的随机种子由全局种子与 id 决定，结果与并发度无关。
"""

import re
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

from loguru import logger

from ..config import Config
from .base import Check, CheckContext, CheckRegistry, CheckResult, CheckStatus, check_registry

REPORT_SCHEMA = "sbdo.report/1"


def check_seed(seed: int, check_id: str) -> int:
    return seed + zlib.crc32(check_id.encode("utf-8"))


def mentions_algebra(check: Check, algebra_id: str) -> bool:
    """id 的某一段 ("." 或 "@" 分隔) 恰为代数 id"""
    return algebra_id in re.split(r"[.@]", check.check_id)


def select_checks(
    suite: str = "all",
    include_slow: bool = False,
    algebra: Optional[str] = None,
    registry: Optional[CheckRegistry] = None,
) -> List[Check]:
    registry = registry or check_registry
    if suite != "all" and suite not in registry.suites():
        raise ValueError(f"unknown suite {suite!r}; available: {', '.join(registry.suites())}")
    if algebra is None:
        return registry.list_checks(suite, include_slow)
    # 指定代数时慢项也一并运行
    checks = [c for c in registry.list_checks(suite, True) if mentions_algebra(c, algebra)]
    if not checks:
        raise ValueError(f"suite {suite!r} has no checks for algebra {algebra!r}")
    return checks


def run_checks(
    suite: str = "all",
    config: Optional[Config] = None,
    include_slow: Optional[bool] = None,
    registry: Optional[CheckRegistry] = None,
    algebra: Optional[str] = None,
) -> List[CheckResult]:
    """运行一个 suite 的全部校验，按 id 排序返回"""
    config = config or Config()
    registry = registry or check_registry
    if include_slow is None:
        include_slow = config.include_slow
    checks = select_checks(suite, include_slow, algebra, registry)
    logger.info(f"Running {len(checks)} checks of suite {suite} with {config.threads} threads")

    def run(check: Check) -> CheckResult:
        return registry.run_one(check, CheckContext(config=config, seed=check_seed(config.seed, check.check_id)))

    if config.threads > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=config.threads, thread_name_prefix="sbdo_check_") as pool:
            results = list(pool.map(run, checks))
    else:
        results = [run(c) for c in checks]
    return sorted(results, key=lambda r: r.check_id)


def summarize(results: List[CheckResult]) -> Dict[str, Any]:
    counts = {status.value: 0 for status in CheckStatus}
    for r in results:
        counts[r.status.value] += 1
    return {
        "total": len(results),
        "counts": counts,
        "ok": all(r.passed for r in results),
        "failed": [r.check_id for r in results if not r.passed],
    }


def build_report(suite: str, results: List[CheckResult], seed: int, timing: bool = False) -> Dict[str, Any]:
    """稳定的 JSON 报告结构"""
    return {
        "schema": REPORT_SCHEMA,
        "suite": suite,
        "seed": seed,
        "summary": summarize(results),
        "checks": [r.to_dict(timing) for r in results],
    }
