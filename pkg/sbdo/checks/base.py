"""
校验系统 - Base

所有数学校验项的注册与执行
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from loguru import logger

from ..config import Config
from ..errors import IdentityError, SbdoError


class CheckStatus(Enum):
    """校验结果状态"""
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"
    SKIPPED = "skipped"


@dataclass
class CheckContext:
    """单个校验项的运行环境"""
    config: Config
    seed: int

    @property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass
class CheckResult:
    """校验执行结果"""
    check_id: str
    suite: str
    status: CheckStatus
    detail: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None
    execution_time_ms: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.status in (CheckStatus.PASSED, CheckStatus.SKIPPED)

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        """timing=False 时报告只依赖种子"""
        data = {
            "id": self.check_id,
            "suite": self.suite,
            "status": self.status.value,
            "detail": self.detail,
            "error": self.error,
        }
        if timing:
            data["execution_time_ms"] = self.execution_time_ms
        return data


CheckFunc = Callable[[CheckContext], Dict[str, Any]]


@dataclass
class Check:
    """校验项定义

    func 返回细节字典；失败时抛出 SbdoError 的子类。
    """
    check_id: str
    suite: str
    description: str
    func: CheckFunc
    slow: bool = False


def require(condition: bool, message: str, **detail: Any) -> None:
    """条件不成立时抛出 IdentityError"""
    if not condition:
        raise IdentityError(message, detail=detail)


class CheckRegistry:
    """校验注册表

    统一管理所有校验项
    """

    def __init__(self) -> None:
        self._checks: Dict[str, Check] = {}

    def register(self, check: Check) -> None:
        if check.check_id in self._checks:
            raise ValueError(f"duplicate check id: {check.check_id}")
        self._checks[check.check_id] = check

    def get(self, check_id: str) -> Optional[Check]:
        return self._checks.get(check_id)

    def suites(self) -> List[str]:
        return sorted({c.suite for c in self._checks.values()})

    def list_checks(self, suite: str = "all", include_slow: bool = True) -> List[Check]:
        checks = [
            c for c in self._checks.values()
            if (suite == "all" or c.suite == suite) and (include_slow or not c.slow)
        ]
        return sorted(checks, key=lambda c: c.check_id)

    def run_one(self, check: Check, context: CheckContext) -> CheckResult:
        """执行单个校验，捕获库内错误"""
        start = time.time()
        try:
            detail = check.func(context) or {}
            status, error = CheckStatus.PASSED, None
        except SbdoError as e:
            detail = e.to_dict()
            status, error = CheckStatus.FAILED, str(e)
        except Exception as e:
            logger.exception(f"Check {check.check_id} raised")
            detail = {}
            status, error = CheckStatus.ERROR, f"{type(e).__name__}: {e}"
        elapsed = int((time.time() - start) * 1000)
        logger.debug(f"Check {check.check_id}: {status.value} in {elapsed} ms")
        return CheckResult(
            check_id=check.check_id,
            suite=check.suite,
            status=status,
            detail=detail,
            error=error,
            execution_time_ms=elapsed,
        )


# 全局校验注册表
check_registry = CheckRegistry()


def register_check(check_id: str, suite: str, description: str, slow: bool = False) -> Callable[[CheckFunc], CheckFunc]:
    """校验注册装饰器

    用法:
        @register_check("jordan.frame.R", "jordan", "Jordan frame of R")
        def check_frame(ctx):
            ...
    """

    def decorator(func: CheckFunc) -> CheckFunc:
        check_registry.register(Check(check_id, suite, description, func, slow))
        return func

    return decorator
