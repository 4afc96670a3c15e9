"""
异常定义

所有库内错误都继承 SbdoError，CLI 据此区分使用错误与校验失败。
"""

from typing import Any, Dict, Optional


class SbdoError(Exception):
    """库内错误基类"""

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.detail = detail or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": type(self).__name__,
            "message": str(self),
            "detail": self.detail,
        }


# ========== 多项式层 ==========

class ArenaMismatchError(SbdoError):
    """两个多项式不属于同一变量表"""


class UnknownVariableError(SbdoError):
    """变量名不存在"""


class ParameterDifferentiationError(SbdoError):
    """试图对符号参数求导"""


class NotDivisibleError(SbdoError):
    """精确除法有余项"""


# ========== 代数层 ==========

class UnknownAlgebraError(SbdoError):
    """代数 id 无法解析"""


class SingularElementError(SbdoError):
    """元素不可逆 (det = 0)"""


class FrameError(SbdoError):
    """给定幂等元不构成 Jordan 标架"""


class NotInSpanError(SbdoError):
    """多项式不在给定子空间中"""


class UnsupportedAlgebraError(SbdoError):
    """该操作不支持此代数"""


# ========== 校验层 ==========

class IdentityError(SbdoError):
    """恒等式残差非零"""


class OracleMismatchError(SbdoError):
    """符号结果与数值 oracle 不符"""


# ========== zeta 层 ==========

class UnknownCaseError(SbdoError):
    """函数方程 case id 无法解析"""


class PoleError(SbdoError):
    """参数落在极点附近"""


class QuadratureError(SbdoError):
    """数值积分未达到容差"""
