"""
sbdo - 对称破缺微分算子

Jordan 代数上的 Bernstein-Sato 恒等式、源算子 D/F、Rankin-Cohen 型算子 B^{(k)}，
以及 zeta 积分局部函数方程的数值核对。
"""

__version__ = "0.1.0"
__author__ = "sbdo developers"

from .config import Config
from .errors import SbdoError
from .jordan import CATALOG, JordanAlgebra, get_algebra

__all__ = ["CATALOG", "Config", "JordanAlgebra", "SbdoError", "get_algebra"]
