"""
Configuration management

Type-safe configuration using Pydantic
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml
from loguru import logger
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LoggingConfig(BaseModel):
    """日志配置"""
    console_level: str = "ERROR"
    file: Optional[str] = "/tmp/sbdo-debug.log"
    rotation: str = "10 MB"
    retention: str = "3 days"


class SymbolicConfig(BaseModel):
    """符号计算配置"""
    degree_cap: int = 4  # verify_D 检查的最高单项式次数
    sharp_samples: int = 30  # verify_sharp 的随机点数


class CovarianceConfig(BaseModel):
    """群作用数值 oracle"""
    oracle_tolerance: float = 1e-9
    oracle_dps: int = 30
    generator_samples: int = 3


class ZetaConfig(BaseModel):
    """Zeta 积分数值验证"""
    fs_samples: int = 10
    fs_tolerance: float = 1e-12
    line_tolerance: float = 1e-6
    plane_tolerance: float = 1e-4
    space_tolerance: float = 1e-3
    ladder_tolerance: float = 1e-7  # 求值时阶梯一致性的门槛
    line_points: List[float] = [0.3, 0.7, 1.2]
    plane_points: List[float] = [0.4, 0.9]
    space_points: List[float] = [0.3]


class Config(BaseSettings):
    """sbdo main configuration"""

    model_config = SettingsConfigDict(env_prefix="SBDO_", env_nested_delimiter="__")

    name: str = "sbdo"
    debug: bool = False
    threads: int = Field(default=4, ge=1, le=64)
    seed: int = 20240501
    include_slow: bool = False
    output_format: str = "text"  # text, json, latex

    logging: LoggingConfig = LoggingConfig()
    symbolic: SymbolicConfig = SymbolicConfig()
    covariance: CovarianceConfig = CovarianceConfig()
    zeta: ZetaConfig = ZetaConfig()

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> "Config":
        """Load configuration from file

        Args:
            config_path: Path to config file, defaults to config/config.yaml

        Returns:
            Config instance
        """
        if config_path is None:
            paths = [
                Path("config/config.yaml"),
                Path("sbdo.yaml"),
                Path.home() / ".sbdo/config.yaml",
            ]
            for path in paths:
                if path.exists():
                    config_path = str(path)
                    break

        if config_path and Path(config_path).exists():
            try:
                with open(config_path, "r", encoding="utf-8") as f:
                    data = yaml.safe_load(f) or {}
                data, fixes = ConfigValidator.auto_fix(data)
                for fix in fixes:
                    logger.info(f"  - {fix}")
                return cls(**data)
            except Exception as e:
                logger.error(f"Failed to load config from {config_path}: {e}")
                logger.info("Using default configuration")
                return cls()

        logger.info("No config file found, using default configuration")
        return cls()

    def save(self, config_path: str = "config/config.yaml") -> None:
        """Save configuration to file"""
        Path(config_path).parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, "w", encoding="utf-8") as f:
            yaml.dump(self.model_dump(), f, allow_unicode=True, sort_keys=False)


class ConfigValidator:
    """配置验证器 - 验证和修复配置问题"""

    OUTPUT_FORMATS = ("text", "json", "latex")

    @staticmethod
    def validate(config: Dict[str, Any]) -> Tuple[bool, List[str]]:
        """验证配置字典

        Returns:
            (是否有效, 错误信息列表)
        """
        errors: List[str] = []
        if not isinstance(config, dict):
            return False, ["Config must be a dictionary"]

        fmt = config.get("output_format", "text")
        if fmt not in ConfigValidator.OUTPUT_FORMATS:
            errors.append(f"Invalid output_format: {fmt}. Must be one of {list(ConfigValidator.OUTPUT_FORMATS)}")

        threads = config.get("threads")
        if threads is not None and (not isinstance(threads, int) or threads < 1):
            errors.append(f"threads must be a positive integer, got {threads!r}")

        zeta = config.get("zeta", {})
        if not isinstance(zeta, dict):
            errors.append("zeta config must be a dictionary")
        else:
            for key in ("fs_tolerance", "line_tolerance", "plane_tolerance", "space_tolerance"):
                value = zeta.get(key)
                if value is not None and (not isinstance(value, (int, float)) or value <= 0):
                    errors.append(f"zeta.{key} must be a positive number")

        return len(errors) == 0, errors

    @staticmethod
    def auto_fix(config: Dict[str, Any]) -> Tuple[Dict[str, Any], List[str]]:
        """修复常见问题，返回 (修复后的配置, 修复说明)"""
        fixed = dict(config)
        fixes: List[str] = []

        threads = fixed.get("threads")
        if threads is not None:
            try:
                value = int(threads)
                if value < 1 or value > 64:
                    fixed["threads"] = max(1, min(64, value))
                    fixes.append(f"Clamped threads to valid range: {fixed['threads']}")
            except (ValueError, TypeError):
                fixed["threads"] = 4
                fixes.append("Fixed invalid threads, set to default 4")

        fmt = fixed.get("output_format")
        if fmt is not None and fmt not in ConfigValidator.OUTPUT_FORMATS:
            fixed["output_format"] = "text"
            fixes.append(f"Unknown output_format {fmt!r}, set to text")

        if fixes:
            logger.info(f"Config auto-fix applied {len(fixes)} fixes")
        return fixed, fixes
