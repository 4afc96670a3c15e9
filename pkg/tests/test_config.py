"""
配置测试
"""

import numpy as np
import pytest
import yaml
from pydantic import ValidationError

from sbdo.bernstein import verify_sharp
from sbdo.config import Config, ConfigValidator
from sbdo.covariance import generators, validate_generator
from sbdo.errors import OracleMismatchError
from sbdo.jordan import get_algebra
from sbdo.poly import MPoly
from sbdo.source import verify_D


class TestConfig:
    """测试配置加载"""

    def test_defaults(self):
        cfg = Config()
        assert cfg.threads == 4
        assert cfg.symbolic.degree_cap == 4
        assert cfg.zeta.line_points == [0.3, 0.7, 1.2]
        assert cfg.covariance.oracle_dps == 30

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("SBDO_THREADS", "8")
        monkeypatch.setenv("SBDO_ZETA__LINE_TOLERANCE", "1e-7")
        cfg = Config()
        assert cfg.threads == 8
        assert cfg.zeta.line_tolerance == 1e-7

    def test_thread_bounds(self):
        with pytest.raises(ValidationError):
            Config(threads=0)

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "sbdo.yaml"
        cfg = Config(seed=7, include_slow=True)
        cfg.save(str(path))
        loaded = Config.load(str(path))
        assert loaded.seed == 7
        assert loaded.include_slow

    def test_load_fixes_threads(self, tmp_path):
        path = tmp_path / "sbdo.yaml"
        path.write_text(yaml.safe_dump({"threads": 200, "output_format": "html"}), encoding="utf-8")
        loaded = Config.load(str(path))
        assert loaded.threads == 64
        assert loaded.output_format == "text"

    def test_missing_file(self, tmp_path):
        assert Config.load(str(tmp_path / "absent.yaml")).seed == Config().seed


class TestConfigValidator:
    """测试配置校验"""

    def test_valid(self):
        ok, errors = ConfigValidator.validate({"threads": 2, "output_format": "json"})
        assert ok and errors == []

    def test_invalid(self):
        ok, errors = ConfigValidator.validate({
            "threads": -1,
            "output_format": "pdf",
            "zeta": {"line_tolerance": 0},
        })
        assert not ok
        assert len(errors) == 3

    def test_auto_fix(self):
        fixed, fixes = ConfigValidator.auto_fix({"threads": "many"})
        assert fixed["threads"] == 4
        assert len(fixes) == 1


class TestDefaultsFollowConfig:
    """测试各模块缺省参数取自配置"""

    def test_ladder_tolerance(self):
        assert Config().zeta.ladder_tolerance == 1e-7

    def test_degree_cap(self, monkeypatch):
        algebra = get_algebra("R")
        monkeypatch.setenv("SBDO_SYMBOLIC__DEGREE_CAP", "1")
        assert verify_D(algebra) == verify_D(algebra, degree=1)

    def test_sharp_samples(self, monkeypatch):
        """样本数为 0 时任何候选都不会被拒绝"""
        algebra = get_algebra("Sym2")
        wrong = MPoly.constant(algebra.arena, 5)
        assert not verify_sharp(algebra, algebra.det_poly(), wrong, np.random.default_rng(0))
        monkeypatch.setenv("SBDO_SYMBOLIC__SHARP_SAMPLES", "0")
        assert verify_sharp(algebra, algebra.det_poly(), wrong, np.random.default_rng(0))

    def test_oracle_tolerance(self, monkeypatch):
        algebra = get_algebra("R")
        gen = generators(algebra, validate=False)[0]
        validate_generator(algebra, gen, np.random.default_rng(0), points=1)
        monkeypatch.setenv("SBDO_COVARIANCE__ORACLE_TOLERANCE", "-1")
        with pytest.raises(OracleMismatchError):
            validate_generator(algebra, gen, np.random.default_rng(0), points=1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
