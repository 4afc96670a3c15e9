"""
校验注册表与执行器测试
"""

import pytest

from sbdo.checks import (
    REPORT_SCHEMA,
    SUITES,
    Check,
    CheckRegistry,
    CheckStatus,
    build_report,
    check_registry,
    check_seed,
    require,
    run_checks,
    select_checks,
    summarize,
)
from sbdo.config import Config


def _registry() -> CheckRegistry:
    registry = CheckRegistry()

    def passing(ctx):
        return {"seed": ctx.seed}

    def failing(ctx):
        require(1 + 1 == 3, "arithmetic is broken", left=2)
        return {}

    def crashing(ctx):
        raise RuntimeError("boom")

    registry.register(Check("demo.pass", "demo", "always passes", passing))
    registry.register(Check("demo.fail", "demo", "always fails", failing))
    registry.register(Check("demo.crash", "demo", "raises", crashing))
    registry.register(Check("demo.slow", "demo", "slow", passing, slow=True))
    return registry


class TestRegistry:
    """测试注册表"""

    def test_all_suites_registered(self):
        assert check_registry.suites() == sorted(SUITES)

    def test_duplicate_id(self):
        registry = _registry()
        with pytest.raises(ValueError):
            registry.register(Check("demo.pass", "demo", "again", lambda ctx: {}))

    def test_slow_filter(self):
        fast = select_checks("zeta")
        everything = select_checks("zeta", include_slow=True)
        assert not any(c.slow for c in fast)
        assert len(everything) > len(fast)
        high_rank = {c.check_id for c in everything if c.check_id.endswith(".high_rank")}
        assert "zeta.fs_identity.eucl_c0.high_rank" in high_rank
        assert not high_rank & {c.check_id for c in fast}

    def test_algebra_filter(self):
        checks = select_checks("jordan", algebra="Sym2")
        assert {c.check_id for c in checks} == {"jordan.structure.Sym2", "jordan.identities.Sym2"}
        fe = select_checks("zeta", algebra="Sym2")
        assert "zeta.fe.eucl_c2@Sym2.h0,h0,h0" in {c.check_id for c in fe}

    def test_bad_selection(self):
        with pytest.raises(ValueError):
            select_checks("nonsense")
        with pytest.raises(ValueError):
            select_checks("poly", algebra="Sym2")


class TestRunner:
    """测试执行与报告"""

    def test_statuses(self):
        results = run_checks("demo", Config(threads=2), registry=_registry())
        statuses = {r.check_id: r.status for r in results}
        assert statuses == {
            "demo.crash": CheckStatus.ERROR,
            "demo.fail": CheckStatus.FAILED,
            "demo.pass": CheckStatus.PASSED,
        }
        failed = next(r for r in results if r.check_id == "demo.fail")
        assert failed.detail["detail"]["left"] == 2
        summary = summarize(results)
        assert summary["counts"]["failed"] == 1
        assert summary["failed"] == ["demo.crash", "demo.fail"]
        assert not summary["ok"]

    def test_per_check_seed(self):
        cfg = Config(seed=11, threads=1)
        results = run_checks("demo", cfg, include_slow=True, registry=_registry())
        passed = next(r for r in results if r.check_id == "demo.pass")
        assert passed.detail["seed"] == check_seed(11, "demo.pass")
        assert check_seed(11, "demo.pass") != check_seed(11, "demo.slow")

    def test_deterministic_report(self):
        cfg = Config(threads=3)
        first = build_report("poly", run_checks("poly", cfg), cfg.seed)
        second = build_report("poly", run_checks("poly", cfg), cfg.seed)
        assert first == second
        assert first["schema"] == REPORT_SCHEMA
        assert first["summary"]["ok"]
        assert "execution_time_ms" not in first["checks"][0]

    def test_timing_on_request(self):
        results = run_checks("demo", Config(threads=1), registry=_registry())
        report = build_report("demo", results, 0, timing=True)
        assert all("execution_time_ms" in c for c in report["checks"])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
