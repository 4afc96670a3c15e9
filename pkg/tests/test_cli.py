"""
命令行测试
"""

import orjson
import pytest
from click.testing import CliRunner

from sbdo.cli import cli, parse_complex


@pytest.fixture
def invoke(tmp_path):
    runner = CliRunner()
    log_file = str(tmp_path / "sbdo.log")

    def run(*args):
        return runner.invoke(cli, ["--log-file", log_file, *args])

    return run


class TestEmit:
    """测试算子输出"""

    def test_emit_d_json(self, invoke):
        result = invoke("emit-D", "--algebra", "R", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = orjson.loads(result.stdout)
        assert payload["algebra"] == "R"
        assert payload["operator"] == "D"
        assert payload["terms"]

    def test_emit_b_specialized(self, invoke):
        result = invoke("emit-B", "--algebra", "R", "--k", "1", "--lam", "2", "--mu", "3", "-f", "json")
        assert result.exit_code == 0, result.output
        payload = orjson.loads(result.stdout)
        assert payload["constant_coefficient"]
        assert payload["k"] == 1

    def test_unknown_algebra(self, invoke):
        assert invoke("emit-D", "--algebra", "Foo").exit_code == 2

    def test_bad_rational(self, invoke):
        assert invoke("emit-F", "--algebra", "R", "--lam", "one").exit_code == 2


class TestVerify:
    """测试校验命令"""

    def test_poly_json(self, invoke):
        result = invoke("verify", "poly", "--format", "json", "--seed", "3")
        assert result.exit_code == 0, result.output
        report = orjson.loads(result.stdout)
        assert report["schema"] == "sbdo.report/1"
        assert report["seed"] == 3
        assert report["summary"]["ok"]

    def test_algebra_and_degree(self, invoke):
        result = invoke("verify", "source", "--algebra", "Sym2", "--degree", "2", "-f", "json")
        assert result.exit_code == 0, result.output
        report = orjson.loads(result.stdout)
        assert [c["id"] for c in report["checks"]] == ["source.D.Sym2"]
        assert report["checks"][0]["detail"]["degree"] == 2

    def test_zeta_suite_passes(self, invoke):
        """默认 (非慢) zeta 套件整体通过"""
        result = invoke("verify", "zeta", "--format", "json")
        assert result.exit_code == 0, result.output
        report = orjson.loads(result.stdout)
        assert report["summary"]["ok"]
        ids = {c["id"] for c in report["checks"]}
        assert {"zeta.fs_identity.eucl_c0", "zeta.fs_identity.eucl_c2", "zeta.gelfand_shilov.Rpq:1,1"} <= ids
        assert not any(i.endswith(".high_rank") for i in ids)

    def test_unknown_suite(self, invoke):
        assert invoke("verify", "nonsense").exit_code == 2

    def test_list(self, invoke):
        result = invoke("list", "poly")
        assert result.exit_code == 0
        assert "poly.leibniz" in result.output


class TestZeta:
    """测试 zeta 命令"""

    def test_matrices(self, invoke):
        result = invoke("zeta", "matrices", "--case", "eucl_a", "--r", "2", "--d", "4", "--s", "0.3+0.1i")
        assert result.exit_code == 0, result.output
        payload = orjson.loads(result.stdout)
        assert len(payload["matrix"]) == 2
        assert payload["case"]["n"] == 6

    def test_matrices_need_signature(self, invoke):
        assert invoke("zeta", "matrices", "--case", "Rpq", "--s", "0.3").exit_code == 2

    def test_check_passes(self, invoke):
        result = invoke("zeta", "check", "--case", "R", "--s", "0.7")
        assert result.exit_code == 0, result.output
        assert orjson.loads(result.stdout)["passed"]

    def test_check_pole(self, invoke):
        result = invoke("zeta", "check", "--case", "R", "--s", "-1")
        assert result.exit_code == 1
        assert orjson.loads(result.stdout)["error"]["type"] == "PoleError"

    def test_unknown_case(self, invoke):
        assert invoke("zeta", "check", "--case", "eucl_zz@Sym2", "--s", "0.5").exit_code == 2


class TestParsing:
    """测试参数解析"""

    def test_complex(self):
        assert parse_complex("0.3+0.1i") == complex(0.3, 0.1)
        assert parse_complex("-1.5") == -1.5


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
