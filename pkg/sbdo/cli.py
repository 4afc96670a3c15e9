#!/usr/bin/env python3
"""
sbdo CLI

命令行工具：生成算子、运行校验、数值核对函数方程
"""

import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np
import orjson
from loguru import logger
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from sbdo import __version__
from sbdo.config import Config
from sbdo.errors import SbdoError, UnknownAlgebraError, UnknownCaseError, UnsupportedAlgebraError

console = Console()

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {thread.name} | {name}:{function}:{line} | {message}"
FORMATS = click.Choice(["text", "json", "latex"])


def dump_json(data: Any) -> str:
    return orjson.dumps(data, default=str, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY).decode()


def parse_complex(text: str) -> complex:
    """"0.3+0.1i" / "0.3+0.1j" / "-1.5" """
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise click.BadParameter(f"cannot parse {text!r} as a complex number") from None


def parse_fraction(text: Optional[str]) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"cannot parse {text!r} as a rational number") from None


def _algebra(algebra_id: str) -> Any:
    from sbdo.jordan import get_algebra

    try:
        return get_algebra(algebra_id)
    except UnknownAlgebraError as e:
        raise click.BadParameter(str(e), param_hint="--algebra") from None


@click.group()
@click.version_option(version=__version__, prog_name="sbdo")
@click.option("--config", "-c", help="配置文件路径")
@click.option("--verbose", "-v", is_flag=True, help="详细输出(DEBUG级别)")
@click.option("--log-file", "-l", default=None, help="日志文件路径")
@click.pass_context
def cli(ctx: click.Context, config: Optional[str], verbose: bool, log_file: Optional[str]) -> None:
    """sbdo - 对称破缺微分算子与 zeta 函数方程的计算与校验"""
    ctx.ensure_object(dict)
    cfg = Config.load(config)
    ctx.obj["config"] = cfg

    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else cfg.logging.console_level)
    log_file = log_file or cfg.logging.file
    if log_file:
        logger.add(
            log_file,
            level="DEBUG",
            rotation=cfg.logging.rotation,
            retention=cfg.logging.retention,
            format=LOG_FORMAT,
        )
    logger.info(f"sbdo {__version__} started - log file: {log_file}, threads: {cfg.threads}")


# ========== 算子输出 ==========


def _emit(payload: Dict[str, Any], text: str, latex: str, fmt: str) -> None:
    if fmt == "json":
        click.echo(dump_json(payload))
    elif fmt == "latex":
        click.echo(latex)
    else:
        click.echo(text)


def _format_option(ctx: click.Context, fmt: Optional[str]) -> str:
    return fmt or ctx.obj["config"].output_format


@cli.command("emit-D")
@click.option("--algebra", "-a", required=True, help="代数 id，如 Rpq:2,1")
@click.option("--s", "s_value", default=None, help="把 s 特化为有理数")
@click.option("--t", "t_value", default=None, help="把 t 特化为有理数")
@click.option("--format", "-f", "fmt", type=FORMATS, default=None, help="输出格式")
@click.pass_context
def emit_d(ctx: click.Context, algebra: str, s_value: Optional[str], t_value: Optional[str], fmt: Optional[str]) -> None:
    """源算子 D_{s,t}"""
    from sbdo.source import build_D

    alg = _algebra(algebra)
    try:
        op = build_D(alg)
    except UnsupportedAlgebraError as e:
        raise click.BadParameter(str(e), param_hint="--algebra") from None
    assignment = {k: v for k, v in (("s", parse_fraction(s_value)), ("t", parse_fraction(t_value))) if v is not None}
    if assignment:
        op = op.substitute(assignment)
    payload = {"algebra": alg.name, "operator": "D", "specialization": assignment, "terms": op.to_dict()}
    _emit(payload, op.to_string(), op.to_latex(), _format_option(ctx, fmt))


@cli.command("emit-F")
@click.option("--algebra", "-a", required=True, help="代数 id")
@click.option("--lam", default=None, help="把 λ 特化为有理数")
@click.option("--mu", default=None, help="把 μ 特化为有理数")
@click.option("--format", "-f", "fmt", type=FORMATS, default=None, help="输出格式")
@click.pass_context
def emit_f(ctx: click.Context, algebra: str, lam: Optional[str], mu: Optional[str], fmt: Optional[str]) -> None:
    """F_{λ,μ} = Ψ^{-1}(D)"""
    from sbdo.source import build_F, specialize

    alg = _algebra(algebra)
    try:
        op = specialize(build_F(alg), parse_fraction(lam), parse_fraction(mu))
    except UnsupportedAlgebraError as e:
        raise click.BadParameter(str(e), param_hint="--algebra") from None
    payload = {"algebra": alg.name, "operator": "F", "lam": lam, "mu": mu, "terms": op.to_dict()}
    _emit(payload, op.to_string(), op.to_latex(), _format_option(ctx, fmt))


@cli.command("emit-B")
@click.option("--algebra", "-a", required=True, help="代数 id")
@click.option("--k", "k", type=click.IntRange(0, 8), default=1, show_default=True, help="阶数")
@click.option("--lam", default=None, help="把 λ 特化为有理数")
@click.option("--mu", default=None, help="把 μ 特化为有理数")
@click.option("--format", "-f", "fmt", type=FORMATS, default=None, help="输出格式")
@click.pass_context
def emit_b(ctx: click.Context, algebra: str, k: int, lam: Optional[str], mu: Optional[str], fmt: Optional[str]) -> None:
    """Rankin-Cohen 型算子 B^{(k)} = res∘F^{(k)}"""
    from sbdo.source import build_B, specialize

    alg = _algebra(algebra)
    try:
        rc = build_B(alg, k)
    except UnsupportedAlgebraError as e:
        raise click.BadParameter(str(e), param_hint="--algebra") from None
    op = specialize(rc.B, parse_fraction(lam), parse_fraction(mu))
    symbol = specialize(rc.symbol, parse_fraction(lam), parse_fraction(mu))
    payload = {**rc.to_dict(), "lam": lam, "mu": mu, "terms": op.to_dict(), "symbol": symbol.to_string()}
    _emit(payload, op.to_string(), op.to_latex(), _format_option(ctx, fmt))


# ========== 校验 ==========


def _print_results(suite: str, results: Any, summary: Dict[str, Any]) -> None:
    table = Table(title=f"sbdo verify {suite}")
    table.add_column("check")
    table.add_column("status")
    table.add_column("ms", justify="right")
    table.add_column("error", overflow="fold")
    colors = {"passed": "green", "failed": "red", "error": "magenta", "skipped": "yellow"}
    for r in results:
        color = colors[r.status.value]
        table.add_row(r.check_id, f"[{color}]{r.status.value}[/{color}]", str(r.execution_time_ms), r.error or "")
    console.print(table)
    style = "green" if summary["ok"] else "red"
    console.print(Panel.fit(
        f"{summary['total']} checks: " + ", ".join(f"{k} {v}" for k, v in summary["counts"].items() if v),
        border_style=style,
    ))


@cli.command()
@click.argument("suite", default="all")
@click.option("--algebra", "-a", default=None, help="只运行该代数的校验 (包括慢项)")
@click.option("--degree", "-n", type=click.IntRange(0, 8), default=None, help="D 恒等式检查的单项式次数上限")
@click.option("--seed", type=int, default=None, help="随机种子")
@click.option("--slow", is_flag=True, help="包括慢校验项")
@click.option("--timings", is_flag=True, help="JSON 报告中包含耗时")
@click.option("--format", "-f", "fmt", type=click.Choice(["text", "json"]), default=None, help="输出格式")
@click.pass_context
def verify(ctx: click.Context, suite: str, algebra: Optional[str], degree: Optional[int], seed: Optional[int],
           slow: bool, timings: bool, fmt: Optional[str]) -> None:
    """运行校验 suite (poly, jordan, weyl, fischer, bernstein, source, symbols, covariance, zeta 或 all)"""
    from sbdo.checks import build_report, run_checks

    cfg: Config = ctx.obj["config"]
    updates: Dict[str, Any] = {}
    if seed is not None:
        updates["seed"] = seed
    if slow:
        updates["include_slow"] = True
    if degree is not None:
        updates["symbolic"] = cfg.symbolic.model_copy(update={"degree_cap": degree})
    if updates:
        cfg = cfg.model_copy(update=updates)
    if algebra is not None:
        algebra = _algebra(algebra).name

    try:
        results = run_checks(suite, cfg, algebra=algebra)
    except ValueError as e:
        raise click.UsageError(str(e)) from None
    report = build_report(suite, results, cfg.seed, timings)
    if (fmt or cfg.output_format) == "json":
        click.echo(dump_json(report))
    else:
        _print_results(suite, results, report["summary"])
    if not report["summary"]["ok"]:
        sys.exit(1)


@cli.command("list")
@click.argument("suite", default="all")
@click.pass_context
def list_checks(ctx: click.Context, suite: str) -> None:
    """列出已注册的校验项与代数目录"""
    from sbdo.checks import check_registry
    from sbdo.jordan import CATALOG

    if suite != "all" and suite not in check_registry.suites():
        raise click.UsageError(f"unknown suite {suite!r}")
    table = Table(title="checks")
    table.add_column("id")
    table.add_column("suite")
    table.add_column("slow")
    table.add_column("description", overflow="fold")
    for check in check_registry.list_checks(suite):
        table.add_row(check.check_id, check.suite, "yes" if check.slow else "", check.description)
    console.print(table)
    console.print(f"[dim]algebras: {', '.join(CATALOG)}[/dim]")


@cli.command()
def init() -> None:
    """初始化配置"""
    config_path = Path("config/config.yaml")

    if config_path.exists():
        console.print(f"[yellow]配置文件已存在: {config_path}[/yellow]")
        if not click.confirm("是否覆盖?"):
            return

    Config().save(str(config_path))
    console.print(f"[green]✓ 配置文件已创建: {config_path}[/green]")


# ========== zeta ==========


@cli.group()
def zeta() -> None:
    """zeta 积分的局部函数方程"""


def _tolerance(cfg: Config, n: int) -> float:
    if n == 1:
        return cfg.zeta.line_tolerance
    if n == 2:
        return cfg.zeta.plane_tolerance
    return cfg.zeta.space_tolerance


@zeta.command("check")
@click.option("--case", "case_text", required=True, help="代数 id 或 case@代数，如 Rpq:1,1、eucl_c2@Sym2")
@click.option("--s", "s_text", required=True, help="复参数，如 0.4 或 0.3+0.1i")
@click.option("--f", "f_text", default=None, help="试验函数，如 h0,h2 (默认全为 h0)")
@click.option("--tolerance", type=float, default=None, help="相对残差容差")
@click.pass_context
def zeta_check(ctx: click.Context, case_text: str, s_text: str, f_text: Optional[str], tolerance: Optional[float]) -> None:
    """数值核对 Z(f̂, s) = prefactor · A(s) · Z(f, -s - n/r)"""
    from sbdo.zeta import TestFunction, fe_check, resolve_case

    cfg: Config = ctx.obj["config"]
    try:
        case = resolve_case(case_text)
    except (UnknownAlgebraError, UnknownCaseError, UnsupportedAlgebraError) as e:
        raise click.BadParameter(str(e), param_hint="--case") from None
    try:
        f = TestFunction.parse(f_text) if f_text else TestFunction.uniform(0, case.n)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--f") from None
    s = parse_complex(s_text)
    try:
        result = fe_check(case, f, s)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--f") from None
    except SbdoError as e:
        # PoleError、QuadratureError、IdentityError 都算校验失败
        click.echo(dump_json({"error": e.to_dict()}))
        sys.exit(1)
    tolerance = tolerance if tolerance is not None else _tolerance(cfg, case.n)
    payload = result.to_dict()
    payload["tolerance"] = tolerance
    payload["passed"] = result.residual < tolerance
    click.echo(dump_json(payload))
    if not payload["passed"]:
        sys.exit(1)


def _build_case(case_text: str, r: Optional[int], d: Optional[int], n: Optional[int], p: Optional[int],
                q: Optional[int], r_plus: Optional[int], epsilon: int) -> Any:
    from sbdo.zeta import CASE_IDS, euclidean_case, fe_case, resolve_case

    if case_text not in CASE_IDS:
        return resolve_case(case_text)
    if case_text == "Rpq":
        if p is None or q is None:
            raise click.UsageError("case Rpq needs --p and --q")
        return fe_case("Rpq", n=p + q, r=2, d=p + q - 2, p=p, q=q)
    if case_text.endswith("_scalar"):
        if None in (n, r, d, r_plus):
            raise click.UsageError(f"case {case_text} needs --n, --r, --d and --r-plus")
        return fe_case(case_text, n=n, r=r, d=d, r_plus=r_plus, epsilon=epsilon)
    if r is None or d is None:
        raise click.UsageError(f"case {case_text} needs --r and --d")
    return euclidean_case(r, d, case_text)


def _matrix_json(matrix: np.ndarray) -> Any:
    return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in matrix]


@zeta.command("matrices")
@click.option("--case", "case_text", required=True, help="case id (eucl_a, Rpq, typeII_scalar, ...) 或代数 id")
@click.option("--s", "s_text", required=True, help="复参数，如 0.3+0.1i")
@click.option("--r", "r", type=int, default=None, help="秩")
@click.option("--d", "d", type=int, default=None, help="Peirce 常数")
@click.option("--n", "n", type=int, default=None, help="维数 (标量 case)")
@click.option("--p", "p", type=int, default=None, help="R^{p,q} 的 p")
@click.option("--q", "q", type=int, default=None, help="R^{p,q} 的 q")
@click.option("--r-plus", "r_plus", type=int, default=None, help="分裂秩 (标量 case)")
@click.option("--epsilon", type=click.Choice(["1", "-1"]), default="1", help="符号特征 (标量 case)")
@click.option("--displayed", is_flag=True, help="使用未校正的排印矩阵形式")
@click.option("--format", "-f", "fmt", type=click.Choice(["text", "json"]), default="json", help="输出格式")
def zeta_matrices(case_text: str, s_text: str, r: Optional[int], d: Optional[int], n: Optional[int],
                  p: Optional[int], q: Optional[int], r_plus: Optional[int], epsilon: str,
                  displayed: bool, fmt: str) -> None:
    """prefactor(s) 与 A(s) 的数值"""
    from sbdo.zeta import fe_matrix

    try:
        case = _build_case(case_text, r, d, n, p, q, r_plus, int(epsilon))
    except (UnknownAlgebraError, UnknownCaseError, UnsupportedAlgebraError) as e:
        raise click.BadParameter(str(e), param_hint="--case") from None
    s = parse_complex(s_text)
    prefactor, matrix = fe_matrix(case, s, displayed=displayed)
    if fmt == "json":
        click.echo(dump_json({
            "case": case.to_dict(),
            "s": {"re": s.real, "im": s.imag},
            "displayed": displayed,
            "prefactor": {"re": prefactor.real, "im": prefactor.imag},
            "matrix": _matrix_json(matrix),
        }))
        return
    table = Table(title=f"{case.case_id} at s={s}")
    for j in range(matrix.shape[1]):
        table.add_column(f"col {j + 1}", justify="right")
    for row in matrix:
        table.add_row(*(f"{z:.10g}" for z in row))
    console.print(f"prefactor = {prefactor:.12g}")
    console.print(table)


def main() -> None:
    """主入口"""
    cli()


if __name__ == "__main__":
    main()
