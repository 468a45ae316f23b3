#!/usr/bin/env python3

import argparse
import os
import sys
import time
from typing import Dict, List, Optional

from rich.console import Console
from rich.table import Table

# 从项目中导入
from qft_locality import __version__, logger  # 使用 __init__ 中的 logger
from qft_locality.core.experiments import EXPERIMENTS, ExperimentOutput, run_experiment
from qft_locality.infrastructure.config import ConfigManager, RunConfig, load_run_config
from qft_locality.utils.exceptions import QFTLocalityError, ValidationError
from qft_locality.utils.logger import LOG_LEVEL_ENV, enable_debug, set_log_level

CHECK_ORDER = (
    "antilocality",
    "vacuum",
    "cyclicity",
    "microcausality",
    "compare-schemes",
    "correlation",
)


def parse_float_list(value: Optional[str], option: str) -> Optional[List[float]]:
    """将 '0.5,1,2' 这样的字符串解析为浮点数列表"""
    if value is None:
        return None
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(option, value, "expected a comma separated list of numbers") from None


def parse_int_list(value: Optional[str], option: str) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(option, value, "expected a comma separated list of integers") from None


def format_time(seconds: float) -> str:
    """将秒数格式化为人类可读的时间字符串"""
    if seconds < 60:
        return f"{seconds:.1f}s"
    if seconds < 3600:
        return f"{seconds / 60:.1f}min"
    return f"{seconds / 3600:.1f}h"


def experiment_overrides(args: argparse.Namespace) -> Dict[str, Dict]:
    """命令行扫描参数到各实验参数的映射"""
    overrides: Dict[str, Dict] = {}
    masses = parse_float_list(args.sweep_mass, "--sweep-mass")
    if masses is not None:
        overrides.setdefault("antilocality", {})["masses"] = masses
        overrides.setdefault("correlation", {})["masses"] = masses
    separations = parse_int_list(args.separations, "--separations")
    if separations is not None:
        overrides.setdefault("microcausality", {})["separations_sites"] = separations
    cutoffs = parse_int_list(args.cutoffs, "--cutoffs")
    if cutoffs is not None:
        overrides.setdefault("cyclicity", {})["cutoffs"] = cutoffs
    times = parse_float_list(args.times, "--times")
    if times is not None:
        overrides.setdefault("microcausality", {})["times"] = times
    return overrides


def build_run_config(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config)
    config = config.with_overrides(output_dir=args.out, seed=args.seed, experiments=experiment_overrides(args))
    return config.validate()


def print_scheme_table(output: ExperimentOutput, console: Console):
    schemes = output.report_data["schemes"]
    table = Table(title="Localization schemes")
    table.add_column("check")
    for name in schemes:
        table.add_column(name)
    rows = [
        ("isotony", "isotony_ok"),
        ("translation covariance", "translation_covariance_ok"),
        ("weak microcausality defect", "weak_microcausality_defect"),
        ("strong microcausality defect", "strong_microcausality_defect"),
        ("vacuum cyclic rank", "vacuum_cyclic_rank"),
        ("vacuum separating defect", "vacuum_separating_defect"),
        ("local number operator", "local_number_op_available"),
        ("fundamentality verdict", "fundamentality_verdict"),
    ]
    for label, key in rows:
        cells = []
        for report in schemes.values():
            value = report[key]
            cells.append(f"{value:.3e}" if isinstance(value, float) else str(value))
        table.add_row(label, *cells)
    console.print(table)


def print_check_table(outputs: List[ExperimentOutput], console: Console):
    table = Table(title="Checks")
    table.add_column("experiment")
    table.add_column("check")
    table.add_column("result")
    for output in outputs:
        for name, ok in sorted(output.report_data.get("checks", {}).items()):
            table.add_row(output.name, name, "[green]pass[/green]" if ok else "[red]FAIL[/red]")
    console.print(table)


def configured_log_level() -> str:
    """日志级别：环境变量优先，其次是应用设置中的 LOG_LEVEL"""
    return os.environ.get(LOG_LEVEL_ENV) or ConfigManager.get_instance().get("LOG_LEVEL", "INFO")


def main(argv: Optional[List[str]] = None):
    parser = argparse.ArgumentParser(
        description="QFTLocality: 一维格点自由标量场的局域化方案实验室。",
        # 自动显示默认值
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "experiment",
        type=str,
        choices=sorted(EXPERIMENTS) + ["check"],
        help="要运行的实验；check 依次运行全部实验并在任一检查失败时返回非零退出码。",
    )
    parser.add_argument(
        "--config",
        type=str,
        default=None,
        help="运行配置 JSON 文件的路径。未指定时使用内置默认配置。",
    )
    parser.add_argument(
        "--out", "-o",
        type=str,
        default=None,
        help="结果输出目录，覆盖配置中的 output_dir。",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="随机种子，覆盖配置中的 seed。",
    )
    parser.add_argument(
        "--sweep-mass",
        type=str,
        default=None,
        help="质量扫描列表，例如 '0.5,1,2'。",
    )
    parser.add_argument(
        "--separations",
        type=str,
        default=None,
        help="以格点数计的分离距离列表，例如 '20,80'。",
    )
    parser.add_argument(
        "--cutoffs",
        type=str,
        default=None,
        help="Fock 截断列表，例如 '3,5,8'。",
    )
    parser.add_argument(
        "--times",
        type=str,
        default=None,
        help="以分离距离为单位的时间点列表，取值在 [0, 1)。",
    )
    parser.add_argument(
        "--thread", "-t",
        type=int,
        default=None,
        help="扫描并行线程数，默认取应用设置 DEFAULT_THREAD_COUNT。",
    )
    parser.add_argument(
        "--ignore-cache",
        action="store_true",
        default=False,
        help="忽略已有的实验结果缓存并强制重新计算。",
    )
    parser.add_argument(
        "--debug", "-d",
        action="store_true",
        default=False,
        help="启用详细的调试日志记录。",
    )
    parser.add_argument(
        "--version", "-v",
        action="version",
        version=f"QFTLocality v{__version__}",
    )

    args = parser.parse_args(argv)

    if args.debug:
        enable_debug()
        logger.debug("Debug mode enabled")
    else:
        set_log_level(configured_log_level())

    logger.info(f"Starting QFTLocality v{__version__}")
    console = Console(stderr=True)

    try:
        config = build_run_config(args)
        names = list(CHECK_ORDER) if args.experiment == "check" else [args.experiment]
        start_time = time.time()

        outputs = []
        for name in names:
            output = run_experiment(name, config, thread=args.thread,
                                    ignore_cache=args.ignore_cache, progress=True)
            for path in output.write(config.output_dir):
                logger.info(f"Wrote {path}")
            outputs.append(output)

        if args.experiment == "compare-schemes":
            print_scheme_table(outputs[0], console)
        logger.info(f"Finished in {format_time(time.time() - start_time)}")

        if args.experiment == "check":
            print_check_table(outputs, console)
            failed = [f"{o.name}:{c}" for o in outputs for c in o.failed_checks()]
            if failed:
                logger.error(f"Failed checks: {', '.join(failed)}")
                sys.exit(1)
        sys.exit(0)

    except QFTLocalityError as e:
        logger.error(f"Error: {e}")
        if args.debug:
            # 仅在调试模式下记录回溯
            logger.exception("Traceback:")
        sys.exit(1)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        sys.exit(130)  # 标准的用户中断退出码


if __name__ == "__main__":
    main()
