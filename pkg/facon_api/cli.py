"""Command-line entry point: ``facon analyze|stratify|count-facons|verify``."""
import argparse
import os
import sys
from typing import Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from facon_api import config as settings
from facon_api.config import Config, load_version_info
from facon_api.errors import FaconError, ParseError, UsageError
from facon_api.schemas.run_schema import RunConfig
from facon_api.schemas.utils import format_validation_error
from facon_api.services import report as report_service
from facon_api.services.facons import max_facons_count
from facon_api.services.parser import PolynomialMapping, parse_mapping
from facon_api.services.strata import asymptotic_set
from facon_api.services.verify import verify

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_VERIFY_MISMATCH = 3

STRATIFY_KEYS = ("version", "mapping", "scope", "strata", "filtration", "frontier", "frontier_violations")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-E", "--max-exponent", type=int, default=Config.MAX_EXPONENT, help="exponent box bound")
    common.add_argument("-D", "--degree", type=int, default=Config.DEGREE, help="implicit equation degree bound")
    common.add_argument("--seed", type=int, default=None, help="seed of every random draw (default: $FACON_SEED or 0)")
    common.add_argument("--trials", type=int, default=Config.TRIALS, help="random points per dimension estimate")
    common.add_argument("--samples", type=int, default=Config.SAMPLES, help="image points per implicitization")
    common.add_argument("--workers", type=int, default=Config.WORKERS, help="processes for the exponent enumeration")
    common.add_argument("--format", choices=["json", "text"], default="json", help="report format")
    common.add_argument("--log-level", default=Config.LOG_LEVEL, help="level of the stderr log")

    parser = argparse.ArgumentParser(prog="facon", description="Asymptotic set of a polynomial mapping by the method of facons.")
    parser.add_argument("--version", action="version", version=load_version_info().get("version", "unknown"))
    commands = parser.add_subparsers(dest="command", required=True)
    for name, summary in (
        ("analyze", "full report: facons, strata, filtration and frontier verdict"),
        ("stratify", "strata, filtration and frontier verdict only"),
        ("verify", "numeric convergence checks and brute-force oracle"),
    ):
        command = commands.add_parser(name, parents=[common], help=summary)
        command.add_argument("input", help="mapping description file")
    count = commands.add_parser("count-facons", parents=[common], help="largest possible number of facons of C^n")
    count.add_argument("-n", type=int, required=True, help="dimension of the source space")
    return parser


def configure_logging(level: str) -> None:
    """Logs go to stderr so stdout carries nothing but the report."""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="{time:HH:mm:ss} | {level: <7} | {message}")


def to_run_config(args: argparse.Namespace) -> RunConfig:
    # RunConfig validates a seed taken from the environment
    seed = args.seed if args.seed is not None else os.getenv("FACON_SEED", "").strip() or Config.SEED
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        n=getattr(args, "n", None),
        max_exponent=args.max_exponent,
        degree=args.degree,
        seed=seed,
        trials=args.trials,
        samples=args.samples,
        workers=args.workers,
        format=args.format,
    )


def load_mapping(path: str) -> PolynomialMapping:
    with open(path, "rb") as f:
        raw = f.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line_start = raw.rfind(b"\n", 0, e.start) + 1
        raise ParseError(
            f"invalid UTF-8 byte 0x{raw[e.start]:02x}", raw.count(b"\n", 0, e.start) + 1, e.start - line_start + 1
        ) from e
    return parse_mapping(text)


def run(config: RunConfig) -> tuple[int, str]:
    """Runs one command, returning the exit status and the report to print."""
    if config.command == "count-facons":
        count = max_facons_count(config.n)
        return EXIT_OK, (report_service.render_json(count) + "\n" if config.format == "json" else f"{count}\n")

    mapping = load_mapping(config.input)
    logger.info(f"{config.command} {config.input}: {mapping.to_text()}")

    if config.command == "verify":
        result = verify(mapping, config.max_exponent, config.seed, config.workers)
        status = EXIT_OK if result.passed else EXIT_VERIFY_MISMATCH
        if config.format == "text":
            return status, report_service.render_verify_text(result)
        scope = {"E": config.max_exponent, "seed": config.seed}
        return status, report_service.render_json(report_service.verify_to_dict(result, mapping.to_text(), scope)) + "\n"

    report = asymptotic_set(
        mapping, config.max_exponent, config.degree, config.seed, config.trials, config.samples, config.workers
    )
    if not report.frontier.holds:
        logger.warning(f"Frontier property fails: {'; '.join(report.frontier.violations)}")
    if config.format == "text":
        return EXIT_OK, report_service.render_text(report)
    document = report_service.report_to_dict(report)
    if config.command == "stratify":
        document = {key: document[key] for key in STRATIFY_KEYS}
    return EXIT_OK, report_service.render_json(document) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    if settings.INVALID_SETTINGS:
        for problem in settings.INVALID_SETTINGS:
            print(f"facon: {problem}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        config = to_run_config(args)
    except ValidationError as e:
        print(f"facon: {format_validation_error(e)}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        status, output = run(config)
    except ParseError as e:
        print(f"facon: {config.input}: {e.diagnostic()}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"facon: cannot read {config.input}: {e.strerror or e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except UsageError as e:
        print(f"facon: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except FaconError as e:
        logger.error(f"{config.command} failed: {e}")
        return EXIT_FAILURE

    sys.stdout.write(output)
    return status


if __name__ == "__main__":
    sys.exit(main())
