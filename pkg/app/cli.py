"""Командная строка: run, sweep, figure, optimize-pulse, serve.

Код возврата 0 только если все прогоны завершились и прошли проверки целостности.
"""
import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import get_args

from loguru import logger
from pydantic import ValidationError

from app import container
from app.application.experiments.dto import FigureRequest, RunConfig, SweepParameter, SweepRequest
from app.config.settings import settings
from app.core.exceptions import DomainError
from app.shared.logging import setup_logging

EXIT_OK = 0
EXIT_FAILED_RUN = 1
EXIT_BAD_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spincat", description="One-axis twisting spin-cat experiments")
    verbs = parser.add_subparsers(dest="verb", required=True)

    run = verbs.add_parser("run", help="Execute a single run from a JSON config")
    run.add_argument("--config", type=Path, required=True)

    sweep = verbs.add_parser("sweep", help="Vary one parameter of a base config")
    sweep.add_argument("--config", type=Path, required=True)
    sweep.add_argument("--vary", choices=get_args(SweepParameter), required=True)
    sweep.add_argument("--values", type=float, nargs="+", required=True)
    sweep.add_argument("--workers", type=int, default=None, help=f"Defaults to WORKER_COUNT={settings.WORKER_COUNT}")

    figure = verbs.add_parser("figure", help="Write the data files of a figure recipe")
    figure.add_argument("name")
    figure.add_argument("--out", type=Path, required=True)
    figure.add_argument("--skip-long", action="store_true", help="Skip the mu=0.6 runs")

    optimize = verbs.add_parser("optimize-pulse", help="Search the pi-pulse time maximising the QFI peak")
    optimize.add_argument("--config", type=Path, required=True)

    serve = verbs.add_parser("serve", help="Start the HTTP API")
    serve.add_argument("--host", default=settings.HOST)
    serve.add_argument("--port", type=int, default=settings.PORT)
    return parser


def load_config(path: Path) -> RunConfig:
    return RunConfig.model_validate_json(path.read_text(encoding="utf-8"))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        return _dispatch(args)
    except ValidationError as exc:
        logger.error(f"Invalid configuration: {exc}")
        return EXIT_BAD_INPUT
    except OSError as exc:
        logger.error(f"Cannot read input: {exc}")
        return EXIT_BAD_INPUT
    except DomainError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_FAILED_RUN


def _dispatch(args: argparse.Namespace) -> int:
    if args.verb == "serve":
        import uvicorn

        uvicorn.run("app.main:app", host=args.host, port=args.port)
        return EXIT_OK

    if args.verb == "run":
        record = container.build_run_service().run(load_config(args.config))
        _emit(record.model_dump_json(by_alias=True, exclude={"series"}, indent=2))
        return _exit_code(record.succeeded)

    if args.verb == "optimize-pulse":
        result = container.build_run_service().optimize_pulse(load_config(args.config))
        _emit(result.model_dump_json(by_alias=True, exclude={"record": {"series"}}, indent=2))
        return _exit_code(result.record.succeeded)

    if args.verb == "sweep":
        request = SweepRequest(base=load_config(args.config), vary=args.vary, values=args.values, workers=args.workers)
        result = container.build_sweep_service().sweep(request)
        _emit(result.model_dump_json(include={"vary", "rows", "summary_path"}, indent=2))
        return _exit_code(result.succeeded)

    result = container.build_figure_service().render(args.name, FigureRequest(out_dir=args.out, skip_long=args.skip_long))
    _emit(result.model_dump_json(include={"name", "files"}, indent=2))
    return _exit_code(result.succeeded)


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _exit_code(succeeded: bool) -> int:
    return EXIT_OK if succeeded else EXIT_FAILED_RUN


if __name__ == "__main__":
    sys.exit(main())
