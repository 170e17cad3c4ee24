import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from config import get_config, load_run_config
from src.routes import setup_routes
from src.routes.router import overrides
from src.services.experiment_service import ExperimentService
from src.utils.errors import ConfigError, LabError, NumericalInstabilityError, ResolutionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


class LabArgumentParser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's exit 2."""

    def error(self, message):
        raise ConfigError(message, "arguments")


def bootstrap_services(config):
    return {"experiment_service": ExperimentService(config)}


def build_parser(config, services) -> argparse.ArgumentParser:
    parser = LabArgumentParser(
        prog="quartic-lab",
        description="Numerical experiments for the fourth-order Schrodinger equation.",
    )
    setup_routes(parser, config, services)
    return parser


def describe(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        return "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
    parameter = getattr(exc, "parameter", None)
    return f"{parameter}: {exc}" if parameter else str(exc)


def main(argv=None) -> int:
    config = get_config()
    services = bootstrap_services(config)
    parser = build_parser(config, services)
    try:
        args = parser.parse_args(argv)
        path = Path(args.config) if args.config else None
        run = load_run_config(args.command, config, path, overrides(args))
        summary = args.handler(run, args.router.services)
    except (ResolutionError, NumericalInstabilityError) as exc:
        logger.error("Numerical resolution error", error=exc)
        print(f"error: {describe(exc)}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (LabError, ValueError) as exc:
        logger.error("Invalid configuration or input", error=exc)
        print(f"error: {describe(exc)}", file=sys.stderr)
        return EXIT_INVALID

    print(f"{run.subcommand.value}: {summary}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
