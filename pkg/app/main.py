import argparse
import logging
import sys
from typing import Callable, Optional, Sequence

from app.commands.coc import cmd_coc
from app.commands.examples import cmd_examples
from app.commands.table2 import cmd_table2
from app.commands.verify import cmd_verify
from app.core.config import settings
from app.core.errors import ValuationError, VerificationError
from app.core.logging import setup_logging
from app.models.run_config import RunConfig
from app.services.run_config import parse_config, with_overrides
from app.services.run_log import run_log_service

logger = logging.getLogger(__name__)

# verification failures exit with VerificationError.exit_code (1)
EXIT_OK, EXIT_IO, EXIT_INTERNAL = 0, 2, 3

_CSV_COMMANDS: dict[str, Callable[[RunConfig], str]] = {
    "table2": cmd_table2,
    "coc": cmd_coc,
    "examples": lambda config: cmd_examples(),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Two-step actuarial valuation: finite-space theorem checks and the GMMB engine",
    )
    parser.add_argument("command", choices=["table2", "coc", "verify", "examples"])
    parser.add_argument("--config", help="key = value run configuration file")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")
    parser.add_argument("--out", help="write the result here instead of stdout")
    parser.add_argument("--rho", type=float, help="price a single correlation instead of the grid")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            text = f.read()
    return with_overrides(parse_config(text), seed=args.seed, rho=args.rho, output_path=args.out)


def emit(text: str, output_path: Optional[str]) -> None:
    if output_path:
        with open(output_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging(settings.debug)
    args = build_parser().parse_args(argv)
    seed: Optional[int] = args.seed
    try:
        config = load_config(args)
        seed = config.mc.seed
        if args.command == "verify":
            report = cmd_verify(config)
            emit(report.render(), config.output_path)
            report.raise_for_failure()
        else:
            emit(_CSV_COMMANDS[args.command](config), config.output_path)
    except VerificationError as e:
        logger.error("%s failed: %s", args.command, e.detail)
        run_log_service.log(
            command=args.command,
            status="failure",
            seed=seed,
            exit_code=e.exit_code,
            message=e.detail,
            details={"counterexample": e.counterexample},
        )
        return e.exit_code
    except ValuationError as e:
        logger.error("%s failed: %s", args.command, e.detail)
        print(f"error: {e.detail}", file=sys.stderr)
        run_log_service.log(command=args.command, status="failure", seed=seed, exit_code=e.exit_code, message=e.detail)
        return e.exit_code
    except OSError as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        run_log_service.log(command=args.command, status="failure", seed=seed, exit_code=EXIT_IO, message=str(e))
        return EXIT_IO
    except Exception as e:
        logger.exception("%s stopped on an unexpected error", args.command)
        print(f"error: unexpected {type(e).__name__}: {e}", file=sys.stderr)
        run_log_service.log(
            command=args.command,
            status="failure",
            seed=seed,
            exit_code=EXIT_INTERNAL,
            message=f"{type(e).__name__}: {e}",
        )
        return EXIT_INTERNAL
    run_log_service.log(command=args.command, status="success", seed=seed)
    return EXIT_OK
