import argparse
import logging
import sys
from typing import List, Optional

from tango import config
from tango.commands import COMMANDS
from tango.errors import TangoError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tango", description="Tangential graph neural dynamics")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=config.LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    try:
        return args.handler(args)
    except (ValueError, FileNotFoundError) as e:
        # ConfigError, CheckpointError, ShapeError, GraphError and pydantic errors are ValueErrors
        logger.error(f"{args.command}: {e}")
        return EXIT_CONFIG
    except TangoError as e:
        # DivergenceError, NonFiniteError, TapeError and UnknownOpError
        logger.error(f"{args.command}: {type(e).__name__}: {e}")
        return EXIT_FAILURE
