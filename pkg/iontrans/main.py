#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
DESCRIPTION

    Command line of iontrans:

        iontrans <mode> [--config PATH] [--seed S] [--workers W] [--out DIR] [-v] [-l LOG]

    The exit code is 0 when every point of the run succeeded, 1 when some failed (they are listed on standard error)
    and 2 for an invalid configuration.

LICENSE
    This script is in the public domain, free from copyrights or restrictions.
"""

# System/default
import sys

# Arguments
import argparse

# Messaging/logging
import logging
from logging.config import dictConfig

from iontrans.errors import ConfigError, IonTransError
from iontrans.harness import MODES, RunConfig, load_config, mode_entry_dict

###############################################################################
# global constants
###############################################################################
LEVEL = [logging.WARNING, logging.INFO, logging.DEBUG]

LOG_FORMAT = "[%(asctime)s] [%(levelname)s] — [%(name)s — %(funcName)s:%(lineno)d] %(message)s"
LOG_DATE_FORMAT = "%d/%b/%Y: %H:%M:%S "

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_CONFIG = 2


###############################################################################
# Functions
###############################################################################
def configure_logger(args) -> logging.Logger:
    """Route the log of the run to standard error and, with --log_file, to a file as well

    Parameters
    ----------
    args : argparse.Namespace
        The parsed command line; verbosity counts the -v flags

    Returns
    --------
    the logger of the command line: logging.Logger
    """
    level = LEVEL[min(args.verbosity, len(LEVEL) - 1)]

    handlers = {"console": {"class": "logging.StreamHandler", "formatter": "run", "level": level}}
    if args.log_file is not None:
        handlers["file"] = dict(handlers["console"], **{"class": "logging.FileHandler", "filename": args.log_file})

    dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {"run": {"format": LOG_FORMAT, "datefmt": LOG_DATE_FORMAT}},
            "handlers": handlers,
            "root": {"handlers": list(handlers), "level": level},
        }
    )
    return logging.getLogger(__name__)


def define_argument_parser() -> argparse.ArgumentParser:
    """Build the parser of the command line

    Returns
    --------
    The parser: argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(description="Simulate the photon-ion transfer through a trapped-ion chain")

    # Logging
    parser.add_argument("-l", "--log_file", default=None, help="Copy the log into this file")
    parser.add_argument("-v", "--verbosity", action="count", default=0, help="Log more (-v info, -vv debug)")

    # Run
    parser.add_argument("mode", choices=MODES, help="The run mode")
    parser.add_argument("-c", "--config", default=None, type=str, help="The JSON run configuration")
    parser.add_argument("-s", "--seed", default=None, type=int, help="The seed (overrides the configuration)")
    parser.add_argument(
        "-w", "--workers", default=None, type=int, help="The number of worker processes (overrides the configuration)"
    )
    parser.add_argument(
        "-o", "--out", default=None, type=str, help="The output directory (overrides the configuration)"
    )
    return parser


def main(argv=None) -> int:
    args = define_argument_parser().parse_args(argv)
    logger = configure_logger(args)

    try:
        cfg = load_config(args.config) if args.config is not None else RunConfig()
        cfg = cfg.with_overrides(mode=args.mode, seed=args.seed, workers=args.workers, out=args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    logger.info("Running %s into %s", cfg.mode, cfg.out)
    runner = mode_entry_dict[cfg.mode](cfg)
    try:
        failures = runner.run()
    except IonTransError as exc:
        failures = [f"{exc.__class__.__name__}: {exc}"]

    for failure in failures:
        print(failure, file=sys.stderr)
    if failures:
        logger.warning("%d failure(s)", len(failures))
        return EXIT_FAILURES
    return EXIT_OK


###############################################################################
#  Envelopping
###############################################################################
if __name__ == "__main__":
    sys.exit(main())
