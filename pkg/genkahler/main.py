#!/usr/bin/env python3
"""
Main entry point for the genkahler command line.
"""
import sys
import logging
import argparse
from pathlib import Path

from genkahler.cli.commands import report_filename, report_json, run_scenario
from genkahler.config import LOG_FILE, MAX_ORDER, ExitCode, Verdict
from genkahler.core.errors import GenKahlerError, UndecidedError, UsageError
from genkahler.core.models import RunSettings
from genkahler.data.corpus import Corpus, resolve_scenario


# Configure logging
def setup_logging(verbose=False):
    """Set up logging configuration."""
    log_level = logging.DEBUG if verbose else logging.INFO
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    handlers = [logging.StreamHandler(sys.stderr)]
    if LOG_FILE:
        handlers.append(logging.FileHandler(LOG_FILE))

    # Configure root logger
    logging.basicConfig(level=log_level, format=log_format, handlers=handlers, force=True)

    # sympy's polys modules are chatty at DEBUG
    logging.getLogger('sympy').setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='genkahler',
        description='Exact checks for generalized complex and Kaehler geometry on polynomial charts',
    )
    parser.add_argument('command', nargs='?', default='run', choices=['run', 'list-corpus'],
                        help='Run a scenario (default) or list the shipped corpus')
    parser.add_argument('--scenario', help='Scenario file or corpus name')
    parser.add_argument('--seed', type=int, help='Override the scenario seed')
    parser.add_argument('--order', type=int, help=f'Truncation order T (1..{MAX_ORDER})')
    parser.add_argument('--samples', type=int, help='Sample points per pointwise check')
    parser.add_argument('--degree-bound', type=int, help='Degree bound D for the deformation solver')
    parser.add_argument('--json-out', type=Path,
                        help='Write the report to this file, or into this directory, instead of stdout')
    parser.add_argument('-v', '--verbose', action='store_true', help='Enable verbose logging')
    return parser


def exit_code_for(verdict: str) -> int:
    return {
        Verdict.PASS: ExitCode.PASS,
        Verdict.FAIL: ExitCode.FAILED,
        Verdict.UNDECIDED: ExitCode.UNDECIDED,
    }[verdict]


def main(argv=None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    logger = logging.getLogger(__name__)

    if args.command == 'list-corpus':
        for name in Corpus().names():
            print(name)
        return ExitCode.PASS

    if not args.scenario:
        logger.error("--scenario is required")
        return ExitCode.USAGE

    try:
        scenario = resolve_scenario(args.scenario)
        if args.order is not None and not 1 <= args.order <= MAX_ORDER:
            raise UsageError(f"--order must be in 1..{MAX_ORDER}")
        settings = RunSettings.for_scenario(
            scenario,
            seed=args.seed,
            order=args.order,
            samples=args.samples,
            degree_bound=args.degree_bound,
        )
        logger.info(f"Running scenario {scenario.name} (seed={settings.seed}, order={settings.order})")
        report = run_scenario(scenario, settings)
    except UsageError as e:
        logger.error(f"Usage error [{e.code}]: {e}")
        return ExitCode.USAGE
    except UndecidedError as e:
        logger.warning(f"Undecided [{e.code}]: {e}")
        return ExitCode.UNDECIDED
    except GenKahlerError as e:
        logger.error(f"Failed [{e.code}]: {e}")
        return ExitCode.FAILED

    text = report_json(report)
    if args.json_out:
        out = args.json_out
        if out.is_dir():
            out = out / report_filename(scenario.name)
        out.write_text(text, encoding='utf-8')
        logger.info(f"Report written to {out}")
    else:
        sys.stdout.write(text)
    return exit_code_for(report.verdict)


if __name__ == '__main__':
    sys.exit(main())
