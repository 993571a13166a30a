"""
MagLat - Command Line Interface
===============================
Run magnetic lattice topology tasks from a JSON configuration.

Usage:
    python maglat.py <task> --config <file> [--out <dir>] [--set key=value ...]

Examples:
    python maglat.py duality --config iwatsuka.json
    python maglat.py power-rieffel --config pr.json --set power_rieffel.K=120
    python maglat.py spectrum --config iwatsuka.json --out results --set numerics.k_points=801
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from config import setup_logging
from core.exceptions import MagLatError
from core.runconfig import TASKS, parse_config
from core.tasks import run


# Module logger
logger = setup_logging(logging.INFO)


def parse_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    """
    Parse command line arguments.

    Returns:
        Parsed arguments namespace.
    """
    parser = argparse.ArgumentParser(
        prog='maglat',
        description='Magnetic lattice operators, Chern numbers and interface windings',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
Exit codes:
  0  success
  1  I/O failure while writing results
  2  invalid configuration
  3  numerical failure (closed gap, non-integer winding, rank jump)

Environment:
  MAGLAT_THREADS  caps the worker threads used for momentum sweeps
        '''
    )

    parser.add_argument(
        'task',
        choices=TASKS,
        help='Task to run'
    )
    parser.add_argument(
        '--config', '-c',
        required=True,
        help='JSON run configuration'
    )
    parser.add_argument(
        '--out', '-o',
        default='',
        help='Output directory (overrides output.directory)'
    )
    parser.add_argument(
        '--set',
        dest='overrides',
        action='append',
        default=[],
        metavar='KEY=VALUE',
        help='Override a configuration entry, e.g. numerics.strip=80'
    )
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Enable verbose output'
    )

    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    """
    Main entry point for the CLI.

    Returns:
        Exit code (0, 1, 2 or 3).
    """
    args = parse_arguments(argv)

    if args.verbose:
        setup_logging(logging.DEBUG)

    try:
        config = parse_config(args.config, args.overrides, task=args.task)
    except MagLatError as e:
        logger.error("Configuration rejected: %s", e)
        print(f"❌ {e}")
        return e.exit_code

    if args.out:
        config = dataclasses.replace(config, output=dataclasses.replace(config.output, directory=args.out))

    print(f"🧲 Running task '{config.task}'")
    code, bundle = run(config)

    if code == 0:
        print(f"💾 Results written to {config.output.directory}")
        result = bundle.report.get("result", {})
        if config.task == "duality":
            mark = "✅" if result.get("duality_holds") else "⚠️ "
            print(f"{mark} W={result.get('winding')}  N-={result.get('N_minus')}  "
                  f"N+={result.get('N_plus')}  flow={result.get('spectral_flow')}")
        else:
            print("✅ Done")
    else:
        error = bundle.report.get("error", {})
        print(f"❌ {error.get('message', 'failed')} ({error.get('details', '')})")
    return code


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n⚠️  Cancelled")
        sys.exit(130)
    except Exception as e:
        logger.exception("Fatal error")
        print(f"❌ Fatal error: {e}")
        sys.exit(1)
