"""
Main Entry Point
Schatten class entropy lab.
Run this file with a command, e.g. ``python main.py rate --p 1 --q 2 --N 4 --n 8``.
"""
import logging
import sys

from ui.cli import build_parser, execute


def main(argv=None):
    """Parse the command line, set up logging and run the command."""
    args = build_parser().parse_args(argv)
    # Logs go to stderr; stdout keeps the one-line summary
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
