import argparse
import sys

from typing import List

from qterm.walks import Example
from qterm.report import ReportFormat
from qterm.config import (
    DEFAULT_MAX_ITERATIONS, DEFAULT_HORIZON, DEFAULT_SEARCH_CAP,
    DEFAULT_N_JOBS
)

from qterm import __version__

from qterm.exitcodes import (
    EXIT_VALID, EXIT_KEYBOARD, EXIT_UNKNOWN, EXIT_CLI, EXIT_INPUT_FORMAT,
    EXIT_ITERATION_CAP, EXIT_NO_WITNESS, EXIT_INPUT_NOT_FOUND, EXIT_SYSERR,
    EXIT_CANT_OUTPUT
)


class MyArgumentParser(argparse.ArgumentParser):

    def error(self, message: str):
        """ Override default to have more informative exit codes. """
        self.print_usage(sys.stderr)
        raise MyArgumentError("{}: error: {}".format(self.prog, message))


class MyArgumentError(Exception):

    def __init__(self, message: str):
        self.message = message
        self.errno = EXIT_CLI

        # argparse only gives us the message for file errors.
        if "No such file or directory" in message:
            if "infile" in message:
                self.errno = EXIT_INPUT_NOT_FOUND
            elif "outfile" in message:
                self.errno = EXIT_CANT_OUTPUT
        return


EPILOG = (
    "Exit codes:\n\n"
    f"{EXIT_VALID} - Everything's fine\n"
    f"{EXIT_KEYBOARD} - Keyboard interrupt\n"
    f"{EXIT_CLI} - Invalid command line usage\n"
    f"{EXIT_INPUT_FORMAT} - Input format error\n"
    f"{EXIT_ITERATION_CAP} - Diverging states did not converge\n"
    f"{EXIT_NO_WITNESS} - Could not build a diverging schedule\n"
    f"{EXIT_INPUT_NOT_FOUND} - Cannot open the input\n"
    f"{EXIT_SYSERR} - System error\n"
    f"{EXIT_CANT_OUTPUT} - Can't create output file\n"
    f"{EXIT_UNKNOWN} - Unhandled exception, please file a bug!\n"
)


def _positive_float(s: str) -> float:
    try:
        value = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid float value: '{s}'")

    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got '{s}'")
    return value


def _common(parser: argparse.ArgumentParser) -> None:
    """ Options shared by all analysis subcommands. """

    parser.add_argument(
        "infile",
        nargs="?",
        default=None,
        type=argparse.FileType('r'),
        help=(
            "Path to the program file (JSON). "
            "Not needed if --example is given."
        )
    )

    parser.add_argument(
        "-e", "--example",
        default=None,
        type=Example.from_string,
        choices=list(Example),
        help="Analyse one of the packaged example programs instead of a file."
    )

    parser.add_argument(
        "-s", "--state",
        default=None,
        type=str,
        help=(
            "The initial state, either a basis index (e.g. 0) or a JSON "
            "vector (e.g. '[0.6, 0.8]', complex entries as [re, im] pairs). "
            "Vectors that are not normalised are normalised with a warning. "
            "Defaults to the state in the program file, or |0>."
        )
    )

    parser.add_argument(
        "-t", "--tolerance",
        default=None,
        type=_positive_float,
        help=(
            "Largest residual counted as containment between subspaces. "
            "The rank and probability cut-offs are set to a tenth of it. "
            "Default 1e-8."
        )
    )

    parser.add_argument(
        "--max-iterations",
        dest="max_iterations",
        default=DEFAULT_MAX_ITERATIONS,
        type=int,
        help=(
            "Give up computing the diverging states after this many "
            f"iterations. Default {DEFAULT_MAX_ITERATIONS}."
        )
    )

    parser.add_argument(
        "--horizon",
        default=DEFAULT_HORIZON,
        type=int,
        help=(
            "Length of witness and greedy schedules. "
            f"Default {DEFAULT_HORIZON}."
        )
    )

    parser.add_argument(
        "--search-cap",
        dest="search_cap",
        default=DEFAULT_SEARCH_CAP,
        type=int,
        help=(
            "Refuse exhaustive fragment searches over more than this many "
            f"fragments. Default {DEFAULT_SEARCH_CAP}."
        )
    )

    parser.add_argument(
        "-j", "--n-jobs",
        dest="n_jobs",
        default=DEFAULT_N_JOBS,
        type=int,
        help=(
            "Number of threads to use for independent subspace computations. "
            "-1 uses all cores."
        )
    )

    parser.add_argument(
        "-f", "--format",
        dest="format",
        default=ReportFormat.text,
        type=ReportFormat.from_string,
        choices=list(ReportFormat),
        help="Write the report as plain text (default) or JSON."
    )

    parser.add_argument(
        "-o", "--outfile",
        dest="outhandle",
        default=sys.stdout,
        type=argparse.FileType('w'),
        help="File path to write the report to. Default is STDOUT."
    )

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose",
        action="store_true",
        default=False,
        help="Log progress and debugging information to STDERR."
    )

    verbosity.add_argument(
        "-q", "--quiet",
        action="store_true",
        default=False,
        help="Only log errors."
    )
    return


def cli(prog: str, args: List[str]) -> argparse.Namespace:

    parser = MyArgumentParser(
        prog=prog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description=(
            "Decide whether a nondeterministic quantum program terminates "
            "with probability 1 under every scheduler.\n\n"
            "Examples:\n\n"
            "```bash\n"
            "$ %(prog)s check --example c4-nondet --state 0\n"
            "$ %(prog)s example c4-nondet -o walk.json\n"
            "$ %(prog)s diverge walk.json --format json\n"
            "$ %(prog)s simulate walk.json --state 0 --schedule 12121212\n"
            "```\n"
        ),
        epilog=EPILOG,
    )

    parser.add_argument(
        '--version',
        action='version',
        version='%(prog)s {}'.format(__version__),
        help="Print the version of %(prog)s and exit"
    )

    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    check = subparsers.add_parser(
        "check",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        help="Decide termination and give a witness if it fails.",
        epilog=EPILOG,
    )
    _common(check)

    reach = subparsers.add_parser(
        "reach",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        help="Compute the space reachable from the initial state.",
        epilog=EPILOG,
    )
    _common(reach)

    diverge = subparsers.add_parser(
        "diverge",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        help="Compute the pure states that can run forever.",
        epilog=EPILOG,
    )
    _common(diverge)

    simulate = subparsers.add_parser(
        "simulate",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        help="Run a schedule and report the termination probability.",
        epilog=EPILOG,
    )
    _common(simulate)
    simulate.add_argument(
        "--schedule",
        default="greedy",
        type=str,
        help=(
            "The schedule to run. Either process indices (e.g. 1212 or "
            "1,2,1,2), 'greedy' to pick the process least likely to halt at "
            "each step, or 'uniform:N' to run N steps of the average "
            "program. Default 'greedy'."
        )
    )

    simulate.add_argument(
        "--bound",
        default=None,
        type=int,
        help=(
            "Also report the smallest termination probability over all "
            "fragments of this length, a lower bound for every scheduler. "
            "Searches at most --search-cap fragments."
        )
    )

    example = subparsers.add_parser(
        "example",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        help="Write a packaged example as a program file.",
        epilog=EPILOG,
    )

    example.add_argument(
        "name",
        type=Example.from_string,
        choices=list(Example),
        help="The example to write."
    )

    example.add_argument(
        "-s", "--state",
        default=None,
        type=str,
        help="Store this initial state in the program file."
    )

    example.add_argument(
        "-o", "--outfile",
        dest="outhandle",
        default=sys.stdout,
        type=argparse.FileType('w'),
        help="File path to write the program to. Default is STDOUT."
    )

    parsed = parser.parse_args(args)

    if parsed.command != "example":
        if parsed.infile is None and parsed.example is None:
            parser.error("either an infile or --example is required.")
        elif parsed.infile is not None and parsed.example is not None:
            parser.error("infile and --example cannot be used together.")

    return parsed
