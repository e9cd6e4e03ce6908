import argparse
import logging
import sys
import time
import traceback

from typing import Any, Dict, List, Optional, Tuple
from typing import TextIO

from qterm import __email__
from qterm.linalg import (
    NotSquare, NotHermitian, DimensionMismatch, InvalidTolerance
)
from qterm.subspaces import NotPSD
from qterm.channels import (
    DensityOperator, InvalidChannel, InvalidMeasurement, InvalidState
)
from qterm.program import (
    Program, IndexOutOfRange, SearchSpaceTooLarge, FragmentCalculusError
)
from qterm.reachability import reachable_basis_trace, fixpoint_chain
from qterm.divergence import diverging_states, IterationCapExceeded
from qterm.termination import (
    NoDivergingStep, InvalidSchedule, check_termination, resolve_schedule,
    simulate, infimum_lower_bound
)
from qterm.walks import Example, build_example
from qterm.config import Settings, InvalidSetting
from qterm.matrix import FieldError
from qterm import parsers
from qterm.parsers import ParseError
from qterm import report
from qterm.report import ReportFormat
from qterm.cli import cli, MyArgumentError

from qterm.exitcodes import (
    EXIT_KEYBOARD, EXIT_UNKNOWN, EXIT_INPUT_FORMAT, EXIT_ITERATION_CAP,
    EXIT_NO_WITNESS, EXIT_SYSERR
)

logger = logging.getLogger(__name__)


def load_program(
    infile: Optional[TextIO],
    example: Optional[Example],
    state: Optional[str],
    settings: Settings,
) -> Tuple[Program, DensityOperator]:
    """ The program and initial state selected on the command line.

    The state comes from --state, then the program file, then |0>.
    """

    if example is not None:
        program = build_example(example)
        stored = None
    else:
        assert infile is not None
        program, stored = parsers.read_program(infile, settings.tolerance)

    if state is not None:
        rho = parsers.parse_state(state, program.dim, settings.tolerance)
    elif stored is not None:
        rho = stored
    else:
        rho = DensityOperator.basis_state(program.dim, 0)

    return program, rho


def run_check(
    program: Program,
    rho: DensityOperator,
    settings: Settings,
) -> Tuple[Dict[str, Any], List[str]]:
    verdict = check_termination(
        program,
        rho,
        settings.tolerance,
        max_iter=settings.max_iterations,
        horizon=settings.horizon,
        n_jobs=settings.n_jobs,
    )
    return report.verdict_json(verdict), report.verdict_text(verdict)


def run_reach(
    program: Program,
    rho: DensityOperator,
    settings: Settings,
) -> Tuple[Dict[str, Any], List[str]]:
    trace = reachable_basis_trace(program, rho, settings.tolerance)
    steps = len(fixpoint_chain(program, rho, settings.tolerance)) - 1
    return (
        report.reachable_json(trace, steps),
        report.reachable_text(trace, steps)
    )


def run_diverge(
    program: Program,
    rho: DensityOperator,
    settings: Settings,
) -> Tuple[Dict[str, Any], List[str]]:
    result = diverging_states(
        program,
        settings.tolerance,
        max_iter=settings.max_iterations,
        n_jobs=settings.n_jobs,
    )
    return report.divergence_json(result), report.divergence_text(result)


def run_simulate(
    program: Program,
    rho: DensityOperator,
    settings: Settings,
    schedule: str,
    bound_length: Optional[int] = None,
) -> Tuple[Dict[str, Any], List[str]]:
    target, fragment = resolve_schedule(
        program,
        schedule,
        rho,
        settings.horizon
    )
    steps = simulate(target, fragment, rho)

    bound = None
    if bound_length is not None:
        if bound_length < 0:
            raise InvalidSetting("The bound length must not be negative.")

        probability = infimum_lower_bound(
            program,
            rho,
            bound_length,
            search_cap=settings.search_cap,
            n_jobs=settings.n_jobs,
        )
        bound = (bound_length, probability)

    description = schedule
    if schedule.strip() == "greedy":
        description = f"greedy ({fragment})"
    return (
        report.simulation_json(description, steps, bound),
        report.simulation_text(description, steps, bound)
    )


def _close(handle: TextIO) -> None:
    if handle is not sys.stdout:
        handle.close()
    return


RUNNERS = {
    "check": run_check,
    "reach": run_reach,
    "diverge": run_diverge,
}


def runner(args: argparse.Namespace) -> None:
    """ Runs the selected subcommand and writes its report. """

    if args.command == "example":
        program = build_example(args.name)
        state = None
        if args.state is not None:
            state = parsers.parse_state(args.state, program.dim)
        parsers.write_program(args.outhandle, program, state)
        _close(args.outhandle)
        return

    settings = Settings.from_namespace(args)
    program, rho = load_program(
        args.infile,
        args.example,
        args.state,
        settings
    )

    start = time.perf_counter()
    if args.command == "simulate":
        payload, lines = run_simulate(
            program,
            rho,
            settings,
            args.schedule,
            args.bound
        )
    else:
        payload, lines = RUNNERS[args.command](program, rho, settings)
    wall_time = time.perf_counter() - start

    document = report.report_document(
        args.command,
        settings,
        wall_time,
        payload
    )
    report.write_report(args.outhandle, document, lines, args.format)
    _close(args.outhandle)
    return


def setup_logging(verbose: bool, quiet: bool) -> None:
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.ERROR
    else:
        level = logging.WARNING

    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return


def main():  # noqa
    """ The cli interface to qterm. """

    try:
        args = cli(prog="qterm", args=sys.argv[1:])
    except MyArgumentError as e:
        print(e.message, file=sys.stderr)
        sys.exit(e.errno)

    setup_logging(
        getattr(args, "verbose", False),
        getattr(args, "quiet", False)
    )

    try:
        runner(args)

    except ParseError as e:
        if e.line is not None:
            header = "Failed to parse file <{}> at line {}.\n".format(
                e.filename, e.line)
        elif e.filename is not None:
            header = "Failed to parse <{}>.\n".format(e.filename)
        else:
            header = "Failed to parse the input.\n"

        print("{}\n{}".format(header, e.message), file=sys.stderr)
        sys.exit(EXIT_INPUT_FORMAT)

    except (
        FieldError,
        InvalidChannel,
        InvalidMeasurement,
        InvalidState,
        InvalidSchedule,
        InvalidTolerance,
        IndexOutOfRange,
        NotSquare,
        NotHermitian,
        NotPSD,
        DimensionMismatch,
        SearchSpaceTooLarge,
        InvalidSetting,
    ) as e:
        print(f"Invalid input.\n\n{e}", file=sys.stderr)
        sys.exit(EXIT_INPUT_FORMAT)

    except IterationCapExceeded as e:
        msg = (
            f"{e.message}\n"
            "Try a larger --max-iterations, or a larger --tolerance if the "
            "program is numerically noisy."
        )
        print(msg, file=sys.stderr)
        sys.exit(EXIT_ITERATION_CAP)

    except NoDivergingStep as e:
        msg = (
            "The program was found not to terminate, but no diverging "
            "schedule could be built for the witness.\n"
            "This usually means that the tolerance is too loose or too tight "
            "for this program.\n\n"
            f"{e.message}"
        )
        print(msg, file=sys.stderr)
        sys.exit(EXIT_NO_WITNESS)

    except OSError as e:
        msg = (
            "Encountered a system error.\n"
            "We can't control these, and they're usually related to your OS.\n"
            "Try running again.\n"
        )
        print(msg, file=sys.stderr)
        print(e.strerror, file=sys.stderr)
        sys.exit(EXIT_SYSERR)

    except MemoryError:
        msg = (
            "Ran out of memory!\n"
            "The analyses grow with the program dimension, so try a smaller "
            "program or a lower --search-cap."
        )
        print(msg, file=sys.stderr)
        sys.exit(EXIT_SYSERR)

    except KeyboardInterrupt:
        print("Received keyboard interrupt. Exiting.", file=sys.stderr)
        sys.exit(EXIT_KEYBOARD)

    except FragmentCalculusError as e:
        msg = (
            "Internal consistency check failed.\n"
            f"{e.message}\n"
            f"Please file a bug report with the authors at {__email__}."
        )
        print(msg, file=sys.stderr)
        sys.exit(EXIT_UNKNOWN)

    except Exception as e:
        msg = (
            "I'm so sorry, but we've encountered an unexpected error.\n"
            "This shouldn't happen, so please file a bug report with the "
            "authors.\nWe will be extremely grateful!\n\n"
            "You can email us at {}.\n\n"
            "Please attach a copy of the following message:"
        ).format(__email__)
        print(msg, file=sys.stderr)
        print(e, file=sys.stderr)
        traceback.print_exc(file=sys.stderr)
        sys.exit(EXIT_UNKNOWN)

    return


if __name__ == '__main__':
    main()
