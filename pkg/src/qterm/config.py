""" Run-time settings shared by the analyses and the command line. """

import argparse
from typing import NamedTuple
from typing import Any, Dict

from qterm.linalg import DEFAULT_TOLERANCE, Tolerance

DEFAULT_MAX_ITERATIONS = 64
DEFAULT_HORIZON = 200
DEFAULT_SEARCH_CAP = 1_000_000
DEFAULT_N_JOBS = 1


class InvalidSetting(Exception):

    def __init__(self, message: str):
        self.message = message
        return

    def __str__(self) -> str:
        return self.message


class Settings(NamedTuple):

    tolerance: Tolerance = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    horizon: int = DEFAULT_HORIZON
    search_cap: int = DEFAULT_SEARCH_CAP
    n_jobs: int = DEFAULT_N_JOBS

    def validate(self) -> "Settings":
        self.tolerance.validate()

        if self.max_iterations < 1:
            raise InvalidSetting("The iteration cap must be at least 1.")
        elif self.horizon < 0:
            raise InvalidSetting("The horizon must not be negative.")
        elif self.search_cap < 1:
            raise InvalidSetting("The search cap must be at least 1.")
        elif self.n_jobs == 0:
            raise InvalidSetting("n_jobs must not be 0.")
        return self

    def as_serializable(self) -> Dict[str, Any]:
        return {
            "max_iterations": self.max_iterations,
            "horizon": self.horizon,
            "search_cap": self.search_cap,
            "n_jobs": self.n_jobs,
        }

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "Settings":
        """ Settings from parsed arguments. Missing attributes keep the
        defaults, so every subcommand can share this.
        """

        tolerance = getattr(args, "tolerance", None)
        return cls(
            tolerance=(
                DEFAULT_TOLERANCE
                if tolerance is None
                else Tolerance.from_contain(tolerance)
            ),
            max_iterations=getattr(
                args,
                "max_iterations",
                DEFAULT_MAX_ITERATIONS
            ),
            horizon=getattr(args, "horizon", DEFAULT_HORIZON),
            search_cap=getattr(args, "search_cap", DEFAULT_SEARCH_CAP),
            n_jobs=getattr(args, "n_jobs", DEFAULT_N_JOBS),
        ).validate()
