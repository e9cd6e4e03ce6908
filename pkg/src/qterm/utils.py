""" Utility functions to make programming easier. """

import logging

import functools
import inspect

from typing import Any

import numpy as np


def short_repr(value: Any) -> str:
    """ A log-friendly representation of an argument or return value.

    Arrays are summarised by shape and dtype, objects with a `dim`
    attribute (subspaces, super-operators) by that dimension.
    Everything else falls back to `repr`, truncated.
    """

    if isinstance(value, np.ndarray):
        return f"<array {value.shape} {value.dtype}>"
    elif isinstance(value, (list, tuple)) and len(value) > 4:
        return f"<{type(value).__name__} of {len(value)}>"

    dim = getattr(value, "dim", None)
    if isinstance(dim, int):
        return f"<{type(value).__name__} dim={dim}>"

    r = repr(value)
    if len(r) > 80:
        r = r[:77] + "..."
    return r


def log(logger, level=logging.DEBUG):
    """ A decorator function to automatically log function calls.

    The numerical routines take matrices and subspaces, so arguments and
    results are summarised with `short_repr` rather than printed in full.

    To use:

    >>> logger = logging.getLogger(__name__)
    >>> @log(logger, logging.DEBUG)
    ... def my_function(one, two):
    ...     return one + two
    >>> my_function(1, 2)
    3

    This would also log something like...
    DEBUG utils Called my_function(one=1, two=2)
    DEBUG utils Return my_function -> 3
    """

    def decorator(function):
        signature = inspect.signature(function)

        @functools.wraps(function)
        def wrapper(*args, **kwargs):
            # Don't bother binding the signature if nobody is listening.
            if not logger.isEnabledFor(level):
                return function(*args, **kwargs)

            bound = signature.bind(*args, **kwargs)
            bound.apply_defaults()
            params = ", ".join(
                f"{k}={short_repr(v)}"
                for k, v
                in bound.arguments.items()
            )

            logger.log(level, "Called %s(%s)", function.__name__, params)
            result = function(*args, **kwargs)
            logger.log(
                level,
                "Return %s -> %s",
                function.__name__,
                short_repr(result)
            )
            return result
        return wrapper
    return decorator
