"""
Plain JSON encoding of complex matrices and vectors.

A complex number is written as a [re, im] pair. A vector is a list of
numbers and a matrix is a list of rows. Plain real numbers are accepted in
place of pairs when reading.
"""

import math
from typing import Any, List

import numpy as np

from qterm.linalg import DTYPE


class FieldError(Exception):
    """ A value in a document does not have the expected shape or type.

    field is the path to the value, e.g. "kraus_sets[0][1][2]".
    """

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        return

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


def _finite(x: Any, field: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FieldError(field, f"Expected a number, got {x!r}.")

    x = float(x)
    if not math.isfinite(x):
        raise FieldError(field, "Numbers must be finite.")
    return x


def decode_scalar(value: Any, field: str) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise FieldError(
                field,
                "A complex number must be a [re, im] pair."
            )
        re, im = value
        return complex(_finite(re, field), _finite(im, field))

    return complex(_finite(value, field), 0.0)


def encode_scalar(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def decode_vector(value: Any, field: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) == 0:
        raise FieldError(field, "Expected a non-empty list of numbers.")

    return np.array(
        [decode_scalar(v, f"{field}[{i}]") for i, v in enumerate(value)],
        dtype=DTYPE
    )


def encode_vector(vector: np.ndarray) -> List[List[float]]:
    return [encode_scalar(z) for z in np.asarray(vector).reshape(-1)]


def decode_matrix(
    value: Any,
    field: str,
    dim: int = -1,
    ncols: int = -1,
) -> np.ndarray:
    """ Read a matrix, checking its shape.

    Keyword arguments:
    value -- The decoded JSON value.
    field -- Path of the value, used in error messages.
    dim -- Required number of rows (and columns, unless ncols is given).
        Negative means any.
    ncols -- Required number of columns. Negative means the same as dim.
    """

    if not isinstance(value, list):
        raise FieldError(field, "Expected a matrix as a list of rows.")

    if dim >= 0 and len(value) != dim:
        raise FieldError(
            field,
            f"Expected {dim} rows, found {len(value)}."
        )

    width = ncols if ncols >= 0 else dim
    rows = []
    for i, row in enumerate(value):
        rfield = f"{field}[{i}]"
        if not isinstance(row, list):
            raise FieldError(rfield, "Expected a row as a list of numbers.")

        if width < 0:
            width = len(row)

        if len(row) != width:
            raise FieldError(
                rfield,
                f"Expected {width} entries, found {len(row)}."
            )

        rows.append([
            decode_scalar(v, f"{rfield}[{j}]")
            for j, v
            in enumerate(row)
        ])

    return np.array(rows, dtype=DTYPE).reshape(len(rows), max(width, 0))


def encode_matrix(matrix: np.ndarray) -> List[List[List[float]]]:
    return [encode_vector(row) for row in np.asarray(matrix)]
