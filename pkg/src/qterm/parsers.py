"""
Reading and writing program files and state arguments.

A program file is a JSON document:

    {
      "format_version": 1,
      "dimension": 4,
      "kraus_sets": [[matrix, ...], ...],
      "measurement": {"m0": matrix, "m1": matrix},
      "initial_state": {"vector": vector} or {"density": matrix}
    }

initial_state is optional. Matrices and vectors are encoded as described in
`qterm.matrix`.
"""

import json
import logging

from typing import NamedTuple
from typing import Any, Dict, Optional
from typing import TextIO

import numpy as np

from qterm.linalg import DEFAULT_TOLERANCE, Tolerance
from qterm.channels import (
    SuperOperator, Measurement, DensityOperator,
    InvalidChannel, InvalidMeasurement, InvalidState
)
from qterm.program import Program
from qterm.matrix import (
    FieldError, decode_matrix, decode_vector, encode_matrix, encode_vector
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class ParseError(Exception):
    """ Some aspect of parsing failed. """

    def __init__(
        self,
        filename: Optional[str],
        line: Optional[int],
        message: str
    ):
        self.filename = filename
        self.line = line
        self.message = message
        return

    def __str__(self) -> str:
        return self.message


class ProgramFile(NamedTuple):

    program: Program
    initial_state: Optional[DensityOperator]


def _handle_name(handle: TextIO) -> Optional[str]:
    return getattr(handle, "name", None)


def _require(doc: Dict[str, Any], key: str, field: str = "") -> Any:
    if key not in doc:
        raise FieldError(f"{field}{key}", "Required field is missing.")
    return doc[key]


def _decode_state(
    value: Any,
    dim: int,
    tol: Tolerance,
) -> DensityOperator:
    if not isinstance(value, dict) or len(value) != 1:
        raise FieldError(
            "initial_state",
            "Expected an object with exactly one of 'vector' or 'density'."
        )

    if "vector" in value:
        vector = decode_vector(value["vector"], "initial_state.vector")
        if vector.shape[0] != dim:
            raise FieldError(
                "initial_state.vector",
                f"Expected {dim} entries, found {vector.shape[0]}."
            )
        return pure_state(vector, tol)

    elif "density" in value:
        matrix = decode_matrix(value["density"], "initial_state.density", dim)
        try:
            return DensityOperator(matrix, tol)
        except InvalidState as e:
            raise FieldError("initial_state.density", e.message)

    raise FieldError(
        "initial_state",
        "Expected an object with exactly one of 'vector' or 'density'."
    )


def decode_program(
    doc: Any,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> ProgramFile:
    """ Build and validate a program from a decoded JSON document. """

    if not isinstance(doc, dict):
        raise FieldError("<root>", "Expected a JSON object.")

    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise FieldError(
            "format_version",
            f"Unsupported format version {version!r}, expected "
            f"{FORMAT_VERSION}."
        )

    dim = _require(doc, "dimension")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise FieldError("dimension", "Expected a positive integer.")

    kraus_sets = _require(doc, "kraus_sets")
    if not isinstance(kraus_sets, list) or len(kraus_sets) == 0:
        raise FieldError("kraus_sets", "Expected a non-empty list.")

    processes = []
    for i, kraus_set in enumerate(kraus_sets):
        field = f"kraus_sets[{i}]"
        if not isinstance(kraus_set, list) or len(kraus_set) == 0:
            raise FieldError(field, "Expected a non-empty list of matrices.")

        mats = [
            decode_matrix(k, f"{field}[{j}]", dim)
            for j, k
            in enumerate(kraus_set)
        ]

        try:
            processes.append(SuperOperator(mats, tol=tol))
        except InvalidChannel as e:
            raise FieldError(field, e.message)

    measurement = _require(doc, "measurement")
    if not isinstance(measurement, dict):
        raise FieldError("measurement", "Expected an object.")

    m0 = decode_matrix(
        _require(measurement, "m0", "measurement."),
        "measurement.m0",
        dim
    )
    m1 = decode_matrix(
        _require(measurement, "m1", "measurement."),
        "measurement.m1",
        dim
    )

    try:
        meas = Measurement(m0, m1, tol)
    except InvalidMeasurement as e:
        raise FieldError("measurement", e.message)

    program = Program(processes, meas, tol)

    initial = doc.get("initial_state", None)
    state = None if initial is None else _decode_state(initial, dim, tol)
    return ProgramFile(program, state)


def read_program(
    handle: TextIO,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> ProgramFile:
    """ Parse a program file.

    Keyword arguments:
    handle -- A file-like object with the JSON document.
    tol -- Tolerances used to validate the program.

    Returns:
    ProgramFile -- The program and its initial state, if the file has one.

    Raises:
    ParseError -- With the line number for JSON syntax errors and the field
        path for values that are missing or invalid.
    """

    name = _handle_name(handle)

    try:
        doc = json.load(handle)
    except json.JSONDecodeError as e:
        raise ParseError(name, e.lineno, f"Invalid JSON: {e.msg}.")

    try:
        return decode_program(doc, tol)
    except FieldError as e:
        raise ParseError(name, None, str(e))


def encode_program(
    program: Program,
    initial_state: Optional[DensityOperator] = None,
) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "dimension": program.dim,
        "kraus_sets": [
            [encode_matrix(k) for k in p.kraus]
            for p
            in program.processes
        ],
        "measurement": {
            "m0": encode_matrix(program.measurement.m0),
            "m1": encode_matrix(program.measurement.m1),
        },
    }

    if initial_state is not None:
        doc["initial_state"] = {"density": encode_matrix(initial_state.matrix)}
    return doc


def write_program(
    handle: TextIO,
    program: Program,
    initial_state: Optional[DensityOperator] = None,
) -> None:
    """ Write a program file. Floats are written with their shortest
    round-trip representation, so reading the file back gives identical
    matrices.
    """

    json.dump(encode_program(program, initial_state), handle, indent=2)
    handle.write("\n")
    return


def pure_state(
    vector: np.ndarray,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> DensityOperator:
    """ |psi><psi|, normalising psi with a warning if needed. """

    size = float(np.linalg.norm(vector))
    if size == 0:
        raise InvalidState("The zero vector is not a state.")

    if abs(size - 1) > tol.eps_prob:
        logger.warning("State vector has norm %.12g, normalising it.", size)
        vector = vector / size

    return DensityOperator.from_pure(vector, tol)


def parse_state(
    text: str,
    dim: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> DensityOperator:
    """ A state given on the command line.

    Either a basis index ("0") or a JSON vector ("[0.6, 0.8]" or
    "[[0.6, 0], [0, 0.8]]").
    """

    text = text.strip()
    if text.isdigit():
        index = int(text)
        if index >= dim:
            raise ParseError(
                "--state",
                None,
                f"Basis index {index} is outside of 0..{dim - 1}."
            )
        return DensityOperator.basis_state(dim, index)

    try:
        value = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            "--state",
            None,
            f"Expected a basis index or a JSON vector: {e.msg}."
        )

    try:
        vector = decode_vector(value, "--state")
    except FieldError as e:
        raise ParseError("--state", None, str(e))

    if vector.shape[0] != dim:
        raise ParseError(
            "--state",
            None,
            f"Expected {dim} entries, found {vector.shape[0]}."
        )

    try:
        return pure_state(vector, tol)
    except InvalidState as e:
        raise ParseError("--state", None, e.message)
