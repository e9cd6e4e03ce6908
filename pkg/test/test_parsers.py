import json
import logging
from io import StringIO

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qterm.matrix import FieldError, decode_matrix, decode_vector
from qterm.parsers import (
    ParseError, decode_program, read_program, write_program, encode_program,
    parse_state
)
from qterm.walks import build_example, vertex_state


def minimal_doc() -> dict:
    return {
        "format_version": 1,
        "dimension": 2,
        "kraus_sets": [[[[0, 1], [1, 0]]]],
        "measurement": {
            "m0": [[1, 0], [0, 0]],
            "m1": [[0, 0], [0, 1]],
        },
    }


def test_decode_real_and_complex_entries():
    m = decode_matrix([[1, [0, 2]], [[0.5, -0.5], 0]], "m", 2)
    assert_allclose(m, [[1, 2j], [0.5 - 0.5j, 0]])
    assert_allclose(decode_vector([0.6, [0, 0.8]], "v"), [0.6, 0.8j])
    return


@pytest.mark.parametrize("value,field", [
    ([[1, 0]], "m"),
    ([[1, 0], [0]], "m[1]"),
    ([[1, 0], [0, "x"]], "m[1][1]"),
    ([[1, 0], [0, [1, 2, 3]]], "m[1][1]"),
    ("nope", "m"),
])
def test_decode_matrix_errors(value, field):
    with pytest.raises(FieldError) as info:
        decode_matrix(value, "m", 2)
    assert info.value.field == field
    return


def test_decode_minimal_program():
    parsed = decode_program(minimal_doc())
    assert parsed.program.dim == 2
    assert parsed.program.nprocesses == 1
    assert parsed.initial_state is None
    return


def test_decode_vector_state_is_normalised(caplog):
    doc = minimal_doc()
    doc["initial_state"] = {"vector": [3, 4]}

    with caplog.at_level(logging.WARNING):
        parsed = decode_program(doc)

    assert_allclose(np.diag(parsed.initial_state.matrix), [0.36, 0.64])
    assert "normalising" in caplog.text
    return


@pytest.mark.parametrize("key,value,field", [
    ("dimension", 0, "dimension"),
    ("dimension", True, "dimension"),
    ("kraus_sets", [], "kraus_sets"),
    ("kraus_sets", [[[[1, 0], [0, 0]]]], "kraus_sets[0]"),
    ("measurement", {"m0": [[1, 0], [0, 0]]}, "measurement.m1"),
    ("measurement", {"m0": [[1, 0], [0, 0]], "m1": [[1, 0], [0, 0]]},
     "measurement"),
    ("format_version", 2, "format_version"),
    ("initial_state", {"vector": [1, 0, 0]}, "initial_state.vector"),
    ("initial_state", {"pure": [1, 0]}, "initial_state"),
])
def test_decode_program_errors(key, value, field):
    doc = minimal_doc()
    doc[key] = value
    with pytest.raises(FieldError) as info:
        decode_program(doc)
    assert info.value.field == field
    return


def test_missing_field():
    doc = minimal_doc()
    del doc["measurement"]
    with pytest.raises(FieldError) as info:
        decode_program(doc)
    assert info.value.field == "measurement"
    return


def test_read_program_reports_line_of_syntax_error():
    handle = StringIO('{\n  "dimension": 2,\n  "kraus_sets": [,]\n}\n')
    with pytest.raises(ParseError) as info:
        read_program(handle)
    assert info.value.line == 3
    return


def test_read_program_reports_field():
    doc = minimal_doc()
    doc["kraus_sets"] = [[[[1, 0], [0, 1]], [[0, 1], [1, 0]]]]
    with pytest.raises(ParseError) as info:
        read_program(StringIO(json.dumps(doc)))
    assert str(info.value).startswith("kraus_sets[0]:")
    assert info.value.line is None
    return


def test_write_then_read_is_exact():
    program = build_example("c4-nondet")
    handle = StringIO()
    write_program(handle, program, vertex_state(0))

    handle.seek(0)
    parsed = read_program(handle)

    for a, b in zip(parsed.program.processes, program.processes):
        assert np.array_equal(a.kraus, b.kraus)
    assert np.array_equal(
        parsed.program.measurement.m1,
        program.measurement.m1
    )
    assert np.array_equal(parsed.initial_state.matrix, vertex_state(0).matrix)

    assert "initial_state" not in encode_program(program)
    return


@pytest.mark.parametrize("text,diag", [
    ("0", [1, 0]),
    (" 1 ", [0, 1]),
    ("[0.6, 0.8]", [0.36, 0.64]),
    ("[[0, 0.6], [0.8, 0]]", [0.36, 0.64]),
    ("[3, 4]", [0.36, 0.64]),
])
def test_parse_state(text, diag):
    rho = parse_state(text, 2)
    assert_allclose(np.diag(rho.matrix).real, diag, atol=1e-12)
    return


@pytest.mark.parametrize("text", ["2", "[1, 0, 0]", "[0, 0]", "zero", "[]"])
def test_parse_state_errors(text):
    with pytest.raises(ParseError) as info:
        parse_state(text, 2)
    assert info.value.filename == "--state"
    return
