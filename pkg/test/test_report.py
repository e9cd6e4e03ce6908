import json
from io import StringIO

import numpy as np
import pytest

from qterm.config import Settings
from qterm.report import (
    ReportFormat, format_real, format_complex, format_ket, report_document,
    divergence_json, divergence_text, write_report
)
from qterm.divergence import diverging_states
from qterm.walks import build_example

S2 = 1 / np.sqrt(2)


@pytest.mark.parametrize("x,expected", [
    (0.0, "0"),
    (1e-12, "0"),
    (S2, "1/√2"),
    (-1 / np.sqrt(3), "-1/√3"),
    (0.25, "0.25"),
])
def test_format_real(x, expected):
    assert format_real(x) == expected
    return


def test_format_complex():
    assert format_complex(0.5j) == "0.5i"
    assert format_complex(0.5 - 0.25j) == "(0.5-0.25i)"
    return


@pytest.mark.parametrize("vector,expected", [
    ([1, 0, 0, 0], "|0>"),
    ([0, S2, 0, -S2], "1/√2|1> - 1/√2|3>"),
    ([0, -S2, 0, S2], "-1/√2|1> + 1/√2|3>"),
    ([0, 0], "0"),
])
def test_format_ket(vector, expected):
    assert format_ket(np.array(vector)) == expected
    return


def test_divergence_report():
    result = diverging_states(build_example("c4-nondet"))
    document = report_document(
        "diverge",
        Settings(),
        0.0,
        divergence_json(result)
    )

    handle = StringIO()
    write_report(handle, document, [], ReportFormat.json)
    doc = json.loads(handle.getvalue())
    assert doc["format_version"] == 1
    assert doc["tool"]["program"] == "qterm"
    assert [c["fragment"] for c in doc["pd"]] == ["1", "2"]

    handle = StringIO()
    lines = divergence_text(result)
    write_report(handle, document, lines, ReportFormat.text)
    text = handle.getvalue()
    assert text.startswith("Diverging pure states (2 components")
    assert "1/√2|1> - 1/√2|3>" in text
    return
