"""
Rendering analysis results as JSON documents or plain text.

Text output writes vectors in ket notation, spelling entries such as
1/sqrt(2) exactly when they match one within 1e-9.
"""

import json
from typing import Any, Dict, List, Optional, Sequence, Tuple
from typing import TextIO

import numpy as np

from qterm import __program__, __version__
from qterm.data import MyEnum
from qterm.config import Settings
from qterm.subspaces import Subspace, SubspaceUnion, Diagnostics
from qterm.program import ScheduleFragment
from qterm.reachability import ReachableTrace
from qterm.divergence import DivergenceResult
from qterm.termination import Verdict, SimulationStep
from qterm.matrix import encode_matrix, encode_vector

REPORT_FORMAT_VERSION = 1

_EXACT = [
    (1.0, "1"),
    (1 / np.sqrt(2), "1/√2"),
    (1 / np.sqrt(3), "1/√3"),
    (1 / np.sqrt(6), "1/√6"),
    (2 / np.sqrt(6), "2/√6"),
]


class ReportFormat(MyEnum):
    text = 1
    json = 2


def format_real(x: float, atol: float = 1e-9) -> str:
    """ A real number, spelled exactly if it is one of the common
    normalisation constants.
    """

    if abs(x) <= atol:
        return "0"

    sign = "-" if x < 0 else ""
    for value, name in _EXACT:
        if abs(abs(x) - value) <= atol:
            return sign + name
    return f"{x:.6g}"


def format_complex(z: complex, atol: float = 1e-9) -> str:
    if abs(z.imag) <= atol:
        return format_real(z.real, atol)
    elif abs(z.real) <= atol:
        return format_real(z.imag, atol) + "i"

    im = format_real(abs(z.imag), atol)
    op = "-" if z.imag < 0 else "+"
    return f"({format_real(z.real, atol)}{op}{im}i)"


def format_ket(vector: np.ndarray, atol: float = 1e-9) -> str:
    """ e.g. "1/√2|1> - 1/√2|3>". """

    terms: List[str] = []
    for i, z in enumerate(np.asarray(vector).reshape(-1)):
        if abs(z) <= atol:
            continue

        coef = format_complex(complex(z), atol)
        negative = coef.startswith("-")
        if negative:
            coef = coef[1:]

        coef = "" if coef == "1" else coef
        if len(terms) == 0:
            terms.append(("-" if negative else "") + f"{coef}|{i}>")
        else:
            terms.append(("- " if negative else "+ ") + f"{coef}|{i}>")

    if len(terms) == 0:
        return "0"
    return " ".join(terms)


def subspace_json(s: Subspace) -> Dict[str, Any]:
    return {"dim": s.dim, "basis": encode_matrix(s.basis)}


def union_json(
    u: SubspaceUnion,
    labels: Optional[Sequence[ScheduleFragment]] = None,
) -> List[Dict[str, Any]]:
    out = []
    for i, component in enumerate(u):
        doc = subspace_json(component)
        if labels is not None:
            doc["fragment"] = str(labels[i])
        out.append(doc)
    return out


def verdict_json(verdict: Verdict) -> Dict[str, Any]:
    return {
        "terminating": verdict.terminating,
        "reachable": subspace_json(verdict.reachable),
        "pd": union_json(verdict.pd, verdict.pd_labels),
        "intersection": union_json(verdict.intersection),
        "witness_vector": (
            None
            if verdict.witness_vector is None
            else encode_vector(verdict.witness_vector)
        ),
        "witness_schedule": (
            None
            if verdict.witness_schedule is None
            else str(verdict.witness_schedule)
        ),
        "witness_probability": verdict.witness_probability,
        "iterations": verdict.iterations,
        "fragile_containments": verdict.diagnostics.as_serializable(),
    }


def reachable_json(
    trace: ReachableTrace,
    fixpoint_steps: Optional[int] = None,
) -> Dict[str, Any]:
    return {
        "reachable": subspace_json(trace.space),
        "insertions": [list(p) for p in trace.insertions],
        "residual_computations": trace.residual_computations,
        "fixpoint_steps": fixpoint_steps,
    }


def divergence_json(result: DivergenceResult) -> Dict[str, Any]:
    return {
        "pd": union_json(result.pd, result.fragment_labels),
        "iterations": result.iterations,
        "converged": result.converged,
        "fragile_containments": result.diagnostics.as_serializable(),
    }


def simulation_json(
    schedule: str,
    steps: Sequence[SimulationStep],
    bound: Optional[Tuple[int, float]] = None,
) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "schedule": schedule,
        "steps": [s._asdict() for s in steps],
        "termination_probability": steps[-1].cumulative,
    }

    if bound is not None:
        doc["infimum_lower_bound"] = {
            "length": bound[0],
            "probability": bound[1],
        }
    return doc


def report_document(
    command: str,
    settings: Settings,
    wall_time: float,
    payload: Dict[str, Any],
) -> Dict[str, Any]:
    """ Wrap a payload with the tool metadata. """

    doc: Dict[str, Any] = {
        "format_version": REPORT_FORMAT_VERSION,
        "tool": {"program": __program__, "version": __version__},
        "command": command,
        "tolerance": settings.tolerance._asdict(),
        "settings": settings.as_serializable(),
        "wall_time_seconds": wall_time,
    }
    doc.update(payload)
    return doc


def _subspace_lines(s: Subspace, indent: str = "  ") -> List[str]:
    return [f"{indent}{format_ket(s.basis[:, j])}" for j in range(s.dim)]


def _union_lines(
    u: SubspaceUnion,
    labels: Optional[Sequence[ScheduleFragment]] = None,
) -> List[str]:
    if len(u) == 0:
        return ["  {0}"]

    lines = []
    for i, component in enumerate(u):
        if labels is None:
            name = f"component {i + 1}"
        else:
            name = f"PD_{labels[i] if len(labels[i]) > 0 else 'ε'}"
        lines.append(f"  {name} (dim {component.dim}):")
        lines.extend(_subspace_lines(component, "    "))
    return lines


def _diagnostics_lines(diagnostics: Diagnostics) -> List[str]:
    if not diagnostics.fragile:
        return []
    return [
        f"Warning: {len(diagnostics)} containment decisions were within a "
        "factor of 10 of the tolerance."
    ]


def verdict_text(verdict: Verdict) -> List[str]:
    lines = [
        "Verdict: "
        + ("terminating" if verdict.terminating else "not terminating"),
        f"Reachable space (dim {verdict.reachable.dim}):",
    ]
    lines.extend(_subspace_lines(verdict.reachable))

    lines.append(
        f"Diverging pure states ({len(verdict.pd)} components, "
        f"{verdict.iterations} iterations):"
    )
    lines.extend(_union_lines(verdict.pd, verdict.pd_labels))
    lines.append("Intersection:")
    lines.extend(_union_lines(verdict.intersection))

    if verdict.witness_vector is not None:
        lines.append(f"Witness vector: {format_ket(verdict.witness_vector)}")
        lines.append(f"Witness schedule: {verdict.witness_schedule}")
        lines.append(
            "Witness termination probability: "
            f"{verdict.witness_probability:.3e}"
        )

    lines.extend(_diagnostics_lines(verdict.diagnostics))
    return lines


def reachable_text(
    trace: ReachableTrace,
    fixpoint_steps: Optional[int] = None,
) -> List[str]:
    lines = [f"Reachable space (dim {trace.space.dim}):"]
    lines.extend(_subspace_lines(trace.space))
    lines.append(f"Residual computations: {trace.residual_computations}")
    if fixpoint_steps is not None:
        lines.append(
            f"Fixpoint iteration stabilised after {fixpoint_steps} steps."
        )
    return lines


def divergence_text(result: DivergenceResult) -> List[str]:
    lines = [
        f"Diverging pure states ({len(result.pd)} components, "
        f"{result.iterations} iterations):"
    ]
    lines.extend(_union_lines(result.pd, result.fragment_labels))
    lines.extend(_diagnostics_lines(result.diagnostics))
    return lines


def simulation_text(
    schedule: str,
    steps: Sequence[SimulationStep],
    bound: Optional[Tuple[int, float]] = None,
) -> List[str]:
    lines = [f"Schedule: {schedule}", "step\ttrace\tcumulative"]
    lines.extend(
        f"{s.step}\t{s.trace:.12g}\t{s.cumulative:.12g}"
        for s
        in steps
    )

    if bound is not None:
        lines.append(
            f"No fragment of length {bound[0]} halts with probability "
            f"below {bound[1]:.12g}."
        )
    return lines


def write_report(
    handle: TextIO,
    document: Dict[str, Any],
    lines: Sequence[str],
    format: ReportFormat,
) -> None:
    if format is ReportFormat.json:
        json.dump(document, handle, indent=2)
        handle.write("\n")
    else:
        for line in lines:
            print(line, file=handle)
    return
