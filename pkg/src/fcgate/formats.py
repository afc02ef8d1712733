"""JSON file formats: circuits, truth tables, gate operands and angles."""

from __future__ import annotations

import json
import math
import re
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from . import linalg
from .errors import CircuitError, FcgError, PredicateError, SchemaError, ValidationError
from .gates import ConditionalSpec, FcgSpec, parse_gate_expr
from .linalg import ComplexMatrix
from .predicate import TruthTable, compile_truth_table
from .simulator import Circuit, GateStep, PhaseOracleStep, SimState

CIRCUIT_VERSION = 1

_MATRIX = {
    "type": "object",
    "required": ["rows", "cols", "entries"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
    },
}
_OPERAND = {"oneOf": [{"type": "string"}, _MATRIX]}
_TABLE = {
    "oneOf": [
        {"type": "array", "items": {"enum": [0, 1]}},
        {"type": "object", "required": ["hex"], "properties": {"hex": {"type": "string"}}},
    ]
}
_CONTROL = {"oneOf": [{"required": ["pred"]}, {"required": ["table"]}]}

CIRCUIT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["version", "n", "m", "steps"],
    "properties": {
        "version": {"const": CIRCUIT_VERSION},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "description": {"type": "string"},
        "initial": {
            "oneOf": [
                {"type": "object", "required": ["basis"], "properties": {"basis": {"type": "integer", "minimum": 0}}},
                {"type": "object", "required": ["amplitudes"], "properties": {"amplitudes": _MATRIX["properties"]["entries"]}},
            ]
        },
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["op"],
                "oneOf": [
                    {
                        "properties": {
                            "op": {"const": "gate"},
                            "name": {"type": "string"},
                            "matrix": _MATRIX,
                            "qubits": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                        },
                        "required": ["qubits"],
                        "anyOf": [{"required": ["name"]}, {"required": ["matrix"]}],
                    },
                    {
                        "properties": {"op": {"const": "fcg"}, "pred": {"type": "string"}, "table": _TABLE, "u": _OPERAND},
                        "required": ["u"],
                        **_CONTROL,
                    },
                    {
                        "properties": {
                            "op": {"const": "conditional"},
                            "pred": {"type": "string"},
                            "table": _TABLE,
                            "then": _OPERAND,
                            "else": _OPERAND,
                        },
                        "required": ["then", "else"],
                        **_CONTROL,
                    },
                    {
                        "properties": {
                            "op": {"const": "phase_oracle"},
                            "pred": {"type": "string"},
                            "table": _TABLE,
                            "phase": {"type": ["string", "number"]},
                        },
                        **_CONTROL,
                    },
                ],
            },
        },
    },
}

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?P<coef>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$",
    re.IGNORECASE,
)


def parse_angle(text: str | float) -> float:
    """Radians from ``"pi"``, ``"pi/2"``, ``"-3pi/4"``, ``"2*pi"`` or a decimal number."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _ANGLE_RE.match(text)
    if m:
        value = math.pi * float(m.group("coef") or 1.0)
        if m.group("den"):
            den = float(m.group("den"))
            if den == 0:
                raise ValidationError(f"zero denominator in angle {text!r}")
            value /= den
        return -value if m.group("sign") == "-" else value
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"cannot read angle {text!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"angle must be finite, got {text!r}")
    return value


def resolve_operand(value: str | dict) -> ComplexMatrix:
    if isinstance(value, str):
        return parse_gate_expr(value)
    return linalg.matrix_from_dict(value)


def resolve_table(step: dict, n: int) -> TruthTable:
    if "pred" in step:
        return compile_truth_table(step["pred"], n)
    table = step["table"]
    if isinstance(table, dict):
        if "hex" in table:
            return TruthTable.from_hex(n, table["hex"])
        return TruthTable.from_dict(table)
    return TruthTable(n, table)


def load_table_file(text: str, n: int | None = None) -> TruthTable:
    """Read ``{"n": .., "bits": [..]}`` or ``{"n": .., "hex": ".."}``."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"truth table file is not JSON: {exc}") from exc
    if not isinstance(d, dict) or "n" not in d:
        raise SchemaError("truth table file needs an object with 'n' and 'bits' or 'hex'")
    table = TruthTable.from_hex(int(d["n"]), d["hex"]) if "hex" in d else TruthTable.from_dict(d)
    if n is not None and table.n != n:
        raise ValidationError(f"truth table has width {table.n}, expected n={n}")
    return table


def circuit_from_dict(d: dict) -> tuple[Circuit, SimState | None]:
    """Validate a circuit document and build the circuit plus its optional initial state."""
    try:
        jsonschema.validate(d, CIRCUIT_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"circuit schema violation at {where}: {exc.message}") from None
    n, m = d["n"], d["m"]
    steps = []
    for i, raw in enumerate(d["steps"]):
        try:
            steps.append(_build_step(raw, n, m))
        except PredicateError:
            raise
        except FcgError as exc:
            raise CircuitError(i, str(exc)) from exc
    initial = None
    if "initial" in d:
        init = d["initial"]
        if "basis" in init:
            initial = basis_state(n, m, init["basis"])
        else:
            amps = np.array([complex(re, im) for re, im in init["amplitudes"]], dtype=np.complex128)
            initial = SimState(n, m, amps)
    return Circuit(n, m, tuple(steps)), initial


def _build_step(raw: dict, n: int, m: int):
    op = raw["op"]
    if op == "gate":
        matrix = linalg.matrix_from_dict(raw["matrix"]) if "matrix" in raw else None
        step = GateStep(raw.get("name", "custom"), tuple(raw["qubits"]), matrix)
        step.resolve()
        return step
    if op == "fcg":
        return FcgSpec(n, m, resolve_table(raw, n), resolve_operand(raw["u"]))
    if op == "conditional":
        return ConditionalSpec(n, m, resolve_table(raw, n),
                               resolve_operand(raw["then"]), resolve_operand(raw["else"]))
    return PhaseOracleStep(resolve_table(raw, n), parse_angle(raw.get("phase", "pi")))


def basis_state(n: int, m: int, index: int) -> SimState:
    """Computational basis state with flat index ``index`` (control bits then target bits)."""
    if not 0 <= index < 2 ** (n + m):
        raise ValidationError(f"basis index {index} out of range for {n + m} qubits")
    v = np.zeros(2 ** (n + m), dtype=np.complex128)
    v[index] = 1.0
    return SimState(n, m, v)


def load_circuit(text: str) -> tuple[Circuit, SimState | None]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"circuit file is not JSON: {exc}") from exc
    return circuit_from_dict(d)


def bundled_circuit(name: str) -> str:
    """Text of a circuit shipped with the package (``bell_cnot``, ``or_gate``, ...)."""
    return resources.files("fcgate").joinpath("circuits", f"{name}.json").read_text()
