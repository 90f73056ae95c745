"""Stack configuration files, result serialization and sweep tables.

A stack file is UTF-8 JSON::

    {"unit_label": "nm",
     "plates": [{"position": 0, "ideal": "perfect_e"},
                {"position": 1, "lambda_e": 2.5, "lambda_g": 0}]}

``unit_label`` is an annotation only; no unit conversion is done.
Numbers are written with 17 significant digits, so every double survives a
write/read cycle unchanged.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

import numpy as np

from .errors import InvalidInput, ParseError, ValidationError
from .optics import Plate, PlateKind
from .quadrature import EnergyResult, Path, PressureResult, energy_per_area, gap_pressure
from .scattering import Stack

__all__ = [
    "StackConfig",
    "SweepRequest",
    "SweepRow",
    "parse_stack",
    "dump_stack",
    "emit_result",
    "parse_result",
    "emit_sweep",
    "parse_sweep",
    "run_sweep",
    "SIGN_CONVENTION",
    "encode_json",
    "to_jsonable",
]

SIGN_CONVENTION = "+ = pushed toward larger z"

_IDEAL_KINDS = {"perfect_e": PlateKind.PERFECT_E, "perfect_m": PlateKind.PERFECT_M}
_PLATE_KEYS = {"position", "lambda_e", "lambda_g", "ideal"}
_TOP_KEYS = {"unit_label", "plates"}


@dataclass(frozen=True)
class StackConfig:
    """Validated contents of a stack file."""

    unit_label: str
    plates: tuple

    def to_stack(self) -> Stack:
        return Stack(self.plates)


@dataclass(frozen=True)
class SweepRequest:
    """Vary one gap over ``[start, stop]`` at ``points`` values.

    ``gap_index`` names the gap between plates i and i+1 and may be given
    as ``i`` or as the pair ``(i, i + 1)``.
    """

    gap_index: Any
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        index = self.gap_index
        if isinstance(index, (tuple, list)):
            if len(index) != 2 or index[1] != index[0] + 1:
                raise InvalidInput(f"gap must join adjacent plates (i, i+1), got {tuple(index)!r}")
            index = index[0]
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or index < 1:
            raise InvalidInput(f"gap index must be a positive integer, got {self.gap_index!r}")
        object.__setattr__(self, "gap_index", (int(index), int(index) + 1))
        if not (math.isfinite(self.start) and self.start > 0):
            raise InvalidInput("sweep start must be a positive length")
        if not (math.isfinite(self.stop) and self.stop > self.start):
            raise InvalidInput("sweep stop must exceed start")
        if isinstance(self.points, bool) or int(self.points) != self.points or self.points < 2:
            raise InvalidInput("a sweep needs at least two points")
        if self.scale not in ("linear", "log"):
            raise InvalidInput(f"unknown sweep scale {self.scale!r}")

    @property
    def gap(self) -> int:
        """Index i of the swept gap (between plates i and i+1)."""
        return self.gap_index[0]

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, int(self.points))
        return np.linspace(self.start, self.stop, int(self.points))


@dataclass(frozen=True)
class SweepRow:
    gap: float
    energy_per_area: float
    pressure: float
    error_estimate: float


# --- parsing ---------------------------------------------------------------

def _reject_constant(name):
    raise ValueError(f"non-finite literal {name}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError("not_a_number", f"{where} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError("not_finite", f"{where} must be finite")
    return value


def _parse_plate(entry, k: int) -> Plate:
    where = f"plates[{k}]"
    if not isinstance(entry, dict):
        raise ValidationError("plate_not_object", f"{where} must be an object")
    extra = set(entry) - _PLATE_KEYS
    if extra:
        raise ValidationError("unknown_field", f"{where} has unknown field(s) {sorted(extra)}")
    if "position" not in entry:
        raise ValidationError("missing_position", f"{where} has no position")
    position = _number(entry["position"], f"{where}.position")
    if "ideal" in entry:
        if "lambda_e" in entry or "lambda_g" in entry:
            raise ValidationError("mixed_plate_kind", f"{where} gives both ideal and lambda couplings")
        kind = _IDEAL_KINDS.get(entry["ideal"]) if isinstance(entry["ideal"], str) else None
        if kind is None:
            raise ValidationError(
                "unknown_ideal_kind",
                f"{where}.ideal must be one of {sorted(_IDEAL_KINDS)}, got {entry['ideal']!r}",
            )
        return Plate(position, kind)
    lam = {}
    for name in ("lambda_e", "lambda_g"):
        lam[name] = _number(entry.get(name, 0.0), f"{where}.{name}")
        if lam[name] < 0:
            raise ValidationError("negative_lambda", f"{where}.{name} must be >= 0, got {lam[name]!r}")
    return Plate.magnetodielectric(position, lam["lambda_e"], lam["lambda_g"])


def parse_stack(text: str) -> StackConfig:
    """Parse and validate a stack file.

    Raises
    ------
    ParseError
        Malformed JSON, with the line and column of the problem.
    ValidationError
        Well-formed JSON that breaks a configuration rule; ``.code`` names
        the rule.
    """
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise ValidationError("not_finite", str(exc)) from None
    if not isinstance(data, dict):
        raise ValidationError("not_object", "top level must be a JSON object")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ValidationError("unknown_field", f"unknown top-level field(s) {sorted(extra)}")
    label = data.get("unit_label", "")
    if not isinstance(label, str):
        raise ValidationError("bad_unit_label", "unit_label must be a string")
    if "plates" not in data:
        raise ValidationError("missing_plates", "no plates list")
    entries = data["plates"]
    if not isinstance(entries, list):
        raise ValidationError("plates_not_list", "plates must be a list")
    if not entries:
        raise ValidationError("no_plates", "at least one plate is required")
    plates = [_parse_plate(entry, k) for k, entry in enumerate(entries)]
    for k in range(1, len(plates)):
        prev, cur = plates[k - 1].position, plates[k].position
        if cur == prev:
            raise ValidationError("duplicate_position", f"plates[{k - 1}] and plates[{k}] share position {cur!r}")
        if cur < prev:
            raise ValidationError(
                "unsorted_positions",
                f"plates[{k}] at {cur!r} comes after plates[{k - 1}] at {prev!r}; list plates in increasing z",
            )
    return StackConfig(label, tuple(plates))


def _plate_record(plate: Plate) -> dict:
    if plate.is_ideal:
        return {"position": plate.position, "ideal": plate.kind.value}
    return {"position": plate.position, "lambda_e": plate.lambda_e, "lambda_g": plate.lambda_g}


def dump_stack(config: StackConfig | Stack, unit_label: str = "") -> str:
    """Inverse of :func:`parse_stack`."""
    if isinstance(config, Stack):
        config = StackConfig(unit_label, config.plates)
    return encode_json({"unit_label": config.unit_label, "plates": [_plate_record(p) for p in config.plates]}) + "\n"


# --- results ---------------------------------------------------------------

def _fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def encode_json(obj, indent: int = 0) -> str:
    """JSON text with every float at 17 significant digits."""
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {encode_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + encode_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, Enum):
        return json.dumps(obj.value)
    return json.dumps(str(obj))


def _result_record(result, inputs: dict | None) -> dict:
    record = {
        "value": float(result.value),
        "error_estimate": float(result.error_estimate),
        "evaluations": int(result.evaluations),
        "path": result.path.value,
    }
    if isinstance(result, PressureResult):
        record = {"quantity": "pressure", **record, "method": result.method, "sign_convention": SIGN_CONVENTION}
    else:
        record = {"quantity": "energy_per_area", **record}
    record["inputs"] = to_jsonable(inputs or {})
    return record


def to_jsonable(value):
    if isinstance(value, Stack):
        return [_plate_record(p) for p in value.plates]
    if isinstance(value, StackConfig):
        return {"unit_label": value.unit_label, "plates": [_plate_record(p) for p in value.plates]}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    return value


def emit_result(result: EnergyResult | PressureResult, format: str = "json", inputs: dict | None = None) -> str:
    """Render a result as JSON (with an input echo) or as a one-row CSV."""
    if format == "json":
        return encode_json(_result_record(result, inputs)) + "\n"
    if format == "csv":
        header = ["quantity", "value", "error_estimate", "evaluations", "path"]
        record = _result_record(result, None)
        row = [record["quantity"], _fmt(record["value"]), _fmt(record["error_estimate"]),
               str(record["evaluations"]), record["path"]]
        return ",".join(header) + "\n" + ",".join(row) + "\n"
    raise InvalidInput(f"unknown format {format!r}")


def parse_result(text: str):
    """Read back JSON written by :func:`emit_result`.

    Returns
    -------
    (result, inputs)
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    try:
        common = dict(
            value=float(data["value"]),
            error_estimate=float(data["error_estimate"]),
            evaluations=int(data["evaluations"]),
            path=Path(data["path"]),
        )
        if data.get("quantity") == "pressure":
            result = PressureResult(**common, method=data["method"])
        else:
            result = EnergyResult(**common)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"not a result record: {exc}") from None
    return result, data.get("inputs", {})


def emit_sweep(rows: Iterable[SweepRow]) -> str:
    """CSV with header ``gap,energy_per_area,pressure,error_estimate``, LF endings."""
    lines = ["gap,energy_per_area,pressure,error_estimate"]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in (row.gap, row.energy_per_area, row.pressure, row.error_estimate)))
    return "\n".join(lines) + "\n"


def parse_sweep(text: str) -> list[SweepRow]:
    lines = text.strip("\n").split("\n")
    if not lines or lines[0] != "gap,energy_per_area,pressure,error_estimate":
        raise ParseError("missing sweep header", 1, 1)
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError("expected 4 columns", k, 1)
        rows.append(SweepRow(*(float(p) for p in parts)))
    return rows


def run_sweep(stack: Stack, request: SweepRequest, spec=None) -> list[SweepRow]:
    """Energy and gap pressure (-∂E/∂gap) at each gap value of the sweep.

    Plates to the right of the swept gap move rigidly.
    """
    i = request.gap
    if not 1 <= i < stack.n:
        raise InvalidInput(f"gap ({i}, {i + 1}) does not exist in a {stack.n}-plate stack")
    rows = []
    for gap in request.values():
        moved = stack.with_gap(i, float(gap))
        energy = energy_per_area(moved, spec)
        pressure = gap_pressure(moved, i, spec)
        rows.append(SweepRow(float(gap), energy.value, pressure.value, energy.error_estimate))
    return rows
